"""Isotropic linear Cosserat constitutive laws in 2D and 3D.

The strain carried around by the solver is the full displacement gradient
plus the rotation coupling, kept as an unsymmetrized d x d tensor; the
curvature is the rotation gradient (a 2-vector in 2D where the rotation is
the scalar out-of-plane component, a 3x3 tensor in 3D).  Law matrices act
on row-major flattened tensors so the assembly can stay dimension-generic.

2D law (G shear modulus, nu Poisson ratio, a the couple ratio G_c/G,
l the intrinsic length):

    sigma_xx = G(fa exx + fb eyy)           fa = 2(1-nu)/(1-2nu)
    sigma_yy = G(fb exx + fa eyy)           fb = 2nu/(1-2nu)
    sigma_xy = G((1+a) exy + (1-a) eyx)
    sigma_yx = G((1-a) exy + (1+a) eyx)
    mu = 4 G l^2 kappa

3D law (bulk K, shear G, couple modulus G_c; curvature moduli L, M, M_c):

    sigma = K tr(e) 1 + 2G (sym(e) - tr(e)/3 1) + 2G_c skew(e)
    mu    = L tr(k) 1 + 2M (sym(k) - tr(k)/3 1) + 2M_c skew(k)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CosseratMaterial2D",
    "CosseratMaterial3D",
    "cosserat_strain",
    "skew_contraction",
    "stress_2d",
    "couple_2d",
    "stress_3d",
    "couple_3d",
    "characteristic_length",
    "young_modulus",
]

# 2D rotation coupling: (eps * phi)_ij added to the displacement gradient.
EPS2 = np.array([[0.0, 1.0], [-1.0, 0.0]])

# 3D Levi-Civita tensor, (eps . phi)_ij = LEVI3[i, j, k] phi_k.
LEVI3 = np.zeros((3, 3, 3))
for _i, _j, _k, _s in [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0),
                       (0, 2, 1, -1.0), (2, 1, 0, -1.0), (1, 0, 2, -1.0)]:
    LEVI3[_i, _j, _k] = _s


def _iso_matrix(c_tr: float, c_sym: float, c_skew: float) -> np.ndarray:
    """9x9 law  A_{ijkl} = c_tr d_ij d_kl + c_sym d_ik d_jl + c_skew d_il d_jk."""
    eye = np.eye(3)
    t = (c_tr * np.einsum("ij,kl->ijkl", eye, eye)
         + c_sym * np.einsum("ik,jl->ijkl", eye, eye)
         + c_skew * np.einsum("il,jk->ijkl", eye, eye))
    return t.reshape(9, 9)


@dataclass(frozen=True)
class CosseratMaterial2D:
    """Plane Cosserat material with scalar micro-rotation.

    Args:
        shear: shear modulus G.
        poisson: Poisson ratio nu (< 0.5).
        couple_ratio: a = G_c / G.
        length: intrinsic length l.
        density: mass density (dynamics only).
        inertia: rotational micro-inertia I (dynamics only).
    """

    shear: float
    poisson: float
    couple_ratio: float
    length: float
    density: float = 0.0
    inertia: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.poisson < 0.5:
            raise ValueError("poisson ratio must lie in [0, 0.5)")
        if self.shear <= 0.0 or self.couple_ratio < 0.0 or self.length < 0.0:
            raise ValueError("moduli must be positive")

    @property
    def dim(self) -> int:
        return 2

    @property
    def rdim(self) -> int:
        return 1

    @property
    def stress_matrix(self) -> np.ndarray:
        """4x4 law on row-major flattened strain (xx, xy, yx, yy)."""
        G, nu, a = self.shear, self.poisson, self.couple_ratio
        fa = 2.0 * (1.0 - nu) / (1.0 - 2.0 * nu)
        fb = 2.0 * nu / (1.0 - 2.0 * nu)
        return G * np.array([
            [fa, 0.0, 0.0, fb],
            [0.0, 1.0 + a, 1.0 - a, 0.0],
            [0.0, 1.0 - a, 1.0 + a, 0.0],
            [fb, 0.0, 0.0, fa],
        ])

    @property
    def couple_matrix(self) -> np.ndarray:
        """2x2 law on the curvature vector (rotation gradient)."""
        return 4.0 * self.shear * self.length**2 * np.eye(2)

    @classmethod
    def from_lame(cls, shear, lam, couple_ratio, length, density=0.0, inertia=0.0):
        """Build from the Lame constant lambda instead of nu."""
        nu = lam / (2.0 * (lam + shear))
        return cls(shear, nu, couple_ratio, length, density, inertia)


@dataclass(frozen=True)
class CosseratMaterial3D:
    """Isotropic 3D Cosserat material with vector micro-rotation.

    Args:
        bulk: bulk modulus K.
        shear: shear modulus G.
        couple: couple modulus G_c (skew-stress stiffness).
        curv_tr, curv_sym, curv_skew: curvature moduli L, M, M_c.
        density, inertia: dynamics parameters.
    """

    bulk: float
    shear: float
    couple: float
    curv_tr: float
    curv_sym: float
    curv_skew: float
    density: float = 0.0
    inertia: float = 0.0

    def __post_init__(self):
        if min(self.bulk, self.shear) <= 0.0 or self.couple < 0.0:
            raise ValueError("moduli must be positive")

    @property
    def dim(self) -> int:
        return 3

    @property
    def rdim(self) -> int:
        return 3

    @property
    def stress_matrix(self) -> np.ndarray:
        """9x9 law on the row-major flattened strain tensor."""
        K, G, Gc = self.bulk, self.shear, self.couple
        return _iso_matrix(K - 2.0 * G / 3.0, G + Gc, G - Gc)

    @property
    def couple_matrix(self) -> np.ndarray:
        """9x9 law on the row-major flattened curvature tensor."""
        L, M, Mc = self.curv_tr, self.curv_sym, self.curv_skew
        return _iso_matrix(L - 2.0 * M / 3.0, M + Mc, M - Mc)


def cosserat_strain(grad_u: np.ndarray, phi) -> np.ndarray:
    """Strain e = grad(u) + coupling(phi), unsymmetrized.

    ``grad_u`` is (..., d, d) with Jacobian convention (du_i/dx_j in entry
    i, j); ``phi`` is scalar (2D) or (..., 3).
    """
    grad_u = np.asarray(grad_u, dtype=float)
    d = grad_u.shape[-1]
    if d == 2:
        return grad_u + np.multiply.outer(np.asarray(phi, dtype=float), EPS2)
    return grad_u + np.einsum("ijk,...k->...ij", LEVI3, np.asarray(phi, dtype=float))


def skew_contraction(sigma: np.ndarray):
    """Adjoint of the rotation coupling applied to a stress tensor.

    2D: the scalar sigma_xy - sigma_yx.  3D: the vector with components
    sigma_yz - sigma_zy, sigma_zx - sigma_xz, sigma_xy - sigma_yx.  This is
    the term the stress contributes to the rotational balance.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape[-1] == 2:
        return sigma[..., 0, 1] - sigma[..., 1, 0]
    return np.stack([
        sigma[..., 1, 2] - sigma[..., 2, 1],
        sigma[..., 2, 0] - sigma[..., 0, 2],
        sigma[..., 0, 1] - sigma[..., 1, 0],
    ], axis=-1)


def _apply_law(matrix: np.ndarray, field: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.asarray(field, dtype=float)
    batch = arr.shape[: arr.ndim - len(shape)]
    flat = arr.reshape(*batch, -1) if batch else arr.reshape(-1)
    out = flat @ matrix.T
    return out.reshape(*batch, *shape)


def stress_2d(material: CosseratMaterial2D, strain: np.ndarray) -> np.ndarray:
    """Stress from (..., 2, 2) strain tensors."""
    return _apply_law(material.stress_matrix, strain, (2, 2))


def couple_2d(material: CosseratMaterial2D, curvature: np.ndarray) -> np.ndarray:
    """Couple stress from (..., 2) curvature vectors."""
    return _apply_law(material.couple_matrix, curvature, (2,))


def stress_3d(material: CosseratMaterial3D, strain: np.ndarray) -> np.ndarray:
    """Stress from (..., 3, 3) strain tensors."""
    return _apply_law(material.stress_matrix, strain, (3, 3))


def couple_3d(material: CosseratMaterial3D, curvature: np.ndarray) -> np.ndarray:
    """Couple stress from (..., 3, 3) curvature tensors."""
    return _apply_law(material.couple_matrix, curvature, (3, 3))


def characteristic_length(material) -> float:
    """Intrinsic length sqrt(max |couple law| / max |stress law|)."""
    cc = np.abs(material.stress_matrix).max()
    dd = np.abs(material.couple_matrix).max()
    return float(np.sqrt(dd / cc))


def young_modulus(bulk: float, shear: float) -> float:
    """Young's modulus from bulk and shear moduli."""
    return 9.0 * bulk * shear / (3.0 * bulk + shear)
