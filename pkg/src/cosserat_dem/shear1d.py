"""One-dimensional shear-layer reference solver.

A plane Cosserat medium sheared between two plates, with all fields
depending on the wall-normal coordinate y only, reduces to a two-point
boundary value problem for the tangential displacement u(y) and the
rotation phi(y):

    (1 + a) u'' + 2 a phi'        = 0
    4 l^2 phi'' - 2 a (u' + 2 phi) = 0

with Dirichlet data at y = 0 and y = h. This module solves it two
independent ways, by second-order finite differences on a fine grid and
in closed form, so the field solver can be validated against it.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = ["ShearLayerProfile", "solve_shear_layer", "shear_layer_closed_form"]


@dataclass
class ShearLayerProfile:
    """Sampled layer profile with interpolating accessors."""

    y: np.ndarray
    u: np.ndarray
    phi: np.ndarray

    def u_at(self, yq) -> np.ndarray:
        return np.interp(yq, self.y, self.u)

    def phi_at(self, yq) -> np.ndarray:
        return np.interp(yq, self.y, self.phi)


def solve_shear_layer(couple_ratio: float, length: float, height: float,
                      u_top: float, phi_top: float,
                      u_bottom: float = 0.0, phi_bottom: float = 0.0,
                      n: int = 10_000) -> ShearLayerProfile:
    """Finite-difference solve of the shear-layer two-point problem.

    Args:
        couple_ratio: a = G_c / G.
        length: intrinsic length l.
        height: layer thickness h.
        u_top, phi_top: Dirichlet data at y = h.
        u_bottom, phi_bottom: Dirichlet data at y = 0.
        n: number of grid intervals.

    Returns:
        Profile sampled on the n+1 uniform grid points.
    """
    a, ell = float(couple_ratio), float(length)
    h = height / n
    m = n - 1  # interior nodes
    y = np.linspace(0.0, height, n + 1)

    # unknown ordering: [u_1..u_{n-1}, phi_1..phi_{n-1}]
    lap = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(m, m)) / h**2
    cen = sp.diags([-1.0, 1.0], [-1, 1], shape=(m, m)) / (2.0 * h)
    eye = sp.identity(m)

    A = sp.bmat([
        [(1.0 + a) * lap, 2.0 * a * cen],
        [-2.0 * a * cen, 4.0 * ell**2 * lap - 4.0 * a * eye],
    ]).tocsc()

    b = np.zeros(2 * m)
    # boundary values folded into the stencils of the first/last rows
    b[0] -= (1.0 + a) * u_bottom / h**2 - 2.0 * a * phi_bottom / (2.0 * h)
    b[m - 1] -= (1.0 + a) * u_top / h**2 + 2.0 * a * phi_top / (2.0 * h)
    b[m] -= -2.0 * a * (-u_bottom / (2.0 * h)) + 4.0 * ell**2 * phi_bottom / h**2
    b[2 * m - 1] -= -2.0 * a * (u_top / (2.0 * h)) + 4.0 * ell**2 * phi_top / h**2

    sol = spla.spsolve(A, b)
    u = np.concatenate([[u_bottom], sol[:m], [u_top]])
    phi = np.concatenate([[phi_bottom], sol[m:], [phi_top]])
    return ShearLayerProfile(y=y, u=u, phi=phi)


def shear_layer_closed_form(couple_ratio: float, length: float, height: float,
                            u_top: float, phi_top: float,
                            u_bottom: float = 0.0, phi_bottom: float = 0.0,
                            n: int = 10_000) -> ShearLayerProfile:
    """Exact solution of the same problem.

    Eliminating u' gives phi'' = phi / delta^2 + const with the boundary
    layer width delta = l sqrt((1 + a) / a), hence hyperbolic profiles
    plus an affine part; the four constants follow from the Dirichlet
    data via a small linear solve.
    """
    a, ell = float(couple_ratio), float(length)
    if a <= 0.0:
        # no rotation coupling: plain linear shear, phi decoupled and affine
        y = np.linspace(0.0, height, n + 1)
        u = u_bottom + (u_top - u_bottom) * y / height
        phi = phi_bottom + (phi_top - phi_bottom) * y / height
        return ShearLayerProfile(y=y, u=u, phi=phi)

    delta = ell * np.sqrt((1.0 + a) / a)
    y = np.linspace(0.0, height, n + 1)

    # phi = B1 cosh(y/delta) + B2 sinh(y/delta) - C1 / 2
    # u   = C2 + (C1 (1 - a/(1+a))) y ... recovered by integrating
    # (1+a) u' = -2 a phi + C1:
    # u = C2 + (C1 + a C1)/(1+a) y ... explicit form below
    ch, sh = np.cosh(y / delta), np.sinh(y / delta)

    def u_of(B1, B2, C1, C2, yv, chv, shv):
        integral = delta * (B1 * shv + B2 * (chv - 1.0)) - 0.5 * C1 * yv
        return C2 + (C1 * yv - 2.0 * a * integral) / (1.0 + a)

    # unknowns x = (B1, B2, C1, C2); build the 4x4 system from the BCs
    M = np.zeros((4, 4))
    rhs = np.zeros(4)
    # phi(0) = B1 - C1/2
    M[0] = [1.0, 0.0, -0.5, 0.0]
    rhs[0] = phi_bottom
    # phi(h)
    chh, shh = np.cosh(height / delta), np.sinh(height / delta)
    M[1] = [chh, shh, -0.5, 0.0]
    rhs[1] = phi_top
    # u(0) = C2
    M[2] = [0.0, 0.0, 0.0, 1.0]
    rhs[2] = u_bottom
    # u(h)
    M[3] = [
        -2.0 * a * delta * shh / (1.0 + a),
        -2.0 * a * delta * (chh - 1.0) / (1.0 + a),
        (height + a * height) / (1.0 + a),
        1.0,
    ]
    rhs[3] = u_top
    B1, B2, C1, C2 = np.linalg.solve(M, rhs)

    phi = B1 * ch + B2 * sh - 0.5 * C1
    u = u_of(B1, B2, C1, C2, y, ch, sh)
    return ShearLayerProfile(y=y, u=u, phi=phi)
