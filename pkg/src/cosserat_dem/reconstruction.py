"""Facet and gradient reconstruction operators.

Every facet value is interpolated from d+1 surrounding cell dofs with
barycentric weights, so affine fields are reproduced exactly.  Cell
gradients follow from the divergence identity applied to those facet
values, and together they define a cellwise affine (nonconforming P1)
reconstruction used by the stabilization and the boundary terms.

All operators are plain scipy CSR matrices acting on per-cell scalar
arrays; vector fields reuse them componentwise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations
from math import factorial

import numpy as np
import scipy.sparse as sp

__all__ = [
    "StencilError",
    "FacetStencils",
    "select_support",
    "barycentric_coords",
    "build_facet_operator",
    "build_gradient_operator",
    "p1_eval",
    "dump_stencils_csv",
]

# A candidate simplex of cell barycenters is accepted outright once its
# volume exceeds this fraction of its spread (max pairwise distance) to
# the d-th power; flatter simplices produce huge interpolation weights,
# so they are only used as a last resort.
_QUALITY_MIN = 1e-2
# Hard degeneracy floor: below this fraction of h^d a simplex is never
# usable at all.
_VOLUME_RTOL = 1e-10
# Neighbor-of-neighbor growth rounds around a facet, plus one emergency
# round attempted only when the regular support contains no usable simplex.
_GROWTH_ROUNDS = 2
_EMERGENCY_ROUNDS = 1


class StencilError(Exception):
    """Raised when no non-degenerate support simplex exists for a facet."""


@dataclass
class FacetStencils:
    """Support cells and interpolation weights for every facet.

    Attributes:
        cells: per facet, tuple of the d+1 support cell ids.
        coeffs: per facet, barycentric weights matching ``cells``.
        matrix: (num_facets, num_cells) CSR operator mapping cell scalars
            to facet values.
        reach: max over facets of the farthest support barycenter distance,
            divided by the mesh size (the measured stencil constant).
    """

    cells: list[tuple[int, ...]]
    coeffs: list[np.ndarray]
    matrix: sp.csr_matrix
    reach: float


def barycentric_coords(points: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of ``x`` with respect to d+1 points.

    Solves sum(alpha) = 1, sum(alpha * p_i) = x.  Raises
    ``numpy.linalg.LinAlgError`` when the points are affinely dependent.
    """
    pts = np.asarray(points, dtype=float)
    d = pts.shape[1]
    mat = np.empty((d + 1, d + 1))
    mat[0, :] = 1.0
    mat[1:, :] = pts.T
    rhs = np.empty(d + 1)
    rhs[0] = 1.0
    rhs[1:] = x
    return np.linalg.solve(mat, rhs)


def _simplex_volume(pts: np.ndarray) -> float:
    d = pts.shape[1]
    return abs(float(np.linalg.det(pts[1:] - pts[0]))) / factorial(d)


def _cell_neighbors(mesh) -> list[list[int]]:
    nbrs: list[list[int]] = [[] for _ in range(mesh.num_cells)]
    for cneg, cpos in mesh.facet_cells:
        if cpos >= 0:
            nbrs[cneg].append(int(cpos))
            nbrs[cpos].append(int(cneg))
    return nbrs


def _simplex_quality(pts: np.ndarray) -> float:
    """Volume of the simplex normalized by its spread, in [0, ~0.5]."""
    spread = max(
        float(np.linalg.norm(pts[i] - pts[j]))
        for i in range(len(pts))
        for j in range(i + 1, len(pts))
    )
    if spread <= 0.0:
        return 0.0
    return _simplex_volume(pts) / spread ** (pts.shape[1])


def select_support(mesh, fi: int, neighbors=None) -> tuple[tuple[int, ...], np.ndarray]:
    """Pick d+1 support cells for facet ``fi`` and their weights.

    Cells adjacent to the facet are grown by facet-neighbor rounds, ranked
    by (distance of barycenter to the facet midpoint, cell id), and the
    first subset in lexicographic rank order whose barycenters span a
    well-shaped simplex wins.  Shape is judged scale-free (volume over
    spread^d), so graded or stretched meshes never latch onto nearly
    collinear barycenter sets; if no subset meets the shape target, the
    best-shaped one above a hard degeneracy floor is used.  One extra
    growth round is attempted before giving up.

    Returns:
        (cell ids, barycentric weights)

    Raises:
        StencilError: if no non-degenerate simplex can be found.
    """
    if neighbors is None:
        neighbors = _cell_neighbors(mesh)
    d = mesh.dim
    h = mesh.mesh_size
    vol_floor = _VOLUME_RTOL * h**d
    xf = mesh.facet_centroid[fi]

    support = {int(c) for c in mesh.facet_cells[fi] if c >= 0}

    def grow():
        extra = set()
        for c in support:
            extra.update(neighbors[c])
        support.update(extra)

    for _ in range(_GROWTH_ROUNDS):
        grow()

    for attempt in range(1 + _EMERGENCY_ROUNDS):
        if attempt > 0:
            grow()
        cand = sorted(support, key=lambda c: (float(np.linalg.norm(mesh.cell_centroid[c] - xf)), c))
        best_ids: tuple[int, ...] | None = None
        best_quality = 0.0
        if len(cand) >= d + 1:
            for subset in combinations(range(len(cand)), d + 1):
                ids = tuple(cand[k] for k in subset)
                pts = mesh.cell_centroid[list(ids)]
                if _simplex_volume(pts) <= vol_floor:
                    continue
                quality = _simplex_quality(pts)
                if quality >= _QUALITY_MIN:
                    return ids, barycentric_coords(pts, xf)
                if quality > best_quality:
                    best_ids, best_quality = ids, quality
        if best_ids is not None:
            pts = mesh.cell_centroid[list(best_ids)]
            return best_ids, barycentric_coords(pts, xf)
    raise StencilError(f"no valid support simplex for facet {fi}")


def build_facet_operator(mesh) -> FacetStencils:
    """Build the facet interpolation operator for all facets."""
    neighbors = _cell_neighbors(mesh)
    nf, nc = mesh.num_facets, mesh.num_cells
    cells: list[tuple[int, ...]] = []
    coeffs: list[np.ndarray] = []
    rows, cols, vals = [], [], []
    reach = 0.0
    h = mesh.mesh_size
    for fi in range(nf):
        ids, alpha = select_support(mesh, fi, neighbors)
        cells.append(ids)
        coeffs.append(alpha)
        xf = mesh.facet_centroid[fi]
        far = max(float(np.linalg.norm(mesh.cell_centroid[c] - xf)) for c in ids)
        reach = max(reach, far / h)
        rows.extend([fi] * len(ids))
        cols.extend(ids)
        vals.extend(alpha)
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(nf, nc))
    return FacetStencils(cells=cells, coeffs=coeffs, matrix=matrix, reach=reach)


def build_gradient_operator(mesh, stencils: FacetStencils) -> sp.csr_matrix:
    """Cell gradient operator, shape (num_cells * dim, num_cells).

    Row c*dim + j holds the j-th component of the reconstructed gradient in
    cell c: grad_c(v) = (1/|c|) sum_F |F| v_F n_{F,c}.  Applied to a scalar
    per-cell array it returns all cell gradients stacked; vector fields use
    it once per component.
    """
    d = mesh.dim
    rows, cols, vals = [], [], []
    for ci in range(mesh.num_cells):
        inv_meas = 1.0 / mesh.cell_measure[ci]
        for fi, sign in mesh.cell_facets[ci]:
            w = sign * mesh.facet_measure[fi] * inv_meas
            n = mesh.facet_normal[fi]
            for j in range(d):
                rows.append(ci * d + j)
                cols.append(fi)
                vals.append(w * n[j])
    incidence = sp.csr_matrix((vals, (rows, cols)), shape=(mesh.num_cells * d, mesh.num_facets))
    return (incidence @ stencils.matrix).tocsr()


def p1_eval(cell_values: np.ndarray, cell_gradients: np.ndarray, centroids: np.ndarray,
            ci: int, x: np.ndarray) -> np.ndarray:
    """Evaluate the cellwise affine reconstruction of a field at a point.

    Args:
        cell_values: (num_cells,) or (num_cells, m) dof values.
        cell_gradients: matching (num_cells, dim) or (num_cells, m, dim)
            reconstructed gradients.
        centroids: (num_cells, dim) cell barycenters.
        ci: cell id containing ``x``.
        x: evaluation point.
    """
    dx = np.asarray(x, dtype=float) - centroids[ci]
    return cell_values[ci] + cell_gradients[ci] @ dx


def dump_stencils_csv(stencils: FacetStencils, path) -> None:
    """Debug dump: one row per facet with support cells and weights."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["facet", "cells", "weights"])
        for fi, (ids, alpha) in enumerate(zip(stencils.cells, stencils.coeffs)):
            writer.writerow([
                fi,
                " ".join(str(c) for c in ids),
                " ".join(f"{a:.17g}" for a in alpha),
            ])
