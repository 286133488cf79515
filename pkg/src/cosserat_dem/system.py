"""Discrete operators and assembled forms.

Unknowns live at cell barycenters: d displacement components followed by
the micro-rotation components (one in 2D, three in 3D) per cell, in one
flat dof vector.  Everything here is assembled as scipy sparse matrices
through a small set of global operators:

* strain operator: dofs -> per-cell flattened strain tensors,
* curvature operator: dofs -> per-cell flattened rotation gradients,
* jump operator: dofs -> reconstruction jumps at interior facet
  quadrature points,
* boundary traction and facet-value operators for the weak enforcement of
  Dirichlet data.

The static system is  A = K_elas + K_pen + K_con + K_nsym  with
b = rhs_load + rhs_nsym; K_con is the consistency term (tractions tested
against facet values of the test functions) and K_nsym = -K_con^T its
adjoint, which makes the pair skew and the patch solutions exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .materials import LEVI3, characteristic_length
from .mesh import FacetPartition, Mesh, facet_classification
from .reconstruction import FacetStencils, build_facet_operator, build_gradient_operator

__all__ = [
    "DofMap",
    "BoundaryCondition",
    "DiscreteOperators",
    "build_operators",
    "facet_quadrature",
    "assemble_elastic",
    "assemble_inner_penalty",
    "assemble_nitsche",
    "assemble_mass",
    "assemble_damping",
    "assemble_load",
    "compose_system",
    "interpolate_cellwise",
    "export_matrix_market",
    "export_vector",
]


@dataclass(frozen=True)
class DofMap:
    """Layout of the flat dof vector: per cell, d then rdim components."""

    dim: int
    rdim: int
    num_cells: int

    @property
    def block(self) -> int:
        return self.dim + self.rdim

    @property
    def size(self) -> int:
        return self.num_cells * self.block

    def u_dofs(self, c: int) -> np.ndarray:
        return np.arange(c * self.block, c * self.block + self.dim)

    def phi_dofs(self, c: int) -> np.ndarray:
        return np.arange(c * self.block + self.dim, (c + 1) * self.block)

    def split(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """View dof vector as (num_cells, d) displacements and rotations."""
        blk = q.reshape(self.num_cells, self.block)
        u = blk[:, : self.dim]
        phi = blk[:, self.dim :]
        return u, (phi[:, 0] if self.rdim == 1 else phi)


@dataclass
class BoundaryCondition:
    """Boundary data for one tag.

    Dirichlet data is enforced weakly; each of ``u`` and ``phi`` may be
    constrained independently, and ``u_components`` selects which
    displacement components are pinned ("all", "normal" for the local
    facet normal direction, or a tuple of component indices).  Components
    left unconstrained behave as traction-free unless Neumann data is
    given on a purely Neumann tag.

    Args:
        u: callable x -> (d,) displacement data, or None.
        phi: callable x -> rotation data (scalar in 2D, (3,) in 3D), or None.
        u_components: constrained displacement components.
        phi_components: constrained rotation components ("all" or tuple).
        traction: callable x -> (d,) surface traction (Neumann tags).
        couple: callable x -> surface couple (Neumann tags).
    """

    u: object | None = None
    phi: object | None = None
    u_components: object = "all"
    phi_components: object = "all"
    traction: object | None = None
    couple: object | None = None

    @property
    def is_dirichlet(self) -> bool:
        return self.u is not None or self.phi is not None

    def __post_init__(self):
        if self.is_dirichlet and (self.traction is not None or self.couple is not None):
            raise ValueError("a tag cannot carry both Dirichlet and Neumann data")


@dataclass
class DiscreteOperators:
    """Reusable global operators for one mesh/material pair."""

    mesh: Mesh
    material: object
    dofmap: DofMap
    stencils: FacetStencils
    grad: sp.csr_matrix      # (num_cells*d, num_cells) scalar gradients
    strain: sp.csr_matrix    # (num_cells*d*d, ndof)
    curvature: sp.csr_matrix # (num_cells*rdim*d, ndof)
    stress: sp.csr_matrix    # law applied to strain rows
    couple: sp.csr_matrix    # law applied to curvature rows


def _expand_components(mat: sp.spmatrix, ncomp: int, blk: int, offset: int, ndof: int) -> sp.csr_matrix:
    """Turn a scalar-field operator into one acting per component.

    Row r of ``mat`` becomes rows r*ncomp + i, and column c becomes the dof
    column c*blk + offset + i, for each component i.
    """
    coo = mat.tocoo()
    comp = np.arange(ncomp)
    rows = (coo.row[:, None] * ncomp + comp[None, :]).ravel()
    cols = (coo.col[:, None] * blk + offset + comp[None, :]).ravel()
    vals = np.repeat(coo.data, ncomp)
    return sp.csr_matrix((vals, (rows, cols)), shape=(mat.shape[0] * ncomp, ndof))


def build_operators(mesh: Mesh, material, stencils: FacetStencils | None = None) -> DiscreteOperators:
    """Assemble the strain/curvature/stress operators for a mesh."""
    d = mesh.dim
    if material.dim != d:
        raise ValueError(f"material is {material.dim}D but mesh is {d}D")
    r = material.rdim
    dofmap = DofMap(d, r, mesh.num_cells)
    if stencils is None:
        stencils = build_facet_operator(mesh)
    grad = build_gradient_operator(mesh, stencils)

    gcoo = grad.tocoo()
    cells = gcoo.row // d
    jcomp = gcoo.row % d
    blk, ndof, d2 = dofmap.block, dofmap.size, d * d

    rows, cols, vals = [], [], []
    for i in range(d):
        rows.append(cells * d2 + i * d + jcomp)
        cols.append(gcoo.col * blk + i)
        vals.append(gcoo.data)
    # rotation coupling: strain picks up +/- phi on the off-diagonal slots
    call = np.arange(mesh.num_cells)
    if d == 2:
        for (i, j, k, s) in [(0, 1, 0, 1.0), (1, 0, 0, -1.0)]:
            rows.append(call * d2 + i * d + j)
            cols.append(call * blk + d + k)
            vals.append(np.full(mesh.num_cells, s))
    else:
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    s = LEVI3[i, j, k]
                    if s != 0.0:
                        rows.append(call * d2 + i * d + j)
                        cols.append(call * blk + d + k)
                        vals.append(np.full(mesh.num_cells, s))
    strain = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(mesh.num_cells * d2, ndof),
    )

    rows, cols, vals = [], [], []
    for k in range(r):
        rows.append(cells * (r * d) + k * d + jcomp)
        cols.append(gcoo.col * blk + d + k)
        vals.append(gcoo.data)
    curvature = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(mesh.num_cells * r * d, ndof),
    )

    eye = sp.identity(mesh.num_cells, format="csr")
    stress = (sp.kron(eye, material.stress_matrix) @ strain).tocsr()
    couple = (sp.kron(eye, material.couple_matrix) @ curvature).tocsr()
    return DiscreteOperators(
        mesh=mesh, material=material, dofmap=dofmap, stencils=stencils,
        grad=grad, strain=strain, curvature=curvature, stress=stress, couple=couple,
    )


def facet_quadrature(mesh: Mesh, fi: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature exact for quadratics on a facet; weights sum to |F|."""
    pts = mesh.vertices[list(mesh.facet_vertices[fi])]
    if mesh.dim == 2:
        mid = 0.5 * (pts[0] + pts[1])
        off = (pts[1] - pts[0]) / (2.0 * np.sqrt(3.0))
        w = 0.5 * mesh.facet_measure[fi]
        return np.array([mid - off, mid + off]), np.array([w, w])
    if len(pts) != 3:
        raise NotImplementedError("3D facet quadrature implemented for triangles")
    qp = np.array([
        0.5 * (pts[0] + pts[1]),
        0.5 * (pts[1] + pts[2]),
        0.5 * (pts[2] + pts[0]),
    ])
    w = mesh.facet_measure[fi] / 3.0
    return qp, np.full(3, w)


def _block_diag_bsr(blocks: np.ndarray) -> sp.bsr_matrix:
    n, bs, _ = blocks.shape
    return sp.bsr_matrix(
        (blocks, np.arange(n), np.arange(n + 1)),
        shape=(n * bs, n * bs),
    )


def assemble_elastic(ops: DiscreteOperators) -> sp.csr_matrix:
    """Cellwise elastic energy form: symmetric positive semi-definite."""
    mesh, mat = ops.mesh, ops.material
    meas = sp.diags(mesh.cell_measure)
    wC = sp.kron(meas, mat.stress_matrix)
    wD = sp.kron(meas, mat.couple_matrix)
    K = ops.strain.T @ wC @ ops.strain + ops.curvature.T @ wD @ ops.curvature
    return K.tocsr()


def _normal_law_block(law: np.ndarray, m: int, d: int, normals: np.ndarray) -> np.ndarray:
    """Blocks B_{ik} = law[(i,j),(k,l)] n_j n_l for an array of normals."""
    t = law.reshape(m, d, m, d)
    return np.einsum("ijkl,qj,ql->qik", t, normals, normals)


def assemble_inner_penalty(ops: DiscreteOperators) -> sp.csr_matrix:
    """Stabilization penalizing reconstruction jumps across interior facets.

    For each interior facet the jump of the cellwise affine reconstruction
    is integrated with a quadratic-exact rule, weighted by the law
    contracted twice with the facet normal and scaled by 1/h_F.
    """
    mesh, mat, dofmap = ops.mesh, ops.material, ops.dofmap
    d, r, blk, ndof = mesh.dim, mat.rdim, ops.dofmap.block, ops.dofmap.size
    interior = mesh.interior_facets
    nfi = len(interior)
    if nfi == 0:
        return sp.csr_matrix((ndof, ndof))
    nq = 2 if d == 2 else 3

    cneg = mesh.facet_cells[interior, 0]
    cpos = mesh.facet_cells[interior, 1]
    qpts = np.empty((nfi, nq, d))
    for k, fi in enumerate(interior):
        qpts[k], _ = facet_quadrature(mesh, int(fi))

    rows = np.repeat(np.arange(nfi * nq), 2)
    cols = np.empty(nfi * nq * 2, dtype=int)
    cols[0::2] = np.repeat(cneg, nq)
    cols[1::2] = np.repeat(cpos, nq)
    vals = np.tile(np.array([1.0, -1.0]), nfi * nq)
    sel = sp.csr_matrix((vals, (rows, cols)), shape=(nfi * nq, mesh.num_cells))

    # offsets x_q - x_c enter through the gradient part of the reconstruction
    dxm = qpts - mesh.cell_centroid[cneg][:, None, :]
    dxp = qpts - mesh.cell_centroid[cpos][:, None, :]
    rows = np.repeat(np.arange(nfi * nq), 2 * d)
    cols = np.empty(nfi * nq * 2 * d, dtype=int)
    vals = np.empty(nfi * nq * 2 * d)
    base_m = (cneg * d)[:, None, None] + np.arange(d)[None, None, :]
    base_p = (cpos * d)[:, None, None] + np.arange(d)[None, None, :]
    block = np.concatenate(
        [np.broadcast_to(base_m, (nfi, nq, d)).reshape(nfi, nq, d),
         np.broadcast_to(base_p, (nfi, nq, d)).reshape(nfi, nq, d)], axis=2,
    )
    cols[:] = block.reshape(-1)
    vals_block = np.concatenate([dxm, -dxp], axis=2)
    vals[:] = vals_block.reshape(-1)
    xop = sp.csr_matrix((vals, (rows, cols)), shape=(nfi * nq, mesh.num_cells * d))

    jump = (sel + xop @ ops.grad).tocsr()

    wq = (mesh.facet_measure[interior] / nq) / mesh.facet_diameter[interior]
    wq = np.repeat(wq, nq)
    nrm = np.repeat(mesh.facet_normal[interior], nq, axis=0)

    ju = _expand_components(jump, d, blk, 0, ndof)
    bu = _normal_law_block(mat.stress_matrix, d, d, nrm) * wq[:, None, None]
    Kp = ju.T @ _block_diag_bsr(bu) @ ju

    jphi = _expand_components(jump, r, blk, d, ndof)
    brot = _normal_law_block(mat.couple_matrix, r, d, nrm) * wq[:, None, None]
    Kp = Kp + jphi.T @ _block_diag_bsr(brot) @ jphi
    return Kp.tocsr()


def _component_projector(spec, n: np.ndarray, m: int) -> np.ndarray:
    if spec == "all":
        return np.eye(m)
    if spec == "normal":
        return np.outer(n, n)
    proj = np.zeros((m, m))
    for c in spec:
        proj[c, c] = 1.0
    return proj


def _dirichlet_tables(mesh: Mesh, bcs: dict, partition: FacetPartition, d: int, r: int):
    """Per Dirichlet facet: cell, normal, measure, projectors and data averages."""
    fids, cells, pu, pphi, ubar, pbar = [], [], [], [], [], []
    for fi in partition.dirichlet:
        tag = mesh.boundary_tags[int(fi)]
        bc = bcs.get(tag)
        if bc is None or not bc.is_dirichlet:
            raise ValueError(f"facet tagged {tag!r} classified Dirichlet without data")
        n = mesh.facet_normal[fi]
        fids.append(int(fi))
        cells.append(mesh.facet_cell(int(fi)))
        qp, qw = facet_quadrature(mesh, int(fi))
        area = qw.sum()
        if bc.u is not None:
            pu.append(_component_projector(bc.u_components, n, d))
            vv = np.array([np.asarray(bc.u(x), dtype=float) for x in qp])
            ubar.append((qw[:, None] * vv).sum(axis=0) / area)
        else:
            pu.append(np.zeros((d, d)))
            ubar.append(np.zeros(d))
        if bc.phi is not None:
            pphi.append(_component_projector(bc.phi_components, n, r))
            vv = np.array([np.atleast_1d(np.asarray(bc.phi(x), dtype=float)) for x in qp])
            pbar.append((qw[:, None] * vv).sum(axis=0) / area)
        else:
            pphi.append(np.zeros((r, r)))
            pbar.append(np.zeros(r))
    return (np.array(fids, dtype=int), np.array(cells, dtype=int),
            np.array(pu), np.array(pphi), np.array(ubar), np.array(pbar))


def assemble_nitsche(ops: DiscreteOperators, bcs: dict, partition: FacetPartition):
    """Weak Dirichlet enforcement terms.

    Returns:
        (K_con, K_nsym, rhs): the consistency form, its negated transpose
        pairing the data against tractions of the test functions, and the
        matching right-hand side vector.
    """
    mesh, mat, dofmap = ops.mesh, ops.material, ops.dofmap
    d, r, blk, ndof = mesh.dim, mat.rdim, dofmap.block, dofmap.size
    nd = len(partition.dirichlet)
    empty = sp.csr_matrix((ndof, ndof))
    if nd == 0:
        return empty, empty, np.zeros(ndof)

    fids, cells, pu, pphi, ubar, pbar = _dirichlet_tables(mesh, bcs, partition, d, r)
    normals = mesh.facet_normal[fids]
    meas = mesh.facet_measure[fids]

    # traction operators: rows (facet, i) -> sum_j n_j * (law row of cell)
    d2 = d * d
    fr = np.arange(nd)
    rows = np.repeat(fr[:, None] * d + np.arange(d)[None, :], d).ravel()
    cols = ((cells[:, None, None] * d2) + (np.arange(d) * d)[None, :, None]
            + np.arange(d)[None, None, :]).ravel()
    vals = np.broadcast_to(normals[:, None, :], (nd, d, d)).ravel()
    nsel_u = sp.csr_matrix((vals, (rows, cols)), shape=(nd * d, mesh.num_cells * d2))
    t_sigma = (nsel_u @ ops.stress).tocsr()

    rd = r * d
    rows = np.repeat(fr[:, None] * r + np.arange(r)[None, :], d).ravel()
    cols = ((cells[:, None, None] * rd) + (np.arange(r) * d)[None, :, None]
            + np.arange(d)[None, None, :]).ravel()
    vals = np.broadcast_to(normals[:, None, :], (nd, r, d)).ravel()
    nsel_p = sp.csr_matrix((vals, (rows, cols)), shape=(nd * r, mesh.num_cells * rd))
    t_mu = (nsel_p @ ops.couple).tocsr()

    # facet values of the trial/test fields through the stencil weights
    ru, cu, vu, rp, cp, vp = [], [], [], [], [], []
    for k, fi in enumerate(fids):
        ids = ops.stencils.cells[fi]
        alpha = ops.stencils.coeffs[fi]
        for cid, a in zip(ids, alpha):
            for i in range(d):
                ru.append(k * d + i)
                cu.append(cid * blk + i)
                vu.append(a)
            for i in range(r):
                rp.append(k * r + i)
                cp.append(cid * blk + d + i)
                vp.append(a)
    r_u = sp.csr_matrix((vu, (ru, cu)), shape=(nd * d, ndof))
    r_phi = sp.csr_matrix((vp, (rp, cp)), shape=(nd * r, ndof))

    wu = _block_diag_bsr(pu * meas[:, None, None])
    wp = _block_diag_bsr(pphi * meas[:, None, None])

    k_con = -(r_u.T @ wu @ t_sigma + r_phi.T @ wp @ t_mu)
    k_nsym = (t_sigma.T @ wu @ r_u + t_mu.T @ wp @ r_phi)
    rhs = t_sigma.T @ (wu @ ubar.ravel()) + t_mu.T @ (wp @ pbar.ravel())
    return k_con.tocsr(), k_nsym.tocsr(), rhs


def assemble_mass(ops: DiscreteOperators) -> np.ndarray:
    """Diagonal mass vector: rho |c| on u dofs, rho |c| I on rotation dofs."""
    mat, mesh, dofmap = ops.material, ops.mesh, ops.dofmap
    if mat.density <= 0.0 or mat.inertia <= 0.0:
        raise ValueError("dynamics needs positive density and micro-inertia")
    m = np.empty(dofmap.size)
    cell = mat.density * mesh.cell_measure
    blkview = m.reshape(mesh.num_cells, dofmap.block)
    blkview[:, : mesh.dim] = cell[:, None]
    blkview[:, mesh.dim :] = (cell * mat.inertia)[:, None]
    return m


def assemble_damping(ops: DiscreteOperators, bcs: dict, partition: FacetPartition) -> sp.csr_matrix:
    """Boundary damping on Dirichlet facets, 4G/h_F per unit facet area.

    Penalizes velocities of the constrained components on the Dirichlet
    boundary; rotation dofs carry the extra intrinsic-length-squared factor.
    """
    mesh, mat, dofmap = ops.mesh, ops.material, ops.dofmap
    d, r, blk, ndof = mesh.dim, mat.rdim, dofmap.block, dofmap.size
    if len(partition.dirichlet) == 0:
        return sp.csr_matrix((ndof, ndof))
    G = mat.shear
    ell = mat.length if d == 2 else characteristic_length(mat)
    fids, cells, pu, pphi, _, _ = _dirichlet_tables(mesh, bcs, partition, d, r)
    rows, cols, vals = [], [], []
    for k, fi in enumerate(fids):
        fac = 4.0 * G / mesh.facet_diameter[fi] * mesh.facet_measure[fi]
        c = cells[k]
        for i in range(d):
            for j in range(d):
                if pu[k][i, j] != 0.0:
                    rows.append(c * blk + i)
                    cols.append(c * blk + j)
                    vals.append(fac * pu[k][i, j])
        for i in range(r):
            for j in range(r):
                if pphi[k][i, j] != 0.0:
                    rows.append(c * blk + d + i)
                    cols.append(c * blk + d + j)
                    vals.append(fac * ell**2 * pphi[k][i, j])
    return sp.csr_matrix((vals, (rows, cols)), shape=(ndof, ndof))


def assemble_load(ops: DiscreteOperators, body_force=None, body_couple=None,
                  neumann: list | None = None) -> np.ndarray:
    """External load vector.

    Body terms are integrated with the barycenter rule (exact for affine
    data); Neumann facet terms with the quadratic-exact facet rule, tested
    against the adjacent cell dof.

    Args:
        body_force: callable x -> (d,), or None.
        body_couple: callable x -> scalar/(3,), or None.
        neumann: list of (facet_ids, traction, couple) with callables as in
            :class:`BoundaryCondition`.
    """
    mesh, dofmap = ops.mesh, ops.dofmap
    d, r, blk = mesh.dim, dofmap.rdim, dofmap.block
    b = np.zeros(dofmap.size)
    view = b.reshape(mesh.num_cells, blk)
    if body_force is not None:
        for c in range(mesh.num_cells):
            view[c, :d] += mesh.cell_measure[c] * np.asarray(
                body_force(mesh.cell_centroid[c]), dtype=float)
    if body_couple is not None:
        for c in range(mesh.num_cells):
            view[c, d:] += mesh.cell_measure[c] * np.atleast_1d(
                np.asarray(body_couple(mesh.cell_centroid[c]), dtype=float))
    for fids, traction, couple in (neumann or []):
        for fi in fids:
            c = mesh.facet_cell(int(fi))
            qp, qw = facet_quadrature(mesh, int(fi))
            if traction is not None:
                acc = np.zeros(d)
                for x, w in zip(qp, qw):
                    acc += w * np.asarray(traction(x), dtype=float)
                view[c, :d] += acc
            if couple is not None:
                acc = np.zeros(r)
                for x, w in zip(qp, qw):
                    acc += w * np.atleast_1d(np.asarray(couple(x), dtype=float))
                view[c, d:] += acc
    return b


def compose_system(k_elas, k_pen, k_con, k_nsym, rhs_load, rhs_nsym):
    """Sum the static operator and right-hand side."""
    A = (k_elas + k_pen + k_con + k_nsym).tocsr()
    return A, rhs_load + rhs_nsym


def interpolate_cellwise(mesh: Mesh, dofmap: DofMap, u_fn=None, phi_fn=None) -> np.ndarray:
    """Dof vector sampling given fields at cell barycenters."""
    q = np.zeros(dofmap.size)
    view = q.reshape(mesh.num_cells, dofmap.block)
    for c in range(mesh.num_cells):
        x = mesh.cell_centroid[c]
        if u_fn is not None:
            view[c, : mesh.dim] = np.asarray(u_fn(x), dtype=float)
        if phi_fn is not None:
            view[c, mesh.dim :] = np.atleast_1d(np.asarray(phi_fn(x), dtype=float))
    return q


def export_matrix_market(matrix, path) -> None:
    """Write a sparse operator in MatrixMarket coordinate format."""
    from scipy.io import mmwrite

    mmwrite(str(path), sp.coo_matrix(matrix))


def export_vector(vec: np.ndarray, path) -> None:
    """Write a vector as plain text, one value per line."""
    np.savetxt(str(path), np.asarray(vec), fmt="%.17g")
