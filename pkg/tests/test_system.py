"""Assembly invariants: exactness, symmetry, duality and load totals."""

import numpy as np
import numpy.testing as npt
import pytest
import scipy.io
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from cosserat_dem import (
    BoundaryCondition,
    DofMap,
    assemble_damping,
    assemble_elastic,
    assemble_inner_penalty,
    assemble_load,
    assemble_mass,
    assemble_nitsche,
    build_operators,
    compose_system,
    cosserat_strain,
    facet_classification,
    facet_quadrature,
    generate_rect_mesh,
    interpolate_cellwise,
    skew_contraction,
    stress_2d,
    stress_3d,
)
from conftest import affine_fields_2d, affine_fields_3d

GRAD_2D = np.array([[1.0, 0.5], [1.0, 1.0]]) / 1000.0
PHI_2D = 1.0 / 4000.0
GRAD_3D = np.array([[1.0, 0.4, -0.2], [0.3, -0.5, 0.6], [0.2, 0.1, 0.9]]) * 1e-3
PHI_3D = np.array([2.0, -1.0, 0.5]) * 1e-4


def spnorm(A):
    return spla.norm(A)


def dirichlet_everywhere(mesh, u, phi):
    tags = sorted(set(mesh.boundary_tags.values()))
    bcs = {t: BoundaryCondition(u=u, phi=phi) for t in tags}
    return bcs, facet_classification(mesh, dirichlet_tags=tags)


def test_dofmap_layout():
    dm = DofMap(2, 1, 4)
    assert dm.block == 3
    assert dm.size == 12
    npt.assert_array_equal(dm.u_dofs(2), [6, 7])
    npt.assert_array_equal(dm.phi_dofs(2), [8])
    q = np.arange(12.0)
    u, phi = dm.split(q)
    assert u.shape == (4, 2)
    # scalar rotation comes back squeezed
    assert phi.shape == (4,)
    npt.assert_allclose(u[2], [6.0, 7.0])
    npt.assert_allclose(phi[2], 8.0)
    dm3 = DofMap(3, 3, 2)
    _, phi3 = dm3.split(np.arange(12.0))
    assert phi3.shape == (2, 3)


def test_facet_quadrature_weights(mesh2d, mesh3d):
    for mesh in (mesh2d, mesh3d):
        fi = int(mesh.interior_facets[0])
        pts, w = facet_quadrature(mesh, fi)
        npt.assert_allclose(w.sum(), mesh.facet_measure[fi], rtol=1e-13)
        # the rule integrates affine data exactly
        a = np.arange(1.0, mesh.dim + 1.0)
        npt.assert_allclose(
            (pts @ a) @ w,
            mesh.facet_measure[fi] * (mesh.facet_centroid[fi] @ a),
            rtol=1e-12,
        )


def test_strain_operator_exact_2d(ops2d):
    mesh = ops2d.mesh
    u, phi = affine_fields_2d(GRAD_2D, PHI_2D)
    q = interpolate_cellwise(mesh, ops2d.dofmap, u, phi)
    e = (ops2d.strain @ q).reshape(mesh.num_cells, 2, 2)
    expected = cosserat_strain(GRAD_2D, PHI_2D)
    npt.assert_allclose(e, np.broadcast_to(expected, e.shape), atol=1e-13 * abs(expected).max())


def test_strain_operator_exact_3d(ops3d):
    mesh = ops3d.mesh
    u, phi = affine_fields_3d(GRAD_3D, PHI_3D)
    q = interpolate_cellwise(mesh, ops3d.dofmap, u, phi)
    e = (ops3d.strain @ q).reshape(mesh.num_cells, 3, 3)
    expected = cosserat_strain(GRAD_3D, PHI_3D)
    npt.assert_allclose(e, np.broadcast_to(expected, e.shape), atol=1e-10 * abs(expected).max())


def test_curvature_operator_exact_2d(ops2d):
    mesh = ops2d.mesh
    a = np.array([0.8, -1.1])
    q = interpolate_cellwise(mesh, ops2d.dofmap, None, lambda x: 0.3 + a @ x)
    kap = (ops2d.curvature @ q).reshape(mesh.num_cells, 2)
    npt.assert_allclose(kap, np.tile(a, (mesh.num_cells, 1)), atol=1e-11)


def test_curvature_operator_exact_3d(ops3d):
    mesh = ops3d.mesh
    A = np.array([[0.5, 0.1, -0.4], [0.2, 0.9, 0.3], [-0.7, 0.0, 0.6]])
    q = interpolate_cellwise(mesh, ops3d.dofmap, None, lambda x: A @ x)
    kap = (ops3d.curvature @ q).reshape(mesh.num_cells, 3, 3)
    npt.assert_allclose(kap, np.broadcast_to(A, kap.shape), atol=1e-10)


@pytest.mark.parametrize("which", ["2d", "3d"])
def test_elastic_and_penalty_symmetric_psd(which, ops2d, ops3d):
    ops = ops2d if which == "2d" else ops3d
    for K in (assemble_elastic(ops), assemble_inner_penalty(ops)):
        asym = spnorm(K - K.T) / max(spnorm(K), 1e-30)
        assert asym < 1e-12
        rng = np.random.default_rng(0)
        for _ in range(5):
            x = rng.normal(size=K.shape[0])
            assert x @ (K @ x) >= -1e-10 * spnorm(K) * (x @ x)


def test_penalty_annihilates_affine_2d(ops2d):
    u, phi = affine_fields_2d(GRAD_2D, PHI_2D)
    q = interpolate_cellwise(ops2d.mesh, ops2d.dofmap, u, phi)
    Kp = assemble_inner_penalty(ops2d)
    assert np.linalg.norm(Kp @ q) < 1e-12 * spnorm(Kp) * np.linalg.norm(q)


def test_penalty_annihilates_affine_3d(ops3d):
    u, phi = affine_fields_3d(GRAD_3D, PHI_3D)
    q = interpolate_cellwise(ops3d.mesh, ops3d.dofmap, u, phi)
    Kp = assemble_inner_penalty(ops3d)
    assert np.linalg.norm(Kp @ q) < 1e-12 * spnorm(Kp) * np.linalg.norm(q)


def test_boundary_pair_duality_2d(ops2d):
    u, phi = affine_fields_2d(GRAD_2D, PHI_2D)
    bcs, part = dirichlet_everywhere(ops2d.mesh, u, phi)
    Kc, Kn, _ = assemble_nitsche(ops2d, bcs, part)
    diff = spnorm(Kc + Kn.T) / max(spnorm(Kc), 1e-30)
    assert diff < 1e-12


def test_boundary_pair_duality_3d(ops3d):
    u, phi = affine_fields_3d(GRAD_3D, PHI_3D)
    bcs, part = dirichlet_everywhere(ops3d.mesh, u, phi)
    Kc, Kn, _ = assemble_nitsche(ops3d, bcs, part)
    diff = spnorm(Kc + Kn.T) / max(spnorm(Kc), 1e-30)
    assert diff < 1e-12


def test_uniform_state_consistency_2d(ops2d, mat2d):
    # interpolated uniform-stress state satisfies the discrete equations
    mesh = ops2d.mesh
    u, phi = affine_fields_2d(GRAD_2D, PHI_2D)
    q = interpolate_cellwise(mesh, ops2d.dofmap, u, phi)
    bcs, part = dirichlet_everywhere(mesh, u, phi)
    Kc, Kn, rhs_n = assemble_nitsche(ops2d, bcs, part)
    A, b = compose_system(assemble_elastic(ops2d), assemble_inner_penalty(ops2d),
                          Kc, Kn, np.zeros(ops2d.dofmap.size), rhs_n)
    res = np.linalg.norm(A @ q - b) / np.linalg.norm(b)
    assert res < 1e-12


def test_uniform_state_consistency_3d(ops3d, mat3d):
    # nonsymmetric uniform stress needs the matching constant body couple
    mesh = ops3d.mesh
    u, phi = affine_fields_3d(GRAD_3D, PHI_3D)
    q = interpolate_cellwise(mesh, ops3d.dofmap, u, phi)
    sig = stress_3d(mat3d, cosserat_strain(GRAD_3D, PHI_3D))
    couple0 = skew_contraction(sig)
    bcs, part = dirichlet_everywhere(mesh, u, phi)
    Kc, Kn, rhs_n = assemble_nitsche(ops3d, bcs, part)
    load = assemble_load(ops3d, body_couple=lambda x: couple0)
    A, b = compose_system(assemble_elastic(ops3d), assemble_inner_penalty(ops3d),
                          Kc, Kn, load, rhs_n)
    res = np.linalg.norm(A @ q - b) / np.linalg.norm(b)
    assert res < 1e-10


def test_rigid_motions_in_kernel_2d(ops2d):
    mesh = ops2d.mesh
    A = assemble_elastic(ops2d) + assemble_inner_penalty(ops2d)
    nA = spnorm(A)
    x0, w = np.array([0.03, 0.05]), 0.7
    modes = [
        interpolate_cellwise(mesh, ops2d.dofmap,
                             lambda x: np.array([1.0, -2.0]), lambda x: 0.0),
        interpolate_cellwise(mesh, ops2d.dofmap,
                             lambda x: w * np.array([-(x[1] - x0[1]), x[0] - x0[0]]),
                             lambda x: w),
    ]
    for q in modes:
        assert np.linalg.norm(A @ q) <= 1e-10 * nA * max(np.linalg.norm(q), 1.0)


def test_rigid_motions_in_kernel_3d(ops3d):
    mesh = ops3d.mesh
    A = assemble_elastic(ops3d) + assemble_inner_penalty(ops3d)
    nA = spnorm(A)
    x0 = np.array([0.3, 0.2, 0.1])
    w = np.array([0.7, -0.4, 1.1])
    modes = [
        interpolate_cellwise(mesh, ops3d.dofmap,
                             lambda x: np.array([1.0, 2.0, 3.0]), lambda x: np.zeros(3)),
        interpolate_cellwise(mesh, ops3d.dofmap,
                             lambda x: np.cross(w, x - x0), lambda x: w),
    ]
    for q in modes:
        assert np.linalg.norm(A @ q) <= 1e-10 * nA * max(np.linalg.norm(q), 1.0)


def test_mass_vector(mesh2d, mat2d):
    import dataclasses
    mat = dataclasses.replace(mat2d, density=2.5, inertia=0.4)
    ops = build_operators(mesh2d, mat)
    m = assemble_mass(ops)
    assert (m > 0.0).all()
    view = m.reshape(mesh2d.num_cells, 3)
    npt.assert_allclose(view[:, 0].sum(), 2.5 * mesh2d.cell_measure.sum(), rtol=1e-13)
    npt.assert_allclose(view[:, 2], 2.5 * 0.4 * mesh2d.cell_measure, rtol=1e-13)


def test_mass_requires_dynamic_parameters(ops2d):
    with pytest.raises(ValueError):
        assemble_mass(ops2d)


def test_damping_only_on_dirichlet_cells(mesh2d, mat2d):
    ops = build_operators(mesh2d, mat2d)
    u, phi = affine_fields_2d(GRAD_2D, PHI_2D)
    bcs = {"left": BoundaryCondition(u=u, phi=phi)}
    part = facet_classification(mesh2d, dirichlet_tags=["left"])
    C = assemble_damping(ops, bcs, part)
    diag = C.diagonal()
    assert (diag >= 0.0).all()
    touched = {int(mesh2d.facet_cell(int(fi))) for fi in part.dirichlet}
    nz = set(np.flatnonzero(diag) // ops.dofmap.block)
    assert nz == touched


def test_damping_empty_without_dirichlet(mesh2d, mat2d):
    ops = build_operators(mesh2d, mat2d)
    part = facet_classification(mesh2d, dirichlet_tags=[])
    C = assemble_damping(ops, {}, part)
    assert C.nnz == 0


def test_body_load_totals(ops2d):
    mesh = ops2d.mesh
    f = np.array([2.0, -1.0])
    b = assemble_load(ops2d, body_force=lambda x: f, body_couple=lambda x: 3.0)
    view = b.reshape(mesh.num_cells, 3)
    area = mesh.cell_measure.sum()
    npt.assert_allclose(view[:, :2].sum(axis=0), f * area, rtol=1e-13)
    npt.assert_allclose(view[:, 2].sum(), 3.0 * area, rtol=1e-13)


def test_neumann_load_totals(ops2d):
    mesh = ops2d.mesh
    fids = mesh.facets_with_tag("top")
    t = np.array([0.0, 1.0])
    b = assemble_load(ops2d, neumann=[(fids, lambda x: t, None)])
    view = b.reshape(mesh.num_cells, 3)
    length = mesh.facet_measure[fids].sum()
    npt.assert_allclose(view[:, :2].sum(axis=0), t * length, rtol=1e-13)
    cells = {int(mesh.facet_cell(int(fi))) for fi in fids}
    loaded = set(np.flatnonzero(np.abs(view).sum(axis=1) > 0))
    assert loaded == cells


def test_affine_neumann_data_integrated_exactly(ops2d):
    mesh = ops2d.mesh
    fids = mesh.facets_with_tag("right")
    b = assemble_load(ops2d, neumann=[(fids, lambda x: np.array([x[1], 0.0]), None)])
    total = b.reshape(mesh.num_cells, 3)[:, 0].sum()
    # integral of y over the right edge x = 0.12, y in [0, 0.12]
    npt.assert_allclose(total, 0.12**2 / 2.0, rtol=1e-12)


def test_bc_validation():
    with pytest.raises(ValueError):
        BoundaryCondition(u=lambda x: x, traction=lambda x: x)
    bc = BoundaryCondition(u=lambda x: x)
    assert bc.is_dirichlet
    bc2 = BoundaryCondition(traction=lambda x: x)
    assert not bc2.is_dirichlet


def test_partial_component_masks_keep_duality(ops2d):
    mesh = ops2d.mesh
    bcs = {
        "left": BoundaryCondition(u=lambda x: np.zeros(2), u_components=(0,)),
        "bottom": BoundaryCondition(u=lambda x: np.zeros(2), phi=lambda x: 0.0,
                                    u_components="normal"),
    }
    part = facet_classification(mesh, dirichlet_tags=["left", "bottom"])
    Kc, Kn, rhs = assemble_nitsche(ops2d, bcs, part)
    assert spnorm(Kc + Kn.T) < 1e-12 * max(spnorm(Kc), 1e-30)
    npt.assert_allclose(rhs, 0.0, atol=1e-14)


def test_normal_mask_blocks_tangential_data(ops2d):
    # tangential boundary data must not load a normal-only constraint
    mesh = ops2d.mesh
    bcs = {"left": BoundaryCondition(u=lambda x: np.array([0.0, 5.0]),
                                     u_components="normal")}
    part = facet_classification(mesh, dirichlet_tags=["left"])
    _, _, rhs = assemble_nitsche(ops2d, bcs, part)
    npt.assert_allclose(rhs, 0.0, atol=1e-10)


def test_interpolate_layout(mesh2d):
    dm = DofMap(2, 1, mesh2d.num_cells)
    q = interpolate_cellwise(mesh2d, dm, lambda x: np.array([x[0], 2.0 * x[1]]),
                             lambda x: 7.0)
    view = q.reshape(mesh2d.num_cells, 3)
    npt.assert_allclose(view[:, 0], mesh2d.cell_centroid[:, 0], rtol=1e-14)
    npt.assert_allclose(view[:, 1], 2.0 * mesh2d.cell_centroid[:, 1], rtol=1e-14)
    npt.assert_allclose(view[:, 2], 7.0, rtol=1e-15)


def test_export_roundtrip(tmp_path, ops2d):
    K = assemble_elastic(ops2d)
    from cosserat_dem import export_matrix_market, export_vector
    mpath = tmp_path / "K.mtx"
    vpath = tmp_path / "b.txt"
    export_matrix_market(K, mpath)
    back = scipy.io.mmread(mpath).tocsr()
    assert spnorm(K - back) < 1e-12 * spnorm(K)
    vec = np.linspace(0.0, 1.0, K.shape[0])
    export_vector(vec, vpath)
    npt.assert_allclose(np.loadtxt(vpath), vec, rtol=1e-12)


def test_compose_is_plain_sum(ops2d):
    Ke = assemble_elastic(ops2d)
    Kp = assemble_inner_penalty(ops2d)
    n = ops2d.dofmap.size
    Z = sp.csr_matrix((n, n))
    r1 = np.arange(float(n))
    A, b = compose_system(Ke, Kp, Z, Z, r1, 2.0 * r1)
    assert spnorm(A - (Ke + Kp)) < 1e-14 * spnorm(Ke)
    npt.assert_allclose(b, 3.0 * r1, rtol=1e-15)


def test_material_mesh_dimension_mismatch(mesh2d, mat3d):
    with pytest.raises(ValueError):
        build_operators(mesh2d, mat3d)
