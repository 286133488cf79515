"""Facet stencils and the Green-Gauss gradient operator."""

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosserat_dem import (
    StencilError,
    barycentric_coords,
    build_facet_operator,
    build_gradient_operator,
    dump_stencils_csv,
    generate_rect_mesh,
    p1_eval,
)

coeff = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


def test_barycentric_reproduces_point():
    pts = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
    lam = barycentric_coords(pts, np.array([0.5, 0.25]))
    npt.assert_allclose(lam.sum(), 1.0, rtol=1e-14)
    npt.assert_allclose(lam @ pts, [0.5, 0.25], atol=1e-14)


def test_partition_of_unity_2d(mesh2d):
    st2d = build_facet_operator(mesh2d)
    ones = st2d.matrix @ np.ones(mesh2d.num_cells)
    npt.assert_allclose(ones, 1.0, rtol=1e-12)


def test_partition_of_unity_3d(mesh3d):
    st3d = build_facet_operator(mesh3d)
    ones = st3d.matrix @ np.ones(mesh3d.num_cells)
    npt.assert_allclose(ones, 1.0, rtol=1e-12)


@settings(max_examples=25, deadline=None)
@given(a0=coeff, ax=coeff, ay=coeff)
def test_stencil_affine_exact_2d(mesh2d, a0, ax, ay):
    st2d = build_facet_operator(mesh2d)
    vals = a0 + mesh2d.cell_centroid @ [ax, ay]
    at_facets = st2d.matrix @ vals
    exact = a0 + mesh2d.facet_centroid @ [ax, ay]
    scale = 1.0 + np.abs(exact).max()
    npt.assert_allclose(at_facets, exact, atol=1e-10 * scale)


def test_stencil_affine_exact_3d(mesh3d):
    st3d = build_facet_operator(mesh3d)
    rng = np.random.default_rng(5)
    for _ in range(5):
        a0, a = rng.normal(), rng.normal(size=3)
        vals = a0 + mesh3d.cell_centroid @ a
        exact = a0 + mesh3d.facet_centroid @ a
        npt.assert_allclose(st3d.matrix @ vals, exact, atol=1e-10)


def test_gradient_affine_exact_2d(mesh2d):
    st2d = build_facet_operator(mesh2d)
    grad = build_gradient_operator(mesh2d, st2d)
    a0, a = 0.7, np.array([1.3, -2.1])
    vals = a0 + mesh2d.cell_centroid @ a
    g = (grad @ vals).reshape(mesh2d.num_cells, 2)
    npt.assert_allclose(g, np.tile(a, (mesh2d.num_cells, 1)), atol=1e-10)


def test_gradient_affine_exact_3d(mesh3d):
    st3d = build_facet_operator(mesh3d)
    grad = build_gradient_operator(mesh3d, st3d)
    a0, a = -0.2, np.array([0.4, 1.9, -0.8])
    vals = a0 + mesh3d.cell_centroid @ a
    g = (grad @ vals).reshape(mesh3d.num_cells, 3)
    npt.assert_allclose(g, np.tile(a, (mesh3d.num_cells, 1)), atol=1e-10)


def test_gradient_of_constant_vanishes(mesh2d):
    st2d = build_facet_operator(mesh2d)
    grad = build_gradient_operator(mesh2d, st2d)
    g = grad @ np.full(mesh2d.num_cells, 3.14)
    npt.assert_allclose(g, 0.0, atol=1e-12)


def test_stencils_deterministic(mesh2d):
    a = build_facet_operator(mesh2d)
    b = build_facet_operator(mesh2d)
    assert a.cells == b.cells
    npt.assert_array_equal(
        np.concatenate([np.asarray(c) for c in a.coeffs]),
        np.concatenate([np.asarray(c) for c in b.coeffs]),
    )


def test_stencil_size_matches_dimension(mesh2d, mesh3d):
    assert all(len(c) == 3 for c in build_facet_operator(mesh2d).cells)
    assert all(len(c) == 4 for c in build_facet_operator(mesh3d).cells)


def test_reach_is_moderate(mesh2d, mesh3d):
    for mesh in (mesh2d, mesh3d):
        reach = build_facet_operator(mesh).reach
        assert 0.0 < reach < 10.0


def test_too_few_cells_raises():
    mesh = generate_rect_mesh(1.0, 1.0, 1, 1)
    with pytest.raises(StencilError):
        build_facet_operator(mesh)


def test_p1_eval_reproduces_affine(mesh2d):
    a0, a = 1.5, np.array([-0.6, 2.2])
    vals = a0 + mesh2d.cell_centroid @ a
    grads = np.tile(a, (mesh2d.num_cells, 1))
    x = np.array([0.01, 0.05])
    out = p1_eval(vals, grads, mesh2d.cell_centroid, 3, x)
    npt.assert_allclose(out, a0 + a @ x, rtol=1e-13)


def test_dump_csv(tmp_path, mesh2d):
    st2d = build_facet_operator(mesh2d)
    path = tmp_path / "stencils.csv"
    dump_stencils_csv(st2d, path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == mesh2d.num_facets + 1
    assert lines[0].startswith("facet")
