"""Shared fixtures: small meshes, materials and assembled operators."""

import numpy as np
import pytest

from cosserat_dem import (
    CosseratMaterial2D,
    CosseratMaterial3D,
    build_operators,
    generate_box_mesh,
    generate_rect_mesh,
)


@pytest.fixture(scope="session")
def mat2d():
    return CosseratMaterial2D(shear=1000.0, poisson=0.25, couple_ratio=0.5, length=0.1)


@pytest.fixture(scope="session")
def mat3d():
    G = 1000.0
    ell = 0.05
    return CosseratMaterial3D(
        bulk=1666.7, shear=G, couple=0.5 * G,
        curv_tr=G * ell**2, curv_sym=2.5 * G * ell**2, curv_skew=2.5 * G * ell**2,
    )


@pytest.fixture(scope="session")
def mesh2d():
    return generate_rect_mesh(0.24, 0.12, 12, 6, origin=(-0.12, 0.0))


@pytest.fixture(scope="session")
def mesh3d():
    return generate_box_mesh(1.0, 0.6, 0.8, 3, 2, 2, jitter=0.15, seed=42)


@pytest.fixture(scope="session")
def ops2d(mesh2d, mat2d):
    return build_operators(mesh2d, mat2d)


@pytest.fixture(scope="session")
def ops3d(mesh3d, mat3d):
    return build_operators(mesh3d, mat3d)


def affine_fields_2d(grad, phi0):
    """Displacement with constant Jacobian plus a constant rotation."""
    grad = np.asarray(grad, dtype=float)

    def u(x):
        return grad @ x

    def phi(x):
        return phi0

    return u, phi


def affine_fields_3d(grad, phi0):
    grad = np.asarray(grad, dtype=float)
    phi0 = np.asarray(phi0, dtype=float)

    def u(x):
        return grad @ x

    def phi(x):
        return phi0

    return u, phi


# one visible line per acceptance criterion, appended by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
