"""Linear solves, time stepping, conditioning, and force recovery.

The static operator is nonsymmetric (the weak Dirichlet pair is skew), so
the default path is a sparse LU factorization; a preconditioned Krylov
fallback is available for larger systems.  Dynamics uses the implicit
trapezoidal (Crank-Nicolson / average acceleration) scheme with the
damping term taken explicitly at the previous step, so one factorization
of (4/dt^2) M + A is reused for the whole run.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .materials import skew_contraction

__all__ = [
    "SolveError",
    "SolveInfo",
    "ConditionEstimate",
    "TimeHistory",
    "FacetLoadSet",
    "solve_static",
    "condition_estimate",
    "crank_nicolson_run",
    "stress_field",
    "dem_post",
    "locate_cell",
    "evaluate_field",
    "write_time_series_csv",
]


class SolveError(Exception):
    """Raised when a linear solve fails or does not converge."""


@dataclass
class SolveInfo:
    method: str
    residual: float
    iterations: int = 0


def solve_static(A: sp.spmatrix, b: np.ndarray, method: str = "direct",
                 rtol: float = 1e-10, maxiter: int | None = None) -> tuple[np.ndarray, SolveInfo]:
    """Solve A q = b.

    Args:
        A: sparse system operator (nonsymmetric in general).
        b: right-hand side.
        method: "direct" (sparse LU, default) or "krylov" (LGMRES with an
            incomplete-LU preconditioner).
        rtol: relative residual target for the Krylov path.
        maxiter: Krylov iteration cap, default 10 * n.

    Raises:
        SolveError: singular factorization or non-convergence.
    """
    n = A.shape[0]
    bnorm = float(np.linalg.norm(b))
    if method == "direct":
        try:
            lu = spla.splu(A.tocsc())
            q = lu.solve(b)
        except RuntimeError as exc:
            raise SolveError(f"sparse LU failed: {exc}") from exc
        res = float(np.linalg.norm(A @ q - b)) / (bnorm if bnorm > 0 else 1.0)
        if not np.all(np.isfinite(q)):
            raise SolveError("direct solve produced non-finite values")
        return q, SolveInfo(method="direct", residual=res)
    if method != "krylov":
        raise ValueError(f"unknown solver method {method!r}")
    try:
        ilu = spla.spilu(A.tocsc(), drop_tol=1e-6, fill_factor=30)
    except RuntimeError as exc:
        raise SolveError(f"ILU preconditioner failed: {exc}") from exc
    precond = spla.LinearOperator(A.shape, ilu.solve)
    iters = 0

    def count(_):
        nonlocal iters
        iters += 1

    q, info = spla.lgmres(A, b, M=precond, rtol=rtol, atol=0.0,
                          maxiter=maxiter or 10 * n, callback=count)
    if info != 0:
        raise SolveError(f"Krylov solver did not converge (info={info})")
    res = float(np.linalg.norm(A @ q - b)) / (bnorm if bnorm > 0 else 1.0)
    return q, SolveInfo(method="krylov", residual=res, iterations=iters)


@dataclass
class ConditionEstimate:
    value: float
    sigma_max: float
    sigma_min: float
    converged: bool
    history: list = field(default_factory=list)


def condition_estimate(A: sp.spmatrix, iters: int = 200, stag_tol: float = 1e-4,
                       seed: int = 0) -> ConditionEstimate:
    """Two-norm condition number estimate.

    Power iteration on A^T A gives the largest singular value; inverse
    iteration through one LU factorization gives the smallest.  Each
    iteration stops early once the estimate stagnates to ``stag_tol``
    relative change.
    """
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    A = A.tocsc()
    AT = A.T.tocsc()
    history: list[tuple[str, int, float]] = []

    def power(mv) -> tuple[float, bool]:
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        est_old = 0.0
        for k in range(iters):
            w = mv(v)
            nw = float(np.linalg.norm(w))
            if nw == 0.0:
                return 0.0, True
            v = w / nw
            est = np.sqrt(nw)
            history.append(("sv", k, est))
            if est_old > 0 and abs(est - est_old) <= stag_tol * est:
                return est, True
            est_old = est
        return est_old, False

    smax, ok_max = power(lambda v: AT @ (A @ v))
    try:
        lu = spla.splu(A)
    except RuntimeError as exc:
        raise SolveError(f"condition estimate needs a nonsingular operator: {exc}") from exc
    inv_norm, ok_min = power(lambda v: lu.solve(lu.solve(v, trans="N"), trans="T"))
    smin = 1.0 / inv_norm if inv_norm > 0 else np.inf
    value = smax / smin if smin > 0 else np.inf
    return ConditionEstimate(value=value, sigma_max=smax, sigma_min=smin,
                             converged=ok_max and ok_min, history=history)


@dataclass
class TimeHistory:
    """Recorded trajectory of a dynamic run."""

    times: np.ndarray
    probes: np.ndarray          # (num_steps + 1, num_probes) probe samples
    energy: np.ndarray | None   # (num_steps + 1,) when requested
    q: np.ndarray               # final displacement dofs
    v: np.ndarray               # final velocity dofs
    a: np.ndarray               # final acceleration dofs
    snapshots: list = field(default_factory=list)  # (t, q) pairs


def crank_nicolson_run(mass: np.ndarray, A: sp.spmatrix, damping, load,
                       q0: np.ndarray, v0: np.ndarray, dt: float, num_steps: int,
                       probe=None, energy_matrix=None, snapshot_every: int = 0) -> TimeHistory:
    """Implicit trapezoidal time integration of M qdd + C qd + A q = L(t).

    Args:
        mass: diagonal mass vector.
        A: stiffness operator.
        damping: sparse damping operator or None; treated implicitly inside
            the trapezoidal step, so stiff boundary damping does not
            restrict the stable step size.
        load: callable t -> load vector (may be None for free vibration).
        q0, v0: initial displacement and velocity dofs.
        dt: time step.
        num_steps: number of steps.
        probe: callable (t, q, v) -> 1D array recorded every step.
        energy_matrix: optional symmetric operator; when given, the discrete
            energy 0.5 v^T M v + 0.5 q^T K q is recorded every step.
        snapshot_every: record (t, q.copy()) every that many steps (0 = off).

    Raises:
        SolveError: on a singular effective operator or non-finite state.
    """
    mass = np.asarray(mass, dtype=float)
    n = mass.size
    if load is None:
        load = lambda t: np.zeros(n)
    q = np.array(q0, dtype=float)
    v = np.array(v0, dtype=float)
    c0 = dt * dt / 4.0
    eff = A + sp.diags(mass / c0)
    if damping is not None:
        eff = eff + (2.0 / dt) * damping
    try:
        lu = spla.splu(eff.tocsc())
    except RuntimeError as exc:
        raise SolveError(f"effective dynamic operator is singular: {exc}") from exc

    cq = (lambda w: damping @ w) if damping is not None else (lambda w: np.zeros(n))
    a = (load(0.0) - cq(v) - A @ q) / mass

    def probe_now(t):
        return np.atleast_1d(np.asarray(probe(t, q, v), dtype=float)) if probe else np.empty(0)

    def energy_now():
        if energy_matrix is None:
            return None
        return 0.5 * float(v @ (mass * v)) + 0.5 * float(q @ (energy_matrix @ q))

    times = np.linspace(0.0, num_steps * dt, num_steps + 1)
    probes = [probe_now(0.0)]
    energies = [energy_now()]
    snapshots = []
    if snapshot_every:
        snapshots.append((0.0, q.copy()))
    for step in range(1, num_steps + 1):
        t1 = step * dt
        rhs = load(t1) + cq(q * (2.0 / dt) + v) + mass * (q / c0 + v * (dt / c0) + a)
        q1 = lu.solve(rhs)
        a1 = (q1 - q - dt * v) / c0 - a
        v1 = v + 0.5 * dt * (a + a1)
        q, v, a = q1, v1, a1
        if not np.all(np.isfinite(q)):
            raise SolveError(f"time integration produced non-finite values at step {step}")
        probes.append(probe_now(t1))
        energies.append(energy_now())
        if snapshot_every and step % snapshot_every == 0:
            snapshots.append((t1, q.copy()))
    energy = None if energy_matrix is None else np.array(energies, dtype=float)
    return TimeHistory(times=times, probes=np.array(probes), energy=energy,
                       q=q, v=v, a=a, snapshots=snapshots)


def stress_field(ops, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cellwise stress and couple stress from a dof vector.

    Returns:
        (sigma, mu): sigma is (num_cells, d, d); mu is (num_cells, d) in 2D
        and (num_cells, 3, 3) in 3D.
    """
    mesh = ops.mesh
    d, r = mesh.dim, ops.dofmap.rdim
    sigma = (ops.stress @ q).reshape(mesh.num_cells, d, d)
    mu = (ops.couple @ q).reshape(mesh.num_cells, r, d)
    return sigma, (mu[:, 0, :] if r == 1 else mu)


@dataclass
class FacetLoadSet:
    """Discrete-element style force system recovered from a solution.

    Interior facet forces/couples use the two-cell average traction; the
    sign convention is that ``forces[k]`` acts on the first adjacent cell
    of facet ``interior_facets[k]`` and its negative on the second.
    ``cell_moment`` is the volumetric rotation source each cell's stress
    contributes to its own rotational balance.
    """

    interior_facets: np.ndarray
    forces: np.ndarray        # (n_int, d)
    couples: np.ndarray       # (n_int,) in 2D, (n_int, 3) in 3D
    cell_moment: np.ndarray   # (num_cells,) or (num_cells, 3)
    boundary_facets: np.ndarray
    boundary_forces: np.ndarray
    boundary_couples: np.ndarray


def dem_post(ops, q: np.ndarray) -> FacetLoadSet:
    """Recover facet forces and couples from a converged solution."""
    mesh = ops.mesh
    d = mesh.dim
    sigma, mu = stress_field(ops, q)
    interior = mesh.interior_facets
    cneg = mesh.facet_cells[interior, 0]
    cpos = mesh.facet_cells[interior, 1]
    n = mesh.facet_normal[interior]
    w = mesh.facet_measure[interior]
    sig_avg = 0.5 * (sigma[cneg] + sigma[cpos])
    forces = w[:, None] * np.einsum("kij,kj->ki", sig_avg, n)
    if d == 2:
        mu_avg = 0.5 * (mu[cneg] + mu[cpos])
        couples = w * np.einsum("kj,kj->k", mu_avg, n)
    else:
        mu_avg = 0.5 * (mu[cneg] + mu[cpos])
        couples = w[:, None] * np.einsum("kij,kj->ki", mu_avg, n)
    cell_moment = -mesh.cell_measure * skew_contraction(sigma) if d == 2 else \
        -mesh.cell_measure[:, None] * skew_contraction(sigma)

    bnd = mesh.boundary_facets
    cb = mesh.facet_cells[bnd, 0]
    nb = mesh.facet_normal[bnd]
    wb = mesh.facet_measure[bnd]
    bforces = wb[:, None] * np.einsum("kij,kj->ki", sigma[cb], nb)
    if d == 2:
        bcouples = wb * np.einsum("kj,kj->k", mu[cb], nb)
    else:
        bcouples = wb[:, None] * np.einsum("kij,kj->ki", mu[cb], nb)
    return FacetLoadSet(
        interior_facets=interior.copy(), forces=forces, couples=couples,
        cell_moment=cell_moment, boundary_facets=bnd.copy(),
        boundary_forces=bforces, boundary_couples=bcouples,
    )


def locate_cell(mesh, x: np.ndarray) -> int:
    """Find the simplicial cell containing a point.

    Points on a cell boundary resolve to one of the adjacent cells; points
    slightly outside the domain snap to the nearest cell. A point farther
    out than about one cell width raises ValueError.
    """
    x = np.asarray(x, dtype=float)
    best, best_score = -1, np.inf
    order = np.argsort(np.linalg.norm(mesh.cell_centroid - x, axis=1))
    for c in order[: min(64, mesh.num_cells)]:
        verts = mesh.vertices[list(mesh.cells[c])]
        if len(verts) != mesh.dim + 1:
            continue
        try:
            mat = np.vstack([np.ones(len(verts)), verts.T])
            lam = np.linalg.solve(mat, np.concatenate([[1.0], x]))
        except np.linalg.LinAlgError:
            continue
        score = float(-np.minimum(lam, 0.0).sum())
        if score < best_score:
            best, best_score = int(c), score
        if score <= 1e-12:
            return int(c)
    if best < 0 or best_score > 1.0:
        raise ValueError(f"point {x} lies in no simplicial cell")
    return best


def evaluate_field(ops, q: np.ndarray, x: np.ndarray, cell: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Affine-reconstructed (u, phi) at a point.

    Returns the displacement vector and the rotation (scalar in 2D).
    """
    mesh, dofmap = ops.mesh, ops.dofmap
    d, r = mesh.dim, dofmap.rdim
    c = locate_cell(mesh, x) if cell is None else cell
    u, phi = dofmap.split(q)
    rows = ops.grad[c * d : (c + 1) * d]  # gradient rows of this cell only
    dx = np.asarray(x, dtype=float) - mesh.cell_centroid[c]
    gu = np.column_stack([rows @ u[:, i] for i in range(d)])  # (d, i) -> du_i/dx_j
    u_val = u[c] + gu.T @ dx
    if r == 1:
        phi_val = float(phi[c] + (rows @ phi) @ dx)
    else:
        gphi = np.column_stack([rows @ phi[:, k] for k in range(r)])
        phi_val = phi[c] + gphi.T @ dx
    return u_val, phi_val


def write_time_series_csv(path, times: np.ndarray, columns: dict) -> None:
    """Write a (step, t, columns...) CSV time series."""
    names = list(columns)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "t"] + names)
        for k, t in enumerate(times):
            writer.writerow([k, f"{t:.17g}"] + [f"{columns[n][k]:.17g}" for n in names])
