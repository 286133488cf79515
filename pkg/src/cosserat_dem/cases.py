"""Built-in validation cases, error metrics, and case execution.

A case bundles a mesh recipe, a material, boundary conditions, loads and
(optionally) expected values into a :class:`CaseSpec`.  :func:`run_case`
assembles and solves it (statically or in time), measures errors against
the expected data, computes case-specific metrics, and emits VTK/CSV/report
artifacts.  :func:`builtin_cases` returns the registry of shipped cases.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .materials import CosseratMaterial2D, CosseratMaterial3D, young_modulus
from .mesh import (
    facet_classification,
    generate_box_mesh,
    generate_quarter_plate_mesh,
    generate_rect_mesh,
    load_mesh,
)
from .shear1d import solve_shear_layer
from .solver import (
    crank_nicolson_run,
    evaluate_field,
    locate_cell,
    solve_static,
    stress_field,
    write_time_series_csv,
)
from .system import (
    BoundaryCondition,
    assemble_damping,
    assemble_elastic,
    assemble_inner_penalty,
    assemble_load,
    assemble_mass,
    assemble_nitsche,
    build_operators,
    compose_system,
)
from . import io_vtk

__all__ = [
    "CaseError",
    "ProbeSpec",
    "PulseLoad",
    "DynamicSpec",
    "Variant",
    "CaseSpec",
    "RunOptions",
    "ComponentStats",
    "ErrorReport",
    "CaseResult",
    "stress_concentration",
    "ricker_wavelet",
    "RickerSource",
    "ricker_source",
    "wave_speed_probe",
    "run_case",
    "builtin_cases",
]


class CaseError(Exception):
    """Raised when a case cannot be built, run, or measured."""


# ----------------------------------------------------------------------
# case description
# ----------------------------------------------------------------------


@dataclass
class ProbeSpec:
    """One scalar time-series probe: a field component at a point."""

    label: str
    point: np.ndarray
    field: str = "u"       # "u" or "phi"
    component: int = 0


@dataclass
class PulseLoad:
    """Separable time-dependent load: frozen spatial pattern x amplitude.

    Exactly one of ``traction_tag``/``body_force`` selects the pattern:
    a unit surface traction on a boundary tag, or a unit body-force
    density built per mesh (so mollification radii can track mesh size).
    """

    amplitude: object                 # callable t -> float
    traction_tag: str | None = None
    traction: object | None = None    # callable x -> (d,)
    body_force: object | None = None  # callable (mesh, material) -> (x -> (d,))


@dataclass
class DynamicSpec:
    """Time-integration parameters of a dynamic case."""

    t_final: float
    dt: float | None = None           # None: t_final / 2000
    probes: list = field(default_factory=list)
    pulses: list = field(default_factory=list)
    snapshot_every: int = 0
    track_energy: bool = False
    # Velocity damping on Dirichlet facets; stabilizes the weakly growing
    # boundary modes of the one-sided constraint terms in dynamics.
    boundary_damping: bool = False


@dataclass
class Variant:
    """One entry of a case sweep (e.g. a table row)."""

    label: str
    make_material: object             # callable mesh -> material
    expected: float | None = None     # expected sweep metric value
    mesh_key: str = "main"
    param: float | None = None        # swept parameter value, for reports


@dataclass
class CaseSpec:
    """Complete description of a runnable validation case.

    Args:
        name: registry key.
        description: one-line summary for listings.
        meshes: mapping key -> callable(refine) -> Mesh; "main" is default.
            Negative refine coarsens, positive refines (factor 2 per level).
        make_material: callable mesh -> material (mesh-dependent materials
            such as size-tracking intrinsic lengths are allowed).
        make_bcs: callable (mesh, material) -> {tag: BoundaryCondition}.
        body_force, body_couple: static volumetric loads (callables of x).
        dynamics: time integration block, or None for a static solve.
        exact_u, exact_phi: exact fields for L2 errors, when known.
        expected_stress, expected_couple: per-component expected values
            (floats or callables of x) keyed like "sigma_xy"/"mu_x".
        variants: sweep entries; when set the case solves each variant and
            tabulates ``sweep_metric`` against the expected column.
        sweep_metric: callable(mesh, material, q, sigma, mu) -> float.
        post: callable(CaseResult context dict) -> dict of extra metrics.
    """

    name: str
    description: str
    meshes: dict
    make_material: object
    make_bcs: object
    body_force: object | None = None
    body_couple: object | None = None
    dynamics: DynamicSpec | None = None
    exact_u: object | None = None
    exact_phi: object | None = None
    expected_stress: dict | None = None
    expected_couple: dict | None = None
    variants: list | None = None
    sweep_metric: object | None = None
    post: object | None = None

    def make_mesh(self, refine: int = 0, key: str = "main"):
        return self.meshes[key](refine)


@dataclass
class RunOptions:
    """Execution options shared by the CLI and the test-suite."""

    output_dir: object | None = None
    refine: int = 0
    solver: str = "direct"
    dt: float | None = None
    emit: tuple = ("report",)


# ----------------------------------------------------------------------
# error reports
# ----------------------------------------------------------------------


@dataclass
class ComponentStats:
    """Computed range and error of one stress/couple component."""

    name: str
    min: float
    max: float
    expected_min: float | None = None
    expected_max: float | None = None
    max_rel_error: float | None = None
    max_abs_error: float | None = None


@dataclass
class ErrorReport:
    """Per-component statistics, field errors and case metrics."""

    case: str
    components: list = field(default_factory=list)
    l2_errors: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    table: list = field(default_factory=list)

    @property
    def max_rel_error(self) -> float | None:
        errs = [c.max_rel_error for c in self.components if c.max_rel_error is not None]
        return max(errs) if errs else None


@dataclass
class CaseResult:
    """Everything produced by one case run."""

    name: str
    report: ErrorReport
    mesh: object | None = None
    solution: np.ndarray | None = None
    sigma: np.ndarray | None = None
    mu: np.ndarray | None = None
    history: object | None = None
    artifacts: list = field(default_factory=list)


_COMP_2D = ("xx", "xy", "yx", "yy")
_COMP_3D = ("xx", "xy", "xz", "yx", "yy", "yz", "zx", "zy", "zz")


def _component_names(dim: int, rdim: int) -> tuple[list[str], list[str]]:
    comps = _COMP_2D if dim == 2 else _COMP_3D
    sig = [f"sigma_{c}" for c in comps]
    if rdim == 1:
        mu = ["mu_x", "mu_y"]
    else:
        mu = [f"mu_{c}" for c in comps]
    return sig, mu


def _flatten_fields(sigma: np.ndarray, mu: np.ndarray) -> dict:
    n = sigma.shape[0]
    sig_names, mu_names = _component_names(sigma.shape[1], 1 if mu.ndim == 2 else 3)
    out = {}
    flat = sigma.reshape(n, -1)
    for k, name in enumerate(sig_names):
        out[name] = flat[:, k]
    flat = mu.reshape(n, -1)
    for k, name in enumerate(mu_names):
        out[name] = flat[:, k]
    return out


def _expected_per_cell(value, centroids: np.ndarray) -> np.ndarray:
    if callable(value):
        return np.array([float(value(x)) for x in centroids])
    return np.full(len(centroids), float(value))


def component_report(mesh, sigma, mu, expected_stress=None, expected_couple=None,
                     zero_tol: float = 1e-12) -> list:
    """Per-component min/max and errors against expected values.

    Components whose expected value vanishes (|expected| below ``zero_tol``
    times the stress scale) report absolute error only; the others report
    the maximum relative error against the local expected value.
    """
    fields = _flatten_fields(sigma, mu)
    expected = dict(expected_stress or {})
    expected.update(expected_couple or {})
    scale = max(np.abs(sigma).max(), np.abs(mu).max(), 1e-300)
    stats = []
    for name, values in fields.items():
        cs = ComponentStats(name, float(values.min()), float(values.max()))
        if name in expected:
            exp = _expected_per_cell(expected[name], mesh.cell_centroid)
            cs.expected_min = float(exp.min())
            cs.expected_max = float(exp.max())
            err = np.abs(values - exp)
            cs.max_abs_error = float(err.max())
            nonzero = np.abs(exp) > zero_tol * scale
            if nonzero.any():
                cs.max_rel_error = float((err[nonzero] / np.abs(exp[nonzero])).max())
        stats.append(cs)
    return stats


def _l2_errors(ops, q, exact_u, exact_phi) -> dict:
    mesh, dofmap = ops.mesh, ops.dofmap
    uh, ph = dofmap.split(q)
    w = mesh.cell_measure
    out = {}
    if exact_u is not None:
        ue = np.array([np.asarray(exact_u(x), dtype=float) for x in mesh.cell_centroid])
        num = np.sqrt(np.sum(w[:, None] * (uh - ue) ** 2))
        den = np.sqrt(np.sum(w[:, None] * ue ** 2))
        out["u"] = float(num / den) if den > 0 else float(num)
    if exact_phi is not None:
        pe = np.array([np.asarray(exact_phi(x), dtype=float) for x in mesh.cell_centroid])
        pe = pe.reshape(ph.shape)
        num = np.sqrt(np.sum((w[:, None] * (ph - pe).reshape(len(w), -1) ** 2)))
        den = np.sqrt(np.sum((w[:, None] * pe.reshape(len(w), -1) ** 2)))
        out["phi"] = float(num / den) if den > 0 else float(num)
    return out


# ----------------------------------------------------------------------
# metrics
# ----------------------------------------------------------------------


def stress_concentration(mesh, sigma: np.ndarray, sigma_inf: float = 1.0,
                         tag: str = "hole", center=None) -> float:
    """Max hoop stress around a tagged hole, normalized by the far load.

    The hoop direction in each hole-adjacent cell is the in-plane tangent
    (perpendicular to the ray from ``center`` to the cell barycenter).

    Raises:
        CaseError: if no boundary facet carries ``tag``.
    """
    center = np.zeros(mesh.dim) if center is None else np.asarray(center, dtype=float)
    best = None
    for fi, t in mesh.boundary_tags.items():
        if t != tag:
            continue
        c = int(mesh.facet_cells[fi][0])
        ray = mesh.cell_centroid[c] - center
        ray /= np.linalg.norm(ray)
        tang = np.array([-ray[1], ray[0]])
        hoop = float(tang @ sigma[c] @ tang) / sigma_inf
        best = hoop if best is None else max(best, hoop)
    if best is None:
        raise CaseError(f"mesh has no boundary facets tagged {tag!r}")
    return best


def ricker_wavelet(t, f_c: float, t0: float = 0.0):
    """Zero-mean Ricker amplitude (1 - 2 pi^2 f_c^2 tau^2) exp(-pi^2 f_c^2 tau^2)."""
    tau = np.asarray(t, dtype=float) - t0
    s = (np.pi * f_c * tau) ** 2
    return (1.0 - 2.0 * s) * np.exp(-s)


@dataclass
class RickerSource:
    """Vertical point-like source: mollified bump times a Ricker pulse.

    The spatial pattern integrates to one over the domain, so the applied
    force at the pulse peak equals one force unit.
    """

    f_c: float
    t0: float
    center: np.ndarray
    radius: float

    def amplitude(self, t: float) -> float:
        return float(ricker_wavelet(t, self.f_c, self.t0))

    def pattern(self, x: np.ndarray) -> np.ndarray:
        """Unit-integral downward force density at a point."""
        d = len(self.center)
        r = np.linalg.norm(np.asarray(x, dtype=float) - self.center) / self.radius
        if r >= 1.0:
            return np.zeros(d)
        # (1 - r^2)^2 bump; closed-form normalization over the ball
        norm = np.pi * self.radius**2 / 3.0 if d == 2 else 32.0 * np.pi * self.radius**3 / 105.0
        w = (1.0 - r * r) ** 2 / norm
        out = np.zeros(d)
        out[-1] = -w
        return out

    def __call__(self, x, t):
        return self.pattern(x) * self.amplitude(t)


def ricker_source(f_c: float, t0: float, center, radius: float) -> RickerSource:
    """Build a mollified vertical Ricker body-force source.

    Raises:
        CaseError: on non-positive frequency or radius.
    """
    if f_c <= 0 or radius <= 0:
        raise CaseError("ricker source needs f_c > 0 and radius > 0")
    return RickerSource(f_c, t0, np.asarray(center, dtype=float), radius)


def wave_speed_probe(times: np.ndarray, signals: np.ndarray, distances,
                     threshold: float = 0.05) -> float:
    """First-arrival wave speed from probe records along a ray.

    Arrival at each probe is the first crossing of ``threshold`` times
    that probe's peak magnitude; the speed is the least-squares slope of
    distance against arrival time.

    Args:
        times: (n_steps,) sample times.
        signals: (n_steps, n_probes) probe values.
        distances: per-probe distance from the source.

    Raises:
        CaseError: if fewer than two probes, a probe never crosses its
            threshold (no arrival), or all arrivals coincide.
    """
    times = np.asarray(times, dtype=float)
    signals = np.atleast_2d(np.asarray(signals, dtype=float))
    dist = np.asarray(distances, dtype=float)
    if signals.shape[1] != dist.size or dist.size < 2:
        raise CaseError("need at least two probes with matching distances")
    arrivals = []
    for k in range(dist.size):
        s = np.abs(signals[:, k])
        peak = s.max()
        if peak <= 0.0:
            raise CaseError(f"no arrival detected at probe {k} (flat signal)")
        idx = np.argmax(s >= threshold * peak)
        if s[idx] < threshold * peak:
            raise CaseError(f"no arrival detected at probe {k}")
        arrivals.append(times[idx])
    arrivals = np.array(arrivals)
    var = np.sum((arrivals - arrivals.mean()) ** 2)
    if var <= 0.0:
        raise CaseError("arrivals coincide; probes too close or dt too coarse")
    slope = np.sum((arrivals - arrivals.mean()) * (dist - dist.mean())) / var
    if slope <= 0.0:
        raise CaseError("arrival order contradicts probe distances")
    return float(slope)


# ----------------------------------------------------------------------
# execution
# ----------------------------------------------------------------------


def _assemble_static(ops, bcs, body_force=None, body_couple=None):
    mesh = ops.mesh
    dir_tags = [t for t, bc in bcs.items() if bc.is_dirichlet]
    part = facet_classification(mesh, dirichlet_tags=dir_tags)
    k_con, k_nsym, rhs_n = assemble_nitsche(ops, bcs, part)
    neumann = []
    for tag, bc in bcs.items():
        if bc.traction is not None or bc.couple is not None:
            fids = _tag_facets(mesh, tag)
            neumann.append((fids, bc.traction, bc.couple))
    load = assemble_load(ops, body_force=body_force, body_couple=body_couple,
                         neumann=neumann or None)
    A, b = compose_system(assemble_elastic(ops), assemble_inner_penalty(ops),
                          k_con, k_nsym, load, rhs_n)
    return A, b, part


def _tag_facets(mesh, tag: str) -> np.ndarray:
    fids = np.array(sorted(fi for fi, t in mesh.boundary_tags.items() if t == tag),
                    dtype=int)
    if fids.size == 0:
        raise CaseError(f"mesh has no boundary facets tagged {tag!r}")
    return fids


def _probe_closure(ops, probes):
    mesh = ops.mesh
    cells = [locate_cell(mesh, np.asarray(p.point, dtype=float)) for p in probes]

    def probe(t, q, v):
        out = np.empty(len(probes))
        for k, (p, c) in enumerate(zip(probes, cells)):
            u, phi = evaluate_field(ops, q, np.asarray(p.point, dtype=float), cell=c)
            vals = u if p.field == "u" else np.atleast_1d(phi)
            out[k] = vals[p.component]
        return out

    return probe


def _solve_one(ops, bcs, spec, options):
    A, b, part = _assemble_static(ops, bcs, spec.body_force, spec.body_couple)
    q, info = solve_static(A, b, method=options.solver)
    sigma, mu = stress_field(ops, q)
    return q, sigma, mu, info


def _run_dynamic(spec, options, out_dir):
    dyn = spec.dynamics
    mesh = spec.make_mesh(options.refine)
    mat = spec.make_material(mesh)
    ops = build_operators(mesh, mat)
    bcs = spec.make_bcs(mesh, mat)
    dir_tags = [t for t, bc in bcs.items() if bc.is_dirichlet]
    part = facet_classification(mesh, dirichlet_tags=dir_tags)
    k_con, k_nsym, rhs_n = assemble_nitsche(ops, bcs, part)
    A, _ = compose_system(assemble_elastic(ops), assemble_inner_penalty(ops),
                          k_con, k_nsym, np.zeros(ops.dofmap.size), rhs_n)
    mass = assemble_mass(ops)
    damping = (assemble_damping(ops, bcs, part)
               if dyn.boundary_damping and dir_tags else None)

    patterns = []
    for pulse in dyn.pulses:
        if pulse.traction_tag is not None:
            fids = _tag_facets(mesh, pulse.traction_tag)
            vec = assemble_load(ops, neumann=[(fids, pulse.traction, None)])
        else:
            force = pulse.body_force(mesh, mat)
            vec = assemble_load(ops, body_force=force)
        patterns.append((vec, pulse.amplitude))

    def load(t):
        out = np.zeros(ops.dofmap.size)
        for vec, amp in patterns:
            out += vec * amp(t)
        return out

    dt = options.dt if options.dt is not None else (dyn.dt or dyn.t_final / 2000.0)
    num_steps = int(round(dyn.t_final / dt))
    probe = _probe_closure(ops, dyn.probes) if dyn.probes else None
    energy_matrix = A if dyn.track_energy else None
    history = crank_nicolson_run(mass, A, damping, load if patterns else None,
                                 np.zeros(ops.dofmap.size), np.zeros(ops.dofmap.size),
                                 dt, num_steps, probe=probe,
                                 energy_matrix=energy_matrix,
                                 snapshot_every=dyn.snapshot_every)
    sigma, mu = stress_field(ops, history.q)

    report = ErrorReport(case=spec.name)
    report.components = component_report(mesh, sigma, mu)
    report.metrics["dt"] = dt
    report.metrics["num_steps"] = float(num_steps)
    result = CaseResult(spec.name, report, mesh=mesh, solution=history.q,
                        sigma=sigma, mu=mu, history=history)
    if spec.post is not None:
        report.metrics.update(spec.post({
            "mesh": mesh, "material": mat, "ops": ops, "history": history,
            "spec": spec, "options": options, "sigma": sigma, "mu": mu,
        }))
    _emit_dynamic(spec, options, out_dir, result, dyn)
    return result


def _emit_dynamic(spec, options, out_dir, result, dyn):
    if out_dir is None:
        return
    emit = set(options.emit)
    if "csv" in emit and dyn.probes:
        path = out_dir / f"{spec.name}_probes.csv"
        cols = {p.label: result.history.probes[:, k] for k, p in enumerate(dyn.probes)}
        write_time_series_csv(path, result.history.times, cols)
        result.artifacts.append(str(path))
    if "vtk" in emit:
        path = out_dir / f"{spec.name}_final.vtk"
        _write_solution_vtk(path, result)
        result.artifacts.append(str(path))
        for k, (t, q) in enumerate(result.history.snapshots):
            path = out_dir / f"{spec.name}_snap_{k:04d}.vtk"
            u, phi = _split_solution(result.mesh, q)
            io_vtk.write_vtk(path, result.mesh, {"u": u, "phi": phi})
            result.artifacts.append(str(path))
    _emit_report(spec, options, out_dir, result)


def _split_solution(mesh, q):
    """Cell-interleaved dof vector -> (u, phi) cell arrays."""
    n = mesh.num_cells
    view = np.asarray(q).reshape(n, -1)
    return view[:, : mesh.dim], view[:, mesh.dim:]


def _write_solution_vtk(path, result):
    mesh = result.mesh
    n = mesh.num_cells
    data = {}
    if result.solution is not None:
        data["u"], data["phi"] = _split_solution(mesh, result.solution)
    data["sigma"] = result.sigma.reshape(n, -1)
    data["mu"] = result.mu.reshape(n, -1)
    io_vtk.write_vtk(path, mesh, data)


def _emit_report(spec, options, out_dir, result):
    if out_dir is None:
        return
    emit = set(options.emit)
    if "report" in emit:
        tpath = out_dir / f"{spec.name}_report.txt"
        jpath = out_dir / f"{spec.name}_report.json"
        io_vtk.write_report_text(tpath, result.report)
        io_vtk.write_report_json(jpath, result.report)
        result.artifacts.extend([str(tpath), str(jpath)])
    if "csv" in emit and result.report.table:
        path = out_dir / f"{spec.name}_table.csv"
        io_vtk.write_table_csv(path, result.report.table)
        result.artifacts.append(str(path))


def _run_sweep(spec, options, out_dir):
    report = ErrorReport(case=spec.name)
    result = CaseResult(spec.name, report)
    meshes = {}
    ops_cache = {}
    worst = 0.0
    for var in spec.variants:
        if var.mesh_key not in meshes:
            meshes[var.mesh_key] = spec.meshes[var.mesh_key](options.refine)
        mesh = meshes[var.mesh_key]
        mat = var.make_material(mesh)
        if var.mesh_key not in ops_cache:
            ops_cache[var.mesh_key] = build_operators(mesh, mat)
        else:
            ops_cache[var.mesh_key] = build_operators(
                mesh, mat, stencils=ops_cache[var.mesh_key].stencils)
        ops = ops_cache[var.mesh_key]
        bcs = spec.make_bcs(mesh, mat)
        q, sigma, mu, _ = _solve_one(ops, bcs, spec, options)
        value = spec.sweep_metric(mesh, mat, q, sigma, mu)
        row = {"variant": var.label, "param": var.param, "computed": value,
               "expected": var.expected}
        if var.expected:
            row["rel_error"] = abs(value / var.expected - 1.0)
            worst = max(worst, row["rel_error"])
        report.table.append(row)
        if out_dir is not None and "vtk" in set(options.emit):
            path = out_dir / f"{spec.name}_{var.label}.vtk"
            _write_solution_vtk(path, CaseResult(spec.name, report, mesh=mesh,
                                                 solution=q, sigma=sigma, mu=mu))
            result.artifacts.append(str(path))
        result.mesh, result.solution, result.sigma, result.mu = mesh, q, sigma, mu
    report.metrics["max_table_rel_error"] = worst
    if spec.post is not None:
        report.metrics.update(spec.post({"report": report, "spec": spec,
                                         "options": options}))
    _emit_report(spec, options, out_dir, result)
    return result


def run_case(spec: CaseSpec, options: RunOptions | None = None) -> CaseResult:
    """Run one case end to end and return its result bundle.

    Static cases solve once (or once per sweep variant) and compare
    stresses/couples against the expected data; dynamic cases integrate in
    time and record probes.  Artifacts (VTK fields, CSV series/tables,
    text + JSON reports) are written to ``options.output_dir`` when set.

    Raises:
        CaseError: for malformed specs or failed measurements; solver
            errors propagate with their own types.
    """
    options = options or RunOptions()
    out_dir = None
    if options.output_dir is not None:
        out_dir = Path(options.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

    if spec.dynamics is not None:
        return _run_dynamic(spec, options, out_dir)
    if spec.variants:
        return _run_sweep(spec, options, out_dir)

    mesh = spec.make_mesh(options.refine)
    mat = spec.make_material(mesh)
    ops = build_operators(mesh, mat)
    bcs = spec.make_bcs(mesh, mat)
    q, sigma, mu, info = _solve_one(ops, bcs, spec, options)

    report = ErrorReport(case=spec.name)
    report.components = component_report(mesh, sigma, mu,
                                         spec.expected_stress, spec.expected_couple)
    report.l2_errors = _l2_errors(ops, q, spec.exact_u, spec.exact_phi)
    result = CaseResult(spec.name, report, mesh=mesh, solution=q,
                        sigma=sigma, mu=mu)
    if spec.post is not None:
        report.metrics.update(spec.post({
            "mesh": mesh, "material": mat, "ops": ops, "q": q,
            "sigma": sigma, "mu": mu, "spec": spec, "options": options,
        }))
    if out_dir is not None and "vtk" in set(options.emit):
        path = out_dir / f"{spec.name}.vtk"
        _write_solution_vtk(path, result)
        result.artifacts.append(str(path))
    _emit_report(spec, options, out_dir, result)
    return result


# ----------------------------------------------------------------------
# built-in cases
# ----------------------------------------------------------------------

_PATCH_G = 1000.0
_PATCH_L = 0.1


def _scaled(n: int, refine: int, minimum: int = 1) -> int:
    return max(minimum, int(round(n * 2.0 ** refine)))


def _patch_mesh(refine: int):
    return generate_rect_mesh(0.24, 0.12, _scaled(50, refine, 2), _scaled(25, refine),
                              origin=(-0.12, 0.0))


def _patch_material(mesh):
    return CosseratMaterial2D(shear=_PATCH_G, poisson=0.25, couple_ratio=0.5,
                              length=_PATCH_L)


def _patch_u(x):
    return np.array([x[0] + 0.5 * x[1], x[0] + x[1]]) / _PATCH_G


def _patch_bcs(exact_u, exact_phi):
    def make(mesh, mat):
        return {tag: BoundaryCondition(u=exact_u, phi=exact_phi)
                for tag in sorted(set(mesh.boundary_tags.values()))}
    return make


def _patch_case(name, description, exact_phi, body_force, body_couple,
                expected_stress, expected_couple):
    return CaseSpec(
        name=name,
        description=description,
        meshes={"main": _patch_mesh},
        make_material=_patch_material,
        make_bcs=_patch_bcs(_patch_u, exact_phi),
        body_force=body_force,
        body_couple=body_couple,
        exact_u=_patch_u,
        exact_phi=exact_phi,
        expected_stress=expected_stress,
        expected_couple=expected_couple,
    )


def _patch1_case():
    return _patch_case(
        "patch1",
        "uniform-stress patch test: balanced rotation, zero loads",
        lambda x: 1.0 / (4.0 * _PATCH_G),
        None, None,
        {"sigma_xx": 4.0, "sigma_xy": 1.5, "sigma_yx": 1.5, "sigma_yy": 4.0},
        {"mu_x": 0.0, "mu_y": 0.0},
    )


def _patch2_case():
    return _patch_case(
        "patch2",
        "uniform-stress patch test: counter rotation driven by a body couple",
        lambda x: -1.0 / (4.0 * _PATCH_G),
        None,
        lambda x: -1.0,
        {"sigma_xx": 4.0, "sigma_xy": 1.0, "sigma_yx": 2.0, "sigma_yy": 4.0},
        {"mu_x": 0.0, "mu_y": 0.0},
    )


def _patch3_case():
    mu_mag = 4.0 * _PATCH_G * _PATCH_L**2 / _PATCH_G  # couple law on grad phi
    return _patch_case(
        "patch3",
        "linear-stress patch test: position-dependent rotation and couple stress",
        lambda x: (0.25 - x[0] + x[1]) / _PATCH_G,
        lambda x: np.array([-1.0, -1.0]),
        lambda x: -2.0 * (x[0] - x[1]),
        {"sigma_xx": 4.0,
         "sigma_xy": lambda x: 1.5 - (x[0] - x[1]),
         "sigma_yx": lambda x: 1.5 + (x[0] - x[1]),
         "sigma_yy": 4.0},
        {"mu_x": -mu_mag, "mu_y": mu_mag},
    )


# --- plate with a hole ------------------------------------------------

_PLATE_W = 16.2e-3
_PLATE_R_SMALL = 0.216e-3
_PLATE_R_BIG = 0.864e-3
_PLATE_NR = 128
_PLATE_NT = 128
_PLATE_GRADING = 1.2
_PLATE_SIGMA = 1.0

# analytical stress concentration factors for the three sweeps
PLATE_TABLE_COUPLING_TIGHT = [    # r/l = 1.063, sweep over a
    (0.0, 3.000), (0.0667, 2.849), (0.3333, 2.555), (1.2857, 2.287),
    (4.2632, 2.158),
]
PLATE_TABLE_COUPLING_LOOSE = [    # r/l = 10.63, sweep over a
    (0.0, 3.000), (0.0667, 2.956), (0.3333, 2.935), (1.2857, 2.927),
    (4.2632, 2.923),
]
PLATE_TABLE_LENGTH = [            # a = 0.3333, sweep over r/l
    (1.0, 2.549), (2.0, 2.641), (3.0, 2.719), (4.0, 2.779), (6.0, 2.857),
    (8.0, 2.902), (10.0, 2.929),
]

_PLATE_FILES = {"small": "plate_hole_small.json", "big": "plate_hole_big.json"}
_PLATE_RADII = {"small": _PLATE_R_SMALL, "big": _PLATE_R_BIG}


def _plate_mesh(key: str):
    def make(refine: int):
        if refine == 0:
            ref = importlib.resources.files("cosserat_dem") / "data" / _PLATE_FILES[key]
            with importlib.resources.as_file(ref) as path:
                if path.exists():
                    return load_mesh(path)
        return generate_quarter_plate_mesh(
            _PLATE_RADII[key], _PLATE_W,
            _scaled(_PLATE_NR, refine, 8), _scaled(_PLATE_NT, refine, 8),
            grading=_PLATE_GRADING)
    return make


def _plate_material(a: float, ell: float):
    def make(mesh):
        return CosseratMaterial2D(shear=1000.0, poisson=0.3, couple_ratio=a,
                                  length=ell)
    return make


def _plate_bcs(mesh, mat):
    zero2 = lambda x: np.zeros(2)
    zphi = lambda x: 0.0
    return {
        "bottom": BoundaryCondition(u=zero2, u_components="normal", phi=zphi),
        "left": BoundaryCondition(u=zero2, u_components="normal", phi=zphi),
        "top": BoundaryCondition(traction=lambda x: np.array([0.0, _PLATE_SIGMA])),
    }


def _plate_metric(mesh, mat, q, sigma, mu):
    return stress_concentration(mesh, sigma, sigma_inf=_PLATE_SIGMA)


def _plate_variants():
    out = []
    for a, expected in PLATE_TABLE_COUPLING_TIGHT:
        out.append(Variant(label=f"tight_a{a:g}", mesh_key="small", param=a,
                           expected=expected,
                           make_material=_plate_material(a, _PLATE_R_SMALL / 1.063)))
    for a, expected in PLATE_TABLE_COUPLING_LOOSE:
        out.append(Variant(label=f"loose_a{a:g}", mesh_key="small", param=a,
                           expected=expected,
                           make_material=_plate_material(a, _PLATE_R_SMALL / 10.63)))
    for rl, expected in PLATE_TABLE_LENGTH:
        out.append(Variant(label=f"len_rl{rl:g}", mesh_key="big", param=rl,
                           expected=expected,
                           make_material=_plate_material(0.3333, _PLATE_R_BIG / rl)))
    return out


def _plate_case():
    return CaseSpec(
        name="plate_hole",
        description="quarter plate with a circular hole under uniaxial tension;"
                    " hoop stress concentration swept over coupling and length",
        meshes={"small": _plate_mesh("small"), "big": _plate_mesh("big"),
                "main": _plate_mesh("small")},
        make_material=_plate_material(0.0, _PLATE_R_SMALL / 1.063),
        make_bcs=_plate_bcs,
        variants=_plate_variants(),
        sweep_metric=_plate_metric,
    )


# --- boundary layer ---------------------------------------------------

_LAYER_H = 1e-3
_LAYER_G = 10e9
_LAYER_A = 2.0
_LAYER_L = 5e-5
_LAYER_U_TOP = -0.1
_LAYER_PHI_TOP = 0.01 * _LAYER_H


def _layer_mesh(refine: int):
    return generate_rect_mesh(_LAYER_H, _LAYER_H, _scaled(10, refine),
                              _scaled(50, refine, 2))


def _layer_material(mesh):
    return CosseratMaterial2D(shear=_LAYER_G, poisson=0.0, couple_ratio=_LAYER_A,
                              length=_LAYER_L)


def _layer_bcs(mesh, mat):
    return {
        "bottom": BoundaryCondition(u=lambda x: np.zeros(2), u_components=(0,),
                                    phi=lambda x: 0.0),
        "top": BoundaryCondition(u=lambda x: np.array([_LAYER_U_TOP, 0.0]),
                                 u_components=(0,),
                                 phi=lambda x: _LAYER_PHI_TOP),
        "left": BoundaryCondition(u=lambda x: np.zeros(2), u_components=(1,)),
        "right": BoundaryCondition(u=lambda x: np.zeros(2), u_components=(1,)),
    }


def _layer_oracle():
    return solve_shear_layer(_LAYER_A, _LAYER_L, _LAYER_H,
                             _LAYER_U_TOP, _LAYER_PHI_TOP)


def _layer_post(ctx):
    profile = _layer_oracle()
    mesh = ctx["mesh"]
    uh, ph = ctx["ops"].dofmap.split(ctx["q"])
    y = mesh.cell_centroid[:, 1]
    u_ref = profile.u_at(y)
    p_ref = profile.phi_at(y)
    err_u = np.abs(uh[:, 0] - u_ref).max() / np.abs(profile.u).max()
    err_p = np.abs(ph - p_ref).max() / np.abs(profile.phi).max()
    return {"layer_error_u": float(err_u), "layer_error_phi": float(err_p)}


def _layer_case():
    profile = _layer_oracle()
    return CaseSpec(
        name="boundary_layer",
        description="sheared square with rotation boundary layers; compared"
                    " against a high-resolution 1D two-point oracle",
        meshes={"main": _layer_mesh},
        make_material=_layer_material,
        make_bcs=_layer_bcs,
        exact_u=lambda x: np.array([float(profile.u_at(x[1])), 0.0]),
        exact_phi=lambda x: float(profile.phi_at(x[1])),
        post=_layer_post,
    )


# --- beam in dynamic flexion -----------------------------------------

_BEAM_LEN = 1e-3
_BEAM_SIDE = 4e-5
_BEAM_T = 6.3e-5
_BEAM_TC = 3.2e-8
_BEAM_ELL = _BEAM_LEN / 100.0


def _beam_mesh(refine: int):
    # the cross-section keeps at least 2 cells per side: a single-cell
    # section cannot represent flexure and its one-sided reconstruction
    # stencils destabilize the clamped end
    return generate_box_mesh(_BEAM_LEN, _BEAM_SIDE, _BEAM_SIDE,
                             _scaled(25, refine, 4), _scaled(2, refine, 2),
                             _scaled(2, refine, 2))


def _beam_material(mesh):
    g = 10e9
    return CosseratMaterial3D(bulk=16.67e9, shear=g, couple=5e9,
                              curv_tr=g * _BEAM_ELL**2,
                              curv_sym=2.5 * g * _BEAM_ELL**2,
                              curv_skew=2.5 * g * _BEAM_ELL**2,
                              density=2500.0, inertia=0.4 * _BEAM_ELL**2)


def _beam_bcs(mesh, mat):
    return {"left": BoundaryCondition(u=lambda x: np.zeros(3),
                                      phi=lambda x: np.zeros(3))}


def _beam_tip_traction():
    e = young_modulus(16.67e9, 10e9)
    mag = e * 1e-6

    def traction(x):
        return np.array([0.0, -mag, 0.0])

    def amplitude(t):
        return t / _BEAM_TC if t <= _BEAM_TC else 0.0

    return PulseLoad(amplitude=amplitude, traction_tag="right", traction=traction)


def _beam_post(ctx):
    tip = ctx["history"].probes[:, 0]
    return {"tip_min": float(tip.min()), "tip_max": float(tip.max()),
            "tip_final": float(tip[-1])}


def _beam_case():
    tip = np.array([_BEAM_LEN, _BEAM_SIDE / 2.0, _BEAM_SIDE / 2.0])
    return CaseSpec(
        name="beam_flexion",
        description="clamped 3D beam kicked by a short tip traction ramp;"
                    " tip deflection traced over free flexural oscillation",
        meshes={"main": _beam_mesh},
        make_material=_beam_material,
        make_bcs=_beam_bcs,
        dynamics=DynamicSpec(
            t_final=_BEAM_T,
            probes=[ProbeSpec("tip_uy", tip, "u", 1)],
            pulses=[_beam_tip_traction()],
            # the one-sided boundary terms at the clamp shed weakly growing
            # high-frequency modes; facet damping absorbs them
            boundary_damping=True,
        ),
        post=_beam_post,
    )


# --- Lamb-type half-space waves at desk scale -------------------------

_LAMB_LX = 2000.0
_LAMB_LY = 1000.0
_LAMB_G = 7.52e9
_LAMB_LAMBDA = 3.76e9
_LAMB_RHO = 2500.0
_LAMB_FC = 14.5
_LAMB_T0 = 1.5 / _LAMB_FC
_LAMB_T = 0.55
_LAMB_SOURCE = np.array([_LAMB_LX / 2.0, _LAMB_LY - 100.0])
_LAMB_DEPTH_PROBES = (200.0, 400.0, 600.0)


def lamb_p_speed() -> float:
    """Plane P-wave speed for the desk-scale wave material."""
    return float(np.sqrt((_LAMB_LAMBDA + 2.0 * _LAMB_G) / _LAMB_RHO))


def _lamb_mesh(refine: int):
    return generate_rect_mesh(_LAMB_LX, _LAMB_LY, _scaled(100, refine),
                              _scaled(50, refine))


def _lamb_material(mesh):
    ell = mesh.mesh_size / np.sqrt(2.0)
    nu = _LAMB_LAMBDA / (2.0 * (_LAMB_LAMBDA + _LAMB_G))
    return CosseratMaterial2D(shear=_LAMB_G, poisson=nu, couple_ratio=1.0,
                              length=ell, density=_LAMB_RHO, inertia=ell**2 / 6.0)


def _lamb_bcs(mesh, mat):
    return {}


def _lamb_source_pulse():
    def body(mesh, mat):
        src = ricker_source(_LAMB_FC, _LAMB_T0, _LAMB_SOURCE,
                            radius=3.0 * mesh.mesh_size)
        return src.pattern

    return PulseLoad(amplitude=lambda t: float(ricker_wavelet(t, _LAMB_FC, _LAMB_T0)),
                     body_force=body)


def _lamb_probes():
    probes = [ProbeSpec(f"depth_{int(d)}",
                        np.array([_LAMB_SOURCE[0], _LAMB_SOURCE[1] - d]), "u", 1)
              for d in _LAMB_DEPTH_PROBES]
    probes.append(ProbeSpec("surface_400", np.array([_LAMB_SOURCE[0] + 400.0,
                                                     _LAMB_LY - 1.0]), "u", 1))
    probes.append(ProbeSpec("surface_700", np.array([_LAMB_SOURCE[0] + 700.0,
                                                     _LAMB_LY - 1.0]), "u", 1))
    return probes


def _lamb_post(ctx):
    history = ctx["history"]
    speed = wave_speed_probe(history.times, history.probes[:, :3],
                             _LAMB_DEPTH_PROBES)
    out = {"p_speed": speed, "p_speed_expected": lamb_p_speed(),
           "p_speed_rel_error": abs(speed / lamb_p_speed() - 1.0)}
    # surface probes: quantify the disturbance reaching the surface after
    # the direct P arrival at that offset
    for k, label, offset in ((3, "surface_400", 400.0), (4, "surface_700", 700.0)):
        sig = np.abs(history.probes[:, k])
        peak = float(sig.max())
        depth = _LAMB_LY - _LAMB_SOURCE[1]
        p_arrival = _LAMB_T0 + np.hypot(offset, depth) / lamb_p_speed()
        late = sig[history.times > p_arrival]
        out[f"{label}_peak"] = peak
        out[f"{label}_peak_after_p"] = float(late.max()) if late.size else 0.0
    return out


def _lamb_case():
    return CaseSpec(
        name="lamb_desk",
        description="half-space wave propagation at desk scale: buried"
                    " vertical Ricker source, free surface, speed probes",
        meshes={"main": _lamb_mesh},
        make_material=_lamb_material,
        make_bcs=_lamb_bcs,
        dynamics=DynamicSpec(
            t_final=_LAMB_T,
            probes=_lamb_probes(),
            pulses=[_lamb_source_pulse()],
        ),
        post=_lamb_post,
    )


def builtin_cases() -> dict:
    """Registry of shipped validation cases, keyed by name."""
    specs = [_patch1_case(), _patch2_case(), _patch3_case(), _plate_case(),
             _layer_case(), _beam_case(), _lamb_case()]
    return {s.name: s for s in specs}
