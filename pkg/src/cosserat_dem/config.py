"""TOML run configuration: builtin-case references and custom case blocks.

A config file either points at a shipped case by name::

    case = "plate_hole"

    [options]
    output_dir = "out"
    emit = ["report", "csv"]

or declares a custom case from primitive blocks (``[case]``, ``[mesh]``,
``[material]``, ``[bcs.<tag>]``, optional ``[loads]``, ``[dynamics]`` and
``[expected]``).  Scalar entries accept numbers or expression strings in
the coordinates ``x, y, z`` (and ``t`` for amplitudes), evaluated with a
restricted math namespace.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python < 3.11
    import tomli as tomllib

from .cases import (
    CaseSpec,
    DynamicSpec,
    ProbeSpec,
    PulseLoad,
    RunOptions,
    builtin_cases,
    ricker_source,
    ricker_wavelet,
)
from .materials import CosseratMaterial2D, CosseratMaterial3D
from .mesh import (
    generate_box_mesh,
    generate_quarter_plate_mesh,
    generate_rect_mesh,
    load_mesh,
)
from .system import BoundaryCondition

__all__ = ["ConfigError", "load_config", "compile_expr"]


class ConfigError(Exception):
    """Raised for malformed or inconsistent run configurations."""


_EXPR_NAMES = {
    "pi": math.pi,
    "e": math.e,
    "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "exp": math.exp, "log": math.log, "sqrt": math.sqrt,
    "tanh": math.tanh, "abs": abs, "min": min, "max": max,
    "hypot": math.hypot,
}


def compile_expr(src: str, variables: tuple = ("x", "y", "z")):
    """Compile an arithmetic expression string into a callable.

    Only the listed variables and a small math namespace are visible;
    attribute access and builtins are unavailable.

    Raises:
        ConfigError: if the expression does not parse.
    """
    try:
        code = compile(src, "<config>", "eval")
    except SyntaxError as exc:
        raise ConfigError(f"bad expression {src!r}: {exc}") from exc
    for name in code.co_names:
        if name not in _EXPR_NAMES and name not in variables:
            raise ConfigError(f"unknown name {name!r} in expression {src!r}")

    def fn(*args):
        scope = dict(_EXPR_NAMES)
        scope.update(zip(variables, args))
        return float(eval(code, {"__builtins__": {}}, scope))

    return fn


def _scalar_fn(value, dim: int):
    """Number or expression -> callable(x) -> float."""
    if isinstance(value, str):
        expr = compile_expr(value)
        return lambda x: expr(*x, *([0.0] * (3 - dim)))
    v = float(value)
    return lambda x: v


def _vector_fn(value, dim: int, rdim: int | None = None):
    """List of numbers/expressions (or scalar for rdim 1) -> callable."""
    m = dim if rdim is None else rdim
    if m == 1:
        return _scalar_fn(value if not isinstance(value, list) else value[0], dim)
    if not isinstance(value, list) or len(value) != m:
        raise ConfigError(f"expected a {m}-component list, got {value!r}")
    comps = [_scalar_fn(v, dim) for v in value]
    return lambda x: np.array([c(x) for c in comps])


# ----------------------------------------------------------------------
# block builders
# ----------------------------------------------------------------------


def _build_mesh_factory(block: dict, base: Path):
    kind = block.get("kind")
    if kind == "rect":
        lx, ly = float(block["lx"]), float(block["ly"])
        nx, ny = int(block["nx"]), int(block["ny"])
        origin = tuple(block.get("origin", (0.0, 0.0)))
        return lambda refine: generate_rect_mesh(
            lx, ly, _ref(nx, refine), _ref(ny, refine), origin=origin)
    if kind == "box":
        lx, ly, lz = (float(block[k]) for k in ("lx", "ly", "lz"))
        nx, ny, nz = (int(block[k]) for k in ("nx", "ny", "nz"))
        return lambda refine: generate_box_mesh(
            lx, ly, lz, _ref(nx, refine), _ref(ny, refine), _ref(nz, refine))
    if kind == "plate":
        radius, width = float(block["hole_radius"]), float(block["width"])
        nr, nt = int(block.get("nr", 64)), int(block.get("nt", 64))
        grading = float(block.get("grading", 1.2))
        return lambda refine: generate_quarter_plate_mesh(
            radius, width, _ref(nr, refine), _ref(nt, refine), grading=grading)
    if kind == "file":
        path = base / block["path"]
        return lambda refine: load_mesh(path)
    raise ConfigError(f"unknown mesh kind {block.get('kind')!r}")


def _ref(n: int, refine: int) -> int:
    return max(1, int(round(n * 2.0 ** refine)))


def _build_material(block: dict):
    block = dict(block)
    dim = int(block.pop("dim", 2))
    try:
        if dim == 2:
            return CosseratMaterial2D(**block)
        if dim == 3:
            return CosseratMaterial3D(**block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad material block: {exc}") from exc
    raise ConfigError(f"material dim must be 2 or 3, got {dim}")


def _components(value):
    if isinstance(value, str):
        if value in ("all", "normal"):
            return value
        raise ConfigError(f"bad component selector {value!r}")
    return tuple(int(c) for c in value)


def _build_bc(block: dict, dim: int, rdim: int) -> BoundaryCondition:
    kw = {}
    if "u" in block:
        kw["u"] = _vector_fn(block["u"], dim)
        kw["u_components"] = _components(block.get("u_components", "all"))
    if "phi" in block:
        kw["phi"] = _vector_fn(block["phi"], dim, rdim)
        kw["phi_components"] = _components(block.get("phi_components", "all"))
    if "traction" in block:
        kw["traction"] = _vector_fn(block["traction"], dim)
    if "couple" in block:
        kw["couple"] = _vector_fn(block["couple"], dim, rdim)
    if not kw:
        raise ConfigError("boundary block sets neither values nor tractions")
    try:
        return BoundaryCondition(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_pulse(block: dict, dim: int) -> PulseLoad:
    if block.get("kind") == "ricker":
        f_c = float(block["f_c"])
        t0 = float(block.get("t0", 1.5 / f_c))
        center = np.asarray(block["center"], dtype=float)
        radius = block.get("radius")

        def body(mesh, mat):
            r = float(radius) if radius is not None else 3.0 * mesh.mesh_size
            return ricker_source(f_c, t0, center, r).pattern

        return PulseLoad(amplitude=lambda t: float(ricker_wavelet(t, f_c, t0)),
                         body_force=body)
    if "traction_tag" in block:
        amp = compile_expr(str(block.get("amplitude", "1.0")), ("t",))
        traction = _vector_fn(block["traction"], dim)
        return PulseLoad(amplitude=lambda t: amp(t),
                         traction_tag=str(block["traction_tag"]),
                         traction=traction)
    raise ConfigError("pulse must be a ricker block or a traction_tag block")


def _build_dynamics(block: dict, dim: int) -> DynamicSpec:
    probes = []
    for p in block.get("probes", []):
        probes.append(ProbeSpec(label=str(p["label"]),
                                point=np.asarray(p["point"], dtype=float),
                                field=str(p.get("field", "u")),
                                component=int(p.get("component", 0))))
    pulses = [_build_pulse(p, dim) for p in block.get("pulses", [])]
    return DynamicSpec(t_final=float(block["t_final"]),
                       dt=float(block["dt"]) if "dt" in block else None,
                       probes=probes, pulses=pulses,
                       snapshot_every=int(block.get("snapshot_every", 0)),
                       track_energy=bool(block.get("track_energy", False)))


def _build_expected(block: dict, dim: int):
    out = {}
    for name, value in block.items():
        out[name] = _scalar_fn(value, dim) if isinstance(value, str) else float(value)
    return out


def _custom_case(data: dict, base: Path) -> CaseSpec:
    for key in ("case", "mesh", "material", "bcs"):
        if key not in data:
            raise ConfigError(f"custom config needs a [{key}] block")
    material = _build_material(data["material"])
    dim, rdim = material.dim, material.rdim
    mesh_factory = _build_mesh_factory(data["mesh"], base)
    bcs = {tag: _build_bc(blk, dim, rdim) for tag, blk in data["bcs"].items()}
    loads = data.get("loads", {})
    body_force = _vector_fn(loads["body_force"], dim) if "body_force" in loads else None
    body_couple = (_vector_fn(loads["body_couple"], dim, rdim)
                   if "body_couple" in loads else None)
    dynamics = _build_dynamics(data["dynamics"], dim) if "dynamics" in data else None
    expected = data.get("expected", {})
    exp_stress = _build_expected(expected.get("stress", {}), dim) or None
    exp_couple = _build_expected(expected.get("couple", {}), dim) or None
    return CaseSpec(
        name=str(data["case"].get("name", "custom")),
        description=str(data["case"].get("description", "user-defined case")),
        meshes={"main": mesh_factory},
        make_material=lambda mesh: material,
        make_bcs=lambda mesh, mat: bcs,
        body_force=body_force,
        body_couple=body_couple,
        dynamics=dynamics,
        expected_stress=exp_stress,
        expected_couple=exp_couple,
    )


def _build_options(block: dict) -> RunOptions:
    opts = RunOptions()
    if "output_dir" in block:
        opts.output_dir = block["output_dir"]
    opts.refine = int(block.get("refine", 0))
    opts.solver = str(block.get("solver", "direct"))
    if "dt" in block:
        opts.dt = float(block["dt"])
    if "emit" in block:
        emit = block["emit"]
        if isinstance(emit, str):
            emit = [emit]
        opts.emit = tuple(str(e) for e in emit)
    return opts


def load_config(path) -> tuple[CaseSpec, RunOptions]:
    """Parse a TOML run configuration into a case and its run options.

    Raises:
        ConfigError: on unreadable files, unknown case names, or
            malformed blocks.
    """
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad TOML in {path}: {exc}") from exc

    options = _build_options(data.get("options", {}))
    if isinstance(data.get("case"), str):
        registry = builtin_cases()
        name = data["case"]
        if name not in registry:
            known = ", ".join(sorted(registry))
            raise ConfigError(f"unknown case {name!r}; shipped cases: {known}")
        return registry[name], options
    return _custom_case(data, path.parent), options
