"""Tests for the case registry, metrics, config parsing, and CLI."""

import json

import numpy as np
import pytest

from cosserat_dem import cli
from cosserat_dem.cases import (
    CaseError,
    CaseSpec,
    DynamicSpec,
    ProbeSpec,
    PulseLoad,
    RunOptions,
    builtin_cases,
    component_report,
    ricker_source,
    ricker_wavelet,
    run_case,
    stress_concentration,
    wave_speed_probe,
)
from cosserat_dem.config import ConfigError, compile_expr, load_config
from cosserat_dem.materials import CosseratMaterial2D
from cosserat_dem.mesh import generate_quarter_plate_mesh, generate_rect_mesh
from cosserat_dem.system import BoundaryCondition
from cosserat_dem import io_vtk


# ----------------------------------------------------------------------
# registry
# ----------------------------------------------------------------------


def test_registry_contents():
    reg = builtin_cases()
    assert set(reg) == {"patch1", "patch2", "patch3", "plate_hole",
                        "boundary_layer", "beam_flexion", "lamb_desk"}
    for name, spec in reg.items():
        assert spec.name == name
        assert spec.description
        assert "main" in spec.meshes


def test_patch_case_runs_exact():
    result = run_case(builtin_cases()["patch1"], RunOptions(refine=-2))
    assert result.report.max_rel_error < 1e-9
    assert result.report.l2_errors["u"] < 1e-11
    assert result.report.l2_errors["phi"] < 1e-11


def test_patch2_uniform_at_any_resolution():
    result = run_case(builtin_cases()["patch2"], RunOptions(refine=-2))
    assert result.report.max_rel_error < 1e-9
    names = {c.name: c for c in result.report.components}
    assert names["mu_x"].max_abs_error < 1e-12


# ----------------------------------------------------------------------
# component statistics
# ----------------------------------------------------------------------


def test_component_report_zero_expected_uses_abs_error():
    mesh = generate_rect_mesh(1.0, 1.0, 2, 2)
    n = mesh.num_cells
    sigma = np.tile(np.array([[2.0, 0.0], [0.0, 2.0]]), (n, 1, 1))
    mu = np.full((n, 2), 1e-9)
    stats = component_report(mesh, sigma, mu,
                             expected_stress={"sigma_xx": 2.0, "sigma_xy": 0.0},
                             expected_couple={"mu_x": 0.0})
    by_name = {c.name: c for c in stats}
    assert by_name["sigma_xx"].max_rel_error == pytest.approx(0.0)
    assert by_name["sigma_xy"].max_rel_error is None
    assert by_name["sigma_xy"].max_abs_error == pytest.approx(0.0)
    assert by_name["mu_x"].max_abs_error == pytest.approx(1e-9)
    assert by_name["sigma_yy"].expected_min is None


def test_component_report_callable_expected():
    mesh = generate_rect_mesh(1.0, 1.0, 3, 3)
    n = mesh.num_cells
    sigma = np.zeros((n, 2, 2))
    sigma[:, 0, 1] = 1.0 + mesh.cell_centroid[:, 0]
    mu = np.zeros((n, 2))
    stats = component_report(mesh, sigma, mu,
                             expected_stress={"sigma_xy": lambda x: 1.0 + x[0]})
    by_name = {c.name: c for c in stats}
    assert by_name["sigma_xy"].max_rel_error == pytest.approx(0.0, abs=1e-14)


# ----------------------------------------------------------------------
# hole concentration metric
# ----------------------------------------------------------------------


def test_stress_concentration_identity_field():
    mesh = generate_quarter_plate_mesh(0.2, 2.0, 8, 8)
    sigma = np.tile(np.eye(2) * 3.0, (mesh.num_cells, 1, 1))
    assert stress_concentration(mesh, sigma) == pytest.approx(3.0)


def test_stress_concentration_missing_tag():
    mesh = generate_rect_mesh(1.0, 1.0, 2, 2)
    sigma = np.zeros((mesh.num_cells, 2, 2))
    with pytest.raises(CaseError):
        stress_concentration(mesh, sigma)


# ----------------------------------------------------------------------
# Ricker source
# ----------------------------------------------------------------------


def test_ricker_wavelet_shape():
    f_c, t0 = 14.5, 0.1
    assert ricker_wavelet(t0, f_c, t0) == pytest.approx(1.0)
    t = np.linspace(t0 - 0.5, t0 + 0.5, 200_001)
    integral = np.trapezoid(ricker_wavelet(t, f_c, t0), t)
    assert abs(integral) < 1e-6


def test_ricker_source_pattern_normalized():
    src = ricker_source(10.0, 0.1, (0.0, 0.0), radius=0.3)
    xs = np.linspace(-0.35, 0.35, 401)
    dx = xs[1] - xs[0]
    total = 0.0
    for x in xs:
        for y in xs:
            total += src.pattern(np.array([x, y]))[1] * dx * dx
    assert total == pytest.approx(-1.0, rel=1e-3)
    assert np.all(src.pattern(np.array([0.31, 0.0])) == 0.0)
    assert src.pattern(np.array([0.0, 0.1]))[0] == 0.0


def test_ricker_source_validation():
    with pytest.raises(CaseError):
        ricker_source(0.0, 0.0, (0, 0), 1.0)
    with pytest.raises(CaseError):
        ricker_source(1.0, 0.0, (0, 0), -1.0)


# ----------------------------------------------------------------------
# wave speed measurement
# ----------------------------------------------------------------------


def synthetic_arrivals(speed, distances, dt=1e-3, t_end=1.0):
    times = np.arange(0.0, t_end, dt)
    signals = np.zeros((times.size, len(distances)))
    for k, d in enumerate(distances):
        arrive = d / speed
        tail = times >= arrive
        signals[tail, k] = np.sin(40.0 * (times[tail] - arrive))
    return times, signals


def test_wave_speed_probe_recovers_speed():
    speed = 2500.0
    dist = [200.0, 400.0, 600.0]
    times, signals = synthetic_arrivals(speed, dist, dt=1e-4)
    got = wave_speed_probe(times, signals, dist)
    assert got == pytest.approx(speed, rel=0.02)


def test_wave_speed_probe_distance_scaling():
    times, signals = synthetic_arrivals(1000.0, [100.0, 200.0, 300.0], dt=1e-4)
    v1 = wave_speed_probe(times, signals, [100.0, 200.0, 300.0])
    times2, signals2 = synthetic_arrivals(2000.0, [200.0, 400.0, 600.0], dt=1e-4)
    v2 = wave_speed_probe(times2, signals2, [200.0, 400.0, 600.0])
    assert v2 == pytest.approx(2.0 * v1, rel=0.02)


def test_wave_speed_probe_flat_signal():
    times = np.linspace(0, 1, 100)
    signals = np.zeros((100, 2))
    with pytest.raises(CaseError, match="no arrival|flat"):
        wave_speed_probe(times, signals, [1.0, 2.0])


def test_wave_speed_probe_coincident_arrivals():
    times = np.linspace(0, 1, 100)
    signals = np.ones((100, 2))
    with pytest.raises(CaseError):
        wave_speed_probe(times, signals, [1.0, 2.0])


# ----------------------------------------------------------------------
# dynamic execution path
# ----------------------------------------------------------------------


def tiny_dynamic_spec():
    def mesh_factory(refine):
        return generate_rect_mesh(1.0, 1.0, 4, 4)

    def material(mesh):
        return CosseratMaterial2D(shear=10.0, poisson=0.25, couple_ratio=0.5,
                                  length=0.1, density=5.0, inertia=0.01)

    def bcs(mesh, mat):
        return {"left": BoundaryCondition(u=lambda x: np.zeros(2),
                                          phi=lambda x: 0.0)}

    pulse = PulseLoad(amplitude=lambda t: 1.0 if t < 0.05 else 0.0,
                      traction_tag="right",
                      traction=lambda x: np.array([1.0, 0.0]))
    return CaseSpec(
        name="tiny_dyn",
        description="pull-and-release square for the dynamic path",
        meshes={"main": mesh_factory},
        make_material=material,
        make_bcs=bcs,
        dynamics=DynamicSpec(t_final=0.1, dt=1e-3,
                             probes=[ProbeSpec("mid_ux", np.array([0.5, 0.5]))],
                             pulses=[pulse], track_energy=True),
    )


def test_dynamic_case_runs_and_emits(tmp_path):
    result = run_case(tiny_dynamic_spec(),
                      RunOptions(output_dir=tmp_path, emit=("csv", "report", "vtk")))
    hist = result.history
    assert hist.times.size == 101
    assert hist.probes.shape == (101, 1)
    assert np.all(np.isfinite(hist.probes))
    assert hist.energy is not None
    assert (tmp_path / "tiny_dyn_probes.csv").exists()
    assert (tmp_path / "tiny_dyn_final.vtk").exists()
    assert (tmp_path / "tiny_dyn_report.json").exists()
    assert result.report.metrics["dt"] == pytest.approx(1e-3)


# ----------------------------------------------------------------------
# artifacts
# ----------------------------------------------------------------------


def test_static_case_artifacts(tmp_path):
    result = run_case(builtin_cases()["patch1"],
                      RunOptions(refine=-2, output_dir=tmp_path,
                                 emit=("vtk", "report")))
    vtk = tmp_path / "patch1.vtk"
    assert vtk.exists()
    text = vtk.read_text()
    assert text.startswith("# vtk DataFile")
    assert "UNSTRUCTURED_GRID" in text and "CELL_DATA" in text
    report = json.loads((tmp_path / "patch1_report.json").read_text())
    assert report["case"] == "patch1"
    assert any(c["name"] == "sigma_xx" for c in report["components"])
    assert result.artifacts


def test_write_table_csv_roundtrip(tmp_path):
    rows = [{"variant": "a", "computed": 1.5, "expected": 1.4},
            {"variant": "b", "computed": 2.5, "expected": 2.6}]
    path = tmp_path / "table.csv"
    io_vtk.write_table_csv(path, rows)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "variant,computed,expected"
    assert lines[1].startswith("a,1.5")
    with pytest.raises(ValueError):
        io_vtk.write_table_csv(tmp_path / "empty.csv", [])


# ----------------------------------------------------------------------
# expression compiler and config parsing
# ----------------------------------------------------------------------


def test_compile_expr_arithmetic():
    fn = compile_expr("2*x + sin(pi*y)")
    assert fn(1.5, 0.5, 0.0) == pytest.approx(4.0)


def test_compile_expr_rejects_unknown_names():
    with pytest.raises(ConfigError):
        compile_expr("__import__('os').system('true')")
    with pytest.raises(ConfigError):
        compile_expr("open('/etc/passwd')")
    with pytest.raises(ConfigError):
        compile_expr("x +")


def test_load_config_builtin_reference(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('case = "patch1"\n\n[options]\nrefine = -2\nemit = ["report"]\n')
    spec, options = load_config(cfg)
    assert spec.name == "patch1"
    assert options.refine == -2
    assert options.emit == ("report",)


def test_load_config_unknown_case(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('case = "nope"\n')
    with pytest.raises(ConfigError, match="unknown case"):
        load_config(cfg)


def test_load_config_bad_toml(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("case = [unclosed\n")
    with pytest.raises(ConfigError, match="bad TOML"):
        load_config(cfg)


CUSTOM_CONFIG = """
[case]
name = "mini_shear"
description = "sheared unit square"

[mesh]
kind = "rect"
lx = 1.0
ly = 1.0
nx = 4
ny = 4

[material]
shear = 100.0
poisson = 0.25
couple_ratio = 0.5
length = 0.1

[bcs.bottom]
u = ["0.01*y", 0.0]
phi = -0.005

[bcs.top]
u = ["0.01*y", 0.0]
phi = -0.005

[bcs.left]
u = ["0.01*y", 0.0]
phi = -0.005

[bcs.right]
u = ["0.01*y", 0.0]
phi = -0.005

[expected.stress]
sigma_xy = 1.0
sigma_yx = 1.0
"""


def test_load_config_custom_case(tmp_path):
    cfg = tmp_path / "custom.toml"
    cfg.write_text(CUSTOM_CONFIG)
    spec, options = load_config(cfg)
    assert spec.name == "mini_shear"
    result = run_case(spec, options)
    by_name = {c.name: c for c in result.report.components}
    assert by_name["sigma_xy"].max_rel_error < 0.05


def test_load_config_requires_blocks(tmp_path):
    cfg = tmp_path / "broken.toml"
    cfg.write_text('[case]\nname = "x"\n\n[mesh]\nkind = "rect"\n'
                   'lx = 1.0\nly = 1.0\nnx = 2\nny = 2\n')
    with pytest.raises(ConfigError, match="needs a"):
        load_config(cfg)


def test_config_dynamics_block(tmp_path):
    cfg = tmp_path / "dyn.toml"
    cfg.write_text(CUSTOM_CONFIG + """
[dynamics]
t_final = 0.01
dt = 0.001
probes = [{label = "p0", point = [0.5, 0.5], field = "u", component = 0}]

[[dynamics.pulses]]
traction_tag = "top"
traction = [1.0, 0.0]
amplitude = "sin(10*t)"
""")
    spec, options = load_config(cfg)
    assert spec.dynamics is not None
    assert spec.dynamics.probes[0].label == "p0"
    assert spec.dynamics.pulses[0].amplitude(np.pi / 20.0) == pytest.approx(1.0)


# ----------------------------------------------------------------------
# CLI
# ----------------------------------------------------------------------


def test_cli_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert "patch1" in out and "plate_hole" in out and "lamb_desk" in out


def test_cli_case_runs(tmp_path, capsys):
    rc = cli.main(["case", "patch1", "--refine", "-2",
                   "--output-dir", str(tmp_path), "--emit", "report"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "case: patch1" in out
    assert (tmp_path / "patch1_report.txt").exists()


def test_cli_unknown_case(capsys):
    assert cli.main(["case", "nope"]) == 2
    assert "unknown case" in capsys.readouterr().err


def test_cli_run_config(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('case = "patch2"\n\n[options]\nrefine = -2\n')
    rc = cli.main(["run", str(cfg), "--output-dir", str(tmp_path)])
    assert rc == 0
    assert "case: patch2" in capsys.readouterr().out


def test_cli_bad_config(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('case = "nope"\n')
    assert cli.main(["run", str(cfg)]) == 1
    assert "error:" in capsys.readouterr().err
