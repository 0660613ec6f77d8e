"""Scenario runner: configure geometry, packet, grid, and times from a flat
key=value config with section headers; emit fields, marginals, kernels, and
oracle comparison reports.

Units are natural (hbar = 1, user-set mass). Exit codes: 0 success,
2 validation failure, 3 numerical-guard failure.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .boundary_kernels import (
    billiard_indicator,
    kernel_from_indicator,
    write_kernel_binary,
    write_kernel_csv,
)
from .convolution_engine import (
    BoundedEvolutionPlan,
    build_halfline_plan,
    build_interval_plan,
    evolve_bounded,
    kernel_tail_bound,
)
from .errors import ConfigError, NumericalGuardError, ValidationError
from .free_evolution import ShearParams, naive_bounded_evolve, wall_violation_mass
from .oracle import (
    GaussianPacket,
    box_evolve,
    compare_fields,
    images_reflect,
    project_gaussian_to_box,
)
from .phase_grid import (
    ComplexWave,
    PhaseGrid,
    WignerField,
    marginal_p,
    marginal_x,
    write_field_binary,
    write_field_csv,
)
from .wigner_transform import wigner_of

PRESETS = {
    "halfline-bounce": """
[geometry]
kind = halfline

[packet]
x0 = 10.0
p0 = -5.0
sigma = 1.0
mass = 1.0

[grid]
x_min = -24.0
x_max = 24.0
n_x = 513
p_min = -16.0
p_max = 16.0
n_p = 513

[times]
values = 0, 1, 2, 3, 4
""",
    "box-traversal": """
[geometry]
kind = box
a = 0.0
b = 10.0

[packet]
x0 = 5.0
p0 = 4.0
sigma = 0.6
mass = 1.0

[grid]
x_min = -26.0
x_max = 26.0
n_x = 521
p_min = -12.0
p_max = 12.0
n_p = 513

[times]
values = 0, 0.625, 1.25, 1.875, 2.5
""",
    "disk-kernel": """
[geometry]
kind = billiard2d
radius = 1.0

[packet]
x0 = 0.0
p0 = 0.0
sigma = 0.3
mass = 1.0
""",
}

_DEFAULTS = {
    "grid": {"x_min": "-24.0", "x_max": "24.0", "n_x": "513",
             "p_min": "-16.0", "p_max": "16.0", "n_p": "513"},
    "times": {"values": "0, 1, 2, 3, 4"},
    "run": {"backend": "fft", "threads": "0", "outputs": "fields,marginals,report",
            "oracle_oversample": "8", "y_halfwidth": "auto", "n_modes": "64"},
    "kernel2d": {"x_points": "3", "x_half": "0.4", "n_p": "65", "p_half": "2.0",
                 "n_y": "441", "y_half": "2.125", "subsamples": "8"},
}


@dataclass
class ScenarioConfig:
    geometry: dict
    packet: GaussianPacket
    grid: PhaseGrid
    times: list[float]
    backend: str
    threads: int
    outputs: set[str]
    oracle_oversample: int
    y_halfwidth: float | None
    n_modes: int
    kernel2d: dict


def _load_ini(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    return cp


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario config from INI text.

    Geometry and packet carry no defaults; everything else does.
    """
    cp = _load_ini(text)
    for section, keys in _DEFAULTS.items():
        if not cp.has_section(section):
            cp.add_section(section)
        for key, val in keys.items():
            if not cp.has_option(section, key):
                cp.set(section, key, val)

    if not cp.has_section("geometry"):
        raise ConfigError("missing [geometry] section")
    kind = cp.get("geometry", "kind", fallback=None)
    if kind not in ("halfline", "box", "billiard2d"):
        raise ConfigError(f"geometry kind must be halfline, box, or billiard2d, "
                          f"got {kind!r}")
    geometry: dict = {"kind": kind}
    try:
        if kind == "halfline":
            wall = cp.getfloat("geometry", "wall", fallback=0.0)
            if wall != 0.0:
                raise ConfigError("half-line geometry fixes the wall at 0")
            geometry["wall"] = 0.0
        elif kind == "box":
            geometry["a"] = cp.getfloat("geometry", "a")
            geometry["b"] = cp.getfloat("geometry", "b")
            if geometry["a"] >= geometry["b"]:
                raise ConfigError("box needs a < b")
        else:
            geometry["radius"] = cp.getfloat("geometry", "radius")
            if geometry["radius"] <= 0:
                raise ConfigError("disk radius must be positive")
    except (configparser.NoOptionError, ValueError) as exc:
        raise ConfigError(f"bad [geometry]: {exc}") from exc

    if not cp.has_section("packet"):
        raise ConfigError("missing [packet] section")
    try:
        packet = GaussianPacket(
            x0=cp.getfloat("packet", "x0"),
            p0=cp.getfloat("packet", "p0"),
            sigma=cp.getfloat("packet", "sigma"),
            m=cp.getfloat("packet", "mass"),
        )
    except (configparser.NoOptionError, ValueError, ValidationError) as exc:
        raise ConfigError(f"bad [packet]: {exc}") from exc

    try:
        grid = PhaseGrid(
            cp.getfloat("grid", "x_min"), cp.getfloat("grid", "x_max"),
            cp.getint("grid", "n_x"),
            cp.getfloat("grid", "p_min"), cp.getfloat("grid", "p_max"),
            cp.getint("grid", "n_p"),
        )
        times = [float(v) for v in cp.get("times", "values").split(",")]
        backend = cp.get("run", "backend")
        if backend not in ("fft", "direct"):
            raise ConfigError(f"backend must be fft or direct, got {backend!r}")
        threads = cp.getint("run", "threads")
        outputs = {s.strip() for s in cp.get("run", "outputs").split(",") if s.strip()}
        bad = outputs - {"fields", "marginals", "kernel", "report"}
        if bad:
            raise ConfigError(f"unknown outputs {sorted(bad)}")
        oversample = cp.getint("run", "oracle_oversample")
        yh_raw = cp.get("run", "y_halfwidth")
        y_halfwidth = None if yh_raw.strip() == "auto" else float(yh_raw)
        n_modes = cp.getint("run", "n_modes")
        kernel2d = {k: (cp.getint("kernel2d", k) if k in
                        ("x_points", "n_p", "n_y", "subsamples")
                        else cp.getfloat("kernel2d", k))
                    for k in _DEFAULTS["kernel2d"]}
    except (configparser.Error, ValueError, ValidationError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from exc

    return ScenarioConfig(geometry, packet, grid, times, backend, threads,
                          outputs, oversample, y_halfwidth, n_modes, kernel2d)


def load_config(path: str | None, preset: str | None) -> ScenarioConfig:
    if (path is None) == (preset is None):
        raise ConfigError("provide exactly one of --config or --preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; "
                              f"choose from {sorted(PRESETS)}")
        return parse_config(PRESETS[preset])
    try:
        with open(path, "r", encoding="utf-8") as f:
            return parse_config(f.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc


def _workers(threads: int) -> int:
    return -1 if threads == 0 else threads


def _fmt_t(t: float) -> str:
    return f"{t:g}".replace("-", "m")


# ---------------------------------------------------------------------------
# scenario assembly
# ---------------------------------------------------------------------------

def _fine_axis(grid: PhaseGrid, oversample: int) -> tuple[float, float, int]:
    return grid.x_min, grid.dx / oversample, (grid.n_x - 1) * oversample + 1


def _halfline_extended(cfg: ScenarioConfig) -> ComplexWave:
    x = cfg.grid.x_axis()
    g = cfg.packet
    values = g.amplitude(x, 0.0) - g.amplitude(-x, 0.0)
    return ComplexWave(cfg.grid.x_min, cfg.grid.dx, cfg.grid.n_x, values)


def _box_extended(cfg: ScenarioConfig) -> tuple[ComplexWave, float]:
    """Periodic odd-image extension of the packet, on an axis reaching
    y_halfwidth/2 beyond the grid, plus the y cap actually used.

    The correlation of the image train is a ladder of rungs at multiples
    of L = b - a (start x0 at the box center to keep the ladder sparse);
    the cap defaults to 3.5 L, the gap above the rung that shears into
    the walls within one traversal.
    """
    g, grid = cfg.packet, cfg.grid
    a, b = cfg.geometry["a"], cfg.geometry["b"]
    L = b - a
    ycap = cfg.y_halfwidth if cfg.y_halfwidth is not None else 3.5 * L
    pad = int(np.ceil((0.5 * ycap) / grid.dx)) + 2
    ax_min = grid.x_min - pad * grid.dx
    n_axis = grid.n_x + 2 * pad
    x = ax_min + grid.dx * np.arange(n_axis)
    reach = max(abs(x[0]), abs(x[-1])) + abs(g.x0) + 8.0 * g.sigma
    n_img = int(np.ceil(reach / (2.0 * L))) + 1
    values = np.zeros(n_axis, dtype=np.complex128)
    for n in range(-n_img, n_img + 1):
        values += g.amplitude(x + 2.0 * n * L, 0.0)
        values -= g.amplitude(2.0 * a - x + 2.0 * n * L, 0.0)
    return ComplexWave(ax_min, grid.dx, n_axis, values), ycap


def build_plan(cfg: ScenarioConfig) -> BoundedEvolutionPlan:
    workers = _workers(cfg.threads)
    if cfg.geometry["kind"] == "halfline":
        psi = _halfline_extended(cfg)
        return build_halfline_plan(psi, cfg.grid, cfg.packet.m,
                                   backend=cfg.backend, workers=workers,
                                   y_halfwidth=cfg.y_halfwidth)
    if cfg.geometry["kind"] == "box":
        psi, ycap = _box_extended(cfg)
        return build_interval_plan(psi, cfg.grid, cfg.geometry["a"],
                                   cfg.geometry["b"], cfg.packet.m,
                                   y_halfwidth=ycap, backend=cfg.backend,
                                   workers=workers)
    raise ConfigError("dynamics is defined for halfline and box geometries only")


def oracle_field(cfg: ScenarioConfig, t: float) -> WignerField:
    """Wigner transform of the wavefunction-space ground truth at time t,
    computed on an oversampled axis so oracle error stays below method
    error."""
    x_min, dxf, nf = _fine_axis(cfg.grid, cfg.oracle_oversample)
    if cfg.geometry["kind"] == "halfline":
        psi = images_reflect(cfg.packet, t, x_min, dxf, nf)
    else:
        spectrum = project_gaussian_to_box(cfg.packet, cfg.geometry["a"],
                                           cfg.geometry["b"], cfg.n_modes)
        psi = box_evolve(spectrum, t, x_min, dxf, nf)
    return wigner_of(psi, cfg.grid)


def _write_marginals(w: WignerField, out_dir: str, tag: str) -> None:
    g = w.grid
    for name, axis, dens in (("x", g.x_axis(), marginal_x(w)),
                             ("p", g.p_axis(), marginal_p(w))):
        path = os.path.join(out_dir, f"marginal_{name}_{tag}.csv")
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"{name},density\n")
            for v, d in zip(axis, dens):
                f.write(f"{v:.12g},{d:.12g}\n")


def run(cfg: ScenarioConfig, out_dir: str) -> int:
    """Execute the scenario and write artifacts; returns the exit code."""
    os.makedirs(out_dir, exist_ok=True)
    if cfg.geometry["kind"] == "billiard2d":
        return run_billiard_kernel(cfg, out_dir)

    plan = build_plan(cfg)
    if "kernel" in cfg.outputs:
        write_kernel_csv(plan.kernel, os.path.join(out_dir, "kernel.csv"))
        write_kernel_binary(plan.kernel, os.path.join(out_dir, "kernel.bin"))
    tail = kernel_tail_bound(plan.kernel, plan.initial)

    report_rows = []
    for t in cfg.times:
        w = evolve_bounded(plan, t)
        tag = f"t{_fmt_t(t)}"
        if "fields" in cfg.outputs:
            write_field_csv(w, os.path.join(out_dir, f"field_{tag}.csv"))
            write_field_binary(w, os.path.join(out_dir, f"field_{tag}.bin"))
        if "marginals" in cfg.outputs:
            _write_marginals(w, out_dir, tag)
        if "report" in cfg.outputs:
            ref = oracle_field(cfg, t)
            cmp = compare_fields(w, ref)
            report_rows.append((t, cmp.l2_rel, cmp.max_abs, cmp.mass_diff, tail))

    if report_rows:
        with open(os.path.join(out_dir, "report.csv"), "w", encoding="utf-8") as f:
            f.write("t,l2_rel,max_abs,mass_diff,kernel_tail_mass\n")
            for row in report_rows:
                f.write(",".join(f"{v:.12g}" for v in row) + "\n")
        for row in report_rows:
            print(f"t={row[0]:g}: l2_rel={row[1]:.3e} max_abs={row[2]:.3e} "
                  f"mass_diff={row[3]:.3e} kernel_tail_mass={row[4]:.3e}")
    return 0


def run_billiard_kernel(cfg: ScenarioConfig, out_dir: str) -> int:
    """Kernel-only mode for the 2-D disk billiard: no dynamics."""
    R = cfg.geometry["radius"]
    k2 = cfg.kernel2d
    nxp, xh = k2["x_points"], k2["x_half"]
    x_ax = np.linspace(-xh, xh, nxp) if nxp > 1 else np.array([0.0])
    n_y, yh = k2["n_y"], k2["y_half"]
    if n_y % 2 == 0:
        n_y += 1
    y_ax = np.linspace(-yh, yh, n_y)
    n_p, ph = k2["n_p"], k2["p_half"]
    if n_p % 2 == 0:
        n_p += 1
    p_ax = np.linspace(-ph, ph, n_p)

    def disk(x1, x2):
        return (x1**2 + x2**2) / R**2

    ind = billiard_indicator(disk, [x_ax, x_ax], [y_ax, y_ax],
                             subsamples=k2["subsamples"])
    K = kernel_from_indicator(ind, [p_ax, p_ax])
    grid_p = PhaseGrid(float(p_ax[0]), float(p_ax[-1]), n_p,
                       float(p_ax[0]), float(p_ax[-1]), n_p)
    for i in range(len(x_ax)):
        for j in range(len(x_ax)):
            meta = {"provenance": "numeric", "geometry":
                    {"shape": "disk", "radius": R,
                     "x1": float(x_ax[i]), "x2": float(x_ax[j]),
                     "axes": "p1,p2"}}
            path = os.path.join(out_dir, f"kernel2d_x{i}_{j}.csv")
            write_field_csv(WignerField(grid_p, K[i, j]), path, metadata=meta)
    print(f"wrote {len(x_ax)**2} disk kernel slices to {out_dir}")
    return 0


def demo_naive(cfg: ScenarioConfig, out_dir: str) -> int:
    """Side-by-side naive (masked shear) and convolution fields, with the
    wall-violation metric of each."""
    if cfg.geometry["kind"] != "halfline":
        raise ConfigError("demo-naive runs on the halfline geometry only")
    os.makedirs(out_dir, exist_ok=True)
    plan = build_plan(cfg)
    g = cfg.packet
    # the physical (wall-truncated) initial field seeds the naive evolution
    psi0 = images_reflect(g, 0.0, cfg.grid.x_min, cfg.grid.dx, cfg.grid.n_x)
    w0_naive = wigner_of(psi0, cfg.grid)
    rows = []
    for t in cfg.times:
        naive = naive_bounded_evolve(w0_naive, ShearParams(t, g.m))
        conv = evolve_bounded(plan, t)
        tag = f"t{_fmt_t(t)}"
        write_field_csv(naive, os.path.join(out_dir, f"naive_{tag}.csv"))
        write_field_csv(conv, os.path.join(out_dir, f"convolution_{tag}.csv"))
        rows.append((t, wall_violation_mass(naive), wall_violation_mass(conv)))
    with open(os.path.join(out_dir, "naive_violation.csv"), "w", encoding="utf-8") as f:
        f.write("t,naive_violation,convolution_violation\n")
        for row in rows:
            f.write(",".join(f"{v:.12g}" for v in row) + "\n")
    for t, nv, cv in rows:
        print(f"t={t:g}: naive wall mass={nv:.3e}  convolution wall mass={cv:.3e}")
    return 0


def validate(cfg: ScenarioConfig) -> int:
    """Check geometry, packet, and grid compatibility without running."""
    checks: list[str] = []
    grid = cfg.grid
    grid.zero_p_index()
    checks.append("p = 0 lies on the momentum axis")
    dy = 2.0 * grid.dx
    pmax = max(abs(grid.p_min), abs(grid.p_max))
    if pmax * dy >= np.pi:
        raise ValidationError(
            f"momentum window {pmax:g} exceeds the band pi/dy = {np.pi / dy:g}")
    checks.append(f"momentum window inside the representable band "
                  f"({pmax:g} < {np.pi / dy:.4g})")
    xmax = max(abs(grid.x_min), abs(grid.x_max))
    if 2.0 * xmax >= np.pi / grid.dp:
        raise ValidationError(
            "kernel separation reach 2|x| exceeds pi/dp; refine the p axis")
    checks.append("kernel reach inside the alias-free band")
    g = cfg.packet
    if cfg.geometry["kind"] == "halfline":
        images_reflect(g, 0.0, grid.x_min, grid.dx, grid.n_x)
        checks.append("packet clear of the wall and inside the grid")
    elif cfg.geometry["kind"] == "box":
        project_gaussian_to_box(g, cfg.geometry["a"], cfg.geometry["b"],
                                cfg.n_modes)
        checks.append("packet inside the box and representable by the modes")
    for line in checks:
        print(f"ok: {line}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="path to an INI scenario config")
    sub.add_argument("--preset", help=f"built-in scenario: {', '.join(sorted(PRESETS))}")
    sub.add_argument("--out", default="wignerwall_out", help="output directory")
    sub.add_argument("--backend", choices=("direct", "fft"),
                     help="override the convolution backend")
    sub.add_argument("--threads", type=int, default=None,
                     help="FFT worker threads (0 = auto)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wignerwall",
        description="Hard-wall Wigner dynamics via shear plus momentum "
                    "convolution (natural units, hbar = 1)")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_text in (("simulate", "run a scenario and write artifacts"),
                            ("kernel", "write the boundary kernel only"),
                            ("validate", "validate a configuration"),
                            ("demo-naive", "contrast the naive masked shear "
                                           "with the convolution solution")):
        _add_common(sub.add_parser(name, help=help_text))
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.preset)
        if args.backend:
            cfg.backend = args.backend
        if args.threads is not None:
            cfg.threads = args.threads
        if args.command == "simulate":
            return run(cfg, args.out)
        if args.command == "kernel":
            cfg.outputs = {"kernel"}
            if cfg.geometry["kind"] == "billiard2d":
                os.makedirs(args.out, exist_ok=True)
                return run_billiard_kernel(cfg, args.out)
            plan = build_plan(cfg)
            os.makedirs(args.out, exist_ok=True)
            write_kernel_csv(plan.kernel, os.path.join(args.out, "kernel.csv"))
            write_kernel_binary(plan.kernel, os.path.join(args.out, "kernel.bin"))
            print(f"wrote kernel files to {args.out}")
            return 0
        if args.command == "validate":
            return validate(cfg)
        if args.command == "demo-naive":
            return demo_naive(cfg, args.out)
        raise ConfigError(f"unknown command {args.command!r}")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
