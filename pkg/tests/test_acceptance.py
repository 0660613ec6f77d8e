"""Acceptance suite: end-to-end checks of the convolution method against
the wavefunction-space oracles, one printed pass/fail line per criterion
with its pinned tolerance. Run with ``pytest tests/test_acceptance.py -v -s``.

Heavy artifacts (the 512 x 512 half-line bounce and box traversal runs,
with 8x-oversampled wavefunction-space oracles) are built once per module
and shared across criteria.
"""

import time

import numpy as np
import pytest
from scipy.special import j1 as bessel_j1

from wignerwall import (
    ComplexWave,
    GaussianPacket,
    PhaseGrid,
    ShearParams,
    WignerField,
    billiard_indicator,
    compare_fields,
    convolve_p,
    evolve_bounded,
    far_field_check,
    free_gaussian,
    halfline_kernel,
    images_reflect,
    interval_kernel,
    kernel_from_indicator,
    kernel_tail_bound,
    marginal_x,
    naive_bounded_evolve,
    numeric_kernel,
    project_gaussian_to_box,
    shear_evolve,
    total_mass,
    wigner_of,
)
from wignerwall.boundary_kernels import kernel_field_1d
from wignerwall.convolution_engine import BoundedEvolutionPlan, _batched_fft_convolve
from wignerwall.free_evolution import wall_violation_mass
from wignerwall.oracle import box_evolve


def report(criterion: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {criterion}: {status}  {detail}")
    assert passed, f"{criterion}: {detail}"


# ---------------------------------------------------------------------------
# shared half-line bounce artifacts (criteria 3, 4, 5, 6, 8)
# ---------------------------------------------------------------------------

HL_DX = 48.0 / 512
HL_DP = 32.0 / 512
HL_GRID = PhaseGrid(-24.0, 24.0 - HL_DX, 512, -16.0, 16.0 - HL_DP, 512)
HL_PACKET = GaussianPacket(x0=10.0, p0=-5.0, sigma=1.0, m=1.0)
HL_TIMES = (0.0, 1.0, 2.0, 3.0, 4.0)
ORACLE_OVERSAMPLE = 8


def _odd_extension(g: GaussianPacket, grid: PhaseGrid) -> ComplexWave:
    x = grid.x_axis()
    return ComplexWave(grid.x_min, grid.dx, grid.n_x,
                       g.amplitude(x, 0.0) - g.amplitude(-x, 0.0))


def _oracle_field(g: GaussianPacket, grid: PhaseGrid, t: float) -> WignerField:
    dxf = grid.dx / ORACLE_OVERSAMPLE
    nf = (grid.n_x - 1) * ORACLE_OVERSAMPLE + 1
    return wigner_of(images_reflect(g, t, grid.x_min, dxf, nf), grid)


@pytest.fixture(scope="module")
def halfline_run():
    t0 = time.time()
    w0 = wigner_of(_odd_extension(HL_PACKET, HL_GRID), HL_GRID)
    plan = BoundedEvolutionPlan(halfline_kernel(HL_GRID), ShearParams(0.0, 1.0), w0)
    fields = {t: evolve_bounded(plan, t) for t in HL_TIMES}
    oracles = {t: _oracle_field(HL_PACKET, HL_GRID, t) for t in HL_TIMES}
    return dict(plan=plan, w0=w0, fields=fields, oracles=oracles,
                elapsed=time.time() - t0)


def test_c1_gaussian_wigner_closed_form():
    t0 = time.time()
    grid = PhaseGrid(-12.0, 12.0, 256, -8.0, 8.0, 256)
    g = GaussianPacket(x0=0.0, p0=0.0, sigma=1.0, m=1.0)
    psi = free_gaussian(g, 0.0, grid.x_min, grid.dx, grid.n_x)
    w = wigner_of(psi, grid)
    X, P = np.meshgrid(grid.x_axis(), grid.p_axis(), indexing="ij")
    exact = np.exp(-X**2 / 2.0 - 2.0 * P**2) / np.pi
    err = np.abs(w.values - exact)
    sel = exact >= 1e-6 * exact.max()
    rel = float((err[sel] / exact[sel]).max())
    elapsed = time.time() - t0
    report("1 gaussian closed form",
           rel < 1e-6 and elapsed < 5.0,
           f"max rel err {rel:.2e} (tol 1e-6), {elapsed:.2f}s on 256x256")


def test_c2_kernel_identity():
    # numeric transform of the half-line indicator against the analytic
    # profile, with indicator jumps on cell boundaries
    dy = 0.002
    p = np.linspace(-10.0, 10.0, 201)
    worst_h = 0.0
    for x0 in (0.7505, 1.5005, 2.9505):
        y = dy * np.arange(-3000, 3001)
        g = (np.abs(y) < 2 * x0).astype(float)
        row = numeric_kernel(g, dy, p)
        with np.errstate(invalid="ignore", divide="ignore"):
            exact = np.where(p == 0, 2 * x0 / np.pi,
                             np.sin(2 * p * x0) / (np.pi * p))
        worst_h = max(worst_h, float(np.abs(row - exact).max()))

    # interval kernel against its numeric counterpart on an aligned grid
    a, b = 0.3, 1.3
    dx = 0.025
    x_min = a + 0.0005 - 2 * dx
    grid = PhaseGrid(x_min, x_min + 44 * dx, 45, -10.0, 10.0, 201)
    y = dy * np.arange(-1200, 1201)

    def level(x):
        return np.abs(2 * (x - a) / (b - a) - 1)

    k_num = kernel_field_1d(billiard_indicator(level, [grid.x_axis()], [y]), grid)
    k_ana = interval_kernel(grid, a, b)
    worst_i = float(np.abs(k_num.values - k_ana.values).max())
    report("2 kernel identity",
           worst_h < 1e-6 and worst_i < 1e-6,
           f"halfline numeric-analytic {worst_h:.2e}, "
           f"interval numeric-analytic {worst_i:.2e} (tol 1e-6)")


def test_c3_headline_oracle_equivalence(halfline_run):
    tail = kernel_tail_bound(halfline_run["plan"].kernel, halfline_run["w0"])
    worst = 0.0
    lines = []
    for t in HL_TIMES:
        cmp = compare_fields(halfline_run["fields"][t], halfline_run["oracles"][t])
        worst = max(worst, cmp.l2_rel)
        lines.append(f"t={t:g}:{cmp.l2_rel:.1e}")
    elapsed = halfline_run["elapsed"]
    report("3 headline oracle equivalence",
           worst < 1e-3 and elapsed < 60.0,
           f"l2_rel {' '.join(lines)} (tol 1e-3), kernel tail mass {tail:.2e}, "
           f"{elapsed:.1f}s at 512x512")


def test_c4_boundary_support(halfline_run):
    grid = HL_GRID
    x = grid.x_axis()
    wall = grid.index_near_x(0.0)
    assert abs(x[wall]) < 1e-12  # the grid places a node on the wall
    worst_p0 = 0.0
    exact = True
    for t in HL_TIMES:
        w = halfline_run["fields"][t]
        exact = exact and bool(np.all(w.values[x <= 0.0, :] == 0.0))
        worst_p0 = max(worst_p0, abs(marginal_x(w)[wall]))
    report("4 boundary support",
           exact and worst_p0 < 1e-6,
           f"x <= 0 exactly zero: {exact}, |P(0)| max {worst_p0:.2e} (tol 1e-6)")


def test_c5_far_from_wall_limit():
    sigma = 0.8
    probes = (5 * sigma, 10 * sigma, 20 * sigma)
    devs = []
    scale = None
    for probe in probes:
        g = GaussianPacket(x0=probe, p0=-5.0, sigma=sigma, m=1.0)
        w0 = wigner_of(_odd_extension(g, HL_GRID), HL_GRID)
        if scale is None:
            scale = float(np.abs(w0.values).max())
        devs.append(far_field_check(w0, probe))
    floor = 1e-12
    monotone = devs[1] < devs[0] and devs[2] <= devs[1] + floor
    report("5 far-from-wall limit",
           devs[2] < 1e-4 * scale and monotone,
           f"devs at 5/10/20 sigma: {devs[0]:.1e} {devs[1]:.1e} {devs[2]:.1e}, "
           f"budget {1e-4 * scale:.1e}, monotone within {floor:g} floor")


def test_c6_naive_falsification(halfline_run):
    psi_phys = images_reflect(HL_PACKET, 0.0, HL_GRID.x_min, HL_GRID.dx, HL_GRID.n_x)
    w_phys = wigner_of(psi_phys, HL_GRID)
    t_hit = 2.0  # the packet reaches the wall
    naive = naive_bounded_evolve(w_phys, ShearParams(t_hit, 1.0))
    violation = wall_violation_mass(naive)
    conv_violation = wall_violation_mass(halfline_run["fields"][t_hit])
    report("6 naive-solution falsification",
           violation > 1e-3 and conv_violation == 0.0,
           f"naive wall mass {violation:.3e} (> 1e-3), "
           f"convolution wall mass {conv_violation:.1e} (exact 0)")


# ---------------------------------------------------------------------------
# box traversal (criterion 7)
# ---------------------------------------------------------------------------

BOX_A, BOX_B = 0.0, 10.0
BOX_L = BOX_B - BOX_A
BOX_DX = 52.0 / 512
BOX_DP = 24.0 / 512
BOX_GRID = PhaseGrid(-26.0, 26.0 - BOX_DX, 512, -12.0, 12.0 - BOX_DP, 512)
BOX_PACKET = GaussianPacket(x0=5.0, p0=4.0, sigma=0.6, m=1.0)


def _box_extension(g: GaussianPacket, grid: PhaseGrid, ycap: float) -> ComplexWave:
    pad = int(np.ceil((0.5 * ycap) / grid.dx)) + 2
    ax_min = grid.x_min - pad * grid.dx
    n = grid.n_x + 2 * pad
    x = ax_min + grid.dx * np.arange(n)
    values = np.zeros(n, dtype=np.complex128)
    for k in range(-4, 5):
        values += g.amplitude(x + 2 * k * BOX_L, 0.0)
        values -= g.amplitude(2 * BOX_A - x + 2 * k * BOX_L, 0.0)
    return ComplexWave(ax_min, grid.dx, n, values)


def _box_plan(initial: WignerField) -> BoundedEvolutionPlan:
    return BoundedEvolutionPlan(interval_kernel(BOX_GRID, BOX_A, BOX_B),
                                ShearParams(0.0, BOX_PACKET.m), initial,
                                check_support=False)


def test_c7_box_scenario():
    t0 = time.time()
    traversal = BOX_L * BOX_PACKET.m / abs(BOX_PACKET.p0)
    times = np.linspace(0.0, traversal, 5)
    # correlation cap in the gap above the image ladder rung at 3 L
    ycap = 3.5 * BOX_L
    w0 = wigner_of(_box_extension(BOX_PACKET, BOX_GRID, ycap), BOX_GRID,
                   y_halfwidth=ycap)
    plan = _box_plan(w0)
    spectrum = project_gaussian_to_box(BOX_PACKET, BOX_A, BOX_B, 64)
    dxf = BOX_GRID.dx / ORACLE_OVERSAMPLE
    nf = (BOX_GRID.n_x - 1) * ORACLE_OVERSAMPLE + 1
    worst = 0.0
    for t in times:
        w = evolve_bounded(plan, float(t))
        ref = wigner_of(box_evolve(spectrum, float(t), BOX_GRID.x_min, dxf, nf),
                        BOX_GRID)
        worst = max(worst, compare_fields(w, ref).l2_rel)

    # single eigenmode stays stationary in the position marginal. The
    # mode grid puts the mode momenta on the lattice (k = M dp) and spans
    # one full period of the lattice exponentials with the correlation
    # window ((2K+1) dy dp = 2 pi), making the discrete mode rows exact
    # momentum deltas.
    nmode = 3
    M = 20
    dp = nmode * np.pi / (BOX_L * M)
    K = 328
    dy = 2.0 * np.pi / ((2 * K + 1) * dp)
    dxm = 0.5 * dy
    n_half = 256
    mgrid = PhaseGrid(-n_half * dxm, (n_half - 1) * dxm, 512,
                      -n_half * dp, (n_half - 1) * dp, 512)
    mode_cap = (K + 0.5) * dy
    pad = K + 2
    ax_min = mgrid.x_min - pad * dxm
    n = mgrid.n_x + 2 * pad
    x = ax_min + dxm * np.arange(n)
    psi_mode = ComplexWave(ax_min, dxm, n,
                           np.sqrt(2.0 / BOX_L)
                           * np.sin(nmode * np.pi * (x - BOX_A) / BOX_L) + 0j)
    w_mode = wigner_of(psi_mode, mgrid, y_halfwidth=mode_cap)
    mode_plan = BoundedEvolutionPlan(interval_kernel(mgrid, BOX_A, BOX_B),
                                     ShearParams(0.0, BOX_PACKET.m), w_mode,
                                     check_support=False)
    base = marginal_x(evolve_bounded(mode_plan, 0.0))
    drift = 0.0
    for t in times[1:]:
        drift = max(drift, float(np.abs(
            marginal_x(evolve_bounded(mode_plan, float(t))) - base).max()))
    elapsed = time.time() - t0
    report("7 box scenario",
           worst < 5e-3 and drift < 1e-4,
           f"traversal worst l2_rel {worst:.2e} (tol 5e-3), "
           f"mode-{nmode} marginal drift {drift:.2e} (tol 1e-4), {elapsed:.1f}s")


def test_c8_mechanics_invariants(halfline_run):
    w0 = halfline_run["w0"]
    # shear group property and reversal, spectral backend
    ab = shear_evolve(shear_evolve(w0, ShearParams(0.7, 1.0)), ShearParams(1.3, 1.0))
    direct = shear_evolve(w0, ShearParams(2.0, 1.0))
    group = float(np.abs(ab.values - direct.values).max())
    back = shear_evolve(shear_evolve(w0, ShearParams(1.7, 1.0)),
                        ShearParams(-1.7, 1.0))
    reverse = float(np.abs(back.values - w0.values).max())

    # end-to-end mass conservation across the bounce
    mass_dev = max(abs(total_mass(halfline_run["fields"][t]) - 1.0)
                   for t in HL_TIMES)

    # direct and FFT convolution backends on 128-point rows
    rng = np.random.default_rng(11)
    rows_w = rng.normal(size=(64, 128))
    rows_k = rng.normal(size=(64, 255))
    fft_out = _batched_fft_convolve(rows_w, rows_k, 0.125, 127, None)
    direct_out = np.stack([convolve_p(rows_w[i], rows_k[i], 0.125)
                           for i in range(64)])
    backend_gap = float(np.abs(fft_out - direct_out).max())

    tol_shift = 1e-10  # twice the spectral-shift interpolation tolerance
    report("8 mechanics invariants",
           group < tol_shift and reverse < tol_shift
           and mass_dev < 2e-3 and backend_gap < 1e-9,
           f"group {group:.1e}, reversal {reverse:.1e} (tol {tol_shift:g}), "
           f"mass dev {mass_dev:.2e} (tol 2e-3), backends {backend_gap:.1e} "
           f"(tol 1e-9)")


def test_c9_billiard_kernels():
    t0 = time.time()
    # disk kernel at the center: radial symmetry across a 3-4-5 lattice
    # pair plus exact dihedral symmetry; anti-aliased coverage sampling
    R = 1.0
    dy = 0.005
    y = dy * np.arange(-425, 426)
    dp = 0.25
    p_ax = dp * np.arange(-8, 9)

    def disk(x1, x2):
        return (x1**2 + x2**2) / R**2

    ind = billiard_indicator(disk, [np.array([0.0])] * 2, [y, y], subsamples=16)
    K = kernel_from_indicator(ind, [p_ax, p_ax])[0, 0]
    c = len(p_ax) // 2
    dihedral = max(float(np.abs(K - K.T).max()),
                   float(np.abs(K - K[::-1, :]).max()),
                   float(np.abs(K - K[:, ::-1]).max()))
    pythagorean = abs(K[c + 5, c] - K[c + 3, c + 4])
    anisotropy = max(dihedral, pythagorean)
    r = 5 * dp
    bessel_gap = abs(K[c + 5, c] - R * bessel_j1(2 * R * r) / (np.pi * r))

    # separable 2-D box factorizes into 1-D interval kernels; the probe
    # points put the active indicator jumps (2 min distances) on cell
    # boundaries of the y lattice
    dyb = 0.002
    yb = dyb * np.arange(-1200, 1201)
    a1, b1 = -1.0005, 1.0015
    a2, b2 = -0.7005, 0.7015
    x_pts = [np.array([0.1]), np.array([-0.05])]
    p_box = np.linspace(-3.0, 3.0, 25)

    def box2(x1, x2):
        return np.maximum(np.abs(x1 - 0.5 * (a1 + b1)) / (0.5 * (b1 - a1)),
                          np.abs(x2 - 0.5 * (a2 + b2)) / (0.5 * (b2 - a2)))

    K2 = kernel_from_indicator(billiard_indicator(box2, x_pts, [yb, yb]),
                               [p_box, p_box])[0, 0]

    def interval_profile(lo, hi, xv):
        hw = 2.0 * min(xv - lo, hi - xv)
        with np.errstate(invalid="ignore", divide="ignore"):
            row = np.where(p_box == 0, hw / np.pi,
                           np.sin(hw * p_box) / (np.pi * p_box))
        return row

    outer = np.outer(interval_profile(a1, b1, float(x_pts[0][0])),
                     interval_profile(a2, b2, float(x_pts[1][0])))
    separable_gap = float(np.abs(K2 - outer).max())
    elapsed = time.time() - t0
    report("9 billiard kernels",
           anisotropy < 1e-6 and separable_gap < 1e-6,
           f"disk anisotropy {anisotropy:.2e} (tol 1e-6, Bessel gap "
           f"{bessel_gap:.1e}), separable box {separable_gap:.2e} (tol 1e-6), "
           f"{elapsed:.1f}s")
