"""Bounded Wigner dynamics: free shear composed with per-row momentum
convolution against a boundary kernel.

The bounded solution is W(x, p, t) = [W0(. - p t/m, .) conv_p K](x, p),
where W0 is the free Wigner field of the image-extended initial state
and K the geometry kernel. Convolution is linear (zero padded, never
circular) with rectangle measure dp.

Kernel sampling: the convolution at output momentum p_j against sources
across the whole window needs kernel arguments out to +-(n_p - 1) dp,
twice the half-window. The engine therefore samples kernel rows on that
momentum difference lattice through the kernel's row profile instead of
reusing the grid-window samples; with window-limited rows the slow sinc
tails are cut early enough to spoil oracle-level agreement near walls.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .boundary_kernels import BoundaryKernel
from .errors import GridMismatch, LengthMismatch, ValidationError
from .free_evolution import ShearParams, shear_evolve
from .phase_grid import PhaseGrid, WignerField, marginal_x
from .wigner_transform import wigner_of

_SYMMETRY_TOL = 1e-6


def convolve_p(row_w: np.ndarray, row_k: np.ndarray, dp: float,
               zero_index: int | None = None) -> np.ndarray:
    """Linear discrete convolution along p with measure dp.

    out[j] = dp * sum_l row_w[l] * row_k[(j - l) + z0], zero padded.

    ``row_k`` is either a kernel row on the same momentum axis as
    ``row_w`` (equal lengths; ``zero_index`` locates p = 0 on that axis,
    defaulting to the center of an odd-length symmetric axis) or a row
    on the momentum difference lattice (length 2 n - 1, center implied).
    """
    u = np.asarray(row_w, dtype=np.float64)
    v = np.asarray(row_k, dtype=np.float64)
    n = u.size
    if v.size == n:
        if zero_index is None:
            if n % 2 == 0:
                raise LengthMismatch(
                    "even-length kernel row needs an explicit zero_index")
            z0 = (n - 1) // 2
        else:
            z0 = int(zero_index)
            if not 0 <= z0 < n:
                raise LengthMismatch("zero_index outside the row")
    elif v.size == 2 * n - 1:
        if zero_index is not None:
            raise LengthMismatch("difference-lattice rows imply their center")
        z0 = n - 1
    else:
        raise LengthMismatch(
            f"kernel row length {v.size} matches neither {n} nor {2 * n - 1}")
    full = np.convolve(u, v)
    return dp * full[z0:z0 + n]


def _batched_fft_convolve(rows_w: np.ndarray, rows_k: np.ndarray, dp: float,
                          z0: int, workers: int | None = None) -> np.ndarray:
    """FFT path of the row convolutions; identical contract to convolve_p
    applied row-wise, padded to at least full linear length."""
    n = rows_w.shape[1]
    m = rows_k.shape[1]
    L = sfft.next_fast_len(n + m - 1)
    fw = sfft.rfft(rows_w, L, axis=1, workers=workers)
    fk = sfft.rfft(rows_k, L, axis=1, workers=workers)
    full = sfft.irfft(fw * fk, L, axis=1, workers=workers)
    return dp * full[:, z0:z0 + n]


@dataclass(frozen=True)
class BoundedEvolutionPlan:
    """Everything needed to evaluate the bounded solution at any time.

    ``initial`` is the free Wigner field of the image-extended state at
    t = 0 (odd extension for the half line; periodic odd images for an
    interval), sharing one grid with ``kernel``. ``backend`` selects the
    convolution path; ``shear_method``/``check_support`` are forwarded
    to the shear (interval scenarios disable the support guard since the
    image train legitimately fills the window).

    Half-line plans verify the point-reflection symmetry
    W0(-x, -p) = W0(x, p) of the initial field, the discrete footprint
    of the odd-state requirement.
    """

    kernel: BoundaryKernel
    shear: ShearParams
    initial: WignerField
    backend: str = "fft"
    shear_method: str = "auto"
    check_support: bool = True
    workers: int | None = None
    _kernel_rows: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kernel.grid != self.initial.grid:
            raise GridMismatch("kernel and initial field grids differ")
        if self.backend not in ("fft", "direct"):
            raise ValidationError(f"unknown convolution backend {self.backend!r}")
        grid = self.initial.grid
        grid.zero_p_index()  # p = 0 must be on the axis for row alignment
        if self.kernel.provenance == "analytic-halfline":
            defect = point_symmetry_defect(self.initial)
            if defect > _SYMMETRY_TOL:
                raise ValidationError(
                    f"initial field breaks W(-x,-p) = W(x,p) by {defect:.2e}; "
                    "half-line plans require the odd-extended state"
                )
        karg = grid.dp * np.arange(-(grid.n_p - 1), grid.n_p)
        rows = self.kernel.rows_at(karg)
        object.__setattr__(self, "_kernel_rows", rows)


def point_symmetry_defect(w: WignerField) -> float:
    """Max |W(-x, -p) - W(x, p)| over grid points whose mirrors exist."""
    g = w.grid
    xi = np.round((-g.x_axis() - g.x_min) / g.dx).astype(int)
    pj = np.round((-g.p_axis() - g.p_min) / g.dp).astype(int)
    ok_x = (xi >= 0) & (xi < g.n_x) & \
        (np.abs(-g.x_axis() - (g.x_min + xi * g.dx)) < 1e-9 * max(1.0, g.dx))
    ok_p = (pj >= 0) & (pj < g.n_p) & \
        (np.abs(-g.p_axis() - (g.p_min + pj * g.dp)) < 1e-9 * max(1.0, g.dp))
    if not (ok_x.any() and ok_p.any()):
        return 0.0
    sub = w.values[np.ix_(ok_x, ok_p)]
    mirrored = w.values[np.ix_(xi[ok_x], pj[ok_p])]
    return float(np.abs(sub - mirrored).max())


def evolve_bounded(plan: BoundedEvolutionPlan, t: float | None = None) -> WignerField:
    """Bounded field at time t (defaults to the plan's shear time).

    Shear first, then convolve each x row along p with its kernel row;
    rows whose kernel row vanishes (outside the walls) are exactly zero.
    """
    grid = plan.initial.grid
    time = plan.shear.t if t is None else t
    sheared = shear_evolve(plan.initial, ShearParams(time, plan.shear.m),
                           method=plan.shear_method,
                           check_support=plan.check_support,
                           workers=plan.workers)
    out = _convolve_field(sheared.values, plan._kernel_rows, grid, plan.backend,
                          plan.workers)
    out[~plan.kernel.inside_rows(), :] = 0.0
    return WignerField(grid, out)


def _convolve_field(rows_w: np.ndarray, kernel_rows: np.ndarray, grid: PhaseGrid,
                    backend: str, workers: int | None = None) -> np.ndarray:
    if backend == "fft":
        return _batched_fft_convolve(rows_w, kernel_rows, grid.dp,
                                     grid.n_p - 1, workers)
    out = np.empty_like(rows_w)
    for i in range(grid.n_x):
        out[i] = convolve_p(rows_w[i], kernel_rows[i], grid.dp)
    return out


def far_field_check(w0: WignerField, x_probe: float,
                    kernel: BoundaryKernel | None = None,
                    backend: str = "fft") -> float:
    """Deviation of the bounded row from the free row at ``x_probe``.

    Far from the wall the momentum convolution against the kernel row
    tends to the identity, so for a state far inside the region the
    bounded row approaches theta(x) W0; the return value is the max
    absolute difference at the grid row nearest to ``x_probe`` (t = 0).
    """
    from .boundary_kernels import halfline_kernel

    grid = w0.grid
    k = kernel if kernel is not None else halfline_kernel(grid)
    if k.grid != grid:
        raise GridMismatch("kernel and field grids differ")
    i = grid.index_near_x(x_probe)
    karg = grid.dp * np.arange(-(grid.n_p - 1), grid.n_p)
    row_k = k.rows_at(karg)[i]
    conv = _convolve_field(w0.values[i:i + 1], row_k[None, :], grid, backend)[0]
    free = w0.values[i] if grid.x_at(i) > 0 else np.zeros(grid.n_p)
    return float(np.abs(conv - free).max())


def kernel_tail_bound(kernel: BoundaryKernel, w0: WignerField) -> float:
    """State-weighted bound on the kernel tail truncation error.

    Sum over rows of |1 - int K dp| times the state's position density,
    the per-run diagnostic surfaced in scenario reports.
    """
    if kernel.grid != w0.grid:
        raise GridMismatch("kernel and field grids differ")
    inside = kernel.inside_rows()
    tails = np.abs(kernel.tail_mass())
    dens = np.abs(marginal_x(w0))
    return float(np.sum(tails[inside] * dens[inside]) * w0.grid.dx)


def build_halfline_plan(psi_extended, grid: PhaseGrid, m: float,
                        backend: str = "fft", workers: int | None = None,
                        y_halfwidth: float | None = None) -> BoundedEvolutionPlan:
    """Plan for the wall at the origin from an odd-extended wavefunction."""
    from .boundary_kernels import halfline_kernel

    w0 = wigner_of(psi_extended, grid, y_halfwidth=y_halfwidth)
    return BoundedEvolutionPlan(halfline_kernel(grid), ShearParams(0.0, m), w0,
                                backend=backend, workers=workers)


def build_interval_plan(psi_extended, grid: PhaseGrid, a: float, b: float, m: float,
                        y_halfwidth: float, backend: str = "fft",
                        workers: int | None = None) -> BoundedEvolutionPlan:
    """Plan for the box (a, b) from a periodically image-extended state.

    The image train fills the window, so the shear support guard is off;
    wrapped content lands outside the box rows, which the kernel masks.
    ``y_halfwidth`` must sit in a gap of the image correlation ladder
    (separations stride 2(b - a)); see the box scenario builder.
    """
    w0 = wigner_of(psi_extended, grid, y_halfwidth=y_halfwidth)
    from .boundary_kernels import interval_kernel

    return BoundedEvolutionPlan(interval_kernel(grid, a, b), ShearParams(0.0, m),
                                w0, backend=backend, check_support=False,
                                workers=workers)
