"""Wigner transform of a pure state by Fourier analysis over the separation.

The transform used throughout is

    W(x, p) = (1/2pi) int e^{ipy} psi*(x + y/2) psi(x - y/2) dy,

the sign pairing under which multiplying psi by e^{i p0 x} shifts W by +p0
along p and a packet at momentum p0 drifts with velocity +p0/m under
i dpsi/dt = -(1/2m) psi''. The correlation product is Hermitian in y, so
the transform is real; the imaginary residue is asserted below tolerance
and discarded.

Discretization: the correlation is sampled on the lattice y_k = k * dy
with dy = 2 * dx of the wave axis, which places both factors x +- y/2 on
axis nodes exactly. Grid x nodes must therefore lie on the wave axis
(the axis may be an integer refinement of the grid). Values at the
requested momenta are the semi-discrete Fourier sums evaluated at exact
p, via Bluestein's chirp-z transform; they are never binned to
FFT-native frequencies.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import czt

from .errors import DomainTooSmall, GridMismatch, NyquistViolation, RealnessViolation
from .phase_grid import ComplexWave, PhaseGrid, WignerField, wave_edge_fraction

REALNESS_TOL = 1e-10
_EDGE_FRACTION_TOL = 1e-9


def _anchor_rows(psi: ComplexWave, grid: PhaseGrid) -> np.ndarray:
    """Wave-axis indices of the grid x nodes; GridMismatch if off-lattice."""
    frac = (grid.x_axis() - psi.x_min) / psi.dx
    rows = np.round(frac).astype(int)
    if np.abs(frac - rows).max() > 1e-6:
        raise GridMismatch("grid x nodes do not lie on the wave axis")
    return rows


def _reach(psi: ComplexWave, grid: PhaseGrid, y_halfwidth: float | None) -> int:
    """Half-count K of correlation samples: y runs over k in [-K, K]."""
    rows = _anchor_rows(psi, grid)
    if rows.min() < 0 or rows.max() > psi.n - 1:
        raise DomainTooSmall("wave axis does not cover the grid x range")
    if y_halfwidth is None:
        # full reach; zero extension beyond the axis requires a decayed edge
        if wave_edge_fraction(psi) > _EDGE_FRACTION_TOL:
            raise DomainTooSmall(
                "wave support reaches the axis ends; enlarge the axis or "
                "pass y_halfwidth for intentionally extended states"
            )
        return psi.n - 1
    K = int(np.floor(y_halfwidth / (2.0 * psi.dx)))
    if K < 1:
        raise DomainTooSmall("y_halfwidth below one correlation step")
    if rows.min() - K < 0 or rows.max() + K > psi.n - 1:
        raise DomainTooSmall(
            "wave axis must extend y_halfwidth/2 beyond the grid x range"
        )
    return K


def _check_nyquist(psi: ComplexWave, grid: PhaseGrid) -> None:
    dy = 2.0 * psi.dx
    band = np.pi / dy
    pmax = max(abs(grid.p_min), abs(grid.p_max))
    if pmax * dy >= np.pi:
        raise NyquistViolation(
            f"momentum window |p| <= {pmax:g} exceeds the representable "
            f"band {band:g} of the correlation lattice"
        )


def correlation_matrix(psi: ComplexWave, grid: PhaseGrid,
                       y_halfwidth: float | None = None) -> tuple[np.ndarray, int]:
    """Correlation slices c(x_i, y_k) = psi*(x_i + y_k/2) psi(x_i - y_k/2).

    Returns (C, K) with C of shape [n_x, 2K+1], column k - K holding y_k.
    Out-of-axis factors contribute zero (compact support assumption).
    """
    rows = _anchor_rows(psi, grid)
    K = _reach(psi, grid, y_halfwidth)
    ks = np.arange(-K, K + 1)
    i_plus = rows[:, None] + ks[None, :]
    i_minus = rows[:, None] - ks[None, :]
    ok = (i_plus >= 0) & (i_plus < psi.n) & (i_minus >= 0) & (i_minus < psi.n)
    s = psi.samples
    C = np.where(ok,
                 np.conj(s[np.clip(i_plus, 0, psi.n - 1)])
                 * s[np.clip(i_minus, 0, psi.n - 1)],
                 0.0)
    return C, K


def hermitian_residual(C: np.ndarray) -> float:
    """Max |c(y) - c(-y)*| over a correlation matrix; zero for valid slices."""
    return float(np.abs(C - np.conj(C[:, ::-1])).max())


def fourier_over_separation(C: np.ndarray, K: int, dy: float,
                            p_axis: np.ndarray, backend: str = "czt") -> np.ndarray:
    """Complex transform (dy/2pi) sum_k C[:, k+K] e^{i p y_k} at exact p.

    backend "czt" evaluates the sum with Bluestein's algorithm; "direct"
    forms the exponential matrix and contracts it, and serves as the slow
    reference path in tests.
    """
    p_axis = np.asarray(p_axis, dtype=np.float64)
    if backend == "czt":
        dp = p_axis[1] - p_axis[0]
        S = czt(C, m=len(p_axis), w=np.exp(1j * dp * dy),
                a=np.exp(-1j * p_axis[0] * dy), axis=1)
    elif backend == "direct":
        y = dy * np.arange(-K, K + 1)
        S = C @ np.exp(1j * np.outer(y, p_axis))
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "czt":
        # czt indexes columns from 0; restore the y_{-K} origin
        S = S * np.exp(-1j * K * dy * p_axis)[None, :]
    return (dy / (2.0 * np.pi)) * S


def wigner_of(psi: ComplexWave, grid: PhaseGrid,
              y_halfwidth: float | None = None,
              backend: str = "czt") -> WignerField:
    """Wigner transform of ``psi`` sampled on ``grid``.

    The wave axis must contain every grid x node (its spacing may be an
    integer refinement of the grid's). ``y_halfwidth`` truncates the
    correlation reach uniformly; states that are not compactly supported
    on their axis (image trains, box eigenmodes) require it, and the cap
    must then sit in a region where the correlation is negligible.

    Raises DomainTooSmall, NyquistViolation, GridMismatch, or
    RealnessViolation (imaginary residue of the transform >= 1e-10).
    """
    _check_nyquist(psi, grid)
    C, K = correlation_matrix(psi, grid, y_halfwidth)
    W = fourier_over_separation(C, K, 2.0 * psi.dx, grid.p_axis(), backend)
    residue = float(np.abs(W.imag).max())
    if residue >= REALNESS_TOL:
        raise RealnessViolation(
            f"imaginary residue {residue:g} of the transform exceeds "
            f"{REALNESS_TOL:g}; corrupted correlation input?"
        )
    return WignerField(grid, W.real)


def wigner_of_direct(psi: ComplexWave, grid: PhaseGrid,
                     y_halfwidth: float | None = None) -> WignerField:
    """Slow reference path: same construction, direct exponential sum."""
    return wigner_of(psi, grid, y_halfwidth, backend="direct")


def wigner_realness_check(psi: ComplexWave, grid: PhaseGrid,
                          y_halfwidth: float | None = None) -> float:
    """Max imaginary residue of the raw transform, before truncation.

    Diagnostic for the Hermitian symmetry of the correlation slices; a
    healthy input stays below 1e-10, a corrupted one fires well above.
    """
    _check_nyquist(psi, grid)
    C, K = correlation_matrix(psi, grid, y_halfwidth)
    W = fourier_over_separation(C, K, 2.0 * psi.dx, grid.p_axis())
    return float(np.abs(W.imag).max())
