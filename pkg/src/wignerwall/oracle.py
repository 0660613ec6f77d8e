"""Wavefunction-space ground truth for validating the convolution method.

Closed-form dispersive Gaussian packets, the image-reflection solution on
the half line, and eigenmode evolution in a finite box, plus field
comparison metrics. All dynamics here are exact in time; the only
numerics are sampling and the projection quadrature, which runs on a
finer auxiliary axis so oracle error stays far below method error.

Units: hbar = 1 and i dpsi/dt = -(1/2m) psi''. A packet with momentum
p0 > 0 moves to the right with velocity p0/m.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, SupportEscaped, TruncationTooSevere, ValidationError
from .phase_grid import ComplexWave, WignerField, total_mass, wave_edge_fraction


@dataclass(frozen=True)
class GaussianPacket:
    """Free Gaussian packet; sigma is the position std of |psi|^2 at t = 0."""

    x0: float
    p0: float
    sigma: float
    m: float

    def __post_init__(self):
        if self.sigma <= 0 or self.m <= 0:
            raise ValidationError("need sigma > 0 and m > 0")

    def width_sq(self, t: float) -> float:
        """Variance of |psi|^2 at time t: sigma^2 + t^2/(4 m^2 sigma^2)."""
        return self.sigma**2 + t**2 / (4.0 * self.m**2 * self.sigma**2)

    def amplitude(self, x: np.ndarray, t: float) -> np.ndarray:
        """psi(x, t) evaluated in closed form.

        A = sigma^2 + i t/(2m) is the complex squared width; the phase
        convention carries e^{i p0 (x - x0 - p0 t / 2m)}.
        """
        A = self.sigma**2 + 0.5j * t / self.m
        B = x - self.x0 - self.p0 * t / self.m
        pref = (2.0 * np.pi * self.sigma**2) ** (-0.25) * (self.sigma / np.sqrt(A))
        return pref * np.exp(-(B**2) / (4.0 * A)) * np.exp(
            1j * self.p0 * (x - self.x0 - self.p0 * t / (2.0 * self.m))
        )


@dataclass(frozen=True)
class BoxSpectrum:
    """State in a hard-wall box [a, b] as orthonormal sine-mode coefficients.

    Mode n has u_n(x) = sqrt(2/L) sin(n pi (x-a)/L) and energy
    E_n = n^2 pi^2 / (2 m L^2); coefficients satisfy sum |c_n|^2 = 1.
    """

    a: float
    b: float
    m: float
    coefficients: np.ndarray

    def __post_init__(self):
        if self.b <= self.a or self.m <= 0:
            raise ValidationError("need b > a and m > 0")
        c = np.asarray(self.coefficients, dtype=np.complex128)
        object.__setattr__(self, "coefficients", c)
        n2 = float(np.sum(np.abs(c) ** 2))
        if abs(n2 - 1.0) >= 1e-9:
            raise ValidationError(f"coefficient norm^2 = {n2!r}, not 1 within 1e-9")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def n_max(self) -> int:
        return len(self.coefficients)

    def energies(self) -> np.ndarray:
        n = np.arange(1, self.n_max + 1)
        return n**2 * np.pi**2 / (2.0 * self.m * self.length**2)

    def revival_time(self) -> float:
        """T with E_n T = 2 pi n^2 for every n: T = 4 m L^2 / pi."""
        return 4.0 * self.m * self.length**2 / np.pi


def _wave_axis(x_min: float, x_max: float, dx: float) -> np.ndarray:
    n = int(round((x_max - x_min) / dx)) + 1
    return x_min + dx * np.arange(n)


def free_gaussian(g: GaussianPacket, t: float,
                  x_min: float, dx: float, n: int) -> ComplexWave:
    """Sample the dispersed packet on the requested axis at time t.

    Raises SupportEscaped when the packet no longer fits the axis.
    """
    x = x_min + dx * np.arange(n)
    wave = ComplexWave(x_min, dx, n, g.amplitude(x, t))
    if wave_edge_fraction(wave) > 1e-9:
        raise SupportEscaped("dispersed packet reaches the axis ends")
    return wave


def images_reflect(g: GaussianPacket, t: float,
                   x_min: float, dx: float, n: int) -> ComplexWave:
    """Half-line solution psi(x, t) = [phi(x, t) - phi(-x, t)] theta(x).

    The image term makes psi(0, t) = 0 for all t; theta removes the
    unphysical x < 0 remainder (theta(0) = 0 here, consistent with the
    kernels). Requires the packet to start well inside x > 0.
    """
    if _left_overlap(g) > 1e-8:
        raise SupportEscaped("packet initially overlaps the wall at x = 0")
    x = x_min + dx * np.arange(n)
    values = (g.amplitude(x, t) - g.amplitude(-x, t)) * (x > 0)
    wave = ComplexWave(x_min, dx, n, values)
    if wave_edge_fraction(wave) > 1e-9:
        raise SupportEscaped("reflected state reaches the axis ends")
    return wave


def _left_overlap(g: GaussianPacket) -> float:
    """Mass of the t = 0 packet on x <= 0, by quadrature on a fine axis."""
    lo = min(-8.0 * g.sigma, g.x0 - 10.0 * g.sigma)
    x = np.linspace(lo, 0.0, 2001)
    return float(np.trapezoid(np.abs(g.amplitude(x, 0.0)) ** 2, x))


def project_gaussian_to_box(g: GaussianPacket, a: float, b: float,
                            n_max: int, quad_points: int = 20001) -> BoxSpectrum:
    """Sine-mode coefficients of the packet by quadrature on a fine axis.

    Raises TruncationTooSevere when the reconstruction misses more than
    1e-6 of the state in L2.
    """
    if b <= a:
        raise ValidationError("need b > a")
    wall_overlap = _box_wall_overlap(g, a, b)
    if wall_overlap > 1e-8:
        raise SupportEscaped("packet overlaps a box wall at t = 0")
    L = b - a
    x = np.linspace(a, b, quad_points)
    psi0 = g.amplitude(x, 0.0)
    n = np.arange(1, n_max + 1)
    basis = np.sqrt(2.0 / L) * np.sin(np.outer(n, np.pi * (x - a) / L))
    c = np.trapezoid(basis * psi0[None, :], x, axis=1)
    # residual against the (unit-norm) packet restricted to the box
    recon = np.sum(c[:, None] * basis, axis=0)
    err = float(np.sqrt(np.trapezoid(np.abs(recon - psi0) ** 2, x)))
    if err > 1e-6:
        raise TruncationTooSevere(
            f"n_max = {n_max} reconstruction error {err:g} exceeds 1e-6"
        )
    c = c / np.sqrt(np.sum(np.abs(c) ** 2))
    return BoxSpectrum(a, b, g.m, c)


def _box_wall_overlap(g: GaussianPacket, a: float, b: float) -> float:
    sig = g.sigma
    xl = np.linspace(a - 10 * sig, a, 1001)
    xr = np.linspace(b, b + 10 * sig, 1001)
    d = np.abs(g.amplitude(xl, 0.0)) ** 2
    return float(np.trapezoid(d, xl) + np.trapezoid(np.abs(g.amplitude(xr, 0.0)) ** 2, xr))


def box_evolve(s: BoxSpectrum, t: float,
               x_min: float, dx: float, n: int) -> ComplexWave:
    """psi(x, t) = sum_n c_n u_n(x) e^{-i E_n t}, zero outside [a, b].

    Endpoints land exactly on zero because every mode vanishes there.
    """
    x = x_min + dx * np.arange(n)
    L = s.length
    inside = (x > s.a) & (x < s.b)
    modes = np.arange(1, s.n_max + 1)
    values = np.zeros(n, dtype=np.complex128)
    phases = s.coefficients * np.exp(-1j * s.energies() * t)
    values[inside] = np.sqrt(2.0 / L) * np.sum(
        phases[:, None] * np.sin(np.outer(modes, np.pi * (x[inside] - s.a) / L)),
        axis=0,
    )
    return ComplexWave(x_min, dx, n, values)


def box_fidelity(s: BoxSpectrum, t: float) -> float:
    """|<psi(0)|psi(t)>| from the spectrum alone (basis is orthonormal)."""
    phases = np.exp(-1j * s.energies() * t)
    return float(abs(np.sum(np.abs(s.coefficients) ** 2 * phases)))


@dataclass(frozen=True)
class FieldComparison:
    l2_rel: float
    max_abs: float
    mass_diff: float


def compare_fields(w_a: WignerField, w_b: WignerField) -> FieldComparison:
    """Distance of w_a from the reference w_b: ||a-b||_2/||b||_2, max |a-b|,
    and |mass(a) - mass(b)|."""
    if w_a.grid != w_b.grid:
        raise GridMismatch("cannot compare fields on different grids")
    diff = w_a.values - w_b.values
    ref = float(np.linalg.norm(w_b.values))
    l2 = float(np.linalg.norm(diff)) / ref if ref > 0 else float(np.linalg.norm(diff))
    return FieldComparison(
        l2_rel=l2,
        max_abs=float(np.abs(diff).max()),
        mass_diff=abs(total_mass(w_a) - total_mass(w_b)),
    )
