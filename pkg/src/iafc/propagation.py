"""Frequency grids, the comb propagator and forward pulse propagation.

The field transmitted through length ``L`` is ``E(L, w) = E(0, w) exp(-D(w) L)``
with ``D`` the sum of Lorentzian tooth terms.  Time traces use the
convention ``E(t) = (1/2pi) Int E(w) exp(+i w t) dw``, which makes the
tooth poles (upper half plane) causal: echoes appear at ``t > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .comb import FrequencyComb

DEFAULT_MAX_POINTS = 2**22


class GridError(ValueError):
    """The requested discretisation is impossible or too large."""


@dataclass(frozen=True)
class SpectralGrid:
    """``n_points`` samples of step ``d_omega`` centred on zero detuning."""

    n_points: int
    d_omega: float

    def __post_init__(self):
        n = self.n_points
        if n < 2 or n & (n - 1):
            raise GridError(f"n_points must be a power of two >= 2, got {n}")
        if not self.d_omega > 0:
            raise GridError(f"d_omega must be positive, got {self.d_omega}")

    @property
    def omega(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.d_omega

    @property
    def span(self) -> float:
        return self.n_points * self.d_omega

    @property
    def dt(self) -> float:
        return 2 * np.pi / self.span

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.dt

    @property
    def time_window(self) -> float:
        return 2 * np.pi / self.d_omega


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: SpectralGrid
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        if a.shape != (self.grid.n_points,):
            raise ValueError("amplitude length does not match grid")
        if not np.all(np.isfinite(a)):
            raise ValueError("spectral amplitudes must be finite")
        object.__setattr__(self, "amplitudes", a)

    def energy(self) -> float:
        """``(1/2pi) Int |E(w)|^2 dw`` on the periodic grid."""
        return float(np.sum(_kernels.abs2(self.amplitudes)) * self.grid.d_omega / (2 * np.pi))

    def to_time(self) -> "TimeField":
        g = self.grid
        x = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(self.amplitudes)))
        return TimeField(g.times, x * (g.n_points * g.d_omega / (2 * np.pi)))


@dataclass(frozen=True, eq=False)
class TimeField:
    times: np.ndarray
    amplitudes: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def intensity(self) -> np.ndarray:
        return _kernels.abs2(np.ascontiguousarray(self.amplitudes))

    def energy(self) -> float:
        """Periodic rectangle sum of ``|E(t)|^2``, exact partner of the spectral energy."""
        return float(np.sum(self.intensity) * self.dt)


class EchoPeak(NamedTuple):
    time: float
    reliable: bool


def make_grid(
    comb: FrequencyComb,
    pulse_sigma: float,
    margin: float = 0.0,
    max_points: int = DEFAULT_MAX_POINTS,
) -> SpectralGrid:
    """Smallest power-of-two grid that resolves ``comb`` and a pulse of width ``pulse_sigma``.

    The grid spans at least ``2 (outermost center + margin + 6 sigma)``, its
    step is at most a twentieth of the narrowest tooth, and its time window
    holds three echo periods.  ``margin`` reserves room for spacing
    perturbations of that size.
    """
    if not pulse_sigma > 0:
        raise GridError(f"pulse sigma must be positive, got {pulse_sigma}")
    if not margin >= 0:
        raise GridError(f"margin must be non-negative, got {margin}")
    outer = float(np.max(np.abs(comb.centers))) + margin
    span_min = 2.0 * (outer + 6.0 * pulse_sigma)
    d_omega = float(np.min(comb.widths)) / 20.0
    if len(comb) > 1:
        # time window 2pi/d_omega >= 3 echo periods 2pi/delta
        d_omega = min(d_omega, comb.spacing / 3.0)
    if not d_omega > 0:
        raise GridError("tooth width is zero; cannot resolve the comb")
    need = span_min / d_omega
    if not np.isfinite(need) or need > max_points:
        raise GridError(f"grid would need {need:.3g} points (max {max_points})")
    n = 16
    while n < need:
        n *= 2
    if n > max_points:
        raise GridError(f"grid would need {n} points (max {max_points})")
    return SpectralGrid(n, d_omega)


def gaussian_spectrum(grid: SpectralGrid, sigma: float) -> SpectralField:
    """Unit-peak Gaussian ``exp(-w^2 / (2 sigma^2))`` centred on the carrier."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    w = grid.omega
    return SpectralField(grid, np.exp(-(w * w) / (2.0 * sigma * sigma)).astype(np.complex128))


def propagator(comb: FrequencyComb, grid: SpectralGrid, L_scale: float = 1.0) -> np.ndarray:
    """``D(w) L`` on the grid: sum of ``depth L / (1/2 + i (w - center) / width)``."""
    return _kernels.propagator(grid.omega, comb.centers, comb.widths, comb.depths, float(L_scale))


def propagate_forward(pulse: SpectralField, comb: FrequencyComb, L_scale: float = 1.0):
    """Transmit ``pulse`` through the comb; returns ``(spectral, temporal)`` output."""
    if not L_scale >= 0:
        raise ValueError(f"L_scale must be non-negative, got {L_scale}")
    dl = propagator(comb, pulse.grid, 1.0)
    out = SpectralField(pulse.grid, _kernels.transmit(pulse.amplitudes, dl, float(L_scale)))
    return out, out.to_time()


def _check_same_grid(a: TimeField, b: TimeField):
    if a.times.shape != b.times.shape or a.times[0] != b.times[0] or a.dt != b.dt:
        raise GridError("fields live on different time grids")


def echo_window(delta: float) -> tuple[float, float]:
    if not delta > 0:
        raise ValueError(f"comb spacing must be positive, got {delta}")
    return np.pi / delta, 3 * np.pi / delta


def window_energy(times: np.ndarray, intensity: np.ndarray, lo: float, hi: float) -> float:
    if lo < times[0] or hi > times[-1]:
        raise GridError(f"window [{lo:.4g}, {hi:.4g}] exceeds the time grid; rebuild the grid larger")
    return float(_kernels.window_trapz(times, intensity, lo, hi))


def first_echo_efficiency(out: TimeField, inp: TimeField, delta: float) -> float:
    """Energy of ``out`` in ``[pi/delta, 3pi/delta]`` over the total energy of ``inp``."""
    _check_same_grid(out, inp)
    lo, hi = echo_window(delta)
    num = window_energy(out.times, out.intensity, lo, hi)
    return num / inp.energy()


def echo_peak_time(out: TimeField, window) -> EchoPeak:
    """Time of maximum intensity inside ``window``.

    ``reliable`` is False when the maximum sits on the window edge or does
    not stand out against the edge intensities, as for a single tooth whose
    free decay has no echo.
    """
    lo, hi = window
    t = out.times
    if lo < t[0] or hi > t[-1]:
        raise GridError("peak window lies outside the time grid")
    sel = np.nonzero((t >= lo) & (t <= hi))[0]
    if sel.size == 0:
        raise ValueError(f"no samples in window [{lo}, {hi}]")
    inten = out.intensity[sel]
    k = int(np.argmax(inten))
    edge = max(inten[0], inten[-1])
    reliable = 0 < k < sel.size - 1 and inten[k] > 2.0 * edge
    return EchoPeak(float(t[sel[k]]), bool(reliable))
