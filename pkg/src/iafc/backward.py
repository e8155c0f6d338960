"""Indirect backward-efficiency estimate from a forward length sweep.

A forward efficiency-vs-length curve is fitted with ``eta0 (a L)^2 exp(-a L)``;
the fitted prefactor ``eta0`` and effective depth ``a`` then give the
backward efficiency ``eta0 (1 - exp(-a L))^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import backward_shape, forward_shape
from .comb import FrequencyComb, effective_depth

DEFAULT_GATE = 0.02
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

# coarse search range for a * L_max
_U_LO = 1e-3
_U_HI = 1e3
_U_POINTS = 241


class FitError(ValueError):
    """Input data cannot be fitted, or a fit is unusable."""


@dataclass(frozen=True)
class FitResult:
    eta0: float
    alpha_tilde: float
    rms_residual: float
    converged: bool


def _profile(u, x, y):
    """Best ``eta0`` and residual sum of squares at ``a L_max = u``."""
    f = forward_shape(u * x)
    ff = float(f @ f)
    if ff == 0.0:
        return 0.0, float(y @ y)
    eta0 = float(f @ y) / ff
    r = eta0 * f - y
    return eta0, float(r @ r)


def _golden(fun, a, b, rtol):
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    while abs(b - a) > rtol * 0.5 * (abs(a) + abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def fit_forward_model(lengths, efficiencies, rtol: float = 1e-8) -> FitResult:
    """Least-squares fit of ``eta0 (a L)^2 exp(-a L)`` to forward efficiencies.

    For fixed ``a`` the optimal ``eta0`` is linear, so only ``a`` is searched:
    a log-spaced coarse scan brackets the minimum and golden-section search
    refines it to relative tolerance ``rtol``.  The search runs in
    ``u = a L_max``, which makes the fit exactly covariant under rescaling
    of all lengths.  ``converged`` is False when the best coarse point lies
    on the scan boundary or the prefactor falls outside ``(0, 1]``.
    """
    L = np.asarray(lengths, dtype=float)
    y = np.asarray(efficiencies, dtype=float)
    if L.ndim != 1 or L.shape != y.shape:
        raise FitError("lengths and efficiencies must be 1-D of equal length")
    if L.size < 5:
        raise FitError(f"need at least 5 points, got {L.size}")
    if np.any(~np.isfinite(L)) or np.any(L <= 0) or np.any(np.diff(L) <= 0):
        raise FitError("lengths must be positive and strictly increasing")
    if np.any(~np.isfinite(y)) or np.any(y < 0) or np.any(y > 1):
        raise FitError("efficiencies must lie in [0, 1]")
    if not np.any(y > 0):
        raise FitError("all efficiencies are zero")

    lmax = L[-1]
    x = L / lmax
    grid = np.geomspace(_U_LO, _U_HI, _U_POINTS)
    sse = np.array([_profile(u, x, y)[1] for u in grid])
    k = int(np.argmin(sse))
    on_edge = k == 0 or k == grid.size - 1
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    u = _golden(lambda v: _profile(v, x, y)[1], lo, hi, rtol)
    eta0, s = _profile(u, x, y)
    rms = math.sqrt(s / L.size)
    converged = (not on_edge) and 0.0 < eta0 <= 1.0 + 1e-6
    return FitResult(eta0=eta0, alpha_tilde=u / lmax, rms_residual=rms, converged=converged)


def backward_efficiency(fit: FitResult, L_scale):
    """``eta0 (1 - exp(-alpha~ L))^2`` for a converged fit."""
    if not fit.converged:
        raise FitError("backward efficiency requested from a non-converged fit")
    L = np.asarray(L_scale, dtype=float)
    out = fit.eta0 * backward_shape(fit.alpha_tilde * L)
    return float(out) if out.ndim == 0 else out


def fit_quality_gate(fit: FitResult, threshold: float = DEFAULT_GATE) -> bool:
    """True when the fit residual is small enough to trust a backward estimate."""
    return fit.rms_residual <= threshold


def length_grid(comb: FrequencyComb, n_points: int = 16, x_max: float = 5.0) -> np.ndarray:
    """Evenly spaced length scales reaching nominal ``alpha~ L = x_max``.

    The default range brackets the forward optimum at ``alpha~ L = 2`` and
    reaches far enough into the decaying side to separate good and bad fits.
    """
    if n_points < 5:
        raise ValueError("a length sweep needs at least 5 points")
    a = effective_depth(comb)
    if not a > 0:
        raise ValueError("comb has zero absorption; no length sweep possible")
    return np.linspace(x_max / n_points, x_max, n_points) / a


@dataclass(frozen=True, eq=False)
class BackwardEstimate:
    curve: object
    fit: FitResult
    gate_passed: bool
    backward: np.ndarray | None

    @property
    def eta_backward(self) -> float:
        """Backward efficiency at the longest length of the sweep."""
        if self.backward is None:
            raise FitError("fit did not converge")
        return float(self.backward[-1])


def estimate_backward(comb, spec, sigma=None, L_grid=None, threshold=DEFAULT_GATE, *, workers=1):
    """Length sweep, forward fit and backward evaluation in one call."""
    from .ensemble import sweep_length

    if L_grid is None:
        L_grid = length_grid(comb)
    curve = sweep_length(comb, spec, sigma, L_grid, workers=workers)
    fit = fit_forward_model(curve.abscissa, curve.ordinate)
    back = backward_efficiency(fit, curve.abscissa) if fit.converged else None
    return BackwardEstimate(curve, fit, fit_quality_gate(fit, threshold), back)
