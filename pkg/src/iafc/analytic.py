"""Closed-form AFC echo results used as oracles and as the fit model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AfcParams:
    """Effective depth ``alpha~ L = alpha L / F`` and finesse ``F`` (``inf`` allowed)."""

    alpha_tilde_L: float
    finesse: float = np.inf

    def __post_init__(self):
        if not self.alpha_tilde_L >= 0:
            raise ValueError(f"alpha_tilde_L must be non-negative, got {self.alpha_tilde_L}")
        if not self.finesse > 0:
            raise ValueError(f"finesse must be positive, got {self.finesse}")


def dephasing_factor(finesse):
    """Intensity prefactor ``exp(-2 (sqrt(2) pi / F)^2)`` from finite tooth width."""
    f = np.asarray(finesse, dtype=float)
    return np.exp(-2.0 * (np.sqrt(2.0) * np.pi / f) ** 2)


def emission_probability(coeffs, t, delta):
    """``|sum_j c_j exp(i j t delta)|^2`` with ``j`` running over ``-N..N``."""
    c = np.asarray(coeffs, dtype=np.complex128)
    if c.ndim != 1 or c.size == 0:
        raise ValueError("coeffs must be a non-empty 1-D sequence")
    half = (c.size - 1) / 2.0
    j = np.arange(c.size) - half
    t = np.asarray(t, dtype=float)
    phase = np.exp(1j * np.multiply.outer(t, j) * delta)
    return np.abs(phase @ c) ** 2


def forward_shape(x):
    """``x^2 exp(-x)``: forward echo efficiency at infinite finesse."""
    x = np.asarray(x, dtype=float)
    return x * x * np.exp(-x)


def backward_shape(x):
    """``(1 - exp(-x))^2``: backward echo efficiency at infinite finesse."""
    x = np.asarray(x, dtype=float)
    return (-np.expm1(-x)) ** 2


def eta_forward(p: AfcParams) -> float:
    return float(dephasing_factor(p.finesse) * forward_shape(p.alpha_tilde_L))


def eta_backward(p: AfcParams) -> float:
    return float(dephasing_factor(p.finesse) * backward_shape(p.alpha_tilde_L))


def analytic_table(alpha_tilde_L, finesses, prefactor: bool = True):
    """Rows ``(alpha_tilde_L, finesse, eta_f, eta_b)`` over the product of both grids."""
    rows = []
    for f in finesses:
        for x in alpha_tilde_L:
            p = AfcParams(float(x), float(f) if prefactor else np.inf)
            rows.append((float(x), float(f), eta_forward(p), eta_backward(p)))
    return np.array(rows)
