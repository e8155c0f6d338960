"""Frequency-comb data model, stochastic perturbations and thermal reweighting.

Units: angular frequencies in rad/us, times in us.  A tooth's ``depth`` is
the dimensionless coefficient ``b`` of its propagator term
``b / (1/2 + i (omega - center) / width)`` at unit length scale, so an
isolated tooth on resonance has amplitude attenuation ``exp(-2 b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

#: Reduced Planck constant, J s.
HBAR = 1.054571817e-34
#: Boltzmann constant, J/K.
K_B = 1.380649e-23


class FinesseError(ValueError):
    """Comb spacing does not exceed the tooth width."""


@dataclass(frozen=True)
class Tooth:
    center: float
    width: float
    depth: float

    def __post_init__(self):
        if not math.isfinite(self.center):
            raise ValueError(f"tooth center must be finite, got {self.center}")
        if not self.width > 0:
            raise ValueError(f"tooth width must be positive, got {self.width}")
        if not self.depth >= 0:
            raise ValueError(f"tooth depth must be non-negative, got {self.depth}")


@dataclass(frozen=True)
class FrequencyComb:
    """Ordered set of Lorentzian absorption teeth."""

    teeth: tuple[Tooth, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "teeth", tuple(self.teeth))
        if not self.teeth:
            raise ValueError("a comb needs at least one tooth")
        c = [t.center for t in self.teeth]
        if any(b <= a for a, b in zip(c, c[1:])):
            raise ValueError("tooth centers must be strictly ascending")

    def __len__(self):
        return len(self.teeth)

    @cached_property
    def centers(self) -> np.ndarray:
        return np.array([t.center for t in self.teeth], dtype=float)

    @cached_property
    def widths(self) -> np.ndarray:
        return np.array([t.width for t in self.teeth], dtype=float)

    @cached_property
    def depths(self) -> np.ndarray:
        return np.array([t.depth for t in self.teeth], dtype=float)

    @property
    def spacing(self) -> float:
        """Mean neighbour spacing; 0 for a single tooth."""
        if len(self) < 2:
            return 0.0
        return float(np.mean(np.diff(self.centers)))

    @classmethod
    def from_arrays(cls, centers, widths, depths, label=""):
        order = np.argsort(centers, kind="stable")
        teeth = tuple(
            Tooth(float(centers[i]), float(widths[i]), float(depths[i])) for i in order
        )
        return cls(teeth, label)


@dataclass(frozen=True)
class ThermalSpec:
    """Ground-state energies (as E/hbar, rad/us), temperature and tooth map.

    ``tooth_assignment`` maps tooth index to ground-state index; when empty,
    tooth ``n`` is fed by ground state ``n``.
    """

    ground_energies: tuple[float, ...]
    temperature: float
    tooth_assignment: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "ground_energies", tuple(float(e) for e in self.ground_energies))
        if not self.ground_energies:
            raise ValueError("at least one ground state is required")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")

    def assignment_for(self, n_teeth: int) -> dict[int, int]:
        if self.tooth_assignment:
            return dict(self.tooth_assignment)
        return {n: n for n in range(n_teeth)}


def uniform_comb(n_teeth: int, delta: float, gamma: float, optical_depth: float) -> FrequencyComb:
    """Comb of ``n_teeth`` identical teeth at ``n * delta``, ``n = -N..N``.

    ``optical_depth`` is the comb optical depth ``alpha L``: every tooth gets
    depth ``alpha L / (2 pi)``, which makes the spectrally averaged intensity
    absorption equal ``alpha L / F`` (see :func:`effective_depth`).
    """
    if isinstance(n_teeth, bool) or int(n_teeth) != n_teeth or n_teeth < 1 or n_teeth % 2 == 0:
        raise ValueError(f"n_teeth must be a positive odd integer, got {n_teeth}")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if n_teeth > 1 and not delta > gamma:
        raise FinesseError(f"finesse delta/gamma = {delta / gamma:.3g} must exceed 1")
    if not optical_depth >= 0:
        raise ValueError(f"optical depth must be non-negative, got {optical_depth}")
    half = n_teeth // 2
    depth = optical_depth / (2 * np.pi)
    teeth = tuple(Tooth(n * delta, gamma, depth) for n in range(-half, half + 1))
    return FrequencyComb(teeth, label=f"uniform n={n_teeth} delta={delta!r} gamma={gamma!r} aL={optical_depth!r}")


def effective_depth(comb: FrequencyComb) -> float:
    """Spectrally averaged intensity absorption at unit length, ``alpha~ L``.

    Each tooth absorbs ``2 pi depth width`` when integrated over frequency;
    averaging over one comb period gives ``2 pi <depth width> / spacing``.
    """
    if len(comb) < 2:
        raise ValueError("effective depth needs at least two teeth")
    return float(2 * np.pi * np.mean(comb.depths * comb.widths) / comb.spacing)


def finesse(comb: FrequencyComb) -> float:
    """Mean neighbour spacing over mean tooth width."""
    if len(comb) < 2:
        raise ValueError("finesse is undefined for a single-tooth comb")
    return comb.spacing / float(np.mean(comb.widths))


def rescale_spacing(comb: FrequencyComb, new_spacing: float) -> FrequencyComb:
    """Stretch tooth centers about their mean so the mean spacing becomes ``new_spacing``."""
    mid = comb.centers.mean()
    k = new_spacing / comb.spacing
    c = mid + (comb.centers - mid) * k
    return FrequencyComb.from_arrays(c, comb.widths, comb.depths, comb.label)


def perturb_spacing(comb: FrequencyComb, gamma_r: float, rng: np.random.Generator) -> FrequencyComb:
    """Shift every tooth center by an independent uniform draw from ``[-gamma_r, gamma_r]``."""
    if not gamma_r >= 0:
        raise ValueError(f"gamma_r must be non-negative, got {gamma_r}")
    if gamma_r == 0:
        return comb
    shifts = rng.uniform(-gamma_r, gamma_r, size=len(comb))
    return FrequencyComb.from_arrays(comb.centers + shifts, comb.widths, comb.depths, comb.label)


def perturb_depth(comb: FrequencyComb, d_r: float, rng: np.random.Generator) -> FrequencyComb:
    """Add an independent uniform draw from ``[-d_r, d_r]`` to each depth, clamped at 0."""
    if not d_r >= 0:
        raise ValueError(f"d_r must be non-negative, got {d_r}")
    if d_r == 0:
        return comb
    d = np.maximum(0.0, comb.depths + rng.uniform(-d_r, d_r, size=len(comb)))
    teeth = tuple(replace(t, depth=float(x)) for t, x in zip(comb.teeth, d))
    return FrequencyComb(teeth, comb.label)


def boltzmann_weights(spec: ThermalSpec) -> np.ndarray:
    """Thermal populations ``exp(-E_m / k_B T) / Z`` of the ground states."""
    e = np.asarray(spec.ground_energies, dtype=float)
    # energies are stored as E/hbar in rad/us
    beta = HBAR * 1e6 / (K_B * spec.temperature)
    x = -(e - e.min()) * beta
    w = np.exp(x)
    return w / math.fsum(w)


def apply_populations(
    comb: FrequencyComb, weights: Sequence[float], assignment: Mapping[int, int]
) -> FrequencyComb:
    """Scale tooth ``n`` by ``M * w[m(n)]``; uniform weights leave the comb unchanged."""
    w = np.asarray(weights, dtype=float)
    m_states = len(w)
    teeth = []
    for n, t in enumerate(comb.teeth):
        if n not in assignment:
            raise KeyError(f"tooth {n} has no ground-state assignment")
        m = assignment[n]
        if not 0 <= m < m_states:
            raise KeyError(f"tooth {n} mapped to invalid ground state {m}")
        f = w[m] * m_states
        # 1/M * M can miss 1.0 by an ulp; uniform weights must be an exact identity
        if abs(f - 1.0) <= 4 * np.finfo(float).eps:
            teeth.append(t)
        else:
            teeth.append(replace(t, depth=t.depth * f))
    return FrequencyComb(tuple(teeth), comb.label)


def thermal_comb(comb: FrequencyComb, spec: ThermalSpec) -> FrequencyComb:
    return apply_populations(comb, boltzmann_weights(spec), spec.assignment_for(len(comb)))


# ---------------------------------------------------------------------------
# plain-text comb files: one "center width depth" record per line
# ---------------------------------------------------------------------------


def read_comb(path) -> FrequencyComb:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'center width depth', got {line!r}")
        rows.append(tuple(float(p) for p in parts))
    if not rows:
        raise ValueError(f"{path}: no teeth found")
    teeth = tuple(Tooth(*r) for r in sorted(rows))
    return FrequencyComb(teeth, label=str(path))


def write_comb(comb: FrequencyComb, path, header: str = "") -> None:
    lines = []
    for h in header.splitlines():
        lines.append(f"# {h}")
    lines.append("# center width depth  (rad/us, rad/us, dimensionless)")
    for t in comb.teeth:
        lines.append(f"{t.center!r} {t.width!r} {t.depth!r}")
    Path(path).write_text("\n".join(lines) + "\n")
