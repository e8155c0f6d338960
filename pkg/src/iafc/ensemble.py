"""Seeded Monte-Carlo averaging over perturbed combs.

Each trial is one atom with its own comb realisation.  Atoms radiate
incoherently, so the detected trace is the mean of per-trial intensities;
trial ``i`` always draws from the stream derived from ``(master_seed, i)``
so results do not depend on execution order or parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from . import _kernels
from .comb import FrequencyComb, perturb_depth, perturb_spacing, rescale_spacing
from .csvio import read_csv, write_csv
from .propagation import echo_window, gaussian_spectrum, make_grid, propagator, window_energy

Kind = Literal["spacing", "depth", "none"]
DEFAULT_TRIALS = 500


@dataclass(frozen=True)
class DisorderSpec:
    """Perturbation recipe.

    ``strength`` is in units of the mean tooth width for ``spacing`` and an
    absolute depth for ``depth``.
    """

    kind: Kind = "none"
    strength: float = 0.0
    n_trials: int = DEFAULT_TRIALS
    master_seed: int = 0

    def __post_init__(self):
        if self.kind not in ("spacing", "depth", "none"):
            raise ValueError(f"unknown disorder kind {self.kind!r}")
        if not self.strength >= 0:
            raise ValueError(f"strength must be non-negative, got {self.strength}")
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ValueError(f"n_trials must be a positive integer, got {self.n_trials}")

    @property
    def deterministic(self) -> bool:
        return self.kind == "none" or self.strength == 0


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    mean_efficiency: float
    std_error: float
    n_trials: int
    times: np.ndarray
    mean_intensity: np.ndarray
    per_trial_efficiencies: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class EfficiencyCurve:
    abscissa: np.ndarray
    ordinate: np.ndarray
    errors: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("abscissa", "ordinate", "errors"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.abscissa.size
        if self.ordinate.size != n or self.errors.size != n:
            raise ValueError("abscissa, ordinate and errors must have equal length")
        if np.any(np.diff(self.abscissa) <= 0):
            raise ValueError("abscissa must be strictly increasing")

    def to_csv(self, path):
        data = np.column_stack([self.abscissa, self.ordinate, self.errors])
        return write_csv(path, ["abscissa", "mean_eta", "std_error"], data, self.metadata)

    @classmethod
    def from_csv(cls, path):
        meta, _, data = read_csv(path)
        return cls(data[:, 0], data[:, 1], data[:, 2], meta)


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, derived from ``(master_seed, trial)``."""
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=(int(trial),)))


def realize(base: FrequencyComb, spec: DisorderSpec, rng: np.random.Generator) -> FrequencyComb:
    if spec.kind == "spacing":
        return perturb_spacing(base, spec.strength * float(np.mean(base.widths)), rng)
    if spec.kind == "depth":
        return perturb_depth(base, spec.strength, rng)
    return base


def spacing_margin(base: FrequencyComb, spec: DisorderSpec) -> float:
    if spec.kind == "spacing":
        return spec.strength * float(np.mean(base.widths))
    return 0.0


def default_sigma(comb: FrequencyComb) -> float:
    """Pulse bandwidth ``2 delta``, wide enough to cover a 7-tooth comb."""
    if len(comb) < 2:
        raise ValueError("pulse sigma must be given for a single-tooth comb")
    return 2.0 * comb.spacing


class _Accumulator:
    """Neumaier-compensated running sum of equally shaped arrays."""

    def __init__(self, n):
        self.total = np.zeros(n)
        self.comp = np.zeros(n)

    def add(self, x):
        _kernels.neumaier_add(self.total, self.comp, x)

    def merge(self, other: "_Accumulator"):
        self.add(other.total)
        self.add(other.comp)

    def value(self):
        return self.total + self.comp


class _Setup:
    def __init__(self, base, spec, sigma, grid=None):
        self.base = base
        self.spec = spec
        self.sigma = default_sigma(base) if sigma is None else float(sigma)
        self.grid = grid or make_grid(base, self.sigma, margin=spacing_margin(base, spec))
        self.pulse = gaussian_spectrum(self.grid, self.sigma)
        self.inp = self.pulse.to_time()
        self.times = self.inp.times
        self.norm = self.inp.energy()
        self.window = echo_window(base.spacing)
        self.scale = self.grid.n_points * self.grid.d_omega / (2 * np.pi)

    def intensity(self, dl, L_scale):
        e = _kernels.transmit(self.pulse.amplitudes, dl, float(L_scale))
        x = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(e))) * self.scale
        return _kernels.abs2(x)

    def efficiency(self, intensity):
        return window_energy(self.times, intensity, *self.window) / self.norm


def _chunks(seq, k):
    k = max(1, min(k, len(seq)))
    size = math.ceil(len(seq) / k)
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def _run_trials(setup: _Setup, trials, L_grid):
    """Accumulate intensities for ``trials`` at every length in ``L_grid``."""
    accs = [_Accumulator(setup.grid.n_points) for _ in L_grid]
    effs = np.empty((len(trials), len(L_grid)))
    omega = setup.grid.omega
    for r, i in enumerate(trials):
        comb = realize(setup.base, setup.spec, trial_rng(setup.spec.master_seed, i))
        dl = _kernels.propagator(omega, comb.centers, comb.widths, comb.depths, 1.0)
        for c, L in enumerate(L_grid):
            inten = setup.intensity(dl, L)
            accs[c].add(inten)
            effs[r, c] = setup.efficiency(inten)
    return accs, effs


def _ensemble(setup: _Setup, L_grid, trial_indices=None, workers=1):
    spec = setup.spec
    if spec.deterministic:
        trials = [0]
    elif trial_indices is None:
        trials = list(range(spec.n_trials))
    else:
        trials = [int(i) for i in trial_indices]
        if sorted(trials) != list(range(spec.n_trials)):
            raise ValueError("trial_indices must be a permutation of range(n_trials)")
    parts = _chunks(trials, workers)
    if len(parts) == 1:
        results = [_run_trials(setup, parts[0], L_grid)]
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as ex:
            results = list(ex.map(lambda p: _run_trials(setup, p, L_grid), parts))
    accs = [_Accumulator(setup.grid.n_points) for _ in L_grid]
    for part_accs, _ in results:
        for a, b in zip(accs, part_accs):
            a.merge(b)
    effs = np.concatenate([e for _, e in results], axis=0)
    out = []
    for c in range(len(L_grid)):
        if spec.deterministic:
            mean = accs[c].value()
            per = np.full(spec.n_trials, effs[0, c])
            err = 0.0
        else:
            mean = accs[c].value() / len(trials)
            # per-trial efficiencies in trial-index order
            per = np.empty(len(trials))
            per[np.asarray(trials)] = effs[:, c]
            err = float(np.std(per, ddof=1) / np.sqrt(len(per))) if len(per) > 1 else 0.0
        out.append(
            EnsembleResult(
                mean_efficiency=setup.efficiency(mean),
                std_error=err,
                n_trials=spec.n_trials,
                times=setup.times,
                mean_intensity=mean,
                per_trial_efficiencies=per,
            )
        )
    return out


def run_ensemble(
    base: FrequencyComb,
    spec: DisorderSpec,
    sigma: float | None = None,
    L_scale: float = 1.0,
    *,
    grid=None,
    trial_indices: Sequence[int] | None = None,
    workers: int = 1,
) -> EnsembleResult:
    """Mean first-echo efficiency of ``spec.n_trials`` perturbed copies of ``base``.

    The efficiency is evaluated on the mean intensity trace; ``std_error``
    is the sample standard deviation of per-trial efficiencies over
    ``sqrt(n)``.  ``trial_indices`` may reorder the trials (the result is
    unchanged up to rounding); ``workers > 1`` runs chunks in threads.
    """
    if not L_scale >= 0:
        raise ValueError(f"L_scale must be non-negative, got {L_scale}")
    setup = _Setup(base, spec, sigma, grid)
    return _ensemble(setup, [L_scale], trial_indices, workers)[0]


def sweep_length(
    base: FrequencyComb,
    spec: DisorderSpec,
    sigma: float | None,
    L_grid: Sequence[float],
    *,
    workers: int = 1,
) -> EfficiencyCurve:
    """Mean forward efficiency at each length scale in ``L_grid``.

    Every length sees the same comb realisations, so the curve is smooth in
    ``L`` and each point equals ``run_ensemble`` at that length.
    """
    L = np.asarray(L_grid, dtype=float)
    if L.size < 1 or np.any(L < 0) or np.any(np.diff(L) <= 0):
        raise ValueError("L_grid must be non-negative and strictly increasing")
    setup = _Setup(base, spec, sigma)
    res = _ensemble(setup, list(L), None, workers)
    meta = _metadata(base, spec, setup) | {"abscissa": "L_scale"}
    return EfficiencyCurve(
        L,
        [r.mean_efficiency for r in res],
        [r.std_error for r in res],
        meta,
    )


def sweep_strength(
    base: FrequencyComb,
    kind: Kind,
    strengths: Sequence[float],
    finesses: Sequence[float],
    sigma: float | None = None,
    L_scale: float = 1.0,
    n_trials: int = DEFAULT_TRIALS,
    master_seed: int = 0,
    *,
    workers: int = 1,
) -> list[EfficiencyCurve]:
    """One efficiency-vs-strength curve per finesse.

    Finesse is set by rescaling the spacing at fixed tooth widths and depths.
    With ``sigma=None`` the pulse width follows ``2 delta`` of each comb.
    """
    s = np.asarray(strengths, dtype=float)
    if s.size < 1 or np.any(np.diff(s) <= 0):
        raise ValueError("strengths must be strictly increasing")
    gamma = float(np.mean(base.widths))
    curves = []
    for f in finesses:
        comb = rescale_spacing(base, float(f) * gamma)
        ys, es = [], []
        for st in s:
            spec = DisorderSpec(kind, float(st), n_trials, master_seed)
            r = run_ensemble(comb, spec, sigma, L_scale, workers=workers)
            ys.append(r.mean_efficiency)
            es.append(r.std_error)
        meta = _metadata(comb, DisorderSpec(kind, 0.0, n_trials, master_seed), None)
        meta.update(finesse=float(f), L_scale=float(L_scale), abscissa=f"{kind}_strength")
        meta["sigma"] = "2*delta" if sigma is None else float(sigma)
        curves.append(EfficiencyCurve(s, ys, es, meta))
    return curves


def _metadata(comb: FrequencyComb, spec: DisorderSpec, setup: _Setup | None) -> dict:
    meta = {
        "kind": spec.kind,
        "n_trials": spec.n_trials,
        "master_seed": spec.master_seed,
        "n_teeth": len(comb),
        "centers": comb.centers.tolist(),
        "widths": comb.widths.tolist(),
        "depths": comb.depths.tolist(),
    }
    if spec.kind != "none":
        meta["strength"] = spec.strength
    if setup is not None:
        meta.update(sigma=setup.sigma, n_points=setup.grid.n_points, d_omega=setup.grid.d_omega)
    return meta
