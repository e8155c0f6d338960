"""Exit criteria, each checked at its stated tolerance.

Run alone with ``pytest -m acceptance``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import itertools
import math

import mpmath
import numpy as np
import pytest

from iafc import (
    AfcParams,
    DisorderSpec,
    ThermalSpec,
    apply_populations,
    echo_peak_time,
    eta_backward,
    eta_forward,
    first_echo_efficiency,
    fit_forward_model,
    gaussian_spectrum,
    make_grid,
    propagate_forward,
    run_ensemble,
    sweep_strength,
    thermal_comb,
    uniform_comb,
)
from iafc.analytic import forward_shape
from iafc.backward import estimate_backward, length_grid
from iafc.propagation import echo_window

pytestmark = pytest.mark.acceptance

GAMMA = 2 * np.pi * 5
OPTICAL_DEPTH = 30.0
N_TEETH = 7
TRIALS = 500
SEED = 2024
FINESSES = [20.0, 60.0, 100.0]
HIGH_FINESSE = 60.0


def _baseline(F=20.0):
    return uniform_comb(N_TEETH, F * GAMMA, GAMMA, OPTICAL_DEPTH)


def _simulate(comb):
    sigma = 2 * comb.spacing
    grid = make_grid(comb, sigma)
    pulse = gaussian_spectrum(grid, sigma)
    _, out = propagate_forward(pulse, comb)
    return grid, pulse.to_time(), out


def test_c1_forward_optimum(detail):
    mpmath.mp.dps = 30
    ref = float(4 * mpmath.exp(-2))
    peak = eta_forward(AfcParams(2.0))
    # stationary point and global maximum on a dense scan
    h = 1e-5
    slope = (eta_forward(AfcParams(2.0 + h)) - eta_forward(AfcParams(2.0 - h))) / (2 * h)
    scan = forward_shape(np.linspace(0.0, 20.0, 200001))
    detail("C1", f"max eta_f = {peak:.12f} at 2 (ref {ref:.12f}), slope {slope:.1e}")
    assert abs(peak - ref) <= 1e-9
    assert abs(slope) <= 1e-8
    assert scan.max() <= peak + 1e-9


def test_c2_backward_saturation(detail):
    mpmath.mp.dps = 30
    ref = float((1 - mpmath.exp(-2)) ** 2)
    at2 = eta_backward(AfcParams(2.0))
    far = eta_backward(AfcParams(60.0))
    detail("C2", f"eta_b(2) = {at2:.12f} (ref {ref:.12f}), eta_b(60) = {far:.15f}")
    assert abs(at2 - ref) <= 1e-9
    assert abs(at2 - 0.74765) <= 5e-6
    assert abs(far - 1.0) <= 1e-9
    seq = [eta_backward(AfcParams(x)) for x in (1, 2, 4, 8, 16, 32)]
    assert all(b > a for a, b in zip(seq, seq[1:]))


def test_c3_echo_timing(detail):
    comb = _baseline()
    grid, _, out = _simulate(comb)
    peak = echo_peak_time(out, echo_window(comb.spacing))
    target = 2 * np.pi / comb.spacing
    off = (peak.time - target) / grid.dt
    detail("C3", f"peak at {peak.time:.6f} us, target {target:.6f} us, offset {off:+.2f} grid steps")
    assert peak.reliable
    assert abs(peak.time - target) <= grid.dt


def test_c4_numeric_vs_analytic(detail):
    comb = _baseline()
    _, inp, out = _simulate(comb)
    eta = first_echo_efficiency(out, inp, comb.spacing)
    analytic = eta_forward(AfcParams(OPTICAL_DEPTH / 20.0, 20.0))
    detail("C4", f"eta_numeric = {eta:.4f}, analytic = {analytic:.4f}, diff {eta - analytic:+.4f}")
    assert abs(analytic - 0.4549) < 5e-5
    assert abs(eta - 0.4549) <= 0.10


def test_c5_spacing_disorder_trends(detail):
    strengths = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
    curves = sweep_strength(_baseline(), "spacing", strengths, FINESSES, n_trials=TRIALS, master_seed=SEED)
    y = {f: c.ordinate for f, c in zip(FINESSES, curves)}
    e = {f: c.errors for f, c in zip(FINESSES, curves)}
    decreasing, endpoint = {}, {}
    for f in FINESSES:
        decreasing[f] = bool(np.all(np.diff(y[f]) < 0))
        endpoint[f] = (y[f][0] - y[f][-1]) / math.hypot(e[f][0], e[f][-1])
    sep = (y[100.0] - y[20.0]) / np.hypot(e[100.0], e[20.0])
    ordered = bool(np.all(sep >= 3.0))
    detail(
        "C5",
        " | ".join(f"F={f:g}: " + " ".join(f"{v:.3f}" for v in y[f]) for f in FINESSES)
        + f" | drop/SE " + ",".join(f"{endpoint[f]:.0f}" for f in FINESSES)
        + f" | (eta100-eta20)/SE min {np.min(sep):.1f}",
    )
    for f in FINESSES:
        assert decreasing[f], f"mean efficiency not strictly decreasing at F={f:g}"
        assert endpoint[f] >= 3.0, f"drop at F={f:g} is only {endpoint[f]:.2f} SE"
    assert ordered, f"eta(F=100) - eta(F=20) reaches only {np.min(sep):.2f} SE"


def test_c6_depth_disorder_insensitivity(detail):
    base = _baseline()
    mean_depth = float(np.mean(base.depths))
    fractions = [0.0, 1 / 12, 1 / 6, 1 / 4, 1 / 3]
    strengths = [x * mean_depth for x in fractions]
    curves = sweep_strength(base, "depth", strengths, FINESSES, n_trials=TRIALS, master_seed=SEED)
    worst = {f: float(np.max(np.abs(c.ordinate - c.ordinate[0]))) for f, c in zip(FINESSES, curves)}
    detail("C6", "max |eta(d_r) - eta(0)|: " + ", ".join(f"F={f:g} {w:.4f}" for f, w in worst.items()))
    assert max(worst.values()) <= 0.05


def test_c7_backward_estimates(detail):
    comb = _baseline(HIGH_FINESSE)
    grid = length_grid(comb)
    est = {
        k: estimate_backward(comb, DisorderSpec("spacing", k, TRIALS, SEED), L_grid=grid)
        for k in (15.0, 20.0, 30.0)
    }
    parts = []
    for k, r in est.items():
        b = f"{r.eta_backward:.4f}" if r.backward is not None else "n/a"
        parts.append(f"{k:g}g: eta_b {b} rms {r.fit.rms_residual:.4f} gate {'pass' if r.gate_passed else 'fail'}")
    detail("C7", f"F={HIGH_FINESSE:g}; " + "; ".join(parts))
    for k, target in ((15.0, 0.85), (20.0, 0.80)):
        r = est[k]
        assert r.fit.converged and r.gate_passed, f"gate rejects the fit at {k:g} gamma"
        assert abs(r.eta_backward - target) <= 0.05
    assert not est[30.0].gate_passed


def test_c8_fit_oracle(detail):
    L = np.linspace(0.5, 20.0, 16)
    worst = 0.0
    for eta0, a in itertools.product(np.linspace(0.2, 1.0, 10), np.geomspace(0.01, 1.0, 10)):
        fit = fit_forward_model(L, eta0 * forward_shape(a * L))
        assert fit.converged
        worst = max(worst, abs(fit.eta0 / eta0 - 1), abs(fit.alpha_tilde / a - 1))
    detail("C8", f"worst relative error over 100 lattice points {worst:.2e}")
    assert worst <= 1e-6


def _thermal_etas(F, temperatures, span):
    comb = _baseline(F)
    energies = tuple(np.linspace(0.0, span, N_TEETH))
    out = []
    for T in temperatures:
        c = thermal_comb(comb, ThermalSpec(energies, T))
        _, inp, o = _simulate(c)
        out.append(first_echo_efficiency(o, inp, c.spacing))
    return out


def test_c9_thermal_insensitivity(detail):
    temps = [4.0, 100.0, 300.0]
    span = 2 * np.pi * 3e5
    etas = _thermal_etas(20.0, temps, span)
    spread = max(etas) - min(etas)
    extra = {F: _thermal_etas(F, temps, span) for F in (60.0, 100.0)}
    detail(
        "C9",
        "F=20: " + ", ".join(f"{T:g}K {e:.4f}" for T, e in zip(temps, etas))
        + f" spread {spread:.4f}; "
        + "; ".join(f"F={F:g} spread {max(v) - min(v):.4f}" for F, v in extra.items()),
    )
    assert spread <= 0.05


def test_c10_property_suite(detail):
    comb = _baseline()
    grid, inp, out = _simulate(comb)
    sigma = 2 * comb.spacing
    pulse = gaussian_spectrum(grid, sigma)
    spec_out, _ = propagate_forward(pulse, comb)
    parseval = abs(out.energy() / spec_out.energy() - 1)
    passive = spec_out.energy() <= pulse.energy()
    flat = uniform_comb(N_TEETH, 20 * GAMMA, GAMMA, 0.0)
    _, idle = propagate_forward(pulse, flat)
    identity = np.max(np.abs(idle.amplitudes - inp.amplitudes)) / np.max(np.abs(inp.amplitudes))
    spec = DisorderSpec("spacing", 15.0, 40, SEED)
    a = run_ensemble(comb, spec)
    b = run_ensemble(comb, spec)
    replay = a.mean_efficiency == b.mean_efficiency and np.array_equal(a.mean_intensity, b.mean_intensity)
    perm = np.random.default_rng(SEED).permutation(40)
    c = run_ensemble(comb, spec, trial_indices=perm, workers=4)
    order = abs(c.mean_efficiency - a.mean_efficiency)
    uniform = apply_populations(comb, np.full(N_TEETH, 1 / N_TEETH), {n: n for n in range(N_TEETH)})
    thermal_id = np.array_equal(uniform.depths, comb.depths)
    detail(
        "C10",
        f"parseval {parseval:.1e}, passive {passive}, zero-depth {identity:.1e}, replay {replay}, "
        f"order {order:.1e}, uniform weights {thermal_id}",
    )
    assert parseval <= 1e-9
    assert passive
    assert identity <= 1e-12
    assert replay
    assert order <= 1e-12
    assert thermal_id
