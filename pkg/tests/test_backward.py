import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iafc import DisorderSpec, FitError, FitResult, backward_efficiency, fit_forward_model, fit_quality_gate, uniform_comb
from iafc.analytic import backward_shape, forward_shape
from iafc.backward import estimate_backward, length_grid
from iafc.comb import effective_depth

G = 2 * np.pi * 5


def _synthetic(eta0, a, L):
    return eta0 * forward_shape(a * L)


def test_recovers_noiseless_parameters():
    L = np.linspace(0.1, 3.0, 16)
    fit = fit_forward_model(L, _synthetic(0.8, 1.7, L))
    assert fit.converged
    assert fit.eta0 == pytest.approx(0.8, rel=1e-8)
    assert fit.alpha_tilde == pytest.approx(1.7, rel=1e-8)
    assert fit.rms_residual < 1e-9


@settings(max_examples=30, deadline=None)
@given(eta0=st.floats(0.05, 1.0), a=st.floats(0.2, 5.0), k=st.floats(1e-3, 1e3))
def test_fit_is_covariant_under_length_rescaling(eta0, a, k):
    L = np.linspace(0.2, 4.0, 12)
    rng = np.random.default_rng(1)
    y = np.clip(_synthetic(eta0, a, L) + rng.normal(0, 0.01, L.size), 0, 1)
    f1 = fit_forward_model(L, y)
    f2 = fit_forward_model(L * k, y)
    assert f2.eta0 == pytest.approx(f1.eta0, rel=1e-6)
    assert f2.alpha_tilde * k == pytest.approx(f1.alpha_tilde, rel=1e-6)
    assert f2.rms_residual == pytest.approx(f1.rms_residual, rel=1e-6, abs=1e-12)


def test_noise_robustness():
    L = np.linspace(0.25, 4.0, 16)
    rng = np.random.default_rng(42)
    errs, ms = [], []
    for _ in range(200):
        y = np.clip(_synthetic(0.9, 1.2, L) + rng.normal(0, 0.005, L.size), 0, 1)
        f = fit_forward_model(L, y)
        assert f.converged
        errs.append(abs(f.alpha_tilde - 1.2) / 1.2)
        ms.append(f.rms_residual**2)
    assert np.median(errs) < 0.02
    # two fitted parameters: E[rms^2] = sigma^2 (n - 2) / n
    assert np.mean(ms) == pytest.approx(0.005**2 * 14 / 16, rel=0.1)


def test_gate_separates_good_and_bad_shapes():
    L = np.linspace(0.3, 5.0, 16)
    good = fit_forward_model(L, _synthetic(0.9, 1.0, L))
    # a monotone saturating curve is not an echo-vs-length shape
    bad = fit_forward_model(L, 0.5 * (1 - np.exp(-L)))
    assert fit_quality_gate(good)
    assert not fit_quality_gate(bad, 0.005)
    assert fit_quality_gate(bad, 1.0)


def test_backward_efficiency_from_fit():
    f = FitResult(0.9, 2.0, 0.0, True)
    assert backward_efficiency(f, 1.5) == pytest.approx(0.9 * (1 - np.exp(-3.0)) ** 2, rel=1e-15)
    np.testing.assert_allclose(backward_efficiency(f, [0.5, 1.0]), 0.9 * backward_shape([1.0, 2.0]))
    with pytest.raises(FitError):
        backward_efficiency(FitResult(0.9, 2.0, 0.0, False), 1.0)


@pytest.mark.parametrize(
    "L, y",
    [
        ([1, 2, 3, 4], [0.1, 0.2, 0.2, 0.1]),
        ([1, 2, 2, 3, 4], [0.1, 0.2, 0.2, 0.2, 0.1]),
        ([0, 1, 2, 3, 4], [0.0, 0.1, 0.2, 0.2, 0.1]),
        ([1, 2, 3, 4, 5], [0.1, 0.2, 1.2, 0.2, 0.1]),
        ([1, 2, 3, 4, 5], [0.0] * 5),
        ([1, 2, 3, 4, 5], [0.1, np.nan, 0.2, 0.2, 0.1]),
    ],
)
def test_invalid_fit_input(L, y):
    with pytest.raises(FitError):
        fit_forward_model(L, y)


def test_unbracketed_optimum_is_not_converged():
    # strictly rising data: best depth runs to the edge of the search range
    L = np.linspace(1.0, 2.0, 8)
    fit = fit_forward_model(L, 1e-7 * L**2)
    assert not fit.converged


def test_length_grid_reaches_target_depth():
    c = uniform_comb(7, 60 * G, G, 30.0)
    L = length_grid(c, 16, 5.0)
    assert L.size == 16
    assert L[-1] * effective_depth(c) == pytest.approx(5.0, rel=1e-14)
    assert np.all(np.diff(L) > 0)
    with pytest.raises(ValueError):
        length_grid(c, 4)
    with pytest.raises(ValueError):
        length_grid(uniform_comb(7, 60 * G, G, 0.0))


def test_clean_comb_pipeline_passes_gate():
    c = uniform_comb(7, 60 * G, G, 30.0)
    est = estimate_backward(c, DisorderSpec("none"), L_grid=length_grid(c, 12))
    assert est.fit.converged and est.gate_passed
    # Lorentzian teeth absorb slightly less than the nominal depth
    assert est.fit.alpha_tilde == pytest.approx(effective_depth(c), rel=0.1)
    assert 0.8 < est.eta_backward < 1.0


@settings(max_examples=50, deadline=None)
@given(eta0=st.floats(0.2, 1.0), a=st.floats(0.01, 1.0))
def test_generate_then_fit_identity(eta0, a):
    L = np.linspace(0.5, 20.0, 16)
    fit = fit_forward_model(L, _synthetic(eta0, a, L))
    assert fit.converged
    assert fit.eta0 == pytest.approx(eta0, rel=1e-6)
    assert fit.alpha_tilde == pytest.approx(a, rel=1e-6)


@pytest.mark.parametrize("seed", range(20))
def test_one_percent_noise_moves_depth_less_than_five_percent(seed):
    L = np.linspace(0.25, 5.0, 16)
    rng = np.random.default_rng(seed)
    y = _synthetic(0.9, 1.0, L) + rng.uniform(-0.01, 0.01, L.size)
    fit = fit_forward_model(L, np.clip(y, 0, 1))
    assert abs(fit.alpha_tilde - 1.0) < 0.05


@given(eta0=st.floats(0.01, 1.0), a=st.floats(0.01, 10.0))
def test_backward_monotone_and_bounded(eta0, a):
    f = FitResult(eta0, a, 0.0, True)
    b = backward_efficiency(f, np.linspace(0.0, 50.0, 200))
    assert np.all(np.diff(b) >= 0)
    assert np.all(b <= eta0)


def test_disabled_gate_always_passes():
    assert fit_quality_gate(FitResult(0.5, 1.0, 123.0, True), np.inf)
