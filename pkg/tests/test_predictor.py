import cmath
import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalpred.errors import (
    DomainError,
    ParameterError,
    ReconstructionError,
    SizeError,
    StabilityError,
)
from causalpred.harness import evaluate
from causalpred.predictor import (
    KernelSpec,
    PredictorKernel,
    build_kernel,
    error_transfer_magnitude,
    iterate_forecast,
    predict_one_step,
    sweep_gamma,
    transfer_at,
)
from causalpred.sequences import SequenceWindow

from conftest import decaying_window


def mp_transfer(z, gamma, mu, q, dps=50):
    with mp.workdps(dps):
        g = mp.mpf(gamma)
        eps = g ** (mp.mpf(2 * mu) / (1 - mp.mpf(q)))
        zz = mp.mpc(z)
        return complex(zz * (1 - mp.exp(-g / (zz + 1 - eps))))


def mp_taps(gamma, mu, q, n, dps=60):
    """Explicit binomial form of the Laurent coefficients."""
    with mp.workdps(dps):
        g = mp.mpf(gamma)
        b = 1 - g ** (mp.mpf(2 * mu) / (1 - mp.mpf(q)))
        out = []
        for t in range(n):
            m_ = t + 1
            c = mp.fsum(mp.binomial(m_ - 1, m - 1) * b ** (m_ - m) * g ** m / mp.factorial(m)
                        for m in range(1, m_ + 1))
            out.append(float(-((-1) ** m_) * c))
        return np.array(out)


def test_spec_derived_values():
    s = KernelSpec(4.0, 1.5, 4.0)
    assert s.epsilon == pytest.approx(0.25, rel=1e-15)
    assert s.stability_exponent == pytest.approx(16.0, rel=1e-15)


@pytest.mark.parametrize("gamma,mu,q", [(-1.0, 1.5, 4.0), (1.0, 1.0, 4.0), (1.0, 1.5, 1.0),
                                        (math.nan, 1.5, 4.0), (0.5, 1.5, 4.0), (0.1, 1.5, 4.0)])
def test_spec_rejects(gamma, mu, q):
    with pytest.raises(ParameterError):
        KernelSpec(gamma, mu, q)


def test_spec_overflow_is_stability_error():
    with pytest.raises(StabilityError) as ei:
        KernelSpec(40.0, 1.5, 4.0)
    assert ei.value.code == "kernel_overflow"
    assert KernelSpec(26.0).stability_exponent <= 690


def test_transfer_at_example():
    s = KernelSpec(4.0, 1.5, 4.0)
    val = transfer_at(1.0, s)
    assert val == pytest.approx(1 - math.exp(-4 / 1.75), rel=1e-15)
    assert val.real == pytest.approx(mp_transfer(1.0, 4.0, 1.5, 4.0).real, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.6, 20.0), st.floats(1.0, 50.0), st.floats(-math.pi, math.pi))
def test_transfer_at_matches_high_precision(gamma, r, theta):
    s = KernelSpec(gamma, 1.5, 4.0)
    z = r * cmath.exp(1j * theta)
    ref = mp_transfer(z, gamma, 1.5, 4.0)
    assert abs(transfer_at(z, s) - ref) <= 1e-13 * max(1.0, abs(ref)) * max(1.0, gamma)


@pytest.mark.parametrize("gamma", [0.7, 3.0, 20.0])
def test_transfer_at_infinity(gamma):
    assert transfer_at(1e8, KernelSpec(gamma)) == pytest.approx(gamma, rel=1e-6)


def test_transfer_tends_to_z_for_large_gamma():
    z = 1.3 + 0.4j
    gaps = [abs(transfer_at(z, KernelSpec(g)) - z) for g in (2.0, 8.0, 16.0, 24.0)]
    assert all(b < a for a, b in zip(gaps, gaps[1:])) and gaps[-1] < 1e-4


def test_transfer_at_domain_and_overflow():
    with pytest.raises(DomainError):
        transfer_at(0.5, KernelSpec(2.0))
    # exponent gamma / eps = 2**((1 + 1)) ... at z = -1 the real part is gamma / eps
    s = KernelSpec(26.0, 1.5, 4.0)
    assert math.isfinite(transfer_at(-1.0, s).real)  # 676 < 690
    assert error_transfer_magnitude(math.pi, s) == pytest.approx(math.exp(676.0), rel=1e-12)


def test_error_transfer_examples():
    s = KernelSpec(4.0, 1.5, 4.0)
    assert error_transfer_magnitude(0.0, s) == pytest.approx(math.exp(-4 / 1.75), rel=1e-15)
    assert error_transfer_magnitude(math.pi, s) == pytest.approx(math.exp(16.0), rel=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.6, 16.0), st.floats(0.0, 0.95 * math.pi))
def test_error_transfer_identity(gamma, omega):
    s = KernelSpec(gamma)
    z = cmath.exp(1j * omega)
    closed = error_transfer_magnitude(omega, s)
    assert abs(abs(z - transfer_at(z, s)) - closed) <= 1e-12 * closed


@pytest.mark.parametrize("omega", [0.0, math.pi / 4, math.pi / 2])
def test_error_transfer_decreasing_for_gamma_above_one(omega):
    gammas = np.linspace(1.0, 26.0, 300)
    vals = [error_transfer_magnitude(omega, KernelSpec(g)) for g in gammas]
    assert np.all(np.diff(vals) < 0)


def test_error_transfer_grows_at_band_edge():
    vals = [error_transfer_magnitude(math.pi, KernelSpec(g)) for g in (1.0, 4.0, 16.0)]
    assert vals[0] < vals[1] < vals[2]


def test_error_transfer_not_monotone_below_gamma_one():
    vals = [error_transfer_magnitude(0.0, KernelSpec(g)) for g in (0.55, 0.7, 0.9)]
    assert vals[0] < vals[1] < vals[2]


@pytest.mark.parametrize("gamma,mu,q", [(0.8, 1.5, 4.0), (2.0, 1.5, 4.0), (4.0, 1.5, 4.0),
                                        (3.0, 1.2, 10.0), (8.0, 1.5, 10.0)])
def test_series_taps_match_explicit_form(gamma, mu, q):
    k = build_kernel(KernelSpec(gamma, mu, q))
    n = min(k.T + 1, 200)
    ref = mp_taps(gamma, mu, q, n)
    scale = np.abs(ref).max()
    assert np.abs(k.taps[:n] - ref).max() <= 1e-13 * scale


@pytest.mark.parametrize("gamma", [0.6, 1.0, 1.5, 2.0])
def test_fft_route_agrees_for_small_gamma(gamma):
    s = KernelSpec(gamma)
    a = build_kernel(s)
    b = build_kernel(s, method="fft")
    n = min(a.T, b.T) + 1
    assert np.abs(a.taps[:n] - b.taps[:n]).max() <= 1e-9 * max(1.0, np.abs(a.taps).max())


def test_fft_route_fails_loudly_for_large_gamma():
    with pytest.raises((StabilityError, ReconstructionError)):
        build_kernel(KernelSpec(3.0), method="fft")


@pytest.mark.parametrize("gamma,mu,q", [(0.6, 1.5, 4.0), (1.0, 1.5, 4.0), (5.0, 1.5, 4.0),
                                        (12.0, 1.5, 4.0), (8.0, 1.5, 10.0), (20.0, 2.0, 30.0)])
def test_leading_tap_is_gamma(gamma, mu, q):
    k = build_kernel(KernelSpec(gamma, mu, q))
    assert abs(k.taps[0] - gamma) <= 1e-6 * gamma
    assert k.tail_mass <= k.trunc_tol and np.all(np.isfinite(k.taps))


def test_reconstruction_example():
    s = KernelSpec(2.0, 1.5, 4.0)
    k = build_kernel(s, 65536)
    z = 1.5 * cmath.exp(1j * math.pi / 3)
    ref = transfer_at(z, s)
    assert abs(k.transfer(z) - ref) <= 1e-6 * abs(ref)


def test_small_gamma_gives_small_taps():
    lo = build_kernel(KernelSpec(0.55))
    hi = build_kernel(KernelSpec(2.0))
    assert np.abs(lo.taps).max() < np.abs(hi.taps).max()


def test_build_kernel_validation():
    with pytest.raises(ParameterError):
        build_kernel(KernelSpec(2.0), 3000)
    with pytest.raises(ParameterError):
        build_kernel(KernelSpec(2.0), 2048)
    with pytest.raises(ParameterError):
        build_kernel(KernelSpec(2.0), trunc_tol=0.0)
    with pytest.raises(ReconstructionError):
        build_kernel(KernelSpec(26.0), 4096)


def test_kernel_json_round_trip():
    k = build_kernel(KernelSpec(3.0))
    obj = json.loads(k.to_json())
    assert set(obj) == {"gamma", "mu", "q", "epsilon", "trunc_tol", "T", "tail_mass", "taps"}
    back = PredictorKernel.from_json(k.to_json())
    assert np.array_equal(back.taps, k.taps) and back.spec == k.spec


@pytest.fixture(scope="module")
def kernel3():
    return build_kernel(KernelSpec(2.0))


def test_zero_window_prediction(kernel3):
    run = predict_one_step(SequenceWindow(np.zeros(200)), kernel3)
    assert np.all(run.predictions == 0.0)
    assert run.error_l2 == run.error_linf == run.relative_error_l2 == 0.0


def test_prediction_matches_loop(kernel3):
    w = decaying_window(np.random.default_rng(1), 300)
    run = predict_one_step(w, kernel3)
    T = kernel3.T
    assert run.burn_in == T and run.times[0] == -(299) + T and run.times[-1] == 0
    for t in (run.times[0], -50, -1, 0):
        ref = math.fsum(kernel3.taps[j] * w.at(t - j) for j in range(T + 1))
        assert run.predictions[t - run.times[0]] == pytest.approx(ref, rel=1e-12, abs=1e-15)
    assert run.forecast_next == run.predictions[-1]
    assert np.array_equal(run.targets, w.values[T + 1:])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 199))
def test_causality(seed, pos):
    k = build_kernel(KernelSpec(2.0))
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(200)
    base = predict_one_step(SequenceWindow(v), k)
    v2 = v.copy()
    v2[pos] += 1.0 + rng.standard_normal()
    mut = predict_one_step(SequenceWindow(v2), k)
    t_mut = pos - 199
    earlier = base.times < t_mut
    assert np.array_equal(base.predictions[earlier], mut.predictions[earlier])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(-5, 5))
def test_prediction_linearity(seed, a, b):
    k = build_kernel(KernelSpec(2.0))
    rng = np.random.default_rng(seed)
    u, v = rng.standard_normal(160), rng.standard_normal(160)
    ru = predict_one_step(SequenceWindow(u), k)
    rv = predict_one_step(SequenceWindow(v), k)
    rm = predict_one_step(SequenceWindow(a * u + b * v), k)
    assert np.abs(rm.predictions - (a * ru.predictions + b * rv.predictions)).max() <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1.0, 2.0, 2.5]))
def test_linf_below_l2(seed, gamma):
    k = build_kernel(KernelSpec(gamma))
    run = predict_one_step(SequenceWindow(np.random.default_rng(seed).standard_normal(400)), k)
    assert run.error_linf <= run.error_l2
    assert evaluate(run, math.inf) == run.error_linf
    assert evaluate(run, 2) == pytest.approx(run.error_l2, rel=1e-14)


def test_window_too_short(kernel3):
    with pytest.raises(SizeError, match="L >="):
        predict_one_step(SequenceWindow(np.ones(kernel3.T + 1)), kernel3)
    predict_one_step(SequenceWindow(np.ones(kernel3.T + 2)), kernel3)


def test_prediction_csv(kernel3):
    run = predict_one_step(decaying_window(np.random.default_rng(2), 160), kernel3)
    lines = run.to_csv().splitlines()
    assert lines[0] == "t,predicted,target,abs_error"
    assert len(lines) == 1 + run.targets.size
    assert int(lines[-1].split(",")[0]) == -1


def test_sweep_zero_window():
    rep = sweep_gamma(SequenceWindow(np.zeros(400)), [1.0, 2.0, 4.0])
    assert rep.gammas == [1.0, 2.0, 4.0]
    assert np.all(rep.column("error_l2") == 0.0)


def test_sweep_error_names_gamma():
    w = SequenceWindow(np.ones(1024))
    with pytest.raises(SizeError, match="gamma=8"):
        sweep_gamma(w, [1.0, 8.0], 1.5, 4.0)
    with pytest.raises(StabilityError, match="gamma=40"):
        sweep_gamma(w, [1.0, 40.0])
    with pytest.raises(ParameterError):
        sweep_gamma(w, [2.0, 1.0])


def test_sweep_plot_csv():
    rep = sweep_gamma(decaying_window(np.random.default_rng(0), 300), [1.0, 2.0])
    lines = rep.to_plot_csv().splitlines()
    assert lines[0] == "gamma,relative_error" and len(lines) == 3


def test_iterate_forecast_is_gated(kernel3):
    w = decaying_window(np.random.default_rng(0), 160)
    with pytest.raises(ParameterError):
        iterate_forecast(w, kernel3, 3)
    out = iterate_forecast(w, kernel3, 3, experimental=True)
    assert out.shape == (3,)
    assert out[0] == pytest.approx(predict_one_step(w, kernel3).forecast_next, rel=1e-12)
