import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from l0cs.analysis import (
    StabilityError,
    TheoremParams,
    contraction_factor,
    estimate_ab,
    gram_deviation,
    msd_upper_bound,
    mu_upper_bound,
    noise_projection_ratio,
    simulate_iid_lms,
    steady_state_msd,
    theorem_constant,
)
from l0cs.attractors import AttractorParams, exponential_vec
from l0cs.core import generate_sensing_matrix, make_instance, msd
from l0cs.projection import pseudo_inverse
from l0cs.solvers import preset, run

P0 = 3.2e-3**2


@pytest.mark.parametrize("M, N, bound", [(200, 1000, 400 / 1002), (400, 1000, 800 / 1002), (2, 2, 1.0)])
def test_mu_bound(M, N, bound):
    assert mu_upper_bound(M, N) == pytest.approx(bound, rel=1e-15)
    assert mu_upper_bound(200, 1000) == pytest.approx(0.3992, abs=1e-4)


def test_mu_bound_rejects():
    with pytest.raises(ValueError):
        mu_upper_bound(1, 0)


def test_theorem_constant_value():
    # 200^2 / (2 * 0.1 * 200 - 1002 * 0.01) = 40000 / 29.98
    assert theorem_constant(200, 1000, 0.1) == pytest.approx(40000 / 29.98, rel=1e-12)
    assert theorem_constant(200, 1000, 0.1) == pytest.approx(1334.2, abs=0.05)


def test_steady_state_value():
    p = TheoremParams(M=200, N=1000, mu=0.1, noise_power=P0)
    expect = 40000 / 29.98 * (1000 * 0.01 / 200) * 1.024e-5
    assert steady_state_msd(p) == pytest.approx(expect, rel=1e-12)
    assert steady_state_msd(p) == pytest.approx(6.83e-4, rel=1e-3)
    assert steady_state_msd(TheoremParams(M=200, N=1000, mu=0.1)) == 0.0


@pytest.mark.parametrize("mu", [0.0, -0.1, 400 / 1002, 0.5])
def test_stability_violation(mu):
    with pytest.raises(StabilityError):
        theorem_constant(200, 1000, mu)
    with pytest.raises(StabilityError):
        steady_state_msd(TheoremParams(M=200, N=1000, mu=mu))


def test_params_validation():
    with pytest.raises(ValueError):
        TheoremParams(M=0, N=10, mu=0.1)
    with pytest.raises(ValueError):
        TheoremParams(M=10, N=100, mu=0.1, b=-1.0)
    with pytest.raises(ValueError):
        TheoremParams(M=200, N=100, mu=0.1)


@settings(max_examples=200)
@given(M=st.integers(1, 500), N=st.integers(1, 5000), frac=st.floats(-0.5, 1.5))
def test_contraction_matches_stability(M, N, frac):
    assume(M <= N)
    mu = frac * mu_upper_bound(M, N)
    assume(abs(frac) > 1e-6 and abs(frac - 1) > 1e-9)
    stable = 2 * mu * M - (N + 2) * mu * mu > 0
    assert (contraction_factor(M, N, mu) < 1) == stable
    if stable:
        assert theorem_constant(M, N, mu) > 0
    else:
        with pytest.raises(StabilityError):
            theorem_constant(M, N, mu)


def test_constant_blows_up_at_bound():
    bound = mu_upper_bound(200, 1000)
    values = [theorem_constant(200, 1000, bound * (1 - d)) for d in (1e-1, 1e-3, 1e-6)]
    assert values[0] < values[1] < values[2]
    assert values[2] > 1e8


msd_params = st.builds(
    dict,
    mu=st.floats(0.01, 0.39),
    kappa=st.one_of(st.just(0.0), st.floats(1e-9, 1e-3)),
    alpha=st.floats(0.1, 100),
    noise_power=st.floats(0, 1e-2),
    a=st.floats(-10, 1000),
    b=st.floats(0, 1e5),
)


@given(msd_params, st.floats(1e-6, 1e-2))
def test_increasing_in_noise_and_b(kw, bump):
    base = TheoremParams(M=200, N=1000, **kw)
    more_noise = TheoremParams(M=200, N=1000, **{**kw, "noise_power": kw["noise_power"] + bump})
    more_b = TheoremParams(M=200, N=1000, **{**kw, "b": kw["b"] + bump})
    c = theorem_constant(200, 1000, kw["mu"])
    resolvable = 1e-12 * abs(steady_state_msd(base))
    assert steady_state_msd(more_noise) >= steady_state_msd(base)
    assert steady_state_msd(more_b) >= steady_state_msd(base)
    if c * 1000 * kw["mu"] ** 2 * bump / 200 > resolvable:
        assert steady_state_msd(more_noise) > steady_state_msd(base)
    if c * kw["kappa"] ** 2 * bump > resolvable:
        assert steady_state_msd(more_b) > steady_state_msd(base)


@given(msd_params, st.floats(1e-7, 1e-3))
def test_increasing_in_kappa_when_a_nonnegative(kw, bump):
    kw["a"] = abs(kw["a"])
    lo = TheoremParams(M=200, N=1000, **kw)
    hi = TheoremParams(M=200, N=1000, **{**kw, "kappa": kw["kappa"] + bump})
    assert steady_state_msd(hi) >= steady_state_msd(lo)


@given(msd_params, st.floats(0, 100), st.floats(0, 1), st.floats(0, 1))
def test_bound_dominates(kw, s_l1, fa, fb):
    N, alpha = 1000, kw["alpha"]
    kw.update(a=fa * (N + alpha * s_l1), b=fb * N * alpha**2, s_l1=s_l1)
    p = TheoremParams(M=200, N=N, **kw)
    assert msd_upper_bound(p) >= steady_state_msd(p) * (1 - 1e-12)


def test_bound_without_attraction():
    p = TheoremParams(M=200, N=1000, mu=0.1, noise_power=P0, s_l1=12.0, alpha=10.0)
    assert msd_upper_bound(p) == pytest.approx(steady_state_msd(p), rel=1e-15)


def test_bound_nondecreasing_in_alpha():
    vals = [
        msd_upper_bound(TheoremParams(M=200, N=1000, mu=0.1, kappa=2e-6, alpha=a, noise_power=P0, s_l1=12.0))
        for a in np.linspace(1e-3, 50, 200)
    ]
    assert np.all(np.diff(vals) >= 0)


def test_estimate_ab_examples():
    att = AttractorParams(alpha=10.0)
    s = np.array([0.5, -0.3, 0.0, 2.0])
    assert estimate_ab(s, s, att) == (0.0, 0.0)
    assert estimate_ab(np.zeros(5), np.zeros(5), att) == (0.0, 0.0)
    rng = np.random.default_rng(0)
    w = rng.uniform(-0.2, 0.2, 50)
    t = rng.uniform(-0.2, 0.2, 50)
    a, b = estimate_ab(w, t, att)
    g = exponential_vec(w, 10.0)
    assert b == pytest.approx(sum(v * v for v in g))
    assert a == pytest.approx(sum((wi - ti) * gi for wi, ti, gi in zip(w, t, g)))
    with pytest.raises(ValueError):
        estimate_ab(np.zeros(3), np.zeros(4), att)


def test_noise_ratio():
    assert noise_projection_ratio(200, 1000) == 0.2
    assert noise_projection_ratio(7, 7) == 1.0
    with pytest.raises(ValueError):
        noise_projection_ratio(10, 5)
    assert noise_projection_ratio(200, 1000, exact=True) == pytest.approx(200 / 799)
    with pytest.raises(ValueError):
        noise_projection_ratio(10, 11, exact=True)


def _mc_noise_ratio(draws=100, M=200, N=1000):
    rng = np.random.default_rng(2010)
    ratios = []
    for t in range(draws):
        A = generate_sensing_matrix(M, N, t)
        v = rng.standard_normal(M)
        pv = pseudo_inverse(A).matrix @ v
        ratios.append(pv @ pv / (v @ v))
    return float(np.mean(ratios))


def test_noise_ratio_monte_carlo():
    assert abs(_mc_noise_ratio() / noise_projection_ratio(200, 1000) - 1) < 0.1


def test_noise_ratio_monte_carlo_exact():
    assert abs(_mc_noise_ratio() / noise_projection_ratio(200, 1000, exact=True) - 1) < 0.02


def test_gram_deviation():
    Q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((50, 10)))
    A = Q.T * np.sqrt(50 / 10)
    assert gram_deviation(A) < 1e-12
    assert gram_deviation(generate_sensing_matrix(200, 1000, 1)) < 0.2
    assert gram_deviation(generate_sensing_matrix(2, 100_000, 1)) < 0.02


def test_iid_simulation_noiseless_small():
    # no noise, no attraction: the iterate converges to the truth
    s = np.zeros(20)
    s[[3, 11]] = [1.0, -0.5]
    assert simulate_iid_lms(s, 10, 0.5, 0.0, iterations=4000, burn_in=3000) < 1e-12


def test_iid_simulation_matches_formula_small():
    s = np.zeros(50)
    s[:3] = 1.0
    M, mu, p0 = 20, 0.2, 1e-2
    pred = steady_state_msd(TheoremParams(M=M, N=50, mu=mu, noise_power=p0))
    got = simulate_iid_lms(s, M, mu, p0, iterations=60_000, burn_in=10_000, seed=3)
    assert abs(got / pred - 1) < 0.2


def test_plugin_prediction_tracks_measurement():
    # a, b averaged over 20 converged runs, then compared with the mean MSD
    a_vals, b_vals, measured = [], [], []
    cfg = preset("l0lms")
    for seed in range(20):
        p = make_instance(200, 1000, 30, sigma=3.2e-3, seed=seed)
        rep = run(p, cfg)
        a, b = estimate_ab(rep.final_estimate, p.truth.values, cfg.attractor)
        a_vals.append(a)
        b_vals.append(b)
        measured.append(msd(rep.final_estimate, p.truth.values))
    pred = steady_state_msd(TheoremParams(
        M=200, N=1000, mu=0.1, kappa=2e-6, alpha=10.0, noise_power=P0,
        a=float(np.mean(a_vals)), b=float(np.mean(b_vals)),
    ))
    ratio = pred / np.mean(measured)
    assert 1 / 5 <= ratio <= 5


def test_corollary_bound_holds_in_practice():
    cfg = preset("l0lms")
    held = 0
    for seed in range(50):
        p = make_instance(200, 1000, 30, sigma=3.2e-3, seed=1000 + seed)
        rep = run(p, cfg)
        bound = msd_upper_bound(TheoremParams(
            M=200, N=1000, mu=0.1, kappa=2e-6, alpha=10.0, noise_power=P0,
            s_l1=float(np.abs(p.truth.values).sum()),
        ))
        assert np.isfinite(bound) and bound > 0
        held += msd(rep.final_estimate, p.truth.values) <= bound
    assert held >= 0.95 * 50
