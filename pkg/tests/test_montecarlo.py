import math
import pickle
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import binomtest

from framesync import binary_channel, finite_n_decoder
from framesync.errors import SizeError, UnsupportedConfigurationError
from framesync.montecarlo import (
    BatchEstimate,
    Outcome,
    TrialConfig,
    analytic_bounds,
    classify,
    exact_event_probs,
    exact_false_alarm_cdf,
    exact_run_rule_probs,
    first_false_alarm_accelerated,
    run_batch,
    run_trial,
    run_trial_accelerated,
    run_trials,
    trial_rng,
    wilson_interval,
)
from framesync.montecarlo.trials import CHUNK_TRIALS, TrialStreams
from framesync.syncword import SyncWord, all_ones, build_sync_word


def finite_cfg(A, N, eps_f, eps_m, seed=0, accelerated=False):
    return TrialConfig(A, binary_channel(eps_f, eps_m), all_ones(N), finite_n_decoder(N, 2, A), seed, accelerated)


def test_classify():
    assert classify(5, 5, 3) is Outcome.CORRECT
    assert classify(5, None, 3) is Outcome.E3
    assert classify(5, 4, 3) is Outcome.E2
    assert classify(5, 3, 3) is Outcome.E2
    assert classify(5, 2, 3) is Outcome.E1
    # declarations after v count as E1
    assert classify(5, 6, 3) is Outcome.E1


def test_trial_rng_is_keyed_and_reusable():
    a = trial_rng(3, 7).random(5)
    assert np.array_equal(a, trial_rng(3, 7).random(5))
    assert not np.array_equal(a, trial_rng(3, 8).random(5))
    assert not np.array_equal(a, trial_rng(4, 7).random(5))
    s = TrialStreams()
    s.reset(1, 1).random(3)
    assert np.array_equal(s.reset(3, 7).random(5), a)
    with pytest.raises(ValueError):
        trial_rng(0, -1)


def test_trial_draw_order():
    cfg = finite_cfg(6, 2, 0.3, 0.2, seed=9)
    g = trial_rng(9, 4)
    v = int(g.integers(1, 7))
    u_span = g.random(2)
    u_noise = g.random(5)
    U = np.concatenate([u_noise[: v - 1], u_span, u_noise[v - 1 :]])
    Y = np.where((np.arange(7) >= v - 1) & (np.arange(7) < v + 1), U >= 0.2, U >= 0.7).astype(int)
    out = run_trial(cfg, 4)
    assert out.v == v
    expected = next((t for t in range(1, 7) if Y[t - 1] and Y[t]), None)
    assert out.v_hat == expected
    assert out.typical_at_v == bool(Y[v - 1] and Y[v])
    if expected is not None:
        assert out.decision_time == expected + 1


def test_config_validation():
    Q = binary_channel(0.1, 0.1)
    with pytest.raises(ValueError):
        TrialConfig(5, Q, all_ones(3), finite_n_decoder(3, 2, 4))
    with pytest.raises(ValueError):
        TrialConfig(5, Q, all_ones(3), finite_n_decoder(2, 2, 5))
    with pytest.raises(ValueError):
        TrialConfig(5, Q, all_ones(3), finite_n_decoder(3, 2, 5), master_seed=-1)
    with pytest.raises(UnsupportedConfigurationError):
        TrialConfig.build(Q, all_ones(3), 5, mu=0.4, accelerated=True)
    w = build_sync_word(7, 2)
    with pytest.raises(UnsupportedConfigurationError):
        TrialConfig.build(Q, w, 5, mu=Fraction(1, w.n_ones), reference="limit", accelerated=True)


def test_config_pickles():
    cfg = finite_cfg(10, 3, 0.1, 0.1, seed=2)
    clone = pickle.loads(pickle.dumps(cfg))
    assert run_trial(clone, 5) == run_trial(cfg, 5)


def test_batch_matches_per_trial_outcomes():
    cfg = finite_cfg(9, 3, 0.3, 0.2, seed=4)
    outs = [run_trial(cfg, i) for i in range(500)]
    assert outs == run_trials(cfg, range(500))
    est = run_batch(cfg, 500)
    assert est.n_correct == sum(o.outcome is Outcome.CORRECT for o in outs)
    assert est.n_e1 == sum(o.outcome is Outcome.E1 for o in outs)
    assert est.n_e2 == sum(o.outcome is Outcome.E2 for o in outs)
    assert est.n_e3 == sum(o.outcome is Outcome.E3 for o in outs)
    assert est.n_atypical_at_v == sum(not o.typical_at_v for o in outs)


def test_batch_prefix_consistency():
    # trial i's outcome does not depend on how many trials are run
    cfg = finite_cfg(20, 2, 0.2, 0.1, seed=1)
    a = run_batch(cfg, CHUNK_TRIALS + 10)
    b = run_batch(cfg, CHUNK_TRIALS)
    tail = run_trials(cfg, range(CHUNK_TRIALS, CHUNK_TRIALS + 10))
    assert a.n_e3 - b.n_e3 == sum(o.outcome is Outcome.E3 for o in tail)


def test_batch_workers_identical():
    cfg = finite_cfg(15, 3, 0.3, 0.2, seed=8)
    n = 2 * CHUNK_TRIALS + 17
    assert run_batch(cfg, n, workers=1) == run_batch(cfg, n, workers=3)


def test_batch_estimate_props():
    e = BatchEstimate(100, 80, 5, 10, 5, 3)
    assert e.p_error == pytest.approx(0.2)
    assert e.probabilities()[Outcome.E2] == 0.1
    lo, hi = e.ci
    assert lo < 0.2 < hi
    with pytest.raises(ValueError):
        BatchEstimate(10, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        run_batch(finite_cfg(3, 2, 0.1, 0.1), 0)


@pytest.mark.parametrize("k,n", [(0, 10), (3, 10), (10, 10), (57, 1000), (1, 100000)])
def test_wilson_matches_scipy(k, n):
    ci = binomtest(k, n).proportion_ci(0.95, method="wilson")
    lo, hi = wilson_interval(k, n)
    assert lo == pytest.approx(ci.low, abs=1e-12)
    assert hi == pytest.approx(ci.high, abs=1e-12)


def test_false_alarm_cdf_small():
    # strings of length 3 over {0,1} with a 11 run: 011, 110, 111
    assert exact_false_alarm_cdf(0.5, 2, 3).tolist() == pytest.approx([0.25, 0.375, 0.5])
    assert exact_false_alarm_cdf(0.3, 1, 3).tolist() == pytest.approx([0.3, 0.51, 0.657])
    assert exact_false_alarm_cdf(0.0, 3, 4).tolist() == [0.0] * 4
    assert exact_false_alarm_cdf(1.0, 3, 2).tolist() == [1.0, 1.0]


def test_false_alarm_cdf_brute():
    import itertools

    p, N, L = 0.35, 3, 6
    cdf = np.zeros(L)
    for s in itertools.product((0, 1), repeat=L + N - 1):
        prob = math.prod(p if b else 1 - p for b in s)
        t = next((t for t in range(1, L + 1) if all(s[t - 1 : t - 1 + N])), None)
        if t is not None:
            cdf[t - 1 :] += prob
    assert np.allclose(exact_false_alarm_cdf(p, N, L), cdf, atol=1e-14)


def test_exact_oracles_agree():
    for A, N, f, m in [(4, 2, 0.2, 0.1), (10, 4, 0.1, 0.3), (7, 3, 0.3, 0.2), (1, 1, 0.5, 0.5)]:
        cfg = finite_cfg(A, N, f, m)
        a, b = exact_event_probs(cfg), exact_run_rule_probs(cfg)
        assert sum(a.values()) == pytest.approx(1.0, abs=1e-12)
        for o in a:
            assert a[o] == pytest.approx(b[o], abs=1e-12)


def test_exact_event_probs_reference_values():
    p = exact_event_probs(finite_cfg(4, 2, 0.2, 0.1))
    assert p[Outcome.CORRECT] == pytest.approx(0.68202, abs=1e-12)
    assert p[Outcome.E1] == pytest.approx(0.04466, abs=1e-12)
    assert p[Outcome.E2] == pytest.approx(0.117, abs=1e-12)
    assert p[Outcome.E3] == pytest.approx(0.15632, abs=1e-12)


def test_exact_event_probs_general_word():
    # a non-run-rule decoder over a mixed word: compare to a small Monte Carlo
    Q = binary_channel(0.2, 0.15)
    w = SyncWord((1, 0, 1))
    cfg = TrialConfig.build(Q, w, 6, master_seed=3, mu=0.3)
    exact = exact_event_probs(cfg)
    est = run_batch(cfg, 40000)
    for o, p in est.probabilities().items():
        assert abs(p - exact[o]) < 4 * math.sqrt(exact[o] * (1 - exact[o]) / 40000) + 1e-9


def test_oracle_limits():
    with pytest.raises(SizeError):
        exact_event_probs(finite_cfg(30, 2, 0.1, 0.1))
    Q = binary_channel(0.1, 0.1)
    with pytest.raises(UnsupportedConfigurationError):
        exact_run_rule_probs(TrialConfig.build(Q, all_ones(3), 5, mu=0.4))


def test_accelerated_identical_when_noise_is_silent():
    # eps_f = 0: both engines read the same span uniforms and no noise can fire
    cfg = finite_cfg(500, 3, 0.0, 0.3, seed=5)
    acc = TrialConfig(cfg.A, cfg.channel, cfg.word, cfg.decoder, 5, accelerated=True)
    for i in range(200):
        assert run_trial(cfg, i) == run_trial_accelerated(acc, i)


def test_accelerated_batch_uses_accelerated_engine():
    cfg = finite_cfg(1000, 3, 0.2, 0.1, seed=2, accelerated=True)
    outs = [run_trial_accelerated(cfg, i) for i in range(300)]
    est = run_batch(cfg, 300)
    assert est.n_e1 == sum(o.outcome is Outcome.E1 for o in outs)
    assert run_trials(cfg, range(300)) == outs


def test_accelerated_matches_oracle_large_A():
    cfg = finite_cfg(3000, 4, 0.15, 0.2, seed=6, accelerated=True)
    exact = exact_run_rule_probs(cfg)
    n = 30000
    est = run_batch(cfg, n)
    for o, p in est.probabilities().items():
        sd = math.sqrt(exact[o] * (1 - exact[o]) / n)
        assert abs(p - exact[o]) < 4 * sd + 1e-9


def test_first_false_alarm_edge_cases(rng):
    assert first_false_alarm_accelerated(0.0, 3, 100, rng) is None
    assert first_false_alarm_accelerated(1.0, 3, 100, rng) == 1
    assert first_false_alarm_accelerated(0.5, 3, 0, rng) is None


def test_analytic_bounds():
    cfg = finite_cfg(10, 2, 0.1, 0.05)
    assert analytic_bounds(cfg) == pytest.approx((0.1, 0.1, 0.1))
    assert analytic_bounds(finite_cfg(1000, 2, 0.5, 0.6)) == (1.0, 0.5, 1.0)
    Q = binary_channel(0.1, 0.1)
    w = SyncWord((1, 0, 1))
    with pytest.raises(UnsupportedConfigurationError):
        analytic_bounds(TrialConfig.build(Q, w, 5))


def test_e1_bound_can_fail_with_large_miss_probability():
    # E1 includes false alarms after a missed sync word, which the union
    # bound A eps_f^N does not account for; exact values expose the gap
    cfg = finite_cfg(10, 4, 0.1, 0.3)
    e1 = exact_event_probs(cfg)[Outcome.E1]
    assert e1 == pytest.approx(0.0108944, abs=1e-6)
    assert e1 > analytic_bounds(cfg)[0]


def test_accelerated_speed_and_agreement_at_large_A():
    import time

    A, N = 10**7, 8
    exact_cfg = finite_cfg(A, N, 1e-3, 0.1, seed=1)
    acc_cfg = finite_cfg(A, N, 1e-3, 0.1, seed=1, accelerated=True)
    t0 = time.perf_counter()
    exact = [run_trial(exact_cfg, i) for i in range(16)]
    t_exact = (time.perf_counter() - t0) / 16
    t0 = time.perf_counter()
    est = run_batch(acc_cfg, 2000)
    t_acc = (time.perf_counter() - t0) / 2000
    assert t_exact > 10 * t_acc
    n_err = sum(o.outcome is not Outcome.CORRECT for o in exact)
    lo, hi = wilson_interval(n_err, 16)
    assert lo <= est.p_error <= hi
    # false alarms are rare here, so most paired trials coincide exactly
    same = sum(run_trial_accelerated(acc_cfg, i) == o for i, o in enumerate(exact))
    assert same >= 12
