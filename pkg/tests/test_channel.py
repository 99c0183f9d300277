import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framesync import TransitionMatrix, binary_channel, kl_divergence, prob_vector, sample_output, sync_threshold
from framesync.channel import inverse_cdf
from framesync.errors import DimensionError


def test_prob_vector_renormalises_and_freezes():
    p = prob_vector([0.25, 0.75 + 1e-13])
    assert p.sum() == 1.0
    with pytest.raises(ValueError):
        p[0] = 0.5


@pytest.mark.parametrize("bad", [[0.5, 0.6], [-0.1, 1.1], [np.nan, 1.0]])
def test_prob_vector_rejects(bad):
    with pytest.raises(ValueError):
        prob_vector(bad)


def test_prob_vector_shape():
    with pytest.raises(DimensionError):
        prob_vector([])
    with pytest.raises(DimensionError):
        prob_vector([[0.5, 0.5]])


def test_kl_basic():
    assert kl_divergence([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2))
    assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == math.inf
    with pytest.raises(DimensionError):
        kl_divergence([1.0], [0.5, 0.5])


def test_threshold_bsc():
    rep = sync_threshold(binary_channel(0.1, 0.1))
    # (0.9 - 0.1) * ln 9
    assert rep.alpha == pytest.approx(0.8 * math.log(9), abs=1e-12)
    assert rep.best_symbol == 1
    assert rep.per_symbol_divergence[0] == 0.0


def test_threshold_ternary_and_ties():
    Q = TransitionMatrix([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]])
    rep = sync_threshold(Q)
    # inputs 1 and 2 tie; the lower index wins
    assert rep.best_symbol == 1
    assert rep.per_symbol_divergence[1] == pytest.approx(rep.per_symbol_divergence[2])
    expected = 0.1 * math.log(0.1 / 0.8) + 0.8 * math.log(0.8 / 0.1)
    assert rep.alpha == pytest.approx(expected)


def test_threshold_idle_symbol_moved():
    Q = TransitionMatrix([[0.1, 0.9], [0.9, 0.1]], idle_symbol=1)
    rep = sync_threshold(Q)
    assert rep.best_symbol == 0
    assert rep.per_symbol_divergence[1] == 0.0


def test_threshold_useless_channel():
    rep = sync_threshold(TransitionMatrix([[0.3, 0.7], [0.3, 0.7]]))
    assert rep.alpha == 0.0 and rep.best_symbol == 0


def test_threshold_infinite():
    rep = sync_threshold(TransitionMatrix([[1.0, 0.0], [0.5, 0.5]]))
    assert rep.alpha == math.inf


def test_transition_matrix_validation():
    with pytest.raises(ValueError):
        TransitionMatrix([[0.5, 0.6], [0.5, 0.5]])
    with pytest.raises(DimensionError):
        TransitionMatrix([0.5, 0.5])
    with pytest.raises(ValueError):
        TransitionMatrix([[0.5, 0.5]], idle_symbol=1)


def test_transition_matrix_eq_hash_pickle(bsc01):
    other = binary_channel(0.1, 0.1)
    assert bsc01 == other and hash(bsc01) == hash(other)
    clone = pickle.loads(pickle.dumps(bsc01))
    assert clone == bsc01
    assert clone.threshold.alpha == bsc01.threshold.alpha
    assert bsc01.cdf[:, -1].tolist() == [1.0, 1.0]


def test_inverse_cdf_boundaries():
    cdf = np.array([0.25, 0.5, 1.0])
    assert inverse_cdf(cdf, 0.0) == 0
    assert inverse_cdf(cdf, 0.25) == 1
    assert inverse_cdf(cdf, 0.9999) == 2
    assert inverse_cdf(cdf, np.array([0.1, 0.3, 0.7])).tolist() == [0, 1, 2]


def test_sample_output_frequencies(rng):
    Q = TransitionMatrix([[0.2, 0.3, 0.5], [1.0, 0.0, 0.0]])
    ys = np.array([sample_output(Q, 0, rng) for _ in range(20000)])
    freq = np.bincount(ys, minlength=3) / ys.size
    assert np.allclose(freq, [0.2, 0.3, 0.5], atol=0.015)
    assert all(sample_output(Q, 1, rng) == 0 for _ in range(100))


def test_sample_output_one_uniform_per_call():
    Q = binary_channel(0.3, 0.2)
    g1, g2 = np.random.default_rng(7), np.random.default_rng(7)
    ys = [sample_output(Q, 0, g1) for _ in range(50)]
    us = g2.random(50)
    assert ys == [int(u >= 0.7) for u in us]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=5), st.lists(st.floats(0.01, 1.0), min_size=2, max_size=5))
def test_threshold_nonnegative_and_max(a, b):
    n = min(len(a), len(b))
    rows = np.array([a[:n], b[:n]])
    rows /= rows.sum(axis=1, keepdims=True)
    Q = TransitionMatrix(rows)
    rep = sync_threshold(Q)
    assert rep.alpha >= 0
    assert rep.alpha == max(rep.per_symbol_divergence)
