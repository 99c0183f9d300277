"""Exact small-instance oracles and closed-form bounds."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..decoder import empirical_at, is_typical
from ..errors import SizeError, UnsupportedConfigurationError
from .trials import OUTCOME_ORDER, Outcome, TrialConfig, _hit_letter, classify

MAX_ORACLE_LENGTH = 22


def exact_false_alarm_cdf(eps_f: float, N: int, L: int) -> np.ndarray:
    """``P(first run of N hits starts at or before t)`` for ``t = 1..L``.

    The stream is i.i.d. with hit probability ``eps_f``.  Computed by
    propagating the run-length chain (states ``0..N``, ``N`` absorbing) over
    ``L + N - 1`` symbols.
    """
    if not 0.0 <= eps_f <= 1.0:
        raise ValueError("eps_f must lie in [0, 1]")
    if N < 1 or L < 1:
        raise ValueError("N and L must be positive")
    dist = np.zeros(N + 1)
    dist[0] = 1.0
    out = np.empty(L)
    for n in range(1, L + N):
        nxt = np.zeros(N + 1)
        nxt[0] = (1.0 - eps_f) * dist[:N].sum()
        nxt[1 : N + 1] = eps_f * dist[:N]
        nxt[N] += dist[N]
        dist = nxt
        t = n - N + 1
        if t >= 1:
            out[t - 1] = dist[N]
    return out


def exact_event_probs(cfg: TrialConfig) -> dict[Outcome, float]:
    """Exact outcome probabilities by enumerating output strings.

    Output prefixes are expanded depth first; as soon as a window passes the
    per-window typicality test (the same from-scratch test the naive engine
    uses) the whole subtree is credited to that decision.  Probabilities are
    carried as a vector over all ``A`` values of ``v`` and averaged at the end.
    """
    A, N = cfg.A, cfg.N
    L = A + N - 1
    if cfg.channel.output_size != 2:
        raise UnsupportedConfigurationError("exact_event_probs needs a binary output alphabet")
    if L > MAX_ORACLE_LENGTH:
        raise SizeError(f"A + N - 1 = {L} exceeds {MAX_ORACLE_LENGTH}")
    dec = cfg.decoder
    word = cfg.word
    ref = [Fraction(float(r)) for r in dec.reference]
    mu = Fraction(dec.mu)

    # p_y[n, k, y]: probability of output y at time n+1 when v = k+1
    rows = cfg.channel.rows
    idle, x1 = cfg.channel.idle_symbol, cfg.sync_symbol
    p_y = np.empty((L, A, 2))
    for k in range(A):
        for n in range(L):
            i = n - k
            x = x1 if 0 <= i < N and word.symbols[i] == 1 else idle
            p_y[n, k] = rows[x]

    vs = np.arange(1, A + 1)
    totals = {o: 0.0 for o in OUTCOME_ORDER}

    def credit(v_hat, probs):
        for k, v in enumerate(vs):
            if probs[k]:
                totals[classify(int(v), v_hat, N)] += probs[k]

    def expand(prefix: list[int], probs: np.ndarray):
        d = len(prefix)
        if d >= N:
            t = d - N + 1
            if is_typical(empirical_at(prefix[t - 1 :], word, 2), ref, mu):
                credit(t, probs)
                return
            if d == L:
                credit(None, probs)
                return
        for y in (0, 1):
            nxt = probs * p_y[d, :, y]
            if nxt.any():
                prefix.append(y)
                expand(prefix, nxt)
                prefix.pop()

    expand([], np.ones(A))
    return {o: float(totals[o] / A) for o in OUTCOME_ORDER}


def exact_run_rule_probs(cfg: TrialConfig) -> dict[Outcome, float]:
    """Exact outcome probabilities when the decoder fires on ``N`` consecutive ``y(1)``.

    Needs an all-ones word, binary outputs and a decoder whose only typical
    type is all-``y(1)``.  For each ``v`` the run-length chain is propagated
    through the time-varying hit probabilities (``eps_f`` outside the sync
    span, ``1 - eps_m`` inside it), so the cost is ``O(A (A + N) N)``.
    """
    if not (cfg.word.is_all_ones and cfg.channel.output_size == 2 and cfg.decoder.run_rule):
        raise UnsupportedConfigurationError("run-rule oracle needs an all-ones word and the all-y(1) rule")
    A, N = cfg.A, cfg.N
    L = A + N - 1
    y1 = _hit_letter(cfg.decoder)
    eps_f = float(cfg.channel.row(cfg.channel.idle_symbol)[y1])
    hit_sync = float(cfg.channel.row(cfg.sync_symbol)[y1])
    vs = np.arange(1, A + 1)
    totals = np.zeros(4)
    # dist[k, j]: P(trailing run of j hits, not yet absorbed | v = k + 1)
    dist = np.zeros((A, N))
    dist[:, 0] = 1.0
    for n in range(1, L + 1):
        p = np.where((vs <= n) & (n < vs + N), hit_sync, eps_f)
        absorbed = p * dist[:, N - 1]
        mass = dist.sum(axis=1)
        dist[:, 1:] = p[:, None] * dist[:, :-1]
        dist[:, 0] = (1.0 - p) * mass
        t = n - N + 1
        if t >= 1:
            # classify(v, t, N) for every v at once
            correct = vs == t
            e2 = (t >= vs - N + 1) & (t <= vs - 1)
            totals[0] += absorbed[correct].sum()
            totals[2] += absorbed[e2].sum()
            totals[1] += absorbed[~correct & ~e2].sum()
    totals[3] = dist.sum()
    return {o: float(totals[i] / A) for i, o in enumerate(OUTCOME_ORDER)}


def analytic_bounds(cfg: TrialConfig) -> tuple[float, float, float]:
    """Union bounds ``A eps_f^N``, ``(N-1) eps_f`` and ``N eps_m``, clipped to [0, 1].

    Stated for the all-ones word over a binary channel, where ``eps_f`` is the
    probability that idle input yields ``y(1)`` and ``eps_m`` the probability
    that ``x(1)`` yields ``y(0)``.
    """
    if not cfg.word.is_all_ones or cfg.channel.output_size != 2:
        raise UnsupportedConfigurationError("analytic bounds need an all-ones word and binary outputs")
    A, N = cfg.A, cfg.N
    eps_f = float(cfg.channel.row(cfg.channel.idle_symbol)[1])
    eps_m = float(cfg.channel.row(cfg.sync_symbol)[0])
    clip = lambda x: min(1.0, max(0.0, x))  # noqa: E731
    return clip(A * eps_f**N), clip((N - 1) * eps_f), clip(N * eps_m)
