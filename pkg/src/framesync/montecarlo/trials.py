"""Trial simulation, error classification and batch estimation.

Randomness
----------
Trial ``i`` of a run with master seed ``s`` draws from a Philox generator
keyed by the 128-bit value ``s | (i << 64)`` with its counter at zero, so a
trial's stream depends only on ``(s, i)`` and never on scheduling.  Within a
trial the draws are, in order:

1. ``v = integers(1, A + 1)``;
2. one uniform per sync-span slot (``N`` draws);
3. for the symbol-exact engine, one uniform per noise slot in time order
   (``A - 1`` draws).  The accelerated engine instead spends a variable
   number of draws on its block sampler.

Every output symbol is the inverse-CDF image of its uniform, as in
:func:`framesync.channel.sample_output`.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.stats import norm

from ..channel import TransitionMatrix
from ..decoder import DEFAULT_MU, TypicalityDecoder, channel_decoder, typical_mask_batch
from ..errors import UnsupportedConfigurationError
from ..syncword import SyncWord

MAX_SEED = 1 << 64
CHUNK_TRIALS = 4096
# target number of uniforms held in memory per block of symbol-exact trials
BLOCK_UNIFORMS = 1 << 21
WILSON_Z = float(norm.ppf(0.975))


class Outcome(str, enum.Enum):
    CORRECT = "Correct"
    E1 = "E1"
    E2 = "E2"
    E3 = "E3"


OUTCOME_ORDER = (Outcome.CORRECT, Outcome.E1, Outcome.E2, Outcome.E3)


def classify(v: int, v_hat: int | None, N: int) -> Outcome:
    """Place a decision in the error partition.

    ``E2`` is a declaration in ``v-N+1..v-1``; every other wrong declaration,
    including ones after ``v``, is ``E1``; no declaration is ``E3``.
    """
    if v_hat is None:
        return Outcome.E3
    if v_hat == v:
        return Outcome.CORRECT
    if v - N + 1 <= v_hat <= v - 1:
        return Outcome.E2
    return Outcome.E1


@dataclass(frozen=True)
class TrialConfig:
    """Everything needed to simulate one trial.

    ``accelerated`` selects :func:`run_trial_accelerated` inside
    :func:`run_batch`; it requires an all-ones word, a binary output alphabet
    and a decoder whose only typical type is the all-``y(1)`` window.
    """

    A: int
    channel: TransitionMatrix
    word: SyncWord
    decoder: TypicalityDecoder
    master_seed: int = 0
    accelerated: bool = False

    def __post_init__(self):
        if int(self.A) < 1:
            raise ValueError(f"A must be >= 1, got {self.A}")
        object.__setattr__(self, "A", int(self.A))
        if self.decoder.word != self.word:
            raise ValueError("decoder.word must equal word")
        if self.decoder.horizon != self.A:
            raise ValueError(f"decoder.horizon={self.decoder.horizon} must equal A={self.A}")
        if self.decoder.output_size != self.channel.output_size:
            raise ValueError("decoder reference and channel disagree on the output alphabet")
        if not 0 <= int(self.master_seed) < MAX_SEED:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        if self.accelerated:
            check_accelerable(self)

    @classmethod
    def build(
        cls,
        channel: TransitionMatrix,
        word: SyncWord,
        A: int,
        master_seed: int = 0,
        mu=DEFAULT_MU,
        reference: str = "channel",
        accelerated: bool = False,
    ) -> TrialConfig:
        dec = channel_decoder(channel, word, A, mu=mu, reference=reference)
        return cls(A, channel, word, dec, master_seed, accelerated)

    @property
    def N(self) -> int:
        return self.word.N

    @property
    def sync_symbol(self) -> int:
        """Input letter ``x(1)`` used for the word's 1-slots."""
        return self.channel.threshold.best_symbol

    def __getstate__(self):
        return dict(self.__dict__)

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)


@dataclass(frozen=True)
class TrialOutcome:
    v: int
    v_hat: int | None
    outcome: Outcome
    decision_time: int | None
    #: whether the window starting at ``v`` passes the typicality test
    typical_at_v: bool


def _outcome(cfg: TrialConfig, v: int, v_hat: int | None, typical_at_v: bool) -> TrialOutcome:
    dt = None if v_hat is None else v_hat + cfg.N - 1
    return TrialOutcome(v, v_hat, classify(v, v_hat, cfg.N), dt, typical_at_v)


class TrialStreams:
    """Reusable source of per-trial generators (avoids re-keying cost)."""

    def __init__(self):
        self._bitgen = np.random.Philox(key=0)
        self._gen = np.random.Generator(self._bitgen)

    def reset(self, master_seed: int, trial_index: int) -> np.random.Generator:
        self._bitgen.state = {
            "bit_generator": "Philox",
            "state": {
                "counter": np.zeros(4, dtype=np.uint64),
                "key": np.array([master_seed, trial_index], dtype=np.uint64),
            },
            "buffer": np.zeros(4, dtype=np.uint64),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        return self._gen


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Fresh generator for trial ``trial_index`` of a run seeded with ``master_seed``."""
    if not 0 <= trial_index < MAX_SEED:
        raise ValueError("trial_index must fit in 64 bits")
    return np.random.Generator(np.random.Philox(key=int(master_seed) | (int(trial_index) << 64)))


# -- symbol-exact engine -----------------------------------------------------


def _inverse_cdf_rows(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    y = np.zeros(u.shape, dtype=np.int8)
    for c in cdf[:-1]:
        y += u >= c
    return y


def _exact_block(cfg: TrialConfig, indices, streams: TrialStreams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    A, N = cfg.A, cfg.N
    L = A + N - 1
    B = len(indices)
    V = np.empty(B, dtype=np.int64)
    u_span = np.empty((B, N))
    u_noise = np.empty((B, L - N))
    for k, i in enumerate(indices):
        g = streams.reset(cfg.master_seed, i)
        V[k] = g.integers(1, A + 1)
        g.random(out=u_span[k])
        if L > N:
            g.random(out=u_noise[k])
    col = np.arange(L)
    span = (col >= (V - 1)[:, None]) & (col < (V - 1 + N)[:, None])
    U = np.empty((B, L))
    U[span] = u_span.ravel()
    U[~span] = u_noise.ravel()
    sends_x1 = np.zeros((B, L), dtype=bool)
    sends_x1[span] = np.tile(cfg.word.array.astype(bool), B)
    cdf = cfg.channel.cdf
    Y = np.where(
        sends_x1,
        _inverse_cdf_rows(cdf[cfg.sync_symbol], U),
        _inverse_cdf_rows(cdf[cfg.channel.idle_symbol], U),
    )
    mask = typical_mask_batch(Y, cfg.decoder)
    v_hat = np.where(mask.any(axis=1), mask.argmax(axis=1) + 1, 0)
    at_v = mask[np.arange(B), V - 1]
    return V, v_hat, at_v


def run_trial(cfg: TrialConfig, trial_index: int) -> TrialOutcome:
    """Simulate one transmission symbol by symbol and decode it."""
    V, v_hat, at_v = _exact_block(cfg, [trial_index], TrialStreams())
    vh = int(v_hat[0]) or None
    return _outcome(cfg, int(V[0]), vh, bool(at_v[0]))


# -- accelerated engine ------------------------------------------------------


def check_accelerable(cfg: TrialConfig) -> None:
    if not cfg.word.is_all_ones:
        raise UnsupportedConfigurationError("accelerated trials need an all-ones sync word")
    if cfg.channel.output_size != 2:
        raise UnsupportedConfigurationError("accelerated trials need a binary output alphabet")
    if not cfg.decoder.run_rule:
        raise UnsupportedConfigurationError("accelerated trials need a decoder that declares only on N consecutive y(1)")


def _hit_letter(dec: TypicalityDecoder) -> int:
    n1 = dec.word.n_ones
    return next(y for y, (lo, _) in enumerate(dec.count_bounds) if lo == n1)


def _first_completion_from_zero(p: float, N: int, limit: int, rng: np.random.Generator) -> int | None:
    """Position (1-based) where the first run of ``N`` hits ends, or None if beyond ``limit``.

    The stream is i.i.d. with hit probability ``p`` and starts fresh.  It is cut
    into blocks that end at each miss; a block holds ``j < N`` hits and a miss
    with probability ``p**j (1-p)``, or is the first run of ``N`` hits with
    probability ``p**N``.  The number of failed blocks is geometric and their
    lengths are drawn in aggregate from a multinomial, so the cost does not
    grow with the waiting time.
    """
    if limit < N or p <= 0.0:
        return None
    q = p**N
    if q >= 1.0:
        return N
    if q == 0.0:
        return None
    u = 1.0 - rng.random()
    failures = math.floor(math.log(u) / math.log1p(-q))
    if failures >= limit:
        return None
    S = 0
    if failures > 0:
        j = np.arange(N)
        pj = p**j * (1.0 - p)
        counts = rng.multinomial(failures, pj / pj.sum())
        S = int(np.dot(counts, j + 1))
    end = S + N
    return end if end <= limit else None


def _conditional_run_state(p: float, N: int, m: int, rng: np.random.Generator) -> int:
    """Trailing run length after ``m`` fresh symbols, given no run of ``N`` hits occurred."""
    if m == 0 or p <= 0.0:
        return 0
    T = np.zeros((N, N))
    T[:, 0] = 1.0 - p
    for j in range(N - 1):
        T[j, j + 1] = p
    vec = np.zeros(N)
    vec[0] = 1.0
    base = T
    while m:
        if m & 1:
            vec = vec @ base
            vec /= vec.sum()
        m >>= 1
        if m:
            base = base @ base
            base /= base.max()
    return int(min(np.searchsorted(np.cumsum(vec), rng.random() * vec.sum(), side="right"), N - 1))


def _noise_segment(p, N, length, state, rng, need_state):
    """Run the hit counter through ``length`` noise symbols.

    Returns ``(absorbed_at, state)`` with ``absorbed_at`` relative to the
    segment start (1-based) or None.
    """
    pos = 0
    # finish the partial run symbol by symbol; it ends within N - state symbols
    while state > 0 and pos < length:
        pos += 1
        if rng.random() < p:
            state += 1
            if state == N:
                return pos, state
        else:
            state = 0
    remaining = length - pos
    if remaining <= 0:
        return None, state
    hit = _first_completion_from_zero(p, N, remaining, rng)
    if hit is not None:
        return pos + hit, N
    return None, (_conditional_run_state(p, N, remaining, rng) if need_state else 0)


def first_false_alarm_accelerated(eps_f: float, N: int, limit: int, rng: np.random.Generator) -> int | None:
    """Start time of the first run of ``N`` hits in pure noise, if it starts at or before ``limit``.

    This is the noise-segment sampler used by :func:`run_trial_accelerated`.
    """
    end = _first_completion_from_zero(eps_f, N, limit + N - 1, rng)
    return None if end is None else end - N + 1


def _accelerated_one(cfg: TrialConfig, g: np.random.Generator) -> TrialOutcome:
    A, N = cfg.A, cfg.N
    y1 = _hit_letter(cfg.decoder)
    p_noise = float(cfg.channel.row(cfg.channel.idle_symbol)[y1])
    p_span = float(cfg.channel.row(cfg.sync_symbol)[y1])
    v = int(g.integers(1, A + 1))
    # span uniforms come first so degenerate noise reproduces the exact engine
    u_span = g.random(N)
    # binary inverse CDF: the output is letter 1 iff u >= cdf[0]
    hits_span = (u_span >= cfg.channel.cdf[cfg.sync_symbol][0]) == (y1 == 1)
    typical_at_v = bool(hits_span.all())

    end, state = _noise_segment(p_noise, N, v - 1, 0, g, need_state=True)
    if end is None:
        for k, h in enumerate(hits_span):
            state = state + 1 if h else 0
            if state == N:
                end = v + k
                break
    if end is None:
        rel, _ = _noise_segment(p_noise, N, A - v, state, g, need_state=False)
        if rel is not None:
            end = v + N - 1 + rel
    v_hat = None if end is None else end - N + 1
    return _outcome(cfg, v, v_hat, typical_at_v)


def run_trial_accelerated(cfg: TrialConfig, trial_index: int) -> TrialOutcome:
    """Same law as :func:`run_trial`, skipping over noise segments in blocks.

    Only the ``N`` sync-span symbols and the partial runs adjacent to them are
    drawn one at a time.
    """
    check_accelerable(cfg)
    return _accelerated_one(cfg, trial_rng(cfg.master_seed, trial_index))


# -- batches -------------------------------------------------------------------


def wilson_interval(successes: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    p = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    centre = (p + z2 / (2 * n)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n))
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


@dataclass(frozen=True)
class BatchEstimate:
    """Outcome counts of ``trials`` trials and derived probabilities.

    ``ci_low``/``ci_high`` is the 95% Wilson interval on ``p_error``.
    """

    trials: int
    n_correct: int
    n_e1: int
    n_e2: int
    n_e3: int
    n_atypical_at_v: int = 0

    def __post_init__(self):
        if self.n_correct + self.n_e1 + self.n_e2 + self.n_e3 != self.trials:
            raise ValueError("outcome counts must sum to the number of trials")

    @property
    def n_error(self) -> int:
        return self.n_e1 + self.n_e2 + self.n_e3

    @property
    def p_correct(self) -> float:
        return self.n_correct / self.trials

    @property
    def p_e1(self) -> float:
        return self.n_e1 / self.trials

    @property
    def p_e2(self) -> float:
        return self.n_e2 / self.trials

    @property
    def p_e3(self) -> float:
        return self.n_e3 / self.trials

    @property
    def p_error(self) -> float:
        return self.n_error / self.trials

    @cached_property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.n_error, self.trials)

    @property
    def ci_low(self) -> float:
        return self.ci[0]

    @property
    def ci_high(self) -> float:
        return self.ci[1]

    def probabilities(self) -> dict[Outcome, float]:
        return {
            Outcome.CORRECT: self.p_correct,
            Outcome.E1: self.p_e1,
            Outcome.E2: self.p_e2,
            Outcome.E3: self.p_e3,
        }


def _count_chunk(cfg: TrialConfig, start: int, stop: int) -> np.ndarray:
    """Counts ``[correct, e1, e2, e3, atypical_at_v]`` for trials ``start..stop-1``."""
    streams = TrialStreams()
    counts = np.zeros(5, dtype=np.int64)
    N = cfg.N
    if cfg.accelerated:
        for i in range(start, stop):
            o = _accelerated_one(cfg, streams.reset(cfg.master_seed, i))
            counts[OUTCOME_ORDER.index(o.outcome)] += 1
            counts[4] += not o.typical_at_v
        return counts
    L = cfg.A + N - 1
    block = max(1, min(stop - start, BLOCK_UNIFORMS // L))
    for b0 in range(start, stop, block):
        V, v_hat, at_v = _exact_block(cfg, range(b0, min(stop, b0 + block)), streams)
        none = v_hat == 0
        correct = v_hat == V
        e2 = ~none & (v_hat >= V - N + 1) & (v_hat <= V - 1)
        counts[0] += np.count_nonzero(correct)
        counts[2] += np.count_nonzero(e2)
        counts[3] += np.count_nonzero(none)
        counts[1] += np.count_nonzero(~none & ~correct & ~e2)
        counts[4] += np.count_nonzero(~at_v)
    return counts


def _count_chunk_star(args):
    return _count_chunk(*args)


def run_batch(cfg: TrialConfig, n_trials: int, workers: int = 1) -> BatchEstimate:
    """Estimate outcome probabilities from trials ``0..n_trials-1``.

    Trials are split into fixed chunks of ``CHUNK_TRIALS`` regardless of
    ``workers`` and only integer counts are summed, so the estimate is a pure
    function of ``(cfg, n_trials)``.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    chunks = [(cfg, s, min(n_trials, s + CHUNK_TRIALS)) for s in range(0, n_trials, CHUNK_TRIALS)]
    if workers <= 1 or len(chunks) == 1:
        parts = [_count_chunk(*c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
            parts = list(pool.map(_count_chunk_star, chunks))
    c = np.sum(parts, axis=0)
    return BatchEstimate(n_trials, int(c[0]), int(c[1]), int(c[2]), int(c[3]), int(c[4]))


def run_trials(cfg: TrialConfig, indices) -> list[TrialOutcome]:
    """Per-trial outcomes, using the engine selected by ``cfg.accelerated``."""
    if cfg.accelerated:
        return [run_trial_accelerated(cfg, i) for i in indices]
    indices = list(indices)
    V, v_hat, at_v = _exact_block(cfg, indices, TrialStreams())
    return [_outcome(cfg, int(v), int(h) or None, bool(a)) for v, h, a in zip(V, v_hat, at_v)]
