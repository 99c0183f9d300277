"""Sequential joint-typicality decoding restricted to the ``x(1)`` slots.

For a window of ``N`` outputs starting at time ``t`` the decoder forms the
type ``counts[y] / n1`` over the ``n1`` slots where the sync word carries
``x(1)`` and declares ``v_hat = t`` as soon as every letter satisfies
``|counts[y]/n1 - reference[y]| < mu``.  The first such ``t`` in ``1..A``
wins; if none qualifies the decoder returns ``None``.

Three engines implement the same rule:

* :func:`run_sequential_naive` recomputes every window from scratch with exact
  rational arithmetic and is the semantic reference.
* :func:`run_sequential` streams symbols through a ring buffer and updates the
  counts incrementally.
* :func:`first_typical_batch` evaluates many fully materialised output
  strings at once with numpy and backs the Monte Carlo engine.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .channel import TransitionMatrix, prob_vector
from .errors import DimensionError, InputError, UnsupportedConfigurationError
from .syncword import SyncWord, all_ones

DEFAULT_MU = 0.1


@dataclass(frozen=True)
class WindowType:
    """Per-letter output counts over the ``x(1)`` slots of one window."""

    counts: tuple[int, ...]
    n1: int

    def __post_init__(self):
        if sum(self.counts) != self.n1:
            raise ValueError(f"counts {self.counts} do not sum to n1={self.n1}")

    @property
    def distribution(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.n1) for c in self.counts)


@dataclass(frozen=True, eq=False)
class TypicalityDecoder:
    """Decoder configuration.

    Parameters
    ----------
    word : SyncWord
        Transmitted pattern; only its 1-slots enter the type.
    reference : array_like
        Target output distribution at the 1-slots.
    mu : float or Fraction
        Strict L-infinity tolerance, ``0 < mu <= 1``.  Pass a ``Fraction``
        when the boundary matters (e.g. ``Fraction(1, N)``).
    horizon : int
        Number of candidate start times ``A``.
    """

    word: SyncWord
    reference: np.ndarray
    mu: float | Fraction = DEFAULT_MU
    horizon: int = 1

    def __post_init__(self):
        object.__setattr__(self, "reference", prob_vector(self.reference))
        if not 0 < self.mu <= 1:
            raise ValueError(f"mu must lie in (0, 1], got {self.mu}")
        if self.word.n_ones < 1:
            raise ValueError("sync word needs at least one x(1) slot")
        if int(self.horizon) < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        object.__setattr__(self, "horizon", int(self.horizon))

    @property
    def N(self) -> int:
        return self.word.N

    @property
    def output_size(self) -> int:
        return len(self.reference)

    @cached_property
    def count_bounds(self) -> tuple[tuple[int, int], ...]:
        """Inclusive integer ranges ``lo <= counts[y] <= hi`` equivalent to the strict test.

        Derived exactly from the binary values of ``reference`` and ``mu``.
        """
        n1 = self.word.n_ones
        mu = Fraction(self.mu)
        out = []
        for r in self.reference:
            R = Fraction(float(r))
            low, high = (R - mu) * n1, (R + mu) * n1
            lo = max(0, math.floor(low) + 1)
            hi = min(n1, math.ceil(high) - 1)
            out.append((lo, hi))
        return tuple(out)

    @cached_property
    def run_rule(self) -> bool:
        """True when, on a binary alphabet, only the all-``y(1)`` type is typical."""
        if self.output_size != 2:
            return False
        n1 = self.word.n_ones
        (lo0, hi0), (lo1, hi1) = self.count_bounds
        ok = [c1 for c1 in range(n1 + 1) if lo1 <= c1 <= hi1 and lo0 <= n1 - c1 <= hi0]
        return ok == [n1]

    def typical_counts(self, counts: Sequence[int]) -> bool:
        return all(lo <= c <= hi for c, (lo, hi) in zip(counts, self.count_bounds))

    def replace(self, **changes) -> TypicalityDecoder:
        fields = {"word": self.word, "reference": self.reference, "mu": self.mu, "horizon": self.horizon}
        fields.update(changes)
        return TypicalityDecoder(**fields)

    def __eq__(self, other):
        if not isinstance(other, TypicalityDecoder):
            return NotImplemented
        return (
            self.word == other.word
            and np.array_equal(self.reference, other.reference)
            and self.mu == other.mu
            and self.horizon == other.horizon
        )

    def __hash__(self):
        return hash((self.word, self.reference.tobytes(), self.mu, self.horizon))

    def __getstate__(self):
        return {k: getattr(self, k) for k in ("word", "reference", "mu", "horizon")}

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)


def empirical_at(window: Sequence[int], word: SyncWord, output_size: int = 2) -> WindowType:
    """Type of ``window`` over the 1-slots of ``word``."""
    if len(window) != word.N:
        raise DimensionError(f"window length {len(window)} != word length {word.N}")
    counts = [0] * output_size
    for s, y in zip(word.symbols, window):
        if s == 1:
            counts[int(y)] += 1
    return WindowType(tuple(counts), word.n_ones)


def is_typical(t: WindowType, reference: Sequence, mu) -> bool:
    """Strict test ``|counts[y]/n1 - reference[y]| < mu`` for every letter, in exact arithmetic."""
    if len(t.counts) != len(reference):
        raise DimensionError(f"{len(t.counts)} counts vs {len(reference)} reference letters")
    mn, md = Fraction(mu).as_integer_ratio()
    n1 = t.n1
    for c, r in zip(t.counts, reference):
        rn, rd = (r if isinstance(r, Fraction) else Fraction(float(r))).as_integer_ratio()
        # |c/n1 - rn/rd| < mn/md, cross-multiplied
        if not abs(c * rd - rn * n1) * md < mn * n1 * rd:
            return False
    return True


def _take(it, count: int) -> list:
    out = []
    for _ in range(count):
        try:
            out.append(next(it))
        except StopIteration:
            raise InputError("output stream ended before the decoder horizon") from None
    return out


def run_sequential_naive(stream: Iterable[int], dec: TypicalityDecoder) -> int | None:
    """Reference engine: rebuild the type of every window from scratch."""
    it = iter(stream)
    N, A = dec.N, dec.horizon
    ref = [Fraction(float(r)) for r in dec.reference]
    mu = Fraction(dec.mu)
    buf = _take(it, N - 1)
    for t in range(1, A + 1):
        buf.extend(_take(it, 1))
        w = empirical_at(buf[t - 1 : t - 1 + N], dec.word, dec.output_size)
        if is_typical(w, ref, mu):
            return t
    return None


def _churn(word: SyncWord) -> list[tuple[int, int]]:
    # (offset j, sign) with sign = [j-1 in S] - [j in S], j = 0..N; sliding the
    # window by one changes counts[y_{p+j}] by sign for every listed j
    w = (0,) + word.symbols + (0,)
    return [(j, w[j] - w[j + 1]) for j in range(word.N + 1) if w[j] != w[j + 1]]


def run_sequential(stream: Iterable[int], dec: TypicalityDecoder) -> int | None:
    """Streaming engine with incremental counts.

    Keeps the last ``N + 1`` outputs in a ring buffer.  Sliding the window
    touches only the offsets where 1-slot membership changes, so an all-ones
    word costs O(1) per step.  Never reads beyond ``y_{t+N-1}`` before
    deciding on ``t``.
    """
    it = iter(stream)
    N, A = dec.N, dec.horizon
    bounds = dec.count_bounds
    churn = _churn(dec.word)
    ring = deque(_take(it, N), maxlen=N + 1)
    counts = [0] * dec.output_size
    for s, y in zip(dec.word.symbols, ring):
        if s:
            counts[y] += 1
    t = 1
    while True:
        if all(lo <= c <= hi for c, (lo, hi) in zip(counts, bounds)):
            return t
        if t == A:
            return None
        ring.extend(_take(it, 1))
        # ring now holds y_{p}..y_{p+N} for the window p = t - 1 being left
        for j, sign in churn:
            counts[ring[j]] += sign
        t += 1


def window_counts_batch(outputs: np.ndarray, dec: TypicalityDecoder) -> np.ndarray:
    """Counts for every window of every row: shape ``(rows, A, |Y|)``."""
    Y = np.asarray(outputs)
    if Y.ndim != 2:
        raise DimensionError("outputs must be 2-d (rows x time)")
    N, A = dec.N, dec.horizon
    if Y.shape[1] < A + N - 1:
        raise InputError(f"rows have {Y.shape[1]} symbols, need {A + N - 1}")
    out = np.zeros((Y.shape[0], A, dec.output_size), dtype=np.int32)
    pos = dec.word.ones_positions
    for y in range(dec.output_size):
        ind = (Y == y).astype(np.int32)
        if dec.word.is_all_ones:
            cs = np.zeros((Y.shape[0], Y.shape[1] + 1), dtype=np.int64)
            np.cumsum(ind, axis=1, out=cs[:, 1:])
            out[:, :, y] = cs[:, N : N + A] - cs[:, :A]
        else:
            acc = out[:, :, y]
            for i in pos:
                acc += ind[:, i : i + A]
    return out


def typical_mask_batch(outputs: np.ndarray, dec: TypicalityDecoder) -> np.ndarray:
    counts = window_counts_batch(outputs, dec)
    lo = np.array([b[0] for b in dec.count_bounds])
    hi = np.array([b[1] for b in dec.count_bounds])
    return np.all((counts >= lo) & (counts <= hi), axis=2)


def first_typical_batch(outputs: np.ndarray, dec: TypicalityDecoder) -> np.ndarray:
    """Declared offset for each row, 0 where no window is typical."""
    mask = typical_mask_batch(outputs, dec)
    hit = mask.any(axis=1)
    return np.where(hit, mask.argmax(axis=1) + 1, 0)


def finite_n_decoder(N: int, output_alphabet_size: int = 2, horizon: int = 1) -> TypicalityDecoder:
    """All-ones word, reference ``(0, ..., 0, 1)`` and ``mu = 1/N``.

    With the strict test this declares exactly when all ``N`` window outputs
    equal the last letter ``y(1)``.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    ref = np.zeros(output_alphabet_size)
    ref[-1] = 1.0
    return TypicalityDecoder(all_ones(N), ref, Fraction(1, N), horizon)


def channel_decoder(
    Q: TransitionMatrix,
    word: SyncWord,
    horizon: int,
    mu=DEFAULT_MU,
    reference: str = "channel",
) -> TypicalityDecoder:
    """Decoder whose reference is the channel row of ``x(1)`` or its limit.

    ``reference="limit"`` uses the point mass on the last output letter,
    which is where ``Q(.|x(1))`` tends for the quantized AWGN channel.
    """
    if reference == "channel":
        ref = Q.row(Q.threshold.best_symbol)
    elif reference == "limit":
        if Q.output_size != 2:
            raise UnsupportedConfigurationError("limit reference is defined for binary outputs only")
        ref = np.array([0.0, 1.0])
    else:
        raise ValueError(f"unknown reference mode {reference!r}")
    return TypicalityDecoder(word, ref, mu, horizon)
