"""Discrete memoryless channels and their synchronization threshold.

A channel is a row-stochastic matrix ``Q[x, y] = Q(y|x)`` together with the
index of the idle input ``x(0)`` that is sent whenever the sync word is not on
the air.  The synchronization threshold is the largest KL divergence between
an input's output law and the idle output law; all logarithms are natural, so
thresholds are in nats and ``A = exp(N * alpha)`` can be used literally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.special import rel_entr

from .errors import DimensionError

#: absolute tolerance on the row sum of a probability vector
STOCHASTIC_TOL = 1e-12


def prob_vector(entries: Sequence[float] | np.ndarray) -> np.ndarray:
    """Validate and renormalise a probability vector.

    Entries must be nonnegative and sum to one within ``STOCHASTIC_TOL``.
    The returned array is renormalised so that it sums to one in floating
    point, and is read-only.
    """
    p = np.array(entries, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DimensionError(f"probability vector must be 1-d and nonempty, got shape {p.shape}")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError(f"probability entries must be finite and nonnegative: {p}")
    total = p.sum()
    if abs(total - 1.0) > STOCHASTIC_TOL:
        raise ValueError(f"probability entries sum to {total!r}, not 1")
    p = p / total
    p.flags.writeable = False
    return p


def kl_divergence(p, q) -> float:
    """Kullback-Leibler divergence ``D(p || q)`` in nats.

    Terms with ``p(y) = 0`` contribute nothing; a letter with ``p(y) > 0`` and
    ``q(y) = 0`` makes the divergence infinite.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionError(f"length mismatch: {p.shape} vs {q.shape}")
    return float(np.sum(rel_entr(p, q)))


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Transition probabilities ``Q(y|x)`` of a finite DMC.

    Parameters
    ----------
    rows : array_like, shape (|X|, |Y|)
        One output distribution per input letter.
    idle_symbol : int
        Input index ``x(0)`` transmitted outside the sync span.
    """

    rows: np.ndarray
    idle_symbol: int = 0
    _cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        raw = np.asarray(self.rows, dtype=float)
        if raw.ndim != 2 or raw.shape[0] < 1 or raw.shape[1] < 1:
            raise DimensionError(f"transition matrix must be 2-d and nonempty, got shape {raw.shape}")
        if not np.all(np.isfinite(raw)) or np.any(raw < 0):
            raise ValueError(f"transition probabilities must be finite and nonnegative: {raw}")
        sums = raw.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > STOCHASTIC_TOL):
            raise ValueError(f"rows sum to {sums}, not 1")
        rows = raw / sums[:, None]
        rows.flags.writeable = False
        if not 0 <= self.idle_symbol < rows.shape[0]:
            raise ValueError(f"idle_symbol {self.idle_symbol} outside input alphabet of size {rows.shape[0]}")
        cdf = np.cumsum(rows, axis=1)
        cdf[:, -1] = 1.0
        cdf.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "idle_symbol", int(self.idle_symbol))
        object.__setattr__(self, "_cdf", cdf)

    @property
    def input_size(self) -> int:
        return self.rows.shape[0]

    @property
    def output_size(self) -> int:
        return self.rows.shape[1]

    @property
    def cdf(self) -> np.ndarray:
        """Row-wise cumulative distributions, last column pinned to 1."""
        return self._cdf

    def row(self, x: int) -> np.ndarray:
        return self.rows[x]

    @cached_property
    def threshold(self) -> ThresholdReport:
        return sync_threshold(self)

    def __eq__(self, other):
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return self.idle_symbol == other.idle_symbol and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash((self.idle_symbol, self.rows.shape, self.rows.tobytes()))

    def __getstate__(self):
        # cached_property values are recomputed after unpickling
        return {"rows": self.rows, "idle_symbol": self.idle_symbol, "_cdf": self._cdf}

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)


@dataclass(frozen=True)
class ThresholdReport:
    """Synchronization threshold of a channel.

    ``alpha`` is the maximum of ``per_symbol_divergence`` and ``best_symbol``
    (the input ``x(1)``) is its argmax, ties going to the lowest index.
    """

    alpha: float
    best_symbol: int
    per_symbol_divergence: tuple[float, ...]


def sync_threshold(Q: TransitionMatrix) -> ThresholdReport:
    idle = Q.row(Q.idle_symbol)
    divs = [kl_divergence(Q.row(x), idle) for x in range(Q.input_size)]
    divs[Q.idle_symbol] = 0.0
    # np.argmax returns the first maximiser, which is the documented tie rule
    best = int(np.argmax(divs))
    return ThresholdReport(alpha=float(divs[best]), best_symbol=best, per_symbol_divergence=tuple(divs))


def sample_output(Q: TransitionMatrix, x: int, rng: np.random.Generator) -> int:
    """Draw one channel output for input ``x``.

    Consumes exactly one uniform variate from ``rng`` and inverts the row CDF:
    the result is the first ``y`` with ``cdf[y] > u``.
    """
    u = rng.random()
    return inverse_cdf(Q.cdf[x], u)


def inverse_cdf(cdf: np.ndarray, u):
    """Index of the first CDF entry strictly above ``u`` (scalar or array)."""
    y = np.searchsorted(cdf, u, side="right")
    y = np.minimum(y, len(cdf) - 1)
    return int(y) if np.ndim(y) == 0 else y
