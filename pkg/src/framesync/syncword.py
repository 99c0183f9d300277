"""Sync words built from maximal-length shift-register sequences.

Word bits use the transmit convention ``1 -> x(1)`` (the most distinguishable
input) and ``0 -> x(0)`` (the idle input).  The construction for length ``N``
and constant ``K`` picks the degree ``M`` with
``2**(M-1) - 1 < N/K <= 2**M - 1``, places a complemented period-``2**M - 1``
m-sequence at the front and pads the rest of the word with ones.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, ConstructionError, PrimitivityError, SeedError


@dataclass(frozen=True)
class LfsrSpec:
    """Fibonacci LFSR of a given degree.

    The register holds stages ``1..M``; each clock shifts every stage one step
    toward stage ``M``, emits the bit evicted from stage ``M`` and loads stage
    ``1`` with the parity of the tapped stages.  Tap ``t`` names stage ``t``,
    so the taps ``{3, 1}`` realise the polynomial ``x^3 + x + 1``.

    The seed bit ``i`` (LSB first) is the initial content of stage ``i + 1``.
    Construction fails unless the register has period exactly ``2**M - 1``.
    """

    degree: int
    taps: frozenset[int]
    seed: int = 1

    def __post_init__(self):
        object.__setattr__(self, "taps", frozenset(int(t) for t in self.taps))
        M = self.degree
        if M < 2:
            raise ValueError(f"LFSR degree must be at least 2, got {M}")
        if M not in self.taps or any(not 1 <= t <= M for t in self.taps):
            raise ValueError(f"taps {sorted(self.taps)} must lie in 1..{M} and include {M}")
        if self.seed == 0:
            raise SeedError("LFSR seed must be nonzero")
        if not 0 < self.seed < (1 << M):
            raise SeedError(f"seed {self.seed} does not fit in {M} bits")
        period = lfsr_period(M, self.tap_mask, self.seed)
        if period != (1 << M) - 1:
            raise PrimitivityError(
                f"taps {sorted(self.taps)} give period {period}, not {(1 << M) - 1}; polynomial is not primitive"
            )

    @property
    def tap_mask(self) -> int:
        return sum(1 << (t - 1) for t in self.taps)


def _step(state: int, mask: int, full: int) -> int:
    fb = (state & mask).bit_count() & 1
    return ((state << 1) & full) | fb


def lfsr_period(degree: int, tap_mask: int, seed: int) -> int:
    full = (1 << degree) - 1
    state = _step(seed, tap_mask, full)
    n = 1
    while state != seed:
        state = _step(state, tap_mask, full)
        n += 1
        if n > full:
            break
    return n


# One primitive polynomial per degree, as feedback taps.
# Each is re-verified by the period check when the table is built.
PRIMITIVE_TAPS: dict[int, tuple[int, ...]] = {
    2: (2, 1),
    3: (3, 2),
    4: (4, 3),
    5: (5, 3),
    6: (6, 5),
    7: (7, 6),
    8: (8, 6, 5, 4),
    9: (9, 5),
    10: (10, 7),
    11: (11, 9),
    12: (12, 6, 4, 1),
    13: (13, 4, 3, 1),
    14: (14, 5, 3, 1),
    15: (15, 14),
    16: (16, 15, 13, 4),
}

DEFAULT_SPECS: dict[int, LfsrSpec] = {M: LfsrSpec(M, frozenset(t)) for M, t in PRIMITIVE_TAPS.items()}


@lru_cache(maxsize=64)
def _msequence(degree: int, tap_mask: int, seed: int) -> np.ndarray:
    full = (1 << degree) - 1
    out = np.empty(full, dtype=np.uint8)
    state = seed
    top = degree - 1
    for i in range(full):
        out[i] = (state >> top) & 1
        state = _step(state, tap_mask, full)
    out.flags.writeable = False
    return out


def generate_msequence(spec: LfsrSpec) -> np.ndarray:
    """One full period (``2**M - 1`` bits) of the register output."""
    return _msequence(spec.degree, spec.tap_mask, spec.seed)


@dataclass(frozen=True)
class SyncWord:
    """Binary sync word in transmission order; ``1`` marks an ``x(1)`` slot."""

    symbols: tuple[int, ...]
    k_param: int | None = None
    degree: int | None = None
    n_ones: int = field(init=False)

    def __post_init__(self):
        syms = tuple(int(s) for s in self.symbols)
        if not syms:
            raise ValueError("sync word must be nonempty")
        if any(s not in (0, 1) for s in syms):
            raise ValueError("sync word symbols must be 0 or 1")
        object.__setattr__(self, "symbols", syms)
        object.__setattr__(self, "n_ones", sum(syms))

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def N(self) -> int:
        return len(self.symbols)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.symbols, dtype=np.uint8)
        a.flags.writeable = False
        return a

    @cached_property
    def ones_positions(self) -> np.ndarray:
        """0-based positions of the ``x(1)`` slots."""
        p = np.flatnonzero(self.array)
        p.flags.writeable = False
        return p

    @property
    def is_all_ones(self) -> bool:
        return self.n_ones == self.N

    def __getstate__(self):
        return {k: getattr(self, k) for k in ("symbols", "k_param", "degree", "n_ones")}

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)


def construction_degree(N: int, K: int) -> int:
    """The unique ``M >= 1`` with ``2**(M-1) - 1 < N/K <= 2**M - 1``."""
    if K < 2:
        raise ValueError(f"K must be at least 2, got {K}")
    if N < K:
        raise ConstructionError(f"N={N} < K={K}: no degree satisfies the sizing inequality; use all_ones")
    M = 1
    # integer form of N/K <= 2**M - 1
    while ((1 << M) - 1) * K < N:
        M += 1
    return M


def build_sync_word(N: int, K: int, spec_table: Mapping[int, LfsrSpec] | None = None) -> SyncWord:
    """Sync word of length ``N`` from a complemented m-sequence prefix.

    Prefix slot ``n`` carries ``x(1)`` where the m-sequence bit is 0 and
    ``x(0)`` where it is 1; slots past ``2**M - 1`` all carry ``x(1)``.
    """
    M = construction_degree(N, K)
    if M == 1:
        # degree-1 register (x + 1) has the single-state period "1"
        mseq = np.ones(1, dtype=np.uint8)
    else:
        table = DEFAULT_SPECS if spec_table is None else spec_table
        if M not in table:
            raise ConfigurationError(f"no LFSR spec of degree {M} available for N={N}, K={K}")
        mseq = generate_msequence(table[M])
    prefix = 1 - mseq.astype(np.int64)
    tail = np.ones(N - len(prefix), dtype=np.int64)
    return SyncWord(tuple(np.concatenate([prefix, tail]).tolist()), k_param=K, degree=M)


def all_ones(N: int) -> SyncWord:
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    return SyncWord((1,) * N)


def cyclic_shift_distance(seq) -> np.ndarray:
    """Hamming distance between ``seq`` and each of its rotations by ``1..len-1``."""
    s = np.asarray(seq, dtype=np.uint8)
    if s.size == 0:
        raise ValueError("sequence must be nonempty")
    return np.array([int(np.count_nonzero(s != np.roll(s, k))) for k in range(1, s.size)], dtype=np.int64)


@dataclass(frozen=True)
class OverlapProfile:
    """Hamming distances between a word and its delayed copies.

    Row ``s - 1`` describes a delay of ``s``: position ``i >= s`` of the word
    is compared with position ``i - s``.  ``restricted`` counts only the
    positions where the undelayed word is 1, i.e. the slots the decoder
    inspects when its window starts ``s`` symbols before the sync word.
    """

    shifts: np.ndarray
    total: np.ndarray
    restricted: np.ndarray


def overlap_distance_profile(word: SyncWord) -> OverlapProfile:
    w = word.array
    N = len(w)
    if N < 2:
        raise ValueError("overlap profile needs N >= 2")
    shifts = np.arange(1, N)
    total = np.empty(N - 1, dtype=np.int64)
    restricted = np.empty(N - 1, dtype=np.int64)
    for s in shifts:
        cur, delayed = w[s:], w[:-s]
        diff = cur != delayed
        total[s - 1] = np.count_nonzero(diff)
        restricted[s - 1] = np.count_nonzero(diff & (cur == 1))
    return OverlapProfile(shifts, total, restricted)


def format_word(word: SyncWord) -> str:
    return "".join(map(str, word.symbols)) + "\n"


def parse_word(text: str) -> SyncWord:
    line = text.rstrip("\n")
    if not line or "\n" in line or any(c not in "01" for c in line):
        raise ValueError("word file must be a single nonempty line of '0'/'1' characters")
    return SyncWord(tuple(int(c) for c in line))


def save_word(word: SyncWord, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_word(word))


def load_word(path: str | os.PathLike) -> SyncWord:
    with open(path, encoding="ascii") as fh:
        return parse_word(fh.read())


def min_overlap_distances(word: SyncWord) -> tuple[int, int]:
    """Smallest total and restricted overlap distances over all delays."""
    if word.N < 2:
        return 0, 0
    prof = overlap_distance_profile(word)
    return int(prof.total.min()), int(prof.restricted.min())


__all__ = [
    "LfsrSpec",
    "PRIMITIVE_TAPS",
    "DEFAULT_SPECS",
    "SyncWord",
    "OverlapProfile",
    "generate_msequence",
    "construction_degree",
    "build_sync_word",
    "all_ones",
    "cyclic_shift_distance",
    "overlap_distance_profile",
    "min_overlap_distances",
    "format_word",
    "parse_word",
    "save_word",
    "load_word",
]
