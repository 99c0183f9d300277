"""Building sync words from m-sequences.

For length N and constant K the construction picks the register degree M
with 2^(M-1) - 1 < N/K <= 2^M - 1, writes the complemented m-sequence first
and pads with x(1).
"""

# %%
from framesync.syncword import (
    DEFAULT_SPECS,
    build_sync_word,
    cyclic_shift_distance,
    generate_msequence,
    overlap_distance_profile,
)

# %%
seq = generate_msequence(DEFAULT_SPECS[4])
print("degree-4 m-sequence:", "".join(map(str, seq)))
print("distances to its rotations:", set(cyclic_shift_distance(seq).tolist()))

# %% [markdown]
# Every rotation of an m-sequence of degree M differs from it in exactly
# 2^(M-1) places.  That is what keeps shifted copies of the word apart.

# %%
for N, K in ((14, 2), (40, 3), (200, 4)):
    w = build_sync_word(N, K)
    print(f"N={N:4d} K={K}: M={w.degree}, x(1) slots={w.n_ones}, word={''.join(map(str, w.symbols))[:48]}")

# %% [markdown]
# The overlap profile compares the word with itself delayed by s.  The
# restricted count only looks at slots where the word carries x(1), which are
# the only slots the decoder reads.

# %%
prof = overlap_distance_profile(build_sync_word(14, 2))
for s, tot, res in zip(prof.shifts, prof.total, prof.restricted):
    print(f"delay {s:2d}: total {tot:2d}, on x(1) slots {res:2d}")
