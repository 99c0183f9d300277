"""One transmission, end to end.

The sync word lands at an unknown offset v in 1..A.  Outside the word the
transmitter is idle.  The decoder slides a window of length N and stops at
the first window whose type over the x(1) slots is close to the reference.
"""

# %%
import numpy as np

from framesync import TrialConfig, binary_channel, finite_n_decoder, run_sequential, run_trial
from framesync.montecarlo import exact_event_probs, run_batch
from framesync.syncword import all_ones

A, N = 12, 3
Q = binary_channel(0.15, 0.1)
cfg = TrialConfig(A, Q, all_ones(N), finite_n_decoder(N, 2, A), master_seed=2)

# %% [markdown]
# With the reference (0, 1) and tolerance 1/N the decoder needs N
# consecutive 1 outputs.  Here is a stream drawn by hand.

# %%
rng = np.random.default_rng(0)
v = 7
x = np.zeros(A + N - 1, dtype=int)
x[v - 1 : v - 1 + N] = 1
y = [int(rng.random() < Q.row(xi)[1]) for xi in x]
print("x:", "".join(map(str, x)))
print("y:", "".join(map(str, y)))
print("v =", v, " v_hat =", run_sequential(y, cfg.decoder))

# %% [markdown]
# The harness draws trials from a keyed generator, so trial 5 is always the
# same trial regardless of how many others run or in which process.

# %%
for i in range(5):
    print(run_trial(cfg, i))

# %% [markdown]
# Small instances can be solved exactly by enumerating output strings.

# %%
exact = exact_event_probs(cfg)
est = run_batch(cfg, 200_000)
for o, p in exact.items():
    print(f"{o.value:8s} exact {p:.5f}  simulated {est.probabilities()[o]:.5f}")
