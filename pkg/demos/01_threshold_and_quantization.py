"""How much asynchronism can a channel tolerate?

The synchronization threshold alpha(Q) is the largest divergence between an
input's output law and the idle output law.  A window of A = exp(N alpha)
candidate start times is the most a length-N sync word can cope with.
"""

# %%
import numpy as np

from framesync import AwgnParams, TransitionMatrix, binary_alpha, binary_channel, quantize_awgn, sync_threshold

# %% [markdown]
# A binary symmetric channel with crossover 0.1.  Input 0 is idle; input 1
# is the only candidate for x(1).

# %%
rep = sync_threshold(binary_channel(0.1, 0.1))
print(f"BSC(0.1): alpha = {rep.alpha:.6f} nats, x(1) = {rep.best_symbol}")
print("per-input divergences:", np.round(rep.per_symbol_divergence, 6))

# %% [markdown]
# With three inputs the threshold picks the input whose output law is most
# distinguishable from idle, and ties go to the lowest index.

# %%
Q = TransitionMatrix([[0.9, 0.05, 0.05], [0.3, 0.6, 0.1], [0.05, 0.15, 0.8]])
rep = sync_threshold(Q)
print(f"ternary: alpha = {rep.alpha:.4f}, x(1) = {rep.best_symbol}")

# %% [markdown]
# Quantizing an AWGN channel at a fraction a of the amplitude.  The ratio to
# a^2 P / (2 sigma^2) approaches one slowly, and for large P the false-alarm
# probability underflows while its logarithm does not.

# %%
print(f"{'P':>8} {'eps_f':>12} {'log eps_f':>12} {'alpha':>12} {'ratio':>8}")
for P in (10.0, 100.0, 1e3, 1e4):
    d = quantize_awgn(AwgnParams(P, 1.0, 0.9))
    a = binary_alpha(d)
    print(f"{P:8.0f} {d.eps_f:12.4g} {d.log_eps_f:12.4g} {a:12.6g} {a / (0.81 * P / 2):8.4f}")

# %% [markdown]
# The exponent-only approximation exp(-a^2 P / 2 sigma^2) ignores the
# polynomial prefactor of the Gaussian tail, so at moderate P it is far off.

# %%
for P in (4.0, 16.0, 64.0):
    ex = quantize_awgn(AwgnParams(P), "exact")
    ap = quantize_awgn(AwgnParams(P), "paper_approx")
    print(f"P={P:5.0f}: exact eps_f={ex.eps_f:.4g}, approx eps_f={ap.eps_f:.4g}")
