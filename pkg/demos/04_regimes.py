"""Error probability across the three growth regimes.

Each point sets A = round(exp(r N alpha)).  Below the threshold (r < 1) the
decoder should cope; above it, false alarms take over.
"""

# %%
from framesync import sweep


def show(points):
    print(f"{'N':>3} {'P':>7} {'A':>9} {'E1':>7} {'E2':>7} {'E3':>7} {'error':>7}  95% CI")
    for pt in points:
        e = pt.estimate
        P = "" if pt.P is None else f"{pt.P:.2f}"
        print(
            f"{pt.N:3d} {P:>7} {pt.A:9d} {e.p_e1:7.4f} {e.p_e2:7.4f} {e.p_e3:7.4f} {e.p_error:7.4f}"
            f"  [{e.ci_low:.4f}, {e.ci_high:.4f}]"
        )


# %% [markdown]
# Margin: the same binary channel and word length, with A below and above
# exp(N alpha).

# %%
for r in (0.5, 1.0, 1.5):
    print(f"r = {r}")
    show(sweep("fixed_power", [2, 4, 6], eps_f=0.1, eps_m=0.1, mu="1/N", reference="limit", r=r, trials=4000))

# %% [markdown]
# Fixed N, growing power.  With the threshold at half the amplitude the
# false-alarm term A eps_f^N grows with P when r > a^2, so the error does not
# vanish here; raising a trades false alarms for misses.

# %%
show(sweep("fixed_length", [4, 8, 12], N=4, a=0.5, mu="1/N", reference="limit", r=0.5, trials=4000))
show(sweep("fixed_length", [4, 8, 12], N=4, a=0.8, mu="1/N", reference="limit", r=0.5, trials=4000))

# %% [markdown]
# Joint scaling: N and P grow together.

# %%
show(sweep("joint_scaling", [(2, 4.0), (4, 6.0), (8, 8.0)], mu="1/N", reference="limit", r=0.5, trials=4000))
