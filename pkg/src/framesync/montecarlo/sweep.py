"""Regime sweeps relating the uncertainty window ``A`` to ``N`` and the channel.

Each grid point sets ``A = round(exp(r * N * alpha))`` for a margin ``r``:
``r < 1`` sits below the threshold ``exp(N alpha) > A`` and ``r > 1`` above it.

``fixed_power``
    One channel (binary or quantized AWGN at fixed ``P``); the grid lists ``N``.
``joint_scaling``
    The grid lists ``(N, P)`` pairs; ``alpha`` is the threshold of the
    quantized AWGN channel at each ``P``.
``fixed_length``
    ``N`` fixed; the grid lists ``P`` and ``alpha = P / (2 sigma^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from ..awgn import AwgnParams, BinaryDmc, awgn_alpha_limit, binary_alpha, quantize_awgn
from ..decoder import DEFAULT_MU, channel_decoder
from ..errors import ConfigurationError, HorizonRangeError, UnsupportedConfigurationError
from ..syncword import all_ones, build_sync_word
from .trials import BatchEstimate, TrialConfig, run_batch

MAX_A = 1 << 62
REGIMES = ("fixed_power", "joint_scaling", "fixed_length")
#: symbol-exact streams longer than this switch to accelerated trials under "auto"
AUTO_ACCELERATE_LENGTH = 1 << 14


def required_A(N: int, alpha: float, r: float) -> int:
    """``round(exp(r * N * alpha))``, at least 1, at most ``2**62``."""
    if not math.isfinite(alpha) or alpha < 0:
        raise ValueError(f"alpha must be finite and nonnegative, got {alpha}")
    if not 0 < r <= 2:
        raise ValueError(f"margin r must lie in (0, 2], got {r}")
    x = r * N * alpha
    if x > math.log(MAX_A):
        raise HorizonRangeError(f"A = exp({x:.6g}) exceeds 2**62 (N={N}, alpha={alpha:.6g}, r={r})")
    A = round(math.exp(x))
    if A > MAX_A:
        raise HorizonRangeError(f"A = {A} exceeds 2**62 (N={N}, alpha={alpha:.6g}, r={r})")
    return max(1, A)


@dataclass(frozen=True)
class SweepPoint:
    regime: str
    A: int
    N: int
    P: float | None
    sigma2: float | None
    a: float | None
    K: int | None
    mu: float
    r: float
    alpha: float
    master_seed: int
    accelerated: bool
    estimate: BatchEstimate

    @property
    def trials(self) -> int:
        return self.estimate.trials


class SweepPointError(RuntimeError):
    """A grid point could not be evaluated; ``point`` names it."""

    def __init__(self, point: dict, cause: Exception):
        self.point = point
        self.cause = cause
        desc = ", ".join(f"{k}={v}" for k, v in point.items())
        super().__init__(f"grid point ({desc}): {cause}")


def _channel(eps_f, eps_m, power, sigma2, a):
    if power is not None:
        dmc = quantize_awgn(AwgnParams(power, sigma2, a))
    else:
        dmc = BinaryDmc(eps_f, eps_m)
    return dmc, dmc.as_transition_matrix()


def sweep(
    regime: str,
    grid: Sequence,
    *,
    N: int | None = None,
    eps_f: float | None = None,
    eps_m: float | None = None,
    power: float | None = None,
    sigma2: float = 1.0,
    a: float = 0.5,
    K: int | None = None,
    mu: float | str = DEFAULT_MU,
    reference: str = "channel",
    r: float = 0.5,
    trials: int = 1000,
    master_seed: int = 0,
    workers: int = 1,
    accelerate: str = "auto",
    on_point: Callable[[SweepPoint], None] | None = None,
) -> list[SweepPoint]:
    """Run one Monte Carlo batch per grid point.

    ``mu="1/N"`` gives the finite-length rule (exact tolerance ``1/N`` per
    point).  ``accelerate`` is ``"auto"``, ``"always"`` or ``"never"``.
    ``on_point`` is called after each finished point, which lets callers
    persist partial results before a later point fails.
    """
    if regime not in REGIMES:
        raise ConfigurationError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    if not grid:
        raise ConfigurationError("sweep grid is empty")
    awgn = eps_f is None
    if awgn != (eps_m is None):
        raise ConfigurationError("give both eps_f and eps_m, or neither")
    if regime != "fixed_power" and not awgn:
        raise ConfigurationError(f"regime {regime} sweeps the power and needs an AWGN channel")
    if regime == "fixed_length" and N is None:
        raise ConfigurationError("fixed_length needs N")
    if regime == "fixed_power" and awgn and power is None:
        raise ConfigurationError("fixed_power with an AWGN channel needs P")

    points = []
    for item in grid:
        if regime == "fixed_power":
            n, P = int(item), power
            desc = {"N": n}
        elif regime == "joint_scaling":
            n, P = int(item[0]), float(item[1])
            desc = {"N": n, "P": P}
        else:
            n, P = int(N), float(item)
            desc = {"P": P}
        try:
            dmc, Q = _channel(eps_f, eps_m, P, sigma2, a)
            alpha = awgn_alpha_limit(P, sigma2) if regime == "fixed_length" else binary_alpha(dmc)
            A = required_A(n, alpha, r)
            word = build_sync_word(n, K) if K is not None else all_ones(n)
            mu_n = Fraction(1, n) if mu == "1/N" else mu
            dec = channel_decoder(Q, word, A, mu=mu_n, reference=reference)
            eligible = word.is_all_ones and dec.run_rule
            if accelerate == "always" and not eligible:
                raise UnsupportedConfigurationError("accelerated trials need an all-ones word and the all-y(1) rule")
            use_acc = accelerate == "always" or (
                accelerate == "auto" and eligible and A + n - 1 > AUTO_ACCELERATE_LENGTH
            )
            cfg = TrialConfig(A, Q, word, dec, master_seed, accelerated=use_acc)
            est = run_batch(cfg, trials, workers)
        except Exception as exc:
            raise SweepPointError(desc, exc) from exc
        pt = SweepPoint(
            regime=regime,
            A=A,
            N=n,
            P=P if awgn else None,
            sigma2=sigma2 if awgn else None,
            a=a if awgn else None,
            K=K,
            mu=float(mu_n),
            r=r,
            alpha=alpha,
            master_seed=master_seed,
            accelerated=use_acc,
            estimate=est,
        )
        points.append(pt)
        if on_point is not None:
            on_point(pt)
    return points
