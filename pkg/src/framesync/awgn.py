"""Binary-input, binary-output quantization of the AWGN channel.

Inputs are ``x(0) = 0`` and ``x(1) = sqrt(P)``; the receiver thresholds
``x + w`` at ``tau = a * sqrt(P)``.  The resulting binary DMC has false-alarm
probability ``eps_f = P(w > tau)`` and miss probability
``eps_m = P(w < tau - sqrt(P)) = P(w > (1 - a) sqrt(P))``.

For large ``P`` the false-alarm probability underflows double precision long
before the threshold ``alpha`` does, so :class:`BinaryDmc` carries both
probabilities in the log domain as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from .channel import TransitionMatrix
from .errors import DegenerateChannelError

EXACT = "exact"
PAPER_APPROX = "paper_approx"


@dataclass(frozen=True)
class AwgnParams:
    """Symbol power ``P``, noise variance ``sigma^2`` and threshold fraction ``a``."""

    power: float
    noise_var: float = 1.0
    threshold_frac: float = 0.5

    def __post_init__(self):
        if not self.power > 0 or not math.isfinite(self.power):
            raise ValueError(f"power must be positive and finite, got {self.power}")
        if not self.noise_var > 0 or not math.isfinite(self.noise_var):
            raise ValueError(f"noise_var must be positive and finite, got {self.noise_var}")
        if not 0 < self.threshold_frac < 1:
            raise ValueError(f"threshold fraction a must lie in (0, 1), got {self.threshold_frac}")

    @property
    def tau(self) -> float:
        return self.threshold_frac * math.sqrt(self.power)


@dataclass(frozen=True)
class BinaryDmc:
    """Binary DMC with rows ``x(0) -> (1-eps_f, eps_f)``, ``x(1) -> (eps_m, 1-eps_m)``.

    ``eps_f`` may underflow to 0.0 for very large SNR; ``log_eps_f`` stays
    exact in that case.  Use :meth:`from_logs` to build such channels.
    """

    eps_f: float
    eps_m: float
    log_eps_f: float = math.nan
    log_eps_m: float = math.nan

    def __post_init__(self):
        for name in ("f", "m"):
            eps = getattr(self, f"eps_{name}")
            log_eps = getattr(self, f"log_eps_{name}")
            if math.isnan(log_eps):
                if not 0 < eps < 1:
                    raise DegenerateChannelError(f"eps_{name} must lie in (0, 1), got {eps!r}")
                object.__setattr__(self, f"log_eps_{name}", math.log(eps))
            else:
                if not (log_eps < 0 and math.isfinite(log_eps)):
                    raise DegenerateChannelError(f"log eps_{name} must be finite and negative, got {log_eps!r}")
                if not eps < 1:
                    raise DegenerateChannelError(f"eps_{name} rounds to 1")

    @classmethod
    def from_logs(cls, log_eps_f: float, log_eps_m: float) -> BinaryDmc:
        return cls(math.exp(log_eps_f), math.exp(log_eps_m), log_eps_f, log_eps_m)

    @property
    def representable(self) -> bool:
        """True when both probabilities are nonzero in floating point."""
        return self.eps_f > 0 and self.eps_m > 0

    def as_transition_matrix(self) -> TransitionMatrix:
        if not self.representable:
            raise DegenerateChannelError(
                f"eps_f={self.eps_f!r}, eps_m={self.eps_m!r}: a transition probability underflows to 0; "
                "choose a smaller power"
            )
        return TransitionMatrix([[1 - self.eps_f, self.eps_f], [self.eps_m, 1 - self.eps_m]], idle_symbol=0)


def gaussian_tail(x: float) -> float:
    """``P(Z > x)`` for a standard normal ``Z``, via ``erfc``."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def log_gaussian_tail(x: float) -> float:
    """Natural log of :func:`gaussian_tail`, accurate far into the tail."""
    return float(log_ndtr(-x))


def _exact_log_tail(x: float) -> tuple[float, float]:
    p = gaussian_tail(x)
    if p > 0:
        return p, math.log(p)
    return 0.0, log_gaussian_tail(x)


def quantize_awgn(params: AwgnParams, mode: str = EXACT) -> BinaryDmc:
    """Binary DMC induced by thresholding the AWGN output at ``a * sqrt(P)``.

    ``mode="exact"`` uses Gaussian tails; ``mode="paper_approx"`` uses the
    exponent-level approximations ``exp(-a^2 P / 2 sigma^2)`` and
    ``exp(-(1-a)^2 P / 2 sigma^2)`` and exists for side-by-side comparison only.
    """
    a, P, s2 = params.threshold_frac, params.power, params.noise_var
    if mode == EXACT:
        sigma = math.sqrt(s2)
        eps_f, log_f = _exact_log_tail(a * math.sqrt(P) / sigma)
        eps_m, log_m = _exact_log_tail((1 - a) * math.sqrt(P) / sigma)
    elif mode == PAPER_APPROX:
        log_f = -(a**2) * P / (2 * s2)
        log_m = -((1 - a) ** 2) * P / (2 * s2)
        eps_f, eps_m = math.exp(log_f), math.exp(log_m)
    else:
        raise ValueError(f"unknown quantization mode {mode!r}")
    for name, eps, lg in (("eps_f", eps_f, log_f), ("eps_m", eps_m, log_m)):
        if eps >= 1 or not math.isfinite(lg) or lg >= 0:
            raise DegenerateChannelError(f"{name} is degenerate ({eps!r}) for {params}")
    return BinaryDmc(eps_f, eps_m, log_f, log_m)


def binary_alpha(ch: BinaryDmc) -> float:
    """Synchronization threshold of a binary DMC, in nats.

    ``(1-eps_m) log((1-eps_m)/eps_f) + eps_m log(eps_m/(1-eps_f))``, evaluated
    with the stored logs so it stays finite when ``eps_f`` underflows.
    """
    log_1m_m = math.log1p(-ch.eps_m)
    log_1m_f = math.log1p(-ch.eps_f)
    return (1 - ch.eps_m) * (log_1m_m - ch.log_eps_f) + ch.eps_m * (ch.log_eps_m - log_1m_f)


def awgn_alpha_limit(power: float, noise_var: float) -> float:
    """``P / (2 sigma^2)``, the threshold of the unquantized AWGN channel."""
    if not power > 0 or not noise_var > 0:
        raise ValueError("power and noise_var must be positive")
    return power / (2.0 * noise_var)


def binary_channel(eps_f: float, eps_m: float) -> TransitionMatrix:
    """Shorthand for ``BinaryDmc(eps_f, eps_m).as_transition_matrix()``.

    Unlike :class:`BinaryDmc`, endpoints 0 and 1 are allowed here so that
    noiseless and blind channels can be simulated.
    """
    return TransitionMatrix(np.array([[1 - eps_f, eps_f], [eps_m, 1 - eps_m]]), idle_symbol=0)
