"""Flat ``key = value`` experiment configs.

One assignment per line; ``#`` starts a comment; blank lines are ignored.
Lists are comma separated and ``joint_scaling`` grid entries are ``N:P``
pairs.  Example::

    regime = fixed_length
    N = 4
    sigma2 = 1
    a = 0.5
    grid = 4, 6, 8
    r = 0.5
    trials = 2000
    master_seed = 7
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .errors import ConfigurationError
from .montecarlo.sweep import REGIMES

REFERENCES = ("channel", "limit")
WORD_FORMS = ("ones", "construction")
ACCELERATE = ("auto", "always", "never")
MAX_SEED = 1 << 64


class ConfigError(ConfigurationError):
    """Invalid config text; ``line`` is 1-based, or ``None`` for whole-file problems."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class RunConfig:
    regime: str
    grid: tuple
    N: int | None = None
    # binary channel form
    eps_f: float | None = None
    eps_m: float | None = None
    # quantized AWGN form
    P: float | None = None
    sigma2: float | None = None
    a: float | None = None
    word: str = "ones"
    K: int | None = None
    mu: float | str = 0.1
    reference: str = "channel"
    r: float = 0.5
    trials: int = 1000
    master_seed: int = 0
    workers: int = 1
    accelerate: str = "auto"
    A: int | None = None
    out: str | None = None

    @property
    def is_awgn(self) -> bool:
        return self.eps_f is None

    def render(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if f.name == "grid":
                if self.regime == "joint_scaling":
                    v = ", ".join(f"{n}:{_fmt(p)}" for n, p in v)
                else:
                    v = ", ".join(_fmt(x) for x in v)
            else:
                v = _fmt(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


_INT_KEYS = {"N", "K", "trials", "master_seed", "workers", "A"}
_FLOAT_KEYS = {"eps_f", "eps_m", "P", "sigma2", "a", "r"}
_STR_KEYS = {"regime", "word", "reference", "accelerate", "out"}
_KNOWN = {f.name for f in fields(RunConfig)}


def _int(text: str, key: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: malformed integer {text!r}", line) from None


def _float(text: str, key: str, line: int) -> float:
    try:
        x = float(text)
    except ValueError:
        raise ConfigError(f"{key}: malformed number {text!r}", line) from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: value must be finite, got {text!r}", line)
    return x


def _grid(text: str, regime: str | None, line: int) -> tuple:
    items = [s.strip() for s in text.split(",")]
    if not items or any(not s for s in items):
        raise ConfigError("grid: empty entry", line)
    if regime == "joint_scaling":
        out = []
        for s in items:
            n, sep, p = s.partition(":")
            if not sep:
                raise ConfigError(f"grid: joint_scaling entries are N:P pairs, got {s!r}", line)
            out.append((_int(n.strip(), "grid", line), _float(p.strip(), "grid", line)))
        return tuple(out)
    if regime == "fixed_power":
        return tuple(_int(s, "grid", line) for s in items)
    return tuple(_float(s, "grid", line) for s in items)


def parse_config(text: str) -> RunConfig:
    """Parse and validate config text; errors carry the offending line number."""
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {body!r}", lineno)
        if key not in _KNOWN:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r} (lines {raw[key][1]} and {lineno})", lineno)
        if not value:
            raise ConfigError(f"{key}: missing value", lineno)
        raw[key] = (value, lineno)

    for req in ("regime", "grid"):
        if req not in raw:
            raise ConfigError(f"missing required key {req!r}")
    regime, rline = raw["regime"]
    if regime not in REGIMES:
        raise ConfigError(f"regime must be one of {', '.join(REGIMES)}, got {regime!r}", rline)

    vals: dict = {}
    for key, (value, lineno) in raw.items():
        if key == "grid":
            vals[key] = _grid(value, regime, lineno)
        elif key == "mu":
            vals[key] = value if value == "1/N" else _float(value, key, lineno)
        elif key in _INT_KEYS:
            vals[key] = _int(value, key, lineno)
        elif key in _FLOAT_KEYS:
            vals[key] = _float(value, key, lineno)
        else:
            vals[key] = value

    def line_of(key):
        return raw[key][1] if key in raw else None

    def check(ok, key, msg):
        if not ok:
            raise ConfigError(f"{key}: {msg}", line_of(key))

    # ranges
    for key in ("eps_f", "eps_m"):
        if key in vals:
            check(0.0 <= vals[key] <= 1.0, key, f"must lie in [0, 1], got {vals[key]}")
    if "a" in vals:
        check(0.0 < vals["a"] < 1.0, "a", f"must lie in (0, 1), got {vals['a']}")
    for key in ("P", "sigma2"):
        if key in vals:
            check(vals[key] > 0, key, f"must be positive, got {vals[key]}")
    for key in ("N", "K", "trials", "workers", "A"):
        if key in vals:
            check(vals[key] >= 1, key, f"must be >= 1, got {vals[key]}")
    if "r" in vals:
        check(vals["r"] > 0, "r", f"must be positive, got {vals['r']}")
    if "master_seed" in vals:
        check(0 <= vals["master_seed"] < MAX_SEED, "master_seed", "must lie in [0, 2**64)")
    if isinstance(vals.get("mu"), float):
        check(0 < vals["mu"] <= 1, "mu", f"must lie in (0, 1] or be 1/N, got {vals['mu']}")
    for key, allowed in (("reference", REFERENCES), ("word", WORD_FORMS), ("accelerate", ACCELERATE)):
        if key in vals:
            check(vals[key] in allowed, key, f"must be one of {', '.join(allowed)}, got {vals[key]!r}")
    if regime == "fixed_length":
        check(all(p > 0 for p in vals["grid"]), "grid", "powers must be positive")
    elif regime == "fixed_power":
        check(all(n >= 1 for n in vals["grid"]), "grid", "lengths must be >= 1")
    else:
        check(all(n >= 1 and p > 0 for n, p in vals["grid"]), "grid", "need N >= 1 and P > 0")

    # channel form: exactly one of {eps_f, eps_m} and {P, sigma2, a}
    binary = [k for k in ("eps_f", "eps_m") if k in vals]
    awgn = [k for k in ("P", "sigma2", "a") if k in vals]
    if binary and awgn:
        raise ConfigError(f"give either eps_f/eps_m or P/sigma2/a, not both ({awgn[0]} set)", line_of(awgn[0]))
    if binary and len(binary) != 2:
        raise ConfigError("binary channel needs both eps_f and eps_m", line_of(binary[0]))
    if not binary:
        vals.setdefault("sigma2", 1.0)
        vals.setdefault("a", 0.5)
        if regime != "fixed_power":
            check("P" not in vals, "P", f"P is swept by the grid in regime {regime}")
        elif "P" not in vals:
            raise ConfigError("fixed_power with an AWGN channel needs P")
    elif regime != "fixed_power":
        raise ConfigError(f"regime {regime} sweeps the power and needs an AWGN channel", line_of("eps_f"))

    # word form
    form = vals.get("word", "ones")
    if form == "construction" and "K" not in vals:
        raise ConfigError("word = construction needs K", line_of("word"))
    if form == "ones" and "K" in vals:
        raise ConfigError("K only applies to word = construction", line_of("K"))

    if regime == "fixed_length" and "N" not in vals:
        raise ConfigError("missing required key 'N' for fixed_length")
    if regime != "fixed_length" and "N" in vals:
        raise ConfigError(f"N is swept by the grid in regime {regime}", line_of("N"))
    return RunConfig(**vals)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
