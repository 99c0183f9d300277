"""Command-line front end.

Subcommands::

    framesync threshold (--config PATH | --eps-f F --eps-m M | --P P [--sigma2 S] [--a A])
    framesync word --N N [--K K] [--out PATH]
    framesync sweep --config PATH [--out PATH] [--workers W] [--trials T]
    framesync oracle --config PATH [--A A]

Exit status is 0 on success, 1 for invalid input and 2 for runtime range
errors such as an uncertainty window beyond 2**62.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import replace
from fractions import Fraction

from .awgn import EXACT, PAPER_APPROX, AwgnParams, awgn_alpha_limit, binary_alpha, binary_channel, quantize_awgn
from .channel import sync_threshold
from .config import ConfigError, RunConfig, load_config
from .decoder import channel_decoder
from .errors import (
    ConfigurationError,
    DegenerateChannelError,
    FrameSyncError,
    HorizonRangeError,
    SizeError,
)
from .montecarlo import (
    MAX_ORACLE_LENGTH,
    OUTCOME_ORDER,
    SweepPoint,
    SweepPointError,
    TrialConfig,
    exact_event_probs,
    exact_run_rule_probs,
    required_A,
    sweep,
)
from .syncword import all_ones, build_sync_word, min_overlap_distances, save_word

CSV_COLUMNS = (
    "regime", "A", "N", "P", "sigma2", "a", "K", "mu", "r", "alpha", "trials",
    "p_e1", "p_e2", "p_e3", "p_error", "ci_low", "ci_high", "master_seed",
)  # fmt: skip

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class UsageError(ConfigurationError):
    pass


def _g(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".9g")
    return str(x)


def csv_row(pt: SweepPoint) -> list[str]:
    e = pt.estimate
    vals = (
        pt.regime, pt.A, pt.N, pt.P, pt.sigma2, pt.a, pt.K, pt.mu, pt.r, pt.alpha, e.trials,
        e.p_e1, e.p_e2, e.p_e3, e.p_error, e.ci_low, e.ci_high, pt.master_seed,
    )  # fmt: skip
    return [_g(float(v)) if isinstance(v, float) else _g(v) for v in vals]


# --- threshold -------------------------------------------------------------


def _fmt_divs(divs) -> str:
    return ", ".join(f"D(x={i})={d:.9g}" for i, d in enumerate(divs))


def threshold_report_binary(eps_f: float, eps_m: float) -> str:
    rep = sync_threshold(binary_channel(eps_f, eps_m))
    return (
        f"channel: binary eps_f={eps_f:.9g} eps_m={eps_m:.9g}\n"
        f"alpha = {rep.alpha:.9g} nats\n"
        f"x(1) = {rep.best_symbol}\n"
        f"divergences: {_fmt_divs(rep.per_symbol_divergence)}\n"
    )


def threshold_report_awgn(P: float, sigma2: float, a: float) -> str:
    params = AwgnParams(P, sigma2, a)
    out = io.StringIO()
    out.write(f"channel: quantized AWGN P={P:.9g} sigma2={sigma2:.9g} a={a:.9g}\n")
    for mode in (EXACT, PAPER_APPROX):
        dmc = quantize_awgn(params, mode)
        out.write(
            f"{mode}: eps_f={dmc.eps_f:.9g} eps_m={dmc.eps_m:.9g} "
            f"(log eps_f={dmc.log_eps_f:.9g}, log eps_m={dmc.log_eps_m:.9g}) "
            f"binary alpha={binary_alpha(dmc):.9g}\n"
        )
    dmc = quantize_awgn(params, EXACT)
    if dmc.representable:
        rep = sync_threshold(dmc.as_transition_matrix())
        out.write(f"alpha = {rep.alpha:.9g} nats\n")
        out.write(f"x(1) = {rep.best_symbol}\n")
        out.write(f"divergences: {_fmt_divs(rep.per_symbol_divergence)}\n")
    else:
        out.write(f"alpha = {binary_alpha(dmc):.9g} nats (log domain; eps underflows)\n")
        out.write("x(1) = 1\n")
    out.write(f"P/(2 sigma2) = {awgn_alpha_limit(P, sigma2):.9g}\n")
    return out.getvalue()


def cmd_threshold(cfg: RunConfig | None = None, *, eps_f=None, eps_m=None, P=None, sigma2=1.0, a=0.5) -> str:
    if cfg is not None:
        if not cfg.is_awgn:
            return threshold_report_binary(cfg.eps_f, cfg.eps_m)
        if cfg.regime == "fixed_power":
            powers = [cfg.P]
        elif cfg.regime == "joint_scaling":
            powers = [p for _, p in cfg.grid]
        else:
            powers = list(cfg.grid)
        return "\n".join(threshold_report_awgn(p, cfg.sigma2, cfg.a) for p in powers)
    if eps_f is not None or eps_m is not None:
        if eps_f is None or eps_m is None or P is not None:
            raise UsageError("give --eps-f and --eps-m together, without --P")
        return threshold_report_binary(eps_f, eps_m)
    if P is None:
        raise UsageError("threshold needs --config, --eps-f/--eps-m or --P")
    return threshold_report_awgn(P, sigma2, a)


# --- word ------------------------------------------------------------------


def cmd_word(N: int, K: int | None = None, out: str | None = None) -> str:
    word = all_ones(N) if K is None else build_sync_word(N, K)
    total, restricted = min_overlap_distances(word)
    M = "-" if word.degree is None else word.degree
    text = (
        f"N = {word.N}\n"
        f"K = {'-' if K is None else K}\n"
        f"M = {M}\n"
        f"N1 = {word.n_ones}\n"
        f"min overlap distance = {total}\n"
        f"min overlap distance on x(1) slots = {restricted}\n"
        f"word = {''.join(map(str, word.symbols))}\n"
    )
    if out is not None:
        save_word(word, out)
    return text


# --- sweep -----------------------------------------------------------------


def _sweep_kwargs(cfg: RunConfig) -> dict:
    kw = dict(
        N=cfg.N,
        K=cfg.K,
        mu=cfg.mu,
        reference=cfg.reference,
        r=cfg.r,
        trials=cfg.trials,
        master_seed=cfg.master_seed,
        workers=cfg.workers,
        accelerate=cfg.accelerate,
    )
    if cfg.is_awgn:
        kw.update(power=cfg.P, sigma2=cfg.sigma2, a=cfg.a)
    else:
        kw.update(eps_f=cfg.eps_f, eps_m=cfg.eps_m)
    return kw


def cmd_sweep(cfg: RunConfig, out) -> list[SweepPoint]:
    """Run the sweep and write CSV rows to the open text stream ``out``.

    The header goes out first and every finished point is flushed at once,
    so a failure at a later grid point leaves the completed rows in place.
    """
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    out.flush()

    def emit(pt):
        writer.writerow(csv_row(pt))
        out.flush()

    return sweep(cfg.regime, cfg.grid, on_point=emit, **_sweep_kwargs(cfg))


# --- oracle ----------------------------------------------------------------


def oracle_config(cfg: RunConfig) -> TrialConfig:
    """Trial config for the first grid point, with ``A`` from the config when given."""
    if cfg.regime == "fixed_power":
        N, P = cfg.grid[0], cfg.P
    elif cfg.regime == "joint_scaling":
        N, P = cfg.grid[0]
    else:
        N, P = cfg.N, cfg.grid[0]
    if cfg.is_awgn:
        dmc = quantize_awgn(AwgnParams(P, cfg.sigma2, cfg.a))
        Q = dmc.as_transition_matrix()
        alpha = awgn_alpha_limit(P, cfg.sigma2) if cfg.regime == "fixed_length" else binary_alpha(dmc)
    else:
        Q = binary_channel(cfg.eps_f, cfg.eps_m)
        alpha = sync_threshold(Q).alpha
    A = cfg.A if cfg.A is not None else required_A(N, alpha, cfg.r)
    word = all_ones(N) if cfg.K is None else build_sync_word(N, cfg.K)
    mu = Fraction(1, N) if cfg.mu == "1/N" else cfg.mu
    dec = channel_decoder(Q, word, A, mu=mu, reference=cfg.reference)
    return TrialConfig(A, Q, word, dec, cfg.master_seed)


def cmd_oracle(cfg: RunConfig) -> str:
    tc = oracle_config(cfg)
    L = tc.A + tc.N - 1
    if L <= MAX_ORACLE_LENGTH:
        probs, method = exact_event_probs(tc), "enumeration"
    elif tc.word.is_all_ones and tc.channel.output_size == 2 and tc.decoder.run_rule:
        probs, method = exact_run_rule_probs(tc), "run-length chain"
    else:
        raise SizeError(f"A + N - 1 = {L} exceeds {MAX_ORACLE_LENGTH} and the run-length chain does not apply")
    lines = [f"A = {tc.A}", f"N = {tc.N}", f"method = {method}"]
    lines += [f"P({o.value}) = {probs[o]:.9g}" for o in OUTCOME_ORDER]
    lines.append(f"P(error) = {1.0 - probs[OUTCOME_ORDER[0]]:.9g}")
    return "\n".join(lines) + "\n"


# --- entry point -----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # usage mistakes are validation errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="framesync", description="Frame synchronization experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("threshold", help="synchronization threshold of a channel")
    t.add_argument("--config")
    t.add_argument("--eps-f", type=float)
    t.add_argument("--eps-m", type=float)
    t.add_argument("--P", type=float)
    t.add_argument("--sigma2", type=float, default=1.0)
    t.add_argument("--a", type=float, default=0.5)

    w = sub.add_parser("word", help="build a sync word")
    w.add_argument("--config")
    w.add_argument("--N", type=int)
    w.add_argument("--K", type=int)
    w.add_argument("--out")

    s = sub.add_parser("sweep", help="Monte Carlo sweep to CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--workers", type=int)
    s.add_argument("--trials", type=int)

    o = sub.add_parser("oracle", help="exact outcome probabilities for a small instance")
    o.add_argument("--config", required=True)
    o.add_argument("--A", type=int)
    return p


def _run(args) -> int:
    cfg = load_config(args.config) if getattr(args, "config", None) else None

    if args.command == "threshold":
        sys.stdout.write(
            cmd_threshold(cfg, eps_f=args.eps_f, eps_m=args.eps_m, P=args.P, sigma2=args.sigma2, a=args.a)
        )
        return EXIT_OK

    if args.command == "word":
        N, K = args.N, args.K
        if cfg is not None:
            N = N if N is not None else cfg.N
            K = K if K is not None else cfg.K
        if N is None:
            raise UsageError("word needs --N")
        sys.stdout.write(cmd_word(N, K, args.out))
        return EXIT_OK

    if args.command == "oracle":
        if args.A is not None:
            if args.A < 1:
                raise UsageError("--A must be >= 1")
            cfg = replace(cfg, A=args.A)
        sys.stdout.write(cmd_oracle(cfg))
        return EXIT_OK

    # sweep
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        cfg = replace(cfg, workers=args.workers)
    if args.trials is not None:
        if args.trials < 1:
            raise UsageError("--trials must be >= 1")
        cfg = replace(cfg, trials=args.trials)
    out_path = args.out or cfg.out
    if out_path is None:
        cmd_sweep(cfg, sys.stdout)
    else:
        with open(out_path, "w", encoding="ascii", newline="") as fh:
            cmd_sweep(cfg, fh)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except SweepPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (HorizonRangeError, DegenerateChannelError, SizeError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ConfigError, FrameSyncError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
