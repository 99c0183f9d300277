from .oracles import MAX_ORACLE_LENGTH, analytic_bounds, exact_event_probs, exact_false_alarm_cdf, exact_run_rule_probs
from .sweep import REGIMES, SweepPoint, SweepPointError, required_A, sweep
from .trials import (
    OUTCOME_ORDER,
    BatchEstimate,
    Outcome,
    TrialConfig,
    TrialOutcome,
    classify,
    first_false_alarm_accelerated,
    run_batch,
    run_trial,
    run_trial_accelerated,
    run_trials,
    trial_rng,
    wilson_interval,
)

__all__ = [
    "MAX_ORACLE_LENGTH",
    "OUTCOME_ORDER",
    "REGIMES",
    "BatchEstimate",
    "Outcome",
    "SweepPoint",
    "SweepPointError",
    "TrialConfig",
    "TrialOutcome",
    "analytic_bounds",
    "classify",
    "exact_event_probs",
    "exact_false_alarm_cdf",
    "exact_run_rule_probs",
    "first_false_alarm_accelerated",
    "required_A",
    "run_batch",
    "run_trial",
    "run_trial_accelerated",
    "run_trials",
    "sweep",
    "trial_rng",
    "wilson_interval",
]
