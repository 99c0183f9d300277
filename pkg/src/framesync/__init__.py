"""Frame synchronization over discrete memoryless channels.

Threshold computation, quantized AWGN channels, m-sequence sync words, a
sequential typicality decoder and a reproducible Monte Carlo harness.
"""

from .awgn import (
    EXACT,
    PAPER_APPROX,
    AwgnParams,
    BinaryDmc,
    awgn_alpha_limit,
    binary_alpha,
    binary_channel,
    gaussian_tail,
    log_gaussian_tail,
    quantize_awgn,
)
from .channel import (
    ThresholdReport,
    TransitionMatrix,
    kl_divergence,
    prob_vector,
    sample_output,
    sync_threshold,
)
from .decoder import (
    DEFAULT_MU,
    TypicalityDecoder,
    WindowType,
    channel_decoder,
    empirical_at,
    finite_n_decoder,
    first_typical_batch,
    is_typical,
    run_sequential,
    run_sequential_naive,
)
from .errors import *  # noqa: F403
from .montecarlo import (
    BatchEstimate,
    Outcome,
    SweepPoint,
    TrialConfig,
    analytic_bounds,
    exact_event_probs,
    exact_false_alarm_cdf,
    exact_run_rule_probs,
    first_false_alarm_accelerated,
    required_A,
    run_batch,
    run_trial,
    run_trial_accelerated,
    sweep,
    wilson_interval,
)
from .syncword import (
    LfsrSpec,
    OverlapProfile,
    SyncWord,
    all_ones,
    build_sync_word,
    cyclic_shift_distance,
    generate_msequence,
    load_word,
    min_overlap_distances,
    overlap_distance_profile,
    save_word,
)

__version__ = "0.1.0"
