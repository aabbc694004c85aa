"""Three-parameter author metrics (N_c, h-index, I-index), derived indices and
Monte Carlo checks of equal-credit allocation."""

from .metrics import (
    DomainError,
    MetricReport,
    TimeModelParams,
    UndefinedMetricError,
    c_index,
    check_bounds,
    compute_report,
    credit_share,
    h_index,
    h_max_bound,
    hirsch_g1,
    i_index,
    i_time_model,
    nc_min_bound,
    total_citations,
)
from .ranking import (
    AuthorSummary,
    RankingKey,
    career_span,
    h_tilde,
    h_tilde_t,
    rank_by_h_tilde,
    rank_lexicographic,
    summarize,
)
from .records import (
    AuthorCorpus,
    ParseError,
    Publication,
    ValidationError,
    effective_share_divisor,
    filter_usable,
    parse_corpus,
    serialize_corpus,
)
from .stochastics import (
    NoiseSpec,
    SimulationResult,
    binomial_rms,
    brute_force_sign_rms,
    expected_delta_rms,
    sample_credit_split,
    sigma_prediction,
    simulate_i_distribution,
)

__version__ = "0.1.0"
