"""Order-flow imbalance toolkit.

Builds classic and generalized order-flow imbalance series from
limit-order-book snapshots, fits no-intercept price-impact regressions
in and out of sample, and ships a depth-capped queueing simulator whose
impact slope is known in closed form for validation.
"""

__version__ = "0.1.0"

from .book import (
    BookLevel,
    BookValidationError,
    CN_SEGMENTS,
    EmptySideError,
    LobError,
    SessionSpec,
    Snapshot,
    is_valid_snapshot,
    mid_price,
    mid_price_change,
    price_from_ticks,
    ticks_from_price,
    validate_snapshot,
)
from .indicators import (
    ALL_KINDS,
    IndicatorError,
    IndicatorKind,
    IndicatorSeries,
    READING_LEVELWISE,
    READING_SYMMETRIC,
    SeriesPoint,
    classic_side_term,
    compute_series,
    generalized_side_term,
    interval_indicator,
    level_span,
    mirror_snapshot,
    observation_term,
    value_of,
)
from .ingestion import (
    DayDecision,
    DayFilterReport,
    IngestionError,
    SessionDay,
    exclude_limit_days,
    load_config,
    load_exclusion_list,
    parse_snapshots,
    parse_snapshots_text,
    render_snapshots_text,
    session_spec_from_config,
    split_in_out,
    write_snapshots,
)
from .regression import (
    OOS_FIXED_BETA,
    OOS_REFIT,
    R2_CENTERED,
    R2_UNCENTERED,
    RegressionError,
    RegressionResult,
    evaluate_indicator,
    fit_no_intercept,
    r_squared,
)
from .simulator import (
    BookState,
    GapRecord,
    SimConfig,
    SimResult,
    SimulationError,
    default_config,
    high_rate_config,
    init_book,
    predicted_move,
    run,
    step,
    theoretical_slope,
)
