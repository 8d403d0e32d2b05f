"""Adaptive-lasso activation-knot unit root tests with wild bootstrap inference."""

from .adf import (
    AdfFit,
    LagSelection,
    VarianceProfile,
    fit_adf,
    kernel_volatility,
    residuals_for_bootstrap,
    select_lag,
    variance_profile,
)
from .bootstrap import (
    BootstrapConfig,
    BootstrapResult,
    bootstrap_sample,
    draw_multipliers,
    recolour,
    run_bootstrap_test,
)
from .exceptions import (
    BootstrapFailureError,
    ConfigError,
    DegenerateWeightError,
    EnrichmentUnavailableError,
    InsufficientSampleError,
    LassorootError,
    LevelNeverActivatesError,
    RankDeficientError,
    SeriesError,
)
from .knot_tests import (
    LagRule,
    LimitSimConfig,
    LimitTable,
    TestConfig,
    TestResult,
    asymptotic_decision,
    auto_k_max,
    ensure_table,
    simulate_limit_null,
    tau_breve_statistic,
    tau_statistic,
)
from .lars import (
    KnotEvent,
    PenaltyWeights,
    SolutionPath,
    first_level_knot,
    weighted_lars,
)
from .prng import SeedStream
from .series import Detrend, DetrendedSeries, Series, detrend_fd, diff
from .simlab import (
    DgpSpec,
    McDesign,
    McReport,
    TestSpec,
    VolatilitySpec,
    generate,
    parse_design,
    run_mc,
    volatility_path,
)

__version__ = "0.1.0"
