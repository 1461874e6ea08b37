"""curveflat: epidemic-curve change rates, network-informed spline knots,
regression-spline fitting, forecasting, and logistic flattening fits."""

from .exceptions import (
    CalibrationError,
    CurveflatError,
    FitError,
    ParseError,
    RankDeficiencyError,
)
from .forecasting import (
    ForecastMode,
    ForecastRow,
    ForecastStep,
    ForecastTable,
    GeometricParams,
    UpperBoundEstimate,
    calibrate_to_table,
    forecast_geometric,
    forecast_recursive,
    upper_bound,
)
from .logistic import LogisticGrowthCurve, linear_predictor, sigmoid
from .network import (
    BUILTIN_GREEK_KNOTS,
    BUILTIN_GREEK_PARTITION,
    CommunityPartition,
    KnotPartition,
    KnotSource,
    VisibilityGraph,
    detect_communities,
    knots_from_partition,
    modularity,
    visibility_graph,
)
from .rates import (
    ChangeRateSeries,
    MeanRate,
    RateBasis,
    change_rates,
    mean_change_rate,
)
from .series import (
    DailyRecord,
    ObservationSeries,
    ValidationReport,
    parse_csv,
    to_cumulative,
    to_incremental,
    validate,
)
from .splines import (
    BiasVarianceReport,
    SplineBasis,
    SplineRegression,
    TruthSpec,
    bias_variance_mc,
    build_basis,
)
from .svgplot import PlotSeries, PlotStyle, emit_plot

__version__ = "0.1.0"

__all__ = [
    "BiasVarianceReport",
    "BUILTIN_GREEK_KNOTS",
    "BUILTIN_GREEK_PARTITION",
    "CalibrationError",
    "ChangeRateSeries",
    "CommunityPartition",
    "CurveflatError",
    "DailyRecord",
    "FitError",
    "ForecastMode",
    "ForecastRow",
    "ForecastStep",
    "ForecastTable",
    "GeometricParams",
    "KnotPartition",
    "KnotSource",
    "LogisticGrowthCurve",
    "MeanRate",
    "ObservationSeries",
    "ParseError",
    "PlotSeries",
    "PlotStyle",
    "RankDeficiencyError",
    "RateBasis",
    "SplineBasis",
    "SplineRegression",
    "TruthSpec",
    "UpperBoundEstimate",
    "ValidationReport",
    "VisibilityGraph",
    "bias_variance_mc",
    "build_basis",
    "calibrate_to_table",
    "change_rates",
    "detect_communities",
    "emit_plot",
    "forecast_geometric",
    "forecast_recursive",
    "knots_from_partition",
    "mean_change_rate",
    "modularity",
    "parse_csv",
    "sigmoid",
    "to_cumulative",
    "to_incremental",
    "upper_bound",
    "validate",
    "visibility_graph",
    "linear_predictor",
]
