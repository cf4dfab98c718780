"""Health index aggregation for electrical substation fleets.

Asset condition arrives as an integer health index from 0 (no valid data)
to 10 (as new). This package rolls those scores up to bay and substation
level under four strategies: population-weighted averaging with a worst-case
cap, criticality-weighted FMECA scoring, a replacement-cost power mean, and
a worst-critical-asset failure interpretation. It also audits data quality,
compares methods side by side, diagnoses small-bay bias, renders charts,
and generates reproducible synthetic fleets for experiments.
"""

__version__ = "0.1.0"

from .aggregation import (
    BayScore,
    SubstationScore,
    aggregate_bay,
    aggregate_substation,
    agg_failure_interpretation,
    agg_fmeca,
    agg_replacement_cost,
    agg_weighted_average,
)
from .analysis import (
    ComparisonReport,
    bias_diagnostics,
    compare_methods,
    emit_report,
    report_document,
    spearman,
)
from .charts import render_chart
from .errors import (
    CatalogError,
    DuplicateAssetId,
    FleetFormatError,
    HiAggError,
    HiOutOfRange,
    InfeasibleSpec,
    MalformedRow,
    MissingBuildYear,
    MissingCost,
    MissingHeader,
    NonPositiveCost,
    UnknownAssetType,
    UnwritableOutput,
)
from .ingest import (
    QualityAudit,
    audit_fleet,
    parse_catalogs,
    parse_fleet,
    serialize_fleet,
)
from .model import (
    Asset,
    Bay,
    ColorBand,
    Method,
    Normalization,
    SeverityCatalog,
    StrategyConfig,
    Substation,
    WeightCatalog,
    band_of,
    band_of_rounded,
    default_severity_catalog,
    default_weight_catalog,
    severity_of,
)
from .synthgen import FleetSpec, SizeDistribution, corrupt_fleet, generate_fleet

__all__ = [
    "__version__",
    "Asset", "Bay", "Substation", "ColorBand", "Method", "Normalization",
    "SeverityCatalog", "WeightCatalog", "StrategyConfig",
    "band_of", "band_of_rounded", "severity_of",
    "default_severity_catalog", "default_weight_catalog",
    "BayScore", "SubstationScore", "aggregate_bay", "aggregate_substation",
    "agg_weighted_average", "agg_fmeca", "agg_replacement_cost",
    "agg_failure_interpretation",
    "ComparisonReport", "compare_methods", "bias_diagnostics",
    "emit_report", "report_document", "spearman",
    "render_chart",
    "parse_fleet", "serialize_fleet", "parse_catalogs",
    "audit_fleet", "QualityAudit",
    "FleetSpec", "SizeDistribution", "generate_fleet", "corrupt_fleet",
    "HiAggError", "FleetFormatError", "MissingHeader", "MalformedRow",
    "HiOutOfRange", "DuplicateAssetId", "UnknownAssetType",
    "MissingBuildYear", "MissingCost", "NonPositiveCost", "CatalogError",
    "InfeasibleSpec", "UnwritableOutput",
]
