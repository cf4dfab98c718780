"""Domain model: assets, bays, substations, catalogs, and color bands.

Health index (HI) scores are integers 0-10 on input. 0 means "invalid / no
data" (White band) and never a real condition; valid condition scores are
1-10 with 10 = best health. Aggregated scores are real-valued in [1, 10].

Catalogs are expert lookup tables keyed by canonical asset-type strings:
  - severity catalog: FMECA severity per type, possibly conditional on the
    build year (protection devices switch at 1992);
  - weight catalog: population class (primary / secondary / tertiary) plus
    a weight inside that class's range (7-10 / 4-6 / 1-3).

All types here are immutable after construction and safe to share across
concurrent workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from enum import Enum

from .errors import (
    MissingBuildYear,
    NegativeSeverity,
    UnknownAssetType,
    UnknownClass,
    WeightOutOfClassRange,
)

HI_MIN, HI_MAX = 0, 10
BUILD_YEAR_MIN, BUILD_YEAR_MAX = 1900, 2100


class ColorBand(Enum):
    GREEN = "green"
    ORANGE = "orange"
    RED = "red"
    VIOLET = "violet"
    WHITE = "white"


# Disjoint score ranges covering 0..10.
BAND_RANGES: dict[ColorBand, tuple[int, int]] = {
    ColorBand.GREEN: (9, 10),
    ColorBand.ORANGE: (7, 8),
    ColorBand.RED: (4, 6),
    ColorBand.VIOLET: (1, 3),
    ColorBand.WHITE: (0, 0),
}


class PopulationClass(Enum):
    PRIMARY = "primary"
    SECONDARY = "secondary"
    TERTIARY = "tertiary"


CLASS_WEIGHT_RANGES: dict[PopulationClass, tuple[float, float]] = {
    PopulationClass.PRIMARY: (7.0, 10.0),
    PopulationClass.SECONDARY: (4.0, 6.0),
    PopulationClass.TERTIARY: (1.0, 3.0),
}


class Method(Enum):
    WEIGHTED_AVERAGE = "weighted_avg"
    FMECA = "fmeca"
    REPLACEMENT_COST = "replacement_cost"
    FAILURE_INTERPRETATION = "failure_interpretation"


class Normalization(Enum):
    RAW = "raw"
    NORMALIZED = "normalized"


def round_half_up(x: float, ndigits: int = 0) -> float:
    """Decimal round-half-up (0.5 always rounds away from zero toward +inf).

    Works on the decimal rendering of x, so 6.15075 -> 6.1508 at 4 digits
    even though the binary double sits just below the midpoint.
    """
    q = Decimal(1).scaleb(-ndigits)
    return float(Decimal(str(x)).quantize(q, rounding=ROUND_HALF_UP))


def format_score(x: float, ndigits: int = 4) -> str:
    """Fixed-width decimal rendering used by every report emitter."""
    q = Decimal(1).scaleb(-ndigits)
    return str(Decimal(str(x)).quantize(q, rounding=ROUND_HALF_UP))


def is_valid_hi(hi: int) -> bool:
    """True for a real condition score, False for the invalid marker 0."""
    return hi != 0


def band_of(score: int) -> ColorBand:
    """Color band of an integer HI score. Total over 0..10."""
    if not isinstance(score, int) or isinstance(score, bool):
        raise TypeError(f"score must be an integer, got {score!r}")
    if score < HI_MIN or score > HI_MAX:
        raise ValueError(f"score {score} outside {HI_MIN}..{HI_MAX}")
    for band, (lo, hi) in BAND_RANGES.items():
        if lo <= score <= hi:
            return band
    raise AssertionError("band ranges must cover 0..10")


def band_of_rounded(score: float) -> ColorBand:
    """Band of a fractional aggregated score: round half-up, clamp into 1..10.

    Raw (unnormalized) scores can exceed 10; they clamp to Green, which is
    exactly the size bias the raw variant exists to expose.
    """
    r = int(round_half_up(score))
    return band_of(min(max(r, 1), HI_MAX))


@dataclass(frozen=True)
class Asset:
    """One physical asset with its identity, HI score, and weighting inputs."""

    asset_id: str
    asset_type: str
    population_class: PopulationClass
    hi: int
    build_year: int | None = None
    replacement_cost: float | None = None
    bay_critical: bool = False

    def __post_init__(self):
        if not self.asset_id:
            raise ValueError("asset_id must be non-empty")
        if not (HI_MIN <= self.hi <= HI_MAX):
            raise ValueError(f"hi {self.hi} outside {HI_MIN}..{HI_MAX}")
        if self.build_year is not None and not (
            BUILD_YEAR_MIN <= self.build_year <= BUILD_YEAR_MAX
        ):
            raise ValueError(f"build_year {self.build_year} outside "
                             f"{BUILD_YEAR_MIN}..{BUILD_YEAR_MAX}")
        if self.replacement_cost is not None and self.replacement_cost < 0:
            raise ValueError(f"replacement_cost {self.replacement_cost} is negative")

    @property
    def is_valid(self) -> bool:
        return is_valid_hi(self.hi)


@dataclass(frozen=True)
class Bay:
    """A substation subsystem owning an ordered collection of assets."""

    bay_id: str
    assets: tuple[Asset, ...] = ()

    def __post_init__(self):
        if not self.bay_id:
            raise ValueError("bay_id must be non-empty")
        seen = set()
        for a in self.assets:
            if a.asset_id in seen:
                raise ValueError(f"duplicate asset_id {a.asset_id!r} in bay {self.bay_id!r}")
            seen.add(a.asset_id)

    def valid_assets(self) -> tuple[Asset, ...]:
        return tuple(a for a in self.assets if a.is_valid)


@dataclass(frozen=True)
class Substation:
    substation_id: str
    bays: tuple[Bay, ...] = ()

    def __post_init__(self):
        if not self.substation_id:
            raise ValueError("substation_id must be non-empty")
        seen = set()
        for b in self.bays:
            if b.bay_id in seen:
                raise ValueError(
                    f"duplicate bay_id {b.bay_id!r} in substation {self.substation_id!r}"
                )
            seen.add(b.bay_id)

    def assets(self) -> tuple[Asset, ...]:
        return tuple(a for b in self.bays for a in b.assets)


@dataclass(frozen=True)
class YearConditionalSeverity:
    """Severity that switches value at a cutoff build year (cutoff inclusive
    on the 'since' side: year < cutoff -> before, year >= cutoff -> since)."""

    before: int
    cutoff_year: int
    since: int


SeverityRule = int | YearConditionalSeverity


@dataclass(frozen=True)
class SeverityCatalog:
    """FMECA severity per asset type (aggregate over that type's failure modes)."""

    entries: dict[str, SeverityRule] = field(default_factory=dict)

    def __post_init__(self):
        for asset_type, rule in self.entries.items():
            if isinstance(rule, YearConditionalSeverity):
                for v in (rule.before, rule.since):
                    if v <= 0:
                        raise NegativeSeverity(asset_type, v)
            elif rule <= 0:
                raise NegativeSeverity(asset_type, rule)

    def severity_of(self, asset_type: str, build_year: int | None = None,
                    asset_id: str = "?") -> int:
        rule = self.entries.get(asset_type)
        if rule is None:
            raise UnknownAssetType(asset_type, "severity")
        if isinstance(rule, YearConditionalSeverity):
            if build_year is None:
                raise MissingBuildYear(asset_id, asset_type)
            return rule.before if build_year < rule.cutoff_year else rule.since
        return rule


@dataclass(frozen=True)
class WeightCatalog:
    """Population class and weight per asset type; weights must sit inside
    their class's range."""

    entries: dict[str, tuple[PopulationClass, float]] = field(default_factory=dict)

    def __post_init__(self):
        for asset_type, (cls, weight) in self.entries.items():
            if not isinstance(cls, PopulationClass):
                raise UnknownClass(str(cls))
            lo, hi = CLASS_WEIGHT_RANGES[cls]
            if not (lo <= weight <= hi):
                raise WeightOutOfClassRange(asset_type, weight, cls.value, lo, hi)

    def weight_of(self, asset_type: str) -> float:
        entry = self.entries.get(asset_type)
        if entry is None:
            raise UnknownAssetType(asset_type, "weight")
        return entry[1]

    def class_of(self, asset_type: str) -> PopulationClass:
        entry = self.entries.get(asset_type)
        if entry is None:
            raise UnknownAssetType(asset_type, "weight")
        return entry[0]


def severity_of(asset_type: str, build_year: int | None = None,
                catalog: SeverityCatalog | None = None) -> int:
    """Severity of an asset type, resolving year-conditional rules against
    the given catalog (built-in defaults when omitted)."""
    cat = default_severity_catalog() if catalog is None else catalog
    return cat.severity_of(asset_type, build_year)


# Expert severity table (aggregate per type). Protection devices switch
# from 152 to 237 for build years >= 1992.
DEFAULT_SEVERITIES: dict[str, SeverityRule] = {
    "earthing": 343,
    "compensation_coil": 304,
    "protection_device": YearConditionalSeverity(before=152, cutoff_year=1992, since=237),
    "power_transformer": 458,
    "surge_arrestor": 128,
    "disconnector": 313,
    "instrument_transformer": 377,
    "control_device": 148,
    "circuit_breaker": 464,
}

# Published weighting gives only per-class ranges; the published class
# membership per type does not exist, so the default assigns classes by
# severity tertile and uses the integer midpoint of each class range
# (primary 8, secondary 5, tertiary 2). Override via a catalog file.
DEFAULT_WEIGHTS: dict[str, tuple[PopulationClass, float]] = {
    "circuit_breaker": (PopulationClass.PRIMARY, 8.0),
    "power_transformer": (PopulationClass.PRIMARY, 8.0),
    "instrument_transformer": (PopulationClass.PRIMARY, 8.0),
    "earthing": (PopulationClass.SECONDARY, 5.0),
    "disconnector": (PopulationClass.SECONDARY, 5.0),
    "compensation_coil": (PopulationClass.SECONDARY, 5.0),
    "protection_device": (PopulationClass.TERTIARY, 2.0),
    "control_device": (PopulationClass.TERTIARY, 2.0),
    "surge_arrestor": (PopulationClass.TERTIARY, 2.0),
}

DEFAULT_ASSET_TYPES: tuple[str, ...] = tuple(sorted(DEFAULT_SEVERITIES))


def default_severity_catalog() -> SeverityCatalog:
    return SeverityCatalog(dict(DEFAULT_SEVERITIES))


def default_weight_catalog() -> WeightCatalog:
    return WeightCatalog(dict(DEFAULT_WEIGHTS))


@dataclass(frozen=True)
class StrategyConfig:
    """Aggregation strategy selection plus its tunables."""

    method: Method = Method.WEIGHTED_AVERAGE
    normalization: Normalization = Normalization.NORMALIZED
    worst_case_cap_offset: int = 3
    power_mean_exponent: float = -2.0
    invalid_fraction_threshold: float = 0.25

    def __post_init__(self):
        if self.worst_case_cap_offset < 0:
            raise ValueError("worst_case_cap_offset must be >= 0")
        if self.power_mean_exponent == 0:
            raise ValueError("power_mean_exponent must be nonzero")
        if not (0.0 <= self.invalid_fraction_threshold <= 1.0):
            raise ValueError("invalid_fraction_threshold must be in [0, 1]")
