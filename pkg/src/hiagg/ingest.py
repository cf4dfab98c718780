"""Fleet and catalog file parsing, serialization, and data-quality auditing.

Fleet files are UTF-8 comma-delimited text with the exact header

    asset_id,substation_id,bay_id,asset_type,population_class,build_year,
    hi_score,replacement_cost_eur,bay_critical

(one line; shown wrapped). build_year and replacement_cost_eur may be empty
(soft finding, counted by the audit); booleans are the literals true/false;
hi_score is an integer 0-10. Hard schema violations raise errors carrying
file and line; soft issues never block parsing and surface in the audit,
mirroring the position that aggregation must be built around incomplete
data rather than assume it away.

Catalog files are YAML documents with optional ``severities`` and
``weights`` sections overlaying the built-in defaults; see README for the
schema.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import yaml

from .errors import (
    CatalogError,
    DuplicateAssetId,
    HiOutOfRange,
    MalformedRow,
    MissingHeader,
)
from .model import (
    Asset,
    Bay,
    PopulationClass,
    SeverityCatalog,
    Substation,
    WeightCatalog,
    YearConditionalSeverity,
    default_severity_catalog,
    default_weight_catalog,
    BUILD_YEAR_MAX,
    BUILD_YEAR_MIN,
    HI_MAX,
    HI_MIN,
)

FLEET_HEADER = (
    "asset_id", "substation_id", "bay_id", "asset_type", "population_class",
    "build_year", "hi_score", "replacement_cost_eur", "bay_critical",
)

_CLASSES = {c.value: c for c in PopulationClass}
_BOOLS = {"true": True, "false": False}


def _parse_row(path: str, lineno: int, row: list[str]) -> tuple[str, str, Asset]:
    if len(row) != len(FLEET_HEADER):
        raise MalformedRow(path, lineno,
                           f"expected {len(FLEET_HEADER)} fields, got {len(row)}")
    (asset_id, substation_id, bay_id, asset_type, pop_class,
     build_year, hi_score, cost, critical) = (f.strip() for f in row)

    for name, value in (("asset_id", asset_id), ("substation_id", substation_id),
                        ("bay_id", bay_id), ("asset_type", asset_type)):
        if not value:
            raise MalformedRow(path, lineno, f"{name} must be non-empty")

    cls = _CLASSES.get(pop_class)
    if cls is None:
        raise MalformedRow(path, lineno, f"bad population_class {pop_class!r}")

    year: int | None = None
    if build_year:
        try:
            year = int(build_year)
        except ValueError:
            raise MalformedRow(path, lineno, f"bad build_year {build_year!r}") from None
        if not (BUILD_YEAR_MIN <= year <= BUILD_YEAR_MAX):
            raise MalformedRow(path, lineno,
                               f"build_year {year} outside {BUILD_YEAR_MIN}..{BUILD_YEAR_MAX}")

    try:
        hi = int(hi_score)
    except ValueError:
        raise MalformedRow(path, lineno, f"bad hi_score {hi_score!r}") from None
    if not (HI_MIN <= hi <= HI_MAX):
        raise HiOutOfRange(path, lineno, f"hi_score {hi} outside {HI_MIN}..{HI_MAX}")

    cost_value: float | None = None
    if cost:
        try:
            cost_value = float(cost)
        except ValueError:
            raise MalformedRow(path, lineno, f"bad replacement_cost_eur {cost!r}") from None
        if cost_value < 0:
            raise MalformedRow(path, lineno, f"replacement_cost_eur {cost_value} is negative")

    flag = _BOOLS.get(critical)
    if flag is None:
        raise MalformedRow(path, lineno, f"bad bay_critical {critical!r} (true/false)")

    asset = Asset(asset_id=asset_id, asset_type=asset_type, population_class=cls,
                  hi=hi, build_year=year, replacement_cost=cost_value,
                  bay_critical=flag)
    return substation_id, bay_id, asset


def parse_fleet(path: str) -> tuple[Substation, ...]:
    """Parse a fleet file into substations, preserving encounter order.

    Raises MissingHeader, MalformedRow, HiOutOfRange, or DuplicateAssetId,
    each pointing at the offending line.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        return _parse_fleet_stream(fh, path)


def _parse_fleet_stream(fh, path: str) -> tuple[Substation, ...]:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise MissingHeader(path, 1, "empty file, expected header") from None
    if tuple(f.strip() for f in header) != FLEET_HEADER:
        raise MissingHeader(path, 1,
                            f"bad header, expected {','.join(FLEET_HEADER)}")

    seen_ids: set[str] = set()
    # substation_id -> bay_id -> list of assets, insertion-ordered
    tree: dict[str, dict[str, list[Asset]]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            raise MalformedRow(path, lineno, "blank line")
        sub_id, bay_id, asset = _parse_row(path, lineno, row)
        if asset.asset_id in seen_ids:
            raise DuplicateAssetId(path, lineno,
                                   f"duplicate asset_id {asset.asset_id!r}")
        seen_ids.add(asset.asset_id)
        tree.setdefault(sub_id, {}).setdefault(bay_id, []).append(asset)

    return tuple(
        Substation(substation_id=sub_id,
                   bays=tuple(Bay(bay_id=bay_id, assets=tuple(assets))
                              for bay_id, assets in bays.items()))
        for sub_id, bays in tree.items()
    )


def _cost_str(cost: float | None) -> str:
    if cost is None:
        return ""
    if cost == int(cost):
        return str(int(cost))
    return repr(cost)


def serialize_fleet(substations: tuple[Substation, ...] | list[Substation]) -> str:
    """Render substations back to the fleet file format, hierarchy order
    preserved, so parse(serialize(fleet)) == fleet."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(FLEET_HEADER)
    for sub in substations:
        for bay in sub.bays:
            for a in bay.assets:
                writer.writerow([
                    a.asset_id, sub.substation_id, bay.bay_id, a.asset_type,
                    a.population_class.value,
                    "" if a.build_year is None else str(a.build_year),
                    str(a.hi), _cost_str(a.replacement_cost),
                    "true" if a.bay_critical else "false",
                ])
    return out.getvalue()


def _parse_severity_entry(asset_type: str, node) -> int | YearConditionalSeverity:
    if isinstance(node, bool):
        raise CatalogError(f"severity for {asset_type!r} must be a number or mapping")
    if isinstance(node, int):
        return node
    if isinstance(node, dict):
        missing = {"before", "cutoff_year", "from"} - node.keys()
        if missing:
            raise CatalogError(
                f"year-conditional severity for {asset_type!r} missing {sorted(missing)}")
        return YearConditionalSeverity(before=int(node["before"]),
                                       cutoff_year=int(node["cutoff_year"]),
                                       since=int(node["from"]))
    raise CatalogError(f"severity for {asset_type!r} must be a number or mapping")


def parse_catalogs(path: str | None) -> tuple[SeverityCatalog, WeightCatalog]:
    """Load severity and weight catalogs, overlaying entries from the given
    YAML file onto the built-in defaults. path=None returns the defaults."""
    severities = dict(default_severity_catalog().entries)
    weights = dict(default_weight_catalog().entries)
    if path is None:
        return SeverityCatalog(severities), WeightCatalog(weights)

    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise CatalogError(f"{path}: catalog document must be a mapping")
    unknown = doc.keys() - {"severities", "weights"}
    if unknown:
        raise CatalogError(f"{path}: unknown sections {sorted(unknown)}")

    for asset_type, node in (doc.get("severities") or {}).items():
        severities[str(asset_type)] = _parse_severity_entry(str(asset_type), node)

    for asset_type, node in (doc.get("weights") or {}).items():
        if not isinstance(node, dict) or "class" not in node or "weight" not in node:
            raise CatalogError(
                f"weight entry for {asset_type!r} needs 'class' and 'weight'")
        cls = _CLASSES.get(str(node["class"]))
        if cls is None:
            from .errors import UnknownClass
            raise UnknownClass(str(node["class"]))
        weights[str(asset_type)] = (cls, float(node["weight"]))

    return SeverityCatalog(severities), WeightCatalog(weights)


@dataclass(frozen=True)
class BayAudit:
    bay_id: str
    n_assets: int
    n_invalid: int
    invalid_fraction: float
    unknown_type: int
    missing_field: int


@dataclass(frozen=True)
class SubstationAudit:
    substation_id: str
    n_assets: int
    n_invalid: int
    invalid_fraction: float
    mean_bay_invalid_fraction: float
    unknown_type: int
    missing_field: int
    bays: tuple[BayAudit, ...]


@dataclass(frozen=True)
class QualityAudit:
    """Counts of invalid (HI=0) assets and soft findings at every level.

    invalid_fraction is per asset count; mean_bay_invalid_fraction averages
    the per-bay fractions (empty bay counts as 0), since the two can tell
    different stories about where the bad data sits.
    """

    n_assets: int
    n_invalid: int
    invalid_fraction: float
    mean_bay_invalid_fraction: float
    unknown_type: int
    missing_field: int
    substations: tuple[SubstationAudit, ...]


def _fraction(num: int, den: int) -> float:
    return num / den if den else 0.0


def audit_fleet(substations: tuple[Substation, ...] | list[Substation],
                severities: SeverityCatalog | None = None,
                weights: WeightCatalog | None = None) -> QualityAudit:
    """Exact invalid/unknown/missing counts at bay, substation, and fleet
    level. An asset type is unknown if either catalog lacks it; each absent
    build_year or cost counts as one missing field."""
    severities = severities or default_severity_catalog()
    weights = weights or default_weight_catalog()
    known = severities.entries.keys() & weights.entries.keys()

    sub_audits = []
    for sub in substations:
        bay_audits = []
        for bay in sub.bays:
            n = len(bay.assets)
            n_inv = sum(1 for a in bay.assets if not a.is_valid)
            unk = sum(1 for a in bay.assets if a.asset_type not in known)
            miss = sum((a.build_year is None) + (a.replacement_cost is None)
                       for a in bay.assets)
            bay_audits.append(BayAudit(bay_id=bay.bay_id, n_assets=n,
                                       n_invalid=n_inv,
                                       invalid_fraction=_fraction(n_inv, n),
                                       unknown_type=unk, missing_field=miss))
        n = sum(b.n_assets for b in bay_audits)
        n_inv = sum(b.n_invalid for b in bay_audits)
        sub_audits.append(SubstationAudit(
            substation_id=sub.substation_id, n_assets=n, n_invalid=n_inv,
            invalid_fraction=_fraction(n_inv, n),
            mean_bay_invalid_fraction=(
                sum(b.invalid_fraction for b in bay_audits) / len(bay_audits)
                if bay_audits else 0.0),
            unknown_type=sum(b.unknown_type for b in bay_audits),
            missing_field=sum(b.missing_field for b in bay_audits),
            bays=tuple(bay_audits)))

    n = sum(s.n_assets for s in sub_audits)
    n_inv = sum(s.n_invalid for s in sub_audits)
    all_bays = [b for s in sub_audits for b in s.bays]
    return QualityAudit(
        n_assets=n, n_invalid=n_inv, invalid_fraction=_fraction(n_inv, n),
        mean_bay_invalid_fraction=(
            sum(b.invalid_fraction for b in all_bays) / len(all_bays)
            if all_bays else 0.0),
        unknown_type=sum(s.unknown_type for s in sub_audits),
        missing_field=sum(s.missing_field for s in sub_audits),
        substations=tuple(sub_audits))
