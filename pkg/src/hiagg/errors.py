"""Exception types shared across the package.

Every ingest error carries file/line provenance so CLI messages can point
at the offending row.
"""
from __future__ import annotations


class HiAggError(Exception):
    """Base class for all package errors."""


class UnknownAssetType(HiAggError):
    """Asset type has no entry in the required catalog."""

    def __init__(self, asset_type: str, catalog: str = "catalog"):
        self.asset_type = asset_type
        super().__init__(f"unknown asset type {asset_type!r} (no {catalog} entry)")


class MissingBuildYear(HiAggError):
    """Year-conditional severity rule hit an asset without a build year."""

    def __init__(self, asset_id: str, asset_type: str):
        self.asset_id = asset_id
        super().__init__(
            f"asset {asset_id!r} of type {asset_type!r} needs a build year "
            "for its year-conditional severity rule"
        )


class MissingCost(HiAggError):
    """Replacement-cost strategy hit an asset without a cost."""

    def __init__(self, asset_id: str):
        self.asset_id = asset_id
        super().__init__(f"asset {asset_id!r} has no replacement cost")


class NonPositiveCost(HiAggError):
    """Replacement-cost strategy needs strictly positive costs."""

    def __init__(self, asset_id: str, cost: float):
        self.asset_id = asset_id
        super().__init__(f"asset {asset_id!r} has non-positive replacement cost {cost}")


class FleetFormatError(HiAggError):
    """Hard schema violation in a fleet file; carries path and line number."""

    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class MissingHeader(FleetFormatError):
    pass


class MalformedRow(FleetFormatError):
    pass


class HiOutOfRange(FleetFormatError):
    pass


class DuplicateAssetId(FleetFormatError):
    pass


class CatalogError(HiAggError):
    """Invalid catalog document."""


class NegativeSeverity(CatalogError):
    def __init__(self, asset_type: str, value: float):
        super().__init__(f"severity for {asset_type!r} must be strictly positive, got {value}")


class WeightOutOfClassRange(CatalogError):
    def __init__(self, asset_type: str, weight: float, cls: str, lo: float, hi: float):
        super().__init__(
            f"weight {weight} for {asset_type!r} outside {cls} range {lo}-{hi}"
        )


class UnknownClass(CatalogError):
    def __init__(self, name: str):
        super().__init__(f"unknown population class {name!r}")


class InfeasibleSpec(HiAggError):
    """Synthetic fleet spec cannot be realized."""


class UnwritableOutput(HiAggError):
    """Output document could not be written."""
