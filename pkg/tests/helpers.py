"""Shared builders for test fixtures."""
from __future__ import annotations

import random

from hiagg.model import (
    Asset,
    Bay,
    PopulationClass,
    SeverityCatalog,
    Substation,
    WeightCatalog,
    default_severity_catalog,
    default_weight_catalog,
)

SEVERITIES: SeverityCatalog = default_severity_catalog()
WEIGHTS: WeightCatalog = default_weight_catalog()

TYPES = sorted(WEIGHTS.entries)

_counter = 0


def make_asset(hi: int, asset_type: str = "circuit_breaker",
               build_year: int = 2000, cost: float | None = 250000.0,
               critical: bool = False, asset_id: str | None = None) -> Asset:
    global _counter
    if asset_id is None:
        _counter += 1
        asset_id = f"T{_counter:06d}"
    cls, _ = WEIGHTS.entries.get(asset_type,
                                 (PopulationClass.TERTIARY, 1.0))
    return Asset(asset_id=asset_id, asset_type=asset_type,
                 population_class=cls, hi=hi, build_year=build_year,
                 replacement_cost=cost, bay_critical=critical)


def make_bay(his, bay_id: str = "B1", **kwargs) -> Bay:
    return Bay(bay_id=bay_id, assets=tuple(make_asset(h, **kwargs) for h in his))


def random_bay(rng: random.Random, bay_id: str = "B1",
               n_min: int = 1, n_max: int = 12,
               allow_invalid: bool = True) -> Bay:
    n = rng.randint(n_min, n_max)
    assets = []
    for _ in range(n):
        hi = rng.randint(0 if allow_invalid else 1, 10)
        assets.append(make_asset(
            hi,
            asset_type=rng.choice(TYPES),
            build_year=rng.randint(1950, 2020),
            cost=float(rng.randint(1000, 5_000_000)),
            critical=rng.random() < 0.3,
        ))
    return Bay(bay_id=bay_id, assets=tuple(assets))


def wrap_substation(*bays: Bay, substation_id: str = "S1") -> Substation:
    return Substation(substation_id=substation_id, bays=tuple(bays))
