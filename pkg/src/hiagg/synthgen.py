"""Deterministic synthetic fleet generation for tests and demos.

Stands in for confidential utility data: fleets with a mix of small and
big bays, a configurable HI distribution, and a controllable fraction of
invalid (HI=0) assets.

Reproducibility contract: the pseudo-random source is the stdlib
``random.Random`` (MT19937), consumed ONLY through ``Random.random()``;
every discrete draw is realized by inverse-transform sampling on those
uniforms, and without-replacement picks use a partial Fisher-Yates driven
by the same uniforms. Identical spec (seed included) therefore yields a
byte-identical serialized fleet on any platform or Python version.

Draw order per fleet: substations outer to inner (bay count, then per bay
its size, then per asset type / HI band / HI within band / build year /
cost), then one without-replacement pick marking the invalid assets.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .errors import InfeasibleSpec
from .model import (
    Asset,
    Bay,
    ColorBand,
    PopulationClass,
    Substation,
    default_weight_catalog,
    round_half_up,
    BAND_RANGES,
    DEFAULT_ASSET_TYPES,
)

# Typical replacement cost per type (EUR), spread by a uniform 0.5x-1.5x factor.
_BASE_COSTS: dict[str, int] = {
    "power_transformer": 2_500_000,
    "compensation_coil": 900_000,
    "circuit_breaker": 120_000,
    "instrument_transformer": 60_000,
    "disconnector": 40_000,
    "protection_device": 25_000,
    "control_device": 15_000,
    "earthing": 8_000,
    "surge_arrestor": 6_000,
}
_FALLBACK_COST = 50_000

# Protection devices draw build years from this window so both sides of the
# 1992 severity cutoff appear in any reasonably sized fleet.
_PROTECTION_YEARS = (1967, 2017)
_DEFAULT_YEARS = (1965, 2015)

_BAND_ORDER = (ColorBand.GREEN, ColorBand.ORANGE, ColorBand.RED, ColorBand.VIOLET)


@dataclass(frozen=True)
class SizeDistribution:
    """Integer range with a skew knob: skew > 1 favors small values,
    skew < 1 favors large ones, 1 is uniform."""

    min: int
    max: int
    skew: float = 1.0


@dataclass(frozen=True)
class FleetSpec:
    seed: int = 0
    n_substations: int = 3
    bay_count_range: tuple[int, int] = (2, 6)
    bay_size_distribution: SizeDistribution = SizeDistribution(1, 12, 1.0)
    hi_distribution: dict[str, float] = field(default_factory=lambda: {
        "green": 0.4, "orange": 0.3, "red": 0.2, "violet": 0.1})
    invalid_fraction: float = 0.0
    type_mix: dict[str, float] = field(default_factory=dict)  # empty: uniform

    def validate(self) -> None:
        if self.n_substations < 1:
            raise InfeasibleSpec("n_substations must be >= 1")
        lo, hi = self.bay_count_range
        if lo < 1 or lo > hi:
            raise InfeasibleSpec(f"bay_count_range {self.bay_count_range} is empty")
        d = self.bay_size_distribution
        if d.min < 1 or d.min > d.max:
            raise InfeasibleSpec(f"bay size range {d.min}..{d.max} is empty")
        if d.skew <= 0:
            raise InfeasibleSpec("bay size skew must be > 0")
        if not (0.0 <= self.invalid_fraction <= 1.0):
            raise InfeasibleSpec("invalid_fraction must be in [0, 1]")
        for name, weights in (("hi_distribution", self.hi_distribution),
                              ("type_mix", self.type_mix or {"_": 1.0})):
            if any(w < 0 for w in weights.values()):
                raise InfeasibleSpec(f"{name} weights must be nonnegative")
            if sum(weights.values()) <= 0:
                raise InfeasibleSpec(f"{name} weights must not all be zero")
        unknown = self.hi_distribution.keys() - {b.value for b in _BAND_ORDER}
        if unknown:
            raise InfeasibleSpec(f"hi_distribution bands {sorted(unknown)} unknown")


def _uniform_int(rng: random.Random, lo: int, hi: int) -> int:
    return min(lo + int(rng.random() * (hi - lo + 1)), hi)


def _skewed_int(rng: random.Random, d: SizeDistribution) -> int:
    u = rng.random() ** d.skew
    return min(d.min + int(u * (d.max - d.min + 1)), d.max)


def _categorical(rng: random.Random, items: list, weights: list[float]):
    total = sum(weights)
    u = rng.random() * total
    acc = 0.0
    for item, w in zip(items, weights):
        acc += w
        if u < acc:
            return item
    return items[-1]


def _sample_without_replacement(rng: random.Random, n: int, k: int) -> list[int]:
    # Partial Fisher-Yates over index array; stable because only
    # rng.random() is consumed.
    idx = list(range(n))
    for i in range(k):
        j = _uniform_int(rng, i, n - 1)
        idx[i], idx[j] = idx[j], idx[i]
    return idx[:k]


def generate_fleet(spec: FleetSpec) -> tuple[Substation, ...]:
    """Deterministic fleet for a spec; the realized number of invalid assets
    is round-half-up(invalid_fraction * total assets)."""
    spec.validate()
    rng = random.Random(spec.seed)
    weight_catalog = default_weight_catalog()

    if spec.type_mix:
        types = sorted(spec.type_mix)
        type_weights = [spec.type_mix[t] for t in types]
    else:
        types = list(DEFAULT_ASSET_TYPES)
        type_weights = [1.0] * len(types)
    bands = [b for b in _BAND_ORDER if spec.hi_distribution.get(b.value, 0.0) > 0]
    band_weights = [spec.hi_distribution[b.value] for b in bands]

    substations = []
    counter = 0
    for s in range(spec.n_substations):
        sub_id = f"S{s:02d}"
        bays = []
        for b in range(_uniform_int(rng, *spec.bay_count_range)):
            bay_id = f"{sub_id}B{b:02d}"
            assets = []
            for _ in range(_skewed_int(rng, spec.bay_size_distribution)):
                asset_type = _categorical(rng, types, type_weights)
                band = _categorical(rng, bands, band_weights)
                lo, hi = BAND_RANGES[band]
                score = _uniform_int(rng, lo, hi)
                years = (_PROTECTION_YEARS if asset_type == "protection_device"
                         else _DEFAULT_YEARS)
                year = _uniform_int(rng, *years)
                base = _BASE_COSTS.get(asset_type, _FALLBACK_COST)
                cost = float(int(base * (0.5 + rng.random())))
                entry = weight_catalog.entries.get(asset_type)
                critical = entry is not None and entry[0] is PopulationClass.PRIMARY
                assets.append(Asset(
                    asset_id=f"A{counter:06d}", asset_type=asset_type,
                    population_class=entry[0] if entry else PopulationClass.TERTIARY,
                    hi=score, build_year=year, replacement_cost=cost,
                    bay_critical=critical))
                counter += 1
            bays.append(Bay(bay_id=bay_id, assets=tuple(assets)))
        substations.append(Substation(substation_id=sub_id, bays=tuple(bays)))

    fleet = tuple(substations)
    if spec.invalid_fraction > 0:
        fleet = _mark_invalid(fleet, spec.invalid_fraction, rng)
    return fleet


def _mark_invalid(fleet: tuple[Substation, ...], fraction: float,
                  rng: random.Random) -> tuple[Substation, ...]:
    total = sum(len(b.assets) for s in fleet for b in s.bays)
    k = int(round_half_up(fraction * total))
    chosen = set(_sample_without_replacement(rng, total, k))
    out = []
    i = 0
    for sub in fleet:
        bays = []
        for bay in sub.bays:
            assets = []
            for a in bay.assets:
                assets.append(replace(a, hi=0) if i in chosen else a)
                i += 1
            bays.append(Bay(bay_id=bay.bay_id, assets=tuple(assets)))
        out.append(Substation(substation_id=sub.substation_id, bays=tuple(bays)))
    return tuple(out)


def corrupt_fleet(fleet: tuple[Substation, ...], fraction: float,
                  seed: int) -> tuple[Substation, ...]:
    """Set HI=0 on round-half-up(fraction * n) uniformly chosen assets,
    deterministically per seed. fraction=0 returns an equal fleet."""
    if not (0.0 <= fraction <= 1.0):
        raise InfeasibleSpec("fraction must be in [0, 1]")
    return _mark_invalid(fleet, fraction, random.Random(seed))


def load_fleet_spec(doc: dict) -> FleetSpec:
    """Build a FleetSpec from a parsed YAML/JSON mapping; missing keys keep
    their defaults."""
    if not isinstance(doc, dict):
        raise InfeasibleSpec("fleet spec document must be a mapping")
    known = {"seed", "n_substations", "bay_count_range", "bay_size_distribution",
             "hi_distribution", "invalid_fraction", "type_mix"}
    unknown = doc.keys() - known
    if unknown:
        raise InfeasibleSpec(f"unknown fleet spec keys {sorted(unknown)}")
    kwargs: dict = {}
    if "seed" in doc:
        kwargs["seed"] = int(doc["seed"])
    if "n_substations" in doc:
        kwargs["n_substations"] = int(doc["n_substations"])
    if "bay_count_range" in doc:
        lo, hi = doc["bay_count_range"]
        kwargs["bay_count_range"] = (int(lo), int(hi))
    if "bay_size_distribution" in doc:
        d = doc["bay_size_distribution"]
        kwargs["bay_size_distribution"] = SizeDistribution(
            min=int(d["min"]), max=int(d["max"]),
            skew=float(d.get("skew", 1.0)))
    if "hi_distribution" in doc:
        kwargs["hi_distribution"] = {str(k): float(v)
                                     for k, v in doc["hi_distribution"].items()}
    if "invalid_fraction" in doc:
        kwargs["invalid_fraction"] = float(doc["invalid_fraction"])
    if "type_mix" in doc:
        kwargs["type_mix"] = {str(k): float(v) for k, v in doc["type_mix"].items()}
    spec = FleetSpec(**kwargs)
    spec.validate()
    return spec
