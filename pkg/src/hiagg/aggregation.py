"""Bay-level aggregation strategies and the substation roll-up.

Four strategies turn the HI scores of one bay's assets into a single score:

  weighted_avg            population-class weights, normalized weighted mean,
                          plus a worst-case cap so a very poor asset cannot be
                          averaged away; a raw (unnormalized) variant keeps the
                          plain weighted sum to expose its size sensitivity
  fmeca                   FMECA severities as weights: sum(HI*S) / sum(S)
  replacement_cost        log10(1+cost) weights combined through a power mean
                          with a negative exponent, so poor assets dominate
  failure_interpretation  minimum HI over the assets able to fail the bay

Invalid assets (HI = 0, White) are excluded from every aggregate but always
counted; bays whose invalid fraction exceeds the configured threshold come
back indeterminate instead of scored. All functions are pure; inputs are
immutable and may be shared across workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import MissingCost, NonPositiveCost
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
    band_of_rounded,
)

# Interpretation attached to the failure_interpretation bands.
FAILURE_MEANING: dict[ColorBand, str] = {
    ColorBand.GREEN: "fit for service",
    ColorBand.ORANGE: "serviceable, degradation observed",
    ColorBand.RED: "elevated failure risk, plan intervention",
    ColorBand.VIOLET: "imminent bay outage risk",
    ColorBand.WHITE: "no data",
}


@dataclass(frozen=True)
class BayScore:
    """Aggregated score of one bay under one strategy."""

    bay_id: str
    method: Method
    score: float | None
    band: ColorBand | None
    n_valid: int
    n_invalid: int
    capped: bool = False
    raw: bool = False
    indeterminate: bool = False

    def method_token(self) -> str:
        """Report key: the method name, with a _raw suffix for the
        unnormalized weighted-average variant."""
        return method_token(self.method, self.raw)


@dataclass(frozen=True)
class SubstationScore:
    """Per-bay scores plus the one-level-up roll-up for a substation."""

    substation_id: str
    method: Method
    score: float | None
    band: ColorBand | None
    n_bays: int
    n_determinate: int
    capped: bool = False
    raw: bool = False
    indeterminate: bool = False
    bay_scores: tuple[BayScore, ...] = ()


def method_token(method: Method, raw: bool = False) -> str:
    if method is Method.WEIGHTED_AVERAGE and raw:
        return "weighted_avg_raw"
    return method.value


def _split(bay: Bay) -> tuple[list[Asset], int]:
    valid = [a for a in bay.assets if a.is_valid]
    return valid, len(bay.assets) - len(valid)


def _indeterminate(bay_id: str, method: Method, n_valid: int, n_invalid: int,
                   raw: bool = False) -> BayScore:
    return BayScore(bay_id=bay_id, method=method, score=None, band=None,
                    n_valid=n_valid, n_invalid=n_invalid, raw=raw,
                    indeterminate=True)


def _scored(bay_id: str, method: Method, score: float, n_valid: int,
            n_invalid: int, capped: bool = False, raw: bool = False) -> BayScore:
    return BayScore(bay_id=bay_id, method=method, score=score,
                    band=band_of_rounded(score), n_valid=n_valid,
                    n_invalid=n_invalid, capped=capped, raw=raw)


def _as_arrays(valid: list[Asset], weight_of) -> tuple[np.ndarray, np.ndarray]:
    values = np.array([float(a.hi) for a in valid], dtype=np.float64)
    weights = np.array([weight_of(a) for a in valid], dtype=np.float64)
    return values, weights


def _clamp(score: float) -> float:
    return min(10.0, max(1.0, score))


def agg_weighted_average(bay: Bay, weights: WeightCatalog,
                         cfg: StrategyConfig) -> BayScore:
    """Population-class weighted average of the bay's valid assets.

    Normalized mode divides by the weight sum and then applies the
    worst-case cap: score <- min(score, worst valid HI + cap offset).
    Raw mode keeps the bare weighted sum (no normalization, no cap); it can
    exceed 10 and is flagged, reproducing the count-sensitive variant.
    """
    raw = cfg.normalization is Normalization.RAW
    valid, n_invalid = _split(bay)
    if not valid:
        return _indeterminate(bay.bay_id, Method.WEIGHTED_AVERAGE,
                              0, n_invalid, raw=raw)
    values, w = _as_arrays(valid, lambda a: weights.weight_of(a.asset_type))
    if raw:
        score = kernels.weighted_sum(values, w)
        return _scored(bay.bay_id, Method.WEIGHTED_AVERAGE, score,
                       len(valid), n_invalid, raw=True)
    score = kernels.weighted_mean(values, w)
    cap = kernels.min_value(values) + cfg.worst_case_cap_offset
    capped = score > cap
    return _scored(bay.bay_id, Method.WEIGHTED_AVERAGE,
                   _clamp(min(score, cap)), len(valid), n_invalid,
                   capped=capped)


def agg_fmeca(bay: Bay, severities: SeverityCatalog) -> BayScore:
    """Severity-weighted mean: sum(HI_i * S_i) / sum(S_i) over valid assets."""
    valid, n_invalid = _split(bay)
    if not valid:
        return _indeterminate(bay.bay_id, Method.FMECA, 0, n_invalid)
    values, sev = _as_arrays(
        valid,
        lambda a: float(severities.severity_of(a.asset_type, a.build_year, a.asset_id)),
    )
    score = kernels.weighted_mean(values, sev)
    return _scored(bay.bay_id, Method.FMECA, score, len(valid), n_invalid)


def _cost_weight(asset: Asset) -> float:
    if asset.replacement_cost is None:
        raise MissingCost(asset.asset_id)
    if asset.replacement_cost <= 0:
        raise NonPositiveCost(asset.asset_id, asset.replacement_cost)
    return math.log10(1.0 + asset.replacement_cost)


def agg_replacement_cost(bay: Bay, cfg: StrategyConfig) -> BayScore:
    """Power mean with log-of-cost weights.

    weight_i = log10(1 + cost_i); score = (sum(w*HI^p)/sum(w))^(1/p) with
    the configured exponent p (default -2), so poor scores dominate.
    """
    valid, n_invalid = _split(bay)
    if not valid:
        return _indeterminate(bay.bay_id, Method.REPLACEMENT_COST, 0, n_invalid)
    values, w = _as_arrays(valid, _cost_weight)
    score = kernels.power_mean(values, w, cfg.power_mean_exponent)
    return _scored(bay.bay_id, Method.REPLACEMENT_COST, score,
                   len(valid), n_invalid)


def agg_failure_interpretation(bay: Bay) -> BayScore:
    """Minimum HI over the bay-critical valid assets (all valid assets when
    none is flagged critical). See FAILURE_MEANING for the band semantics."""
    valid, n_invalid = _split(bay)
    if not valid:
        return _indeterminate(bay.bay_id, Method.FAILURE_INTERPRETATION,
                              0, n_invalid)
    critical = [a for a in valid if a.bay_critical] or valid
    values = np.array([float(a.hi) for a in critical], dtype=np.float64)
    score = kernels.min_value(values)
    return _scored(bay.bay_id, Method.FAILURE_INTERPRETATION, score,
                   len(valid), n_invalid)


def aggregate_bay(bay: Bay, severities: SeverityCatalog,
                  weights: WeightCatalog, cfg: StrategyConfig) -> BayScore:
    """Dispatch to the configured strategy.

    Regardless of method, a bay whose invalid fraction exceeds
    cfg.invalid_fraction_threshold is reported indeterminate without being
    scored (and without touching the catalogs).
    """
    n_total = len(bay.assets)
    n_invalid = sum(1 for a in bay.assets if not a.is_valid)
    raw = (cfg.method is Method.WEIGHTED_AVERAGE
           and cfg.normalization is Normalization.RAW)
    if n_total and n_invalid / n_total > cfg.invalid_fraction_threshold:
        return _indeterminate(bay.bay_id, cfg.method,
                              n_total - n_invalid, n_invalid, raw=raw)
    if cfg.method is Method.WEIGHTED_AVERAGE:
        return agg_weighted_average(bay, weights, cfg)
    if cfg.method is Method.FMECA:
        return agg_fmeca(bay, severities)
    if cfg.method is Method.REPLACEMENT_COST:
        return agg_replacement_cost(bay, cfg)
    return agg_failure_interpretation(bay)


def bay_mass(bay: Bay, method: Method, severities: SeverityCatalog,
             weights: WeightCatalog) -> float:
    """Weight mass a bay contributes when rolled up as a pseudo-asset:
    the sum over its valid assets of the strategy's per-asset weight."""
    valid, _ = _split(bay)
    if method is Method.WEIGHTED_AVERAGE:
        return float(sum(weights.weight_of(a.asset_type) for a in valid))
    if method is Method.FMECA:
        return float(sum(severities.severity_of(a.asset_type, a.build_year, a.asset_id)
                         for a in valid))
    if method is Method.REPLACEMENT_COST:
        return float(sum(_cost_weight(a) for a in valid))
    return 1.0  # failure interpretation rolls up by criticality, not mass


def _bay_any_critical(bay: Bay) -> bool:
    return any(a.bay_critical for a in bay.assets if a.is_valid)


def rollup_bays(substation_id: str, scored: list[BayScore],
                masses: list[float], criticals: list[bool],
                cfg: StrategyConfig) -> SubstationScore:
    """Apply the configured strategy one level up, treating each determinate
    bay score as a pseudo-asset carrying its mass (or criticality flag)."""
    raw = (cfg.method is Method.WEIGHTED_AVERAGE
           and cfg.normalization is Normalization.RAW)
    det = [(b, m, c) for b, m, c in zip(scored, masses, criticals)
           if not b.indeterminate]
    n_bays = len(scored)
    if not det:
        return SubstationScore(substation_id=substation_id, method=cfg.method,
                               score=None, band=None, n_bays=n_bays,
                               n_determinate=0, raw=raw, indeterminate=True,
                               bay_scores=tuple(scored))
    values = np.array([b.score for b, _, _ in det], dtype=np.float64)
    mass = np.array([m for _, m, _ in det], dtype=np.float64)
    capped = False
    if cfg.method is Method.WEIGHTED_AVERAGE and raw:
        score = kernels.weighted_sum(values, mass)
    elif cfg.method is Method.WEIGHTED_AVERAGE:
        score = kernels.weighted_mean(values, mass)
        cap = kernels.min_value(values) + cfg.worst_case_cap_offset
        capped = score > cap
        score = _clamp(min(score, cap))
    elif cfg.method is Method.FMECA:
        score = kernels.weighted_mean(values, mass)
    elif cfg.method is Method.REPLACEMENT_COST:
        score = kernels.power_mean(values, mass, cfg.power_mean_exponent)
    else:
        crit_scores = [b.score for b, _, c in det if c] or [b.score for b, _, _ in det]
        score = kernels.min_value(np.array(crit_scores, dtype=np.float64))
    return SubstationScore(substation_id=substation_id, method=cfg.method,
                           score=score, band=band_of_rounded(score),
                           n_bays=n_bays, n_determinate=len(det),
                           capped=capped, raw=raw, bay_scores=tuple(scored))


def aggregate_substation(sub: Substation, severities: SeverityCatalog,
                         weights: WeightCatalog,
                         cfg: StrategyConfig) -> SubstationScore:
    """Score every bay, then roll the determinate bays up to one substation
    score under the same strategy. Bays are ordered by bay_id so the result
    is independent of input order and scheduling."""
    bays = sorted(sub.bays, key=lambda b: b.bay_id)
    scored = [aggregate_bay(b, severities, weights, cfg) for b in bays]
    masses = [0.0 if s.indeterminate else bay_mass(b, cfg.method, severities, weights)
              for b, s in zip(bays, scored)]
    criticals = [_bay_any_critical(b) for b in bays]
    return rollup_bays(sub.substation_id, scored, masses, criticals, cfg)
