"""Method comparison, small-bay bias diagnostics, and report emission.

A comparison report aggregates every bay under every requested method and
records, per substation: the distribution of asset HI scores over color
bands, per-bay scores per method, per-method-pair divergence (score deltas
and a Spearman rank correlation of bay orderings), the embedded quality
audit, and the small-bay bias diagnostic.

Emitted documents are deterministic bytes: sorted keys, fixed 4-decimal
half-up score formatting, no timestamps.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from statistics import median
from typing import Sequence

from .aggregation import (
    BayScore,
    SubstationScore,
    aggregate_bay,
    bay_mass,
    method_token,
    rollup_bays,
    FAILURE_MEANING,
    _bay_any_critical,
)
from .errors import HiAggError
from .ingest import QualityAudit, audit_fleet
from .model import (
    Bay,
    ColorBand,
    Method,
    Normalization,
    SeverityCatalog,
    StrategyConfig,
    Substation,
    WeightCatalog,
    band_of,
    format_score,
)

METHOD_TOKENS = ("weighted_avg", "weighted_avg_raw", "fmeca",
                 "replacement_cost", "failure_interpretation")

REPORT_SCHEMA = "hiagg.report/1"

CSV_COLUMNS = ("substation_id", "bay_id", "method", "score", "band",
               "n_valid", "n_invalid", "capped", "raw", "indeterminate", "error")


def resolve_method_token(token: str, cfg: StrategyConfig) -> StrategyConfig:
    """Strategy config for a report method token. 'weighted_avg_raw' forces
    raw normalization; plain 'weighted_avg' follows cfg.normalization."""
    if token == "weighted_avg_raw":
        return replace(cfg, method=Method.WEIGHTED_AVERAGE,
                       normalization=Normalization.RAW)
    for m in Method:
        if m.value == token:
            return replace(cfg, method=m)
    raise ValueError(f"unknown method {token!r} (choose from {', '.join(METHOD_TOKENS)})")


@dataclass(frozen=True)
class MethodCell:
    """One (bay, method) outcome: a score or a captured per-bay error."""

    bay_score: BayScore | None = None
    error: str | None = None


@dataclass(frozen=True)
class BayComparison:
    bay_id: str
    n_assets: int
    n_invalid: int
    cells: dict[str, MethodCell]


@dataclass(frozen=True)
class Divergence:
    method_a: str
    method_b: str
    deltas: dict[str, float]  # bay_id -> score_a - score_b
    spearman: float | None    # absent when < 2 comparable bays or no variance


@dataclass(frozen=True)
class BiasFinding:
    bay_id: str
    n_assets: int
    raw_percentile: float
    reference_percentile: float
    gap: float


@dataclass(frozen=True)
class BiasDiagnostics:
    """Bays matching the small-bay bias signature: raw weighted-sum rank far
    from FMECA rank, on a below-median-size bay."""

    substation_id: str
    median_bay_size: float
    percentile_gap: float
    findings: tuple[BiasFinding, ...]
    excluded: tuple[tuple[str, str], ...]  # (bay_id, reason)


@dataclass(frozen=True)
class SubstationComparison:
    substation_id: str
    band_distribution: dict[str, float]
    bays: tuple[BayComparison, ...]
    rollups: dict[str, SubstationScore]
    divergences: tuple[Divergence, ...]
    bias: BiasDiagnostics | None


@dataclass(frozen=True)
class ComparisonReport:
    methods: tuple[str, ...]
    config: StrategyConfig
    audit: QualityAudit
    substations: tuple[SubstationComparison, ...]


def _average_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2 + 1  # 1-based average rank across the tie run
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float | None:
    """Spearman rank correlation with ties mid-ranked; None when undefined
    (fewer than two pairs, or either side constant)."""
    if len(xs) != len(ys):
        raise ValueError("length mismatch")
    n = len(xs)
    if n < 2:
        return None
    rx, ry = _average_ranks(xs), _average_ranks(ys)
    mx, my = sum(rx) / n, sum(ry) / n
    dx = [r - mx for r in rx]
    dy = [r - my for r in ry]
    sxx = sum(d * d for d in dx)
    syy = sum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        return None
    sxy = sum(a * b for a, b in zip(dx, dy))
    return sxy / (sxx * syy) ** 0.5


def _percentiles(values: Sequence[float]) -> list[float]:
    n = len(values)
    return [(r - 0.5) / n for r in _average_ranks(values)]


def bias_diagnostics(sub: Substation, severities: SeverityCatalog,
                     weights: WeightCatalog, cfg: StrategyConfig,
                     percentile_gap: float = 0.2) -> BiasDiagnostics:
    """Flag bays whose raw weighted-sum percentile sits more than
    percentile_gap away from their FMECA percentile while their asset count
    is below the substation's median bay size.

    Indeterminate or erroring bays are excluded and listed separately.
    Percentile of a bay = (average rank - 0.5) / number of compared bays.
    """
    raw_cfg = replace(cfg, method=Method.WEIGHTED_AVERAGE,
                      normalization=Normalization.RAW)
    fmeca_cfg = replace(cfg, method=Method.FMECA)
    rows: list[tuple[Bay, float, float]] = []
    excluded: list[tuple[str, str]] = []
    for bay in sorted(sub.bays, key=lambda b: b.bay_id):
        try:
            r = aggregate_bay(bay, severities, weights, raw_cfg)
            f = aggregate_bay(bay, severities, weights, fmeca_cfg)
        except HiAggError as exc:
            excluded.append((bay.bay_id, str(exc)))
            continue
        if r.indeterminate or f.indeterminate:
            excluded.append((bay.bay_id, "indeterminate"))
            continue
        rows.append((bay, r.score, f.score))

    if not rows:
        return BiasDiagnostics(substation_id=sub.substation_id,
                               median_bay_size=0.0,
                               percentile_gap=percentile_gap,
                               findings=(), excluded=tuple(excluded))

    raw_pct = _percentiles([r for _, r, _ in rows])
    ref_pct = _percentiles([f for _, _, f in rows])
    med = float(median(len(bay.assets) for bay, _, _ in rows))
    findings = []
    for (bay, _, _), rp, fp in zip(rows, raw_pct, ref_pct):
        gap = abs(rp - fp)
        if gap > percentile_gap and len(bay.assets) < med:
            findings.append(BiasFinding(bay_id=bay.bay_id,
                                        n_assets=len(bay.assets),
                                        raw_percentile=rp,
                                        reference_percentile=fp, gap=gap))
    return BiasDiagnostics(substation_id=sub.substation_id, median_bay_size=med,
                           percentile_gap=percentile_gap,
                           findings=tuple(findings), excluded=tuple(excluded))


def _band_distribution(sub: Substation) -> dict[str, float]:
    counts = {band.value: 0 for band in ColorBand}
    total = 0
    for bay in sub.bays:
        for a in bay.assets:
            counts[band_of(a.hi).value] += 1
            total += 1
    if total == 0:
        return {k: 0.0 for k in counts}
    return {k: v / total for k, v in counts.items()}


def compare_methods(substations: Sequence[Substation], methods: Sequence[str],
                    severities: SeverityCatalog, weights: WeightCatalog,
                    cfg: StrategyConfig, workers: int = 1,
                    percentile_gap: float = 0.2,
                    include_bias: bool = True) -> ComparisonReport:
    """Aggregate every bay under every requested method token.

    Per-bay aggregation errors are captured in the report without aborting
    the other bays or methods. Results are ordered by substation and bay id,
    so output is identical for any worker count.
    """
    if not methods:
        raise ValueError("at least one method required")
    tokens = list(dict.fromkeys(methods))  # de-dup, keep request order
    cfgs = {t: resolve_method_token(t, cfg) for t in tokens}

    jobs = [(sub, bay, token)
            for sub in substations
            for bay in sorted(sub.bays, key=lambda b: b.bay_id)
            for token in tokens]

    def run(job) -> MethodCell:
        _, bay, token = job
        try:
            return MethodCell(bay_score=aggregate_bay(bay, severities, weights,
                                                      cfgs[token]))
        except HiAggError as exc:
            return MethodCell(error=str(exc))

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(j) for j in jobs]
    cells: dict[tuple[str, str, str], MethodCell] = {
        (sub.substation_id, bay.bay_id, token): outcome
        for (sub, bay, token), outcome in zip(jobs, outcomes)
    }

    sub_blocks = []
    for sub in sorted(substations, key=lambda s: s.substation_id):
        bays = sorted(sub.bays, key=lambda b: b.bay_id)
        bay_rows = []
        for bay in bays:
            row_cells = {t: cells[(sub.substation_id, bay.bay_id, t)]
                         for t in tokens}
            bay_rows.append(BayComparison(
                bay_id=bay.bay_id, n_assets=len(bay.assets),
                n_invalid=sum(1 for a in bay.assets if not a.is_valid),
                cells=row_cells))

        rollups = {}
        for t in tokens:
            scored, masses, criticals = [], [], []
            for bay in bays:
                cell = cells[(sub.substation_id, bay.bay_id, t)]
                if cell.error is not None:
                    continue  # errored bays drop out of the roll-up
                scored.append(cell.bay_score)
                masses.append(0.0 if cell.bay_score.indeterminate
                              else bay_mass(bay, cfgs[t].method, severities, weights))
                criticals.append(_bay_any_critical(bay))
            rollups[t] = rollup_bays(sub.substation_id, scored, masses,
                                     criticals, cfgs[t])

        divergences = []
        for i in range(len(tokens)):
            for j in range(i + 1, len(tokens)):
                a, b = tokens[i], tokens[j]
                deltas, xs, ys = {}, [], []
                for bay in bays:
                    ca = cells[(sub.substation_id, bay.bay_id, a)]
                    cb = cells[(sub.substation_id, bay.bay_id, b)]
                    if (ca.bay_score is None or cb.bay_score is None
                            or ca.bay_score.indeterminate
                            or cb.bay_score.indeterminate):
                        continue
                    deltas[bay.bay_id] = ca.bay_score.score - cb.bay_score.score
                    xs.append(ca.bay_score.score)
                    ys.append(cb.bay_score.score)
                divergences.append(Divergence(method_a=a, method_b=b,
                                              deltas=deltas,
                                              spearman=spearman(xs, ys)))

        bias = (bias_diagnostics(sub, severities, weights, cfg, percentile_gap)
                if include_bias else None)
        sub_blocks.append(SubstationComparison(
            substation_id=sub.substation_id,
            band_distribution=_band_distribution(sub),
            bays=tuple(bay_rows), rollups=rollups,
            divergences=tuple(divergences), bias=bias))

    return ComparisonReport(methods=tuple(tokens), config=cfg,
                            audit=audit_fleet(substations, severities, weights),
                            substations=tuple(sub_blocks))


def _cell_doc(cell: MethodCell, token: str) -> dict:
    if cell.error is not None:
        return {"error": cell.error}
    s = cell.bay_score
    doc = {
        "score": None if s.score is None else format_score(s.score),
        "band": None if s.band is None else s.band.value,
        "n_valid": s.n_valid,
        "n_invalid": s.n_invalid,
        "capped": s.capped,
        "raw": s.raw,
        "indeterminate": s.indeterminate,
    }
    if token == "failure_interpretation" and s.band is not None:
        doc["meaning"] = FAILURE_MEANING[s.band]
    return doc


def _rollup_doc(r: SubstationScore) -> dict:
    return {
        "score": None if r.score is None else format_score(r.score),
        "band": None if r.band is None else r.band.value,
        "capped": r.capped,
        "raw": r.raw,
        "indeterminate": r.indeterminate,
        "n_bays": r.n_bays,
        "n_determinate": r.n_determinate,
    }


def audit_document(audit: QualityAudit) -> dict:
    return {
        "n_assets": audit.n_assets,
        "n_invalid": audit.n_invalid,
        "invalid_fraction": format_score(audit.invalid_fraction),
        "mean_bay_invalid_fraction": format_score(audit.mean_bay_invalid_fraction),
        "unknown_type": audit.unknown_type,
        "missing_field": audit.missing_field,
        "substations": [
            {
                "substation_id": s.substation_id,
                "n_assets": s.n_assets,
                "n_invalid": s.n_invalid,
                "invalid_fraction": format_score(s.invalid_fraction),
                "mean_bay_invalid_fraction": format_score(s.mean_bay_invalid_fraction),
                "unknown_type": s.unknown_type,
                "missing_field": s.missing_field,
                "bays": [
                    {
                        "bay_id": b.bay_id,
                        "n_assets": b.n_assets,
                        "n_invalid": b.n_invalid,
                        "invalid_fraction": format_score(b.invalid_fraction),
                        "unknown_type": b.unknown_type,
                        "missing_field": b.missing_field,
                    }
                    for b in s.bays
                ],
            }
            for s in audit.substations
        ],
    }


def report_document(report: ComparisonReport) -> dict:
    """JSON-shaped dict for a report; scores are 4-decimal half-up strings
    so serialization is byte-deterministic. The chart renderer consumes the
    same structure."""
    cfg = report.config
    subs = []
    for sc in report.substations:
        block = {
            "substation_id": sc.substation_id,
            "band_distribution": {k: format_score(v)
                                  for k, v in sc.band_distribution.items()},
            "bays": [
                {
                    "bay_id": row.bay_id,
                    "n_assets": row.n_assets,
                    "n_invalid": row.n_invalid,
                    "scores": {t: _cell_doc(row.cells[t], t)
                               for t in report.methods},
                }
                for row in sc.bays
            ],
            "rollup": {t: _rollup_doc(sc.rollups[t]) for t in report.methods},
            "divergence": [
                {
                    "methods": [d.method_a, d.method_b],
                    "deltas": {bay: format_score(v)
                               for bay, v in sorted(d.deltas.items())},
                    "spearman": None if d.spearman is None
                    else format_score(d.spearman),
                }
                for d in sc.divergences
            ],
        }
        if sc.bias is not None:
            block["small_bay_bias"] = {
                "median_bay_size": format_score(sc.bias.median_bay_size),
                "percentile_gap": format_score(sc.bias.percentile_gap),
                "flagged": [
                    {
                        "bay_id": f.bay_id,
                        "n_assets": f.n_assets,
                        "raw_percentile": format_score(f.raw_percentile),
                        "reference_percentile": format_score(f.reference_percentile),
                        "gap": format_score(f.gap),
                    }
                    for f in sc.bias.findings
                ],
                "excluded": [{"bay_id": b, "reason": r}
                             for b, r in sc.bias.excluded],
            }
        subs.append(block)

    return {
        "schema": REPORT_SCHEMA,
        "methods": list(report.methods),
        "config": {
            "normalization": cfg.normalization.value,
            "worst_case_cap_offset": cfg.worst_case_cap_offset,
            "power_mean_exponent": format_score(cfg.power_mean_exponent),
            "invalid_fraction_threshold": format_score(cfg.invalid_fraction_threshold),
        },
        "audit": audit_document(report.audit),
        "substations": subs,
    }


def _csv_rows(doc: dict) -> list[list[str]]:
    rows = []
    for sub in doc["substations"]:
        for bay in sub["bays"]:
            for token in doc["methods"]:
                cell = bay["scores"][token]
                if "error" in cell:
                    rows.append([sub["substation_id"], bay["bay_id"], token,
                                 "", "", "", "", "", "", "", cell["error"]])
                    continue
                rows.append([
                    sub["substation_id"], bay["bay_id"], token,
                    cell["score"] or "", cell["band"] or "",
                    str(cell["n_valid"]), str(cell["n_invalid"]),
                    "true" if cell["capped"] else "false",
                    "true" if cell["raw"] else "false",
                    "true" if cell["indeterminate"] else "false",
                    "",
                ])
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return rows


def emit_report(report: ComparisonReport, fmt: str = "json") -> str:
    """Serialize a report to deterministic json or csv text."""
    doc = report_document(report)
    return emit_document(doc, fmt)


def emit_document(doc: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(_csv_rows(doc))
        return buf.getvalue()
    raise ValueError(f"unknown report format {fmt!r}")


def load_report_document(path: str) -> dict:
    """Read back an emitted JSON report (for chart rendering)."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or doc.get("schema") != REPORT_SCHEMA:
        raise ValueError(f"{path}: not a {REPORT_SCHEMA} document")
    return doc
