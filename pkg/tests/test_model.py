import pytest

from hiagg.model import (
    Asset,
    Bay,
    CLASS_WEIGHT_RANGES,
    ColorBand,
    PopulationClass,
    SeverityCatalog,
    StrategyConfig,
    Substation,
    WeightCatalog,
    band_of,
    band_of_rounded,
    default_severity_catalog,
    default_weight_catalog,
    format_score,
    round_half_up,
    severity_of,
)
from hiagg.errors import (
    MissingBuildYear,
    NegativeSeverity,
    UnknownAssetType,
    UnknownClass,
    WeightOutOfClassRange,
)

from helpers import make_asset


BAND_TABLE = {
    0: ColorBand.WHITE,
    1: ColorBand.VIOLET, 2: ColorBand.VIOLET, 3: ColorBand.VIOLET,
    4: ColorBand.RED, 5: ColorBand.RED, 6: ColorBand.RED,
    7: ColorBand.ORANGE, 8: ColorBand.ORANGE,
    9: ColorBand.GREEN, 10: ColorBand.GREEN,
}


def test_band_mapping_total_on_integer_scale():
    for hi, band in BAND_TABLE.items():
        assert band_of(hi) is band


def test_band_of_rejects_out_of_scale():
    for bad in (-1, 11):
        with pytest.raises(ValueError):
            band_of(bad)
    with pytest.raises(TypeError):
        band_of(7.5)


def test_band_of_rounded_half_up_boundaries():
    # half-up: 8.5 joins green, 6.5 joins orange, 3.5 joins red
    assert band_of_rounded(8.5) is ColorBand.GREEN
    assert band_of_rounded(8.4999) is ColorBand.ORANGE
    assert band_of_rounded(6.5) is ColorBand.ORANGE
    assert band_of_rounded(3.5) is ColorBand.RED
    assert band_of_rounded(0.6) is ColorBand.VIOLET  # clamps into 1..10
    assert band_of_rounded(10.0) is ColorBand.GREEN


def test_round_half_up_is_not_bankers():
    assert round_half_up(0.5) == 1
    assert round_half_up(1.5) == 2
    assert round_half_up(2.5) == 3  # round() would give 2


def test_format_score_half_up_four_decimals():
    assert format_score(6.15075) == "6.1508"
    assert format_score(7.153846153846154) == "7.1538"
    assert format_score(7.0) == "7.0000"
    assert format_score(0.18181818181818182) == "0.1818"


def test_default_severities():
    cat = default_severity_catalog()
    expected = {
        "power_transformer": 458,
        "circuit_breaker": 464,
        "disconnector": 313,
        "instrument_transformer": 377,
        "surge_arrestor": 128,
        "compensation_coil": 304,
        "earthing": 343,
        "control_device": 148,
    }
    for asset_type, sev in expected.items():
        assert cat.severity_of(asset_type, 2000) == sev


def test_protection_device_year_split():
    cat = default_severity_catalog()
    assert cat.severity_of("protection_device", 1991) == 152
    assert cat.severity_of("protection_device", 1992) == 237
    assert cat.severity_of("protection_device", 2010) == 237
    assert severity_of("protection_device", 1970) == 152


def test_protection_device_requires_build_year():
    cat = default_severity_catalog()
    with pytest.raises(MissingBuildYear):
        cat.severity_of("protection_device", None)
    # year-independent types do not need one
    assert cat.severity_of("earthing", None) == 343


def test_unknown_asset_type():
    cat = default_severity_catalog()
    with pytest.raises(UnknownAssetType):
        cat.severity_of("flux_capacitor", 2000)
    with pytest.raises(UnknownAssetType):
        default_weight_catalog().weight_of("flux_capacitor")


def test_default_weights_respect_class_ranges():
    cat = default_weight_catalog()
    assert len(cat.entries) == 9
    for asset_type, (cls, weight) in cat.entries.items():
        lo, hi = CLASS_WEIGHT_RANGES[cls]
        assert lo <= weight <= hi, asset_type


def test_severity_catalog_rejects_negative():
    with pytest.raises(NegativeSeverity):
        SeverityCatalog(entries={"thing": -1})


def test_weight_catalog_rejects_out_of_range():
    with pytest.raises(WeightOutOfClassRange):
        WeightCatalog(entries={"thing": (PopulationClass.PRIMARY, 3.0)})
    with pytest.raises(WeightOutOfClassRange):
        WeightCatalog(entries={"thing": (PopulationClass.TERTIARY, 9.0)})


def test_asset_validation():
    with pytest.raises(ValueError):
        make_asset(11)
    with pytest.raises(ValueError):
        make_asset(-1)
    with pytest.raises(ValueError):
        make_asset(5, build_year=1800)
    a = make_asset(0)
    assert not a.is_valid
    assert make_asset(1).is_valid


def test_bay_rejects_duplicate_asset_ids():
    a = make_asset(5, asset_id="DUP")
    b = make_asset(6, asset_id="DUP")
    with pytest.raises(ValueError):
        Bay(bay_id="B", assets=(a, b))


def test_substation_rejects_duplicate_bay_ids():
    bay = Bay(bay_id="B", assets=(make_asset(5),))
    bay2 = Bay(bay_id="B", assets=(make_asset(6),))
    with pytest.raises(ValueError):
        Substation(substation_id="S", bays=(bay, bay2))


def test_strategy_config_validation():
    with pytest.raises(ValueError):
        StrategyConfig(worst_case_cap_offset=-1)
    with pytest.raises(ValueError):
        StrategyConfig(power_mean_exponent=0.0)
    with pytest.raises(ValueError):
        StrategyConfig(invalid_fraction_threshold=1.5)
    cfg = StrategyConfig()
    assert cfg.worst_case_cap_offset == 3
    assert cfg.power_mean_exponent == -2.0
    assert cfg.invalid_fraction_threshold == 0.25
