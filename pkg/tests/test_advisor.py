import json

import pytest
from hypothesis import given, strategies as st

from edgeadvisor.advisor import (
    Platform,
    Rule,
    Thresholds,
    ZeroEnergy,
    crossover_size_mb,
    decide,
    efficiency_ratio,
    recommend,
)
from edgeadvisor.energymodel import (
    A53_MODEL,
    CORTEX_A53,
    EDGE_TPU,
    AffineModel,
    ArchFeatures,
    Guard,
    PlatformProfile,
    Segment,
    default_platforms,
    features,
)
from edgeadvisor.placement import Residency

P = default_platforms()
TPU, A53 = P[EDGE_TPU], P[CORTEX_A53]


def feat(size_mb, max_width=64, residency=Residency.ON_CHIP):
    return ArchFeatures(size_mb, max_width, max_width, 64, 2, residency, 64)


@pytest.mark.parametrize(
    "size, width, platform, rule",
    [
        (0.10, 64, Platform.CORTEX_A53, Rule.TOO_SMALL),
        (2.0, 5400, Platform.EDGE_TPU, Rule.SWEET_SPOT),
        (2.0, 9072, Platform.CORTEX_A53, Rule.WIDTH_EXCEEDED),
        (14.0, 64, Platform.CORTEX_A53, Rule.TOO_LARGE),
        (10.0, 64, Platform.EDGE_TPU, Rule.MARGINAL_TPU),
    ],
)
def test_recommend_examples(size, width, platform, rule):
    rec = recommend(feat(size, width))
    assert (rec.platform, rec.rule_fired) == (platform, rule)
    assert rec.rationale
    assert set(rec.predicted_energy_mj) == set(P)


def test_marginal_is_low_confidence():
    assert recommend(feat(10.0)).confidence == "low"
    assert recommend(feat(2.0)).confidence == "high"


def test_width_warning_zone():
    assert any("warning zone" in w for w in recommend(feat(2.0, 8100)).warnings)
    assert not recommend(feat(2.0, 7000)).warnings


def test_crossover_discrepancy_noted():
    assert any("12.5" in w for w in recommend(feat(13.0)).warnings)


def test_recommendation_json():
    d = json.loads(json.dumps(recommend(feat(2.0, 5400)).to_dict()))
    assert d["platform"] == "EDGE_TPU" and d["rule_fired"] == "SWEET_SPOT"
    assert set(d["predicted_energy_mj"]) == set(P)


def test_thresholds_must_be_ordered():
    with pytest.raises(ValueError):
        Thresholds(crossover1_mb=9.0)
    with pytest.raises(ValueError):
        Thresholds(crossover2_mb=7.0)


def test_thresholds_from_dict():
    t = Thresholds.from_dict({"crossover2_mb": 12.5})
    assert decide(13.0, 64, t) == (Platform.CORTEX_A53, Rule.TOO_LARGE)
    with pytest.raises(ValueError):
        Thresholds.from_dict({"bogus": 1})


@given(
    st.floats(min_value=0, max_value=100),
    st.integers(min_value=1, max_value=50_000),
    st.floats(min_value=0.01, max_value=100),
)
def test_scaling_sizes_and_thresholds_keeps_rule(size, width, k):
    t = Thresholds()
    assert decide(size, width, t)[1] == decide(size * k, width, t.scaled(k))[1] or _on_boundary(size, t)


def _on_boundary(size, t):
    # floating point rounding of size*k can cross an exact tie
    return any(abs(size - b) <= 1e-9 * max(1, b) for b in (t.crossover1_mb, t.on_chip_limit_mb, t.crossover2_mb))


@given(st.floats(min_value=0, max_value=100), st.integers(min_value=1, max_value=50_000))
def test_rule_invariants(size, width):
    platform, rule = decide(size, width)
    if rule is Rule.SWEET_SPOT or rule is Rule.MARGINAL_TPU:
        assert platform is Platform.EDGE_TPU
    else:
        assert platform is Platform.CORTEX_A53


def test_wide_inputs_always_go_to_a53(all_grids):
    for spec in all_grids["set1"]:
        if spec.input_width >= 9072:
            assert recommend(features(spec)).platform is Platform.CORTEX_A53


def test_ratio_on_chip_example():
    r = efficiency_ratio(feat(0.93, 5400), TPU, A53)
    assert r == pytest.approx((2.157 * 0.93 + 0.001) / (0.84 * 0.93 + 0.161))
    assert r == pytest.approx(2.13, abs=0.01)


def test_ratio_is_one_at_effective_crossover():
    # the on-chip energy floor (0.29 mJ) moves the crossing from 0.1215 MB to 0.134 MB
    x = (0.29 - A53_MODEL.intercept) / A53_MODEL.slope
    assert 0.10 <= x <= 0.15
    assert efficiency_ratio(feat(x, 5400), TPU, A53) == pytest.approx(1.0)
    assert efficiency_ratio(feat(x * 0.99, 5400), TPU, A53) < 1 < efficiency_ratio(feat(x * 1.01, 5400), TPU, A53)


def test_ratio_is_one_at_raw_model_intersection():
    tpu_raw = PlatformProfile("tpu_raw", 2.0, (Segment(Guard(), "size_mb", AffineModel(0.84, 0.161)),))
    x = crossover_size_mb(A53_MODEL, AffineModel(0.84, 0.161))
    assert x == pytest.approx(0.1215, abs=1e-3)
    assert efficiency_ratio(feat(x), tpu_raw, A53) == pytest.approx(1.0)


@given(st.floats(min_value=0, max_value=100))
def test_ratio_off_chip_catch_all(size):
    assert efficiency_ratio(feat(size, 9072, Residency.OFF_CHIP), TPU, A53) == pytest.approx(1 / 1.1)


def test_zero_energy_raises():
    zero = PlatformProfile("zero", 1.0, (Segment(Guard(), "size_mb", AffineModel(0, 0)),))
    with pytest.raises(ZeroEnergy):
        efficiency_ratio(feat(1.0), zero, A53)


def test_crossover_parallel_models():
    with pytest.raises(ValueError):
        crossover_size_mb(AffineModel(1, 0), AffineModel(1, 2))


def test_sweet_spot_implies_tpu_more_efficient(all_grids):
    for spec in all_grids["set1"]:
        if spec.input_width > 5400:
            continue
        f = features(spec)
        rec = recommend(f)
        ratio = efficiency_ratio(f, TPU, A53)
        if rec.rule_fired is Rule.SWEET_SPOT:
            assert ratio > 1, spec
        if ratio <= 1:
            assert rec.platform is Platform.CORTEX_A53, spec
