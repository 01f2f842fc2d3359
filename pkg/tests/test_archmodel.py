import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from edgeadvisor.archmodel import (
    MIB,
    ArchitectureSpec,
    Grid,
    QuantizationProfile,
    format_hidden,
    generate_grid,
    grid_from_json,
    grid_to_json,
    layer_param_counts,
    max_layer_width,
    model_size_bytes,
    parse_hidden,
)
from oracles import brute_force_params

widths = st.integers(min_value=1, max_value=5000)
archs = st.builds(
    ArchitectureSpec,
    widths,
    st.lists(widths, max_size=6).map(tuple),
    widths,
)


@pytest.mark.parametrize(
    "n_x, hidden, n_y, total",
    [
        (377, (64, 32), 9, 26_569),
        (1, (), 1, 2),
        (377, (10_000, 32), 9, 4_100_329),
    ],
)
def test_param_counts_examples(n_x, hidden, n_y, total):
    counts = layer_param_counts(ArchitectureSpec(n_x, hidden, n_y))
    assert counts.total == total
    assert len(counts.per_layer) == len(hidden) + 1


def test_param_counts_per_layer_layout():
    counts = layer_param_counts(ArchitectureSpec(3, (4, 5), 2))
    assert counts.per_layer == ((12, 4), (20, 5), (10, 2))


@given(archs)
def test_param_total_matches_brute_force(arch):
    counts = layer_param_counts(arch)
    assert counts.total == brute_force_params(arch.input_width, arch.hidden_widths, arch.output_width)
    assert counts.total == sum(w + b for w, b in counts.per_layer)


def test_invalid_widths_rejected():
    with pytest.raises(ValueError):
        ArchitectureSpec(0, (4,), 2)
    with pytest.raises(ValueError):
        ArchitectureSpec(3, (4, -1), 2)
    with pytest.raises(TypeError):
        ArchitectureSpec(3, (4.5,), 2)


def test_small_model_size():
    size = model_size_bytes(ArchitectureSpec(377, (64, 32), 9))
    assert size == 26_569
    assert size / MIB == pytest.approx(0.025, abs=0.001)


def test_size_at_5000_hidden_nodes_near_reported():
    size_mb = model_size_bytes(ArchitectureSpec(377, (5000, 32), 9)) / MIB
    assert size_mb == pytest.approx(1.96, abs=0.01)
    assert abs(size_mb - 1.85) / 1.85 < 0.10


def test_overhead_only_profile():
    profile = QuantizationProfile(0, 0, 1234)
    assert model_size_bytes(ArchitectureSpec(377, (64, 32), 9), profile) == 1234


def test_fractional_bytes_round_up():
    profile = QuantizationProfile(Fraction(1, 2), 0, 0)
    # 3 weights at half a byte each
    assert model_size_bytes(ArchitectureSpec(1, (), 3), profile) == 2


@given(archs, st.integers(min_value=0, max_value=6), st.integers(min_value=1, max_value=50))
def test_size_strictly_monotone_in_each_width(arch, which, bump):
    widths = list(arch.widths)
    idx = which % len(widths)
    widths[idx] += bump
    bigger = ArchitectureSpec(widths[0], tuple(widths[1:-1]), widths[-1])
    assert model_size_bytes(bigger) > model_size_bytes(arch)


@pytest.mark.parametrize(
    "arch, expected",
    [
        (ArchitectureSpec(9072, (64,) * 63 + (32,), 9), 9072),
        (ArchitectureSpec(377, (8100, 32), 9), 8100),
        (ArchitectureSpec(5400, (64,) * 15 + (32,), 9), 5400),
    ],
)
def test_max_layer_width(arch, expected):
    assert max_layer_width(arch) == expected


def test_set1_grid():
    specs = generate_grid(Grid.SET1)
    assert len(specs) == 60
    assert {s.depth for s in specs} == {2, 4, 8, 16, 32, 64}
    assert len({s.input_width for s in specs}) == 10
    for s in specs:
        assert s.hidden_widths[:-1] == (64,) * (s.depth - 1)
        assert s.hidden_widths[-1] == 32
        assert s.output_width == 9


def test_set2_grid():
    specs = generate_grid("SET2")
    assert len(specs) == 11
    pairs = [(s.hidden_widths[0], s.hidden_widths[63]) for s in specs]
    assert (512, 128) in pairs and (305, 64) in pairs
    for s in specs:
        assert s.input_width == 5400 and s.depth == 128
        assert len(set(s.hidden_widths[:63])) == 1
        assert len(set(s.hidden_widths[63:127])) == 1
        assert s.hidden_widths[127] == 32


def test_set3_grid():
    specs = generate_grid("set3")
    assert len(specs) == 51
    assert [s.hidden_widths[0] for s in specs] == list(range(5000, 10001, 100))
    assert all(s.hidden_widths[1] == 32 and s.input_width == 377 for s in specs)


def test_set1_size_span():
    sizes = {s: model_size_bytes(s) / MIB for s in generate_grid("set1")}
    assert min(sizes.values()) == pytest.approx(0.025, abs=0.002)
    assert max(sizes.values()) == pytest.approx(2.4, rel=0.1)
    small = [v for s, v in sizes.items() if s.input_width <= 5400]
    assert max(small) < 1.0
    assert 0.03 * 0.8 <= min(small) and max(small) <= 0.93 * 1.2


@pytest.mark.parametrize("grid", list(Grid))
def test_generate_grid_deterministic(grid):
    assert generate_grid(grid) == generate_grid(grid)


def test_json_round_trip():
    arch = ArchitectureSpec(5400, (64, 32), 9)
    assert json.loads(arch.to_json()) == {"input_width": 5400, "hidden_widths": [64, 32], "output_width": 9}
    assert ArchitectureSpec.from_json(arch.to_json()) == arch
    specs = generate_grid("set3")
    assert grid_from_json(grid_to_json(specs)) == specs


def test_from_dict_rejects_missing_keys():
    with pytest.raises(ValueError):
        ArchitectureSpec.from_dict({"input_width": 3, "output_width": 2})


@given(st.lists(st.integers(min_value=1, max_value=600), max_size=20))
def test_hidden_text_round_trip(hidden):
    assert parse_hidden(format_hidden(hidden)) == tuple(hidden)


def test_hidden_text_form():
    assert format_hidden((64,) * 63 + (32,)) == "64x63+32"
