"""Feed-forward architecture descriptions, exact parameter counting and
quantized model-size estimates.

The three experiment grids used throughout the toolkit live here as well:
``SET1`` (depth x input width), ``SET2`` (hidden-width pairs at fixed depth)
and ``SET3`` (first hidden width sweep).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

MIB = 2 ** 20
KIB = 2 ** 10

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class ArchitectureSpec:
    """Widths of a fully connected network: input, hidden layers, output."""

    input_width: int
    hidden_widths: Tuple[int, ...]
    output_width: int

    def __post_init__(self):
        object.__setattr__(self, "hidden_widths", tuple(self.hidden_widths))
        widths = (self.input_width, *self.hidden_widths, self.output_width)
        for w in widths:
            if isinstance(w, bool) or not isinstance(w, int):
                raise TypeError(f"layer widths must be integers, got {w!r}")
            if w < 1:
                raise ValueError(f"layer widths must be >= 1, got {w}")

    @property
    def depth(self) -> int:
        return len(self.hidden_widths)

    @property
    def widths(self) -> Tuple[int, ...]:
        return (self.input_width, *self.hidden_widths, self.output_width)

    @property
    def first_hidden_width(self) -> int:
        # with no hidden layers the first non-input layer is the output layer
        return self.hidden_widths[0] if self.hidden_widths else self.output_width

    def to_dict(self) -> dict:
        return {
            "input_width": self.input_width,
            "hidden_widths": list(self.hidden_widths),
            "output_width": self.output_width,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ArchitectureSpec":
        if not isinstance(data, dict):
            raise ValueError("architecture must be a JSON object")
        missing = {"input_width", "hidden_widths", "output_width"} - set(data)
        if missing:
            raise ValueError(f"architecture is missing keys: {sorted(missing)}")
        hidden = data["hidden_widths"]
        if not isinstance(hidden, list):
            raise ValueError("hidden_widths must be a list")
        return cls(data["input_width"], tuple(hidden), data["output_width"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ArchitectureSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class QuantizationProfile:
    """Bytes per stored weight and bias plus a fixed serialization overhead.

    The default (1 byte per weight and bias, no overhead) corresponds to
    8-bit integer deployment.
    """

    bytes_per_weight: Number = 1
    bytes_per_bias: Number = 1
    fixed_overhead_bytes: int = 0

    def __post_init__(self):
        if self.bytes_per_weight < 0 or self.bytes_per_bias < 0:
            raise ValueError("bytes per parameter must be non-negative")
        if self.fixed_overhead_bytes < 0:
            raise ValueError("fixed_overhead_bytes must be non-negative")


DEFAULT_PROFILE = QuantizationProfile()


@dataclass(frozen=True)
class ParamBreakdown:
    per_layer: Tuple[Tuple[int, int], ...]
    total: int

    @property
    def weights(self) -> int:
        return sum(w for w, _ in self.per_layer)

    @property
    def biases(self) -> int:
        return sum(b for _, b in self.per_layer)


def layer_param_counts(arch: ArchitectureSpec) -> ParamBreakdown:
    """Weight and bias counts for every hidden layer and the output layer."""
    widths = arch.widths
    per_layer = tuple((widths[k - 1] * widths[k], widths[k]) for k in range(1, len(widths)))
    total = sum(w + b for w, b in per_layer)
    return ParamBreakdown(per_layer, total)


def _exact(x: Number) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def model_size_bytes(arch: ArchitectureSpec, profile: QuantizationProfile = DEFAULT_PROFILE) -> int:
    """Deployed model size in bytes, rounded up to a whole byte."""
    counts = layer_param_counts(arch)
    size = (
        _exact(profile.bytes_per_weight) * counts.weights
        + _exact(profile.bytes_per_bias) * counts.biases
        + profile.fixed_overhead_bytes
    )
    return math.ceil(size)


def model_size_mb(arch: ArchitectureSpec, profile: QuantizationProfile = DEFAULT_PROFILE) -> float:
    return model_size_bytes(arch, profile) / MIB


def first_layer_weight_bytes(arch: ArchitectureSpec, profile: QuantizationProfile = DEFAULT_PROFILE) -> int:
    """Bytes of the weight matrix between the input and the first hidden layer."""
    return math.ceil(_exact(profile.bytes_per_weight) * arch.input_width * arch.first_hidden_width)


def max_layer_width(arch: ArchitectureSpec) -> int:
    return max(arch.widths)


class Grid(str, enum.Enum):
    SET1 = "set1"
    SET2 = "set2"
    SET3 = "set3"


SET1_DEPTHS = (2, 4, 8, 16, 32, 64)
SET1_INPUT_WIDTHS = (377, 1350, 3420, 5400, 9072, 12150, 17424, 22500, 28476, 34875)
SET2_PAIRS = (
    (64, 64), (128, 64), (128, 128),
    (256, 64), (300, 64), (305, 64),
    (310, 64), (256, 128), (256, 256),
    (512, 64), (512, 128),
)
SET2_INPUT_WIDTH = 5400
SET2_DEPTH = 128
SET3_INPUT_WIDTH = 377
SET3_FIRST_WIDTHS = tuple(range(5000, 10001, 100))
LAST_HIDDEN_WIDTH = 32
OUTPUT_WIDTH = 9


def _set1() -> List[ArchitectureSpec]:
    specs = []
    for depth in SET1_DEPTHS:
        hidden = (64,) * (depth - 1) + (LAST_HIDDEN_WIDTH,)
        for n_x in SET1_INPUT_WIDTHS:
            specs.append(ArchitectureSpec(n_x, hidden, OUTPUT_WIDTH))
    return specs


def _set2() -> List[ArchitectureSpec]:
    # layers 1..63 take the first width, 64..127 the second, layer 128 is 32 wide
    specs = []
    for first, second in SET2_PAIRS:
        hidden = (first,) * 63 + (second,) * 64 + (LAST_HIDDEN_WIDTH,)
        specs.append(ArchitectureSpec(SET2_INPUT_WIDTH, hidden, OUTPUT_WIDTH))
    return specs


def _set3() -> List[ArchitectureSpec]:
    return [
        ArchitectureSpec(SET3_INPUT_WIDTH, (w, LAST_HIDDEN_WIDTH), OUTPUT_WIDTH)
        for w in SET3_FIRST_WIDTHS
    ]


def generate_grid(grid_id: Union[Grid, str]) -> List[ArchitectureSpec]:
    """Architectures of one experiment grid, in a fixed order.

    SET1 is ordered depth-major, input width minor.
    """
    grid = Grid(grid_id.lower() if isinstance(grid_id, str) else grid_id)
    return {Grid.SET1: _set1, Grid.SET2: _set2, Grid.SET3: _set3}[grid]()


def grid_to_json(specs: Iterable[ArchitectureSpec]) -> str:
    return json.dumps([s.to_dict() for s in specs])


def grid_from_json(text: str) -> List[ArchitectureSpec]:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("grid must be a JSON array")
    return [ArchitectureSpec.from_dict(d) for d in data]


def format_hidden(hidden: Sequence[int]) -> str:
    """Run-length text form of hidden widths, e.g. ``64x63+32``."""
    runs: List[List[int]] = []
    for w in hidden:
        if runs and runs[-1][0] == w:
            runs[-1][1] += 1
        else:
            runs.append([w, 1])
    return "+".join(f"{w}x{n}" if n > 1 else str(w) for w, n in runs)


def parse_hidden(text: str) -> Tuple[int, ...]:
    if not text:
        return ()
    out: List[int] = []
    for part in text.split("+"):
        width, _, count = part.partition("x")
        out.extend([int(width)] * (int(count) if count else 1))
    return tuple(out)
