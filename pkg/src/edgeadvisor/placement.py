"""All-or-nothing parameter residency on the Edge TPU.

A model stays entirely in on-chip memory only when its quantized size fits
the on-chip budget and no layer is wider than the usable parameter memory.
Otherwise the input-layer weight block is streamed from off-chip memory and
the rest of the model remains on chip. The off-chip amount therefore depends
only on the input width and the first hidden width, never on depth.

The usable parameter-memory width is ``parameter_memory_width -
reserved_width``. With the defaults (8192 - 128 = 8064) this places the
residency flip between first hidden widths 8000 and 8100.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, List

from .archmodel import (
    DEFAULT_PROFILE,
    MIB,
    ArchitectureSpec,
    QuantizationProfile,
    first_layer_weight_bytes,
    max_layer_width,
    model_size_bytes,
)


class Residency(str, enum.Enum):
    ON_CHIP = "ON_CHIP"
    OFF_CHIP = "OFF_CHIP"


class Trigger(str, enum.Enum):
    NONE = "NONE"
    SIZE_EXCEEDED = "SIZE_EXCEEDED"
    WIDTH_EXCEEDED = "WIDTH_EXCEEDED"
    BOTH = "BOTH"


@dataclass(frozen=True)
class MemoryBudget:
    on_chip_bytes: int = 8 * MIB
    parameter_memory_width: int = 8192
    reserved_width: int = 128

    def __post_init__(self):
        if self.on_chip_bytes <= 0 or self.parameter_memory_width <= 0:
            raise ValueError("memory budget values must be strictly positive")
        if not 0 <= self.reserved_width < self.parameter_memory_width:
            raise ValueError("reserved_width must lie in [0, parameter_memory_width)")

    @property
    def usable_width(self) -> int:
        return self.parameter_memory_width - self.reserved_width


DEFAULT_BUDGET = MemoryBudget()


@dataclass(frozen=True)
class PlacementReport:
    residency: Residency
    on_chip_used_bytes: int
    off_chip_used_bytes: int
    trigger: Trigger
    approximate: bool = True

    @property
    def size_bytes(self) -> int:
        return self.on_chip_used_bytes + self.off_chip_used_bytes

    def to_dict(self) -> dict:
        return {
            "residency": self.residency.value,
            "on_chip_used_bytes": self.on_chip_used_bytes,
            "off_chip_used_bytes": self.off_chip_used_bytes,
            "trigger": self.trigger.value,
            # off-chip split is a first-layer-block approximation of the compiler
            "approximate": self.approximate,
        }


def place(
    arch: ArchitectureSpec,
    profile: QuantizationProfile = DEFAULT_PROFILE,
    budget: MemoryBudget = DEFAULT_BUDGET,
) -> PlacementReport:
    size = model_size_bytes(arch, profile)
    too_big = size > budget.on_chip_bytes
    too_wide = max_layer_width(arch) > budget.usable_width

    if not (too_big or too_wide):
        return PlacementReport(Residency.ON_CHIP, size, 0, Trigger.NONE)

    if too_big and too_wide:
        trigger = Trigger.BOTH
    elif too_big:
        trigger = Trigger.SIZE_EXCEEDED
    else:
        trigger = Trigger.WIDTH_EXCEEDED
    off_chip = min(first_layer_weight_bytes(arch, profile), size)
    return PlacementReport(Residency.OFF_CHIP, size - off_chip, off_chip, trigger)


def placement_sweep(
    specs: Iterable[ArchitectureSpec],
    profile: QuantizationProfile = DEFAULT_PROFILE,
    budget: MemoryBudget = DEFAULT_BUDGET,
) -> List[PlacementReport]:
    return [place(s, profile, budget) for s in specs]
