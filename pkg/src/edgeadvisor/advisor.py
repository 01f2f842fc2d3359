"""Platform selection between the Edge TPU and the Cortex-A53.

Rules are checked in order and the first one that applies decides:

1. size below cross-over point 1            -> Cortex-A53 (TOO_SMALL)
2. widest layer above the parameter memory  -> Cortex-A53 (WIDTH_EXCEEDED)
3. size above cross-over point 2            -> Cortex-A53 (TOO_LARGE)
4. size within the on-chip memory           -> Edge TPU (SWEET_SPOT)
5. otherwise, between on-chip limit and cross-over point 2
                                            -> Edge TPU (MARGINAL_TPU), low confidence
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple, Union

from .energymodel import (
    CORTEX_A53,
    EDGE_TPU,
    AffineModel,
    ArchFeatures,
    PlatformProfile,
    default_platforms,
    predict_energy_mj,
)

# cross-over point 2 is quoted as both 12.5 MB and 13.5 MB in the source data
ALTERNATE_CROSSOVER2_MB = 12.5
WIDTH_WARNING_START = 8000


class Platform(str, enum.Enum):
    EDGE_TPU = "EDGE_TPU"
    CORTEX_A53 = "CORTEX_A53"


class Rule(str, enum.Enum):
    TOO_SMALL = "TOO_SMALL"
    SWEET_SPOT = "SWEET_SPOT"
    WIDTH_EXCEEDED = "WIDTH_EXCEEDED"
    TOO_LARGE = "TOO_LARGE"
    MARGINAL_TPU = "MARGINAL_TPU"


class ZeroEnergy(ZeroDivisionError):
    """The accelerator energy model predicted zero, so no ratio exists."""


@dataclass(frozen=True)
class Thresholds:
    crossover1_mb: float = 0.15
    on_chip_limit_mb: float = 8.0
    width_limit: int = 8192
    crossover2_mb: float = 13.5

    def __post_init__(self):
        if min(self.crossover1_mb, self.on_chip_limit_mb, self.crossover2_mb) <= 0 or self.width_limit <= 0:
            raise ValueError("thresholds must be positive")
        if not self.crossover1_mb < self.on_chip_limit_mb < self.crossover2_mb:
            raise ValueError("need crossover1_mb < on_chip_limit_mb < crossover2_mb")

    def scaled(self, factor: float) -> "Thresholds":
        """Same thresholds with every size limit multiplied by ``factor``."""
        return Thresholds(
            self.crossover1_mb * factor,
            self.on_chip_limit_mb * factor,
            self.width_limit,
            self.crossover2_mb * factor,
        )

    def to_dict(self) -> dict:
        return {
            "crossover1_mb": self.crossover1_mb,
            "on_chip_limit_mb": self.on_chip_limit_mb,
            "width_limit": self.width_limit,
            "crossover2_mb": self.crossover2_mb,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Thresholds":
        unknown = set(d) - set(cls().to_dict())
        if unknown:
            raise ValueError(f"unknown threshold keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "Thresholds":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class Recommendation:
    platform: Platform
    rule_fired: Rule
    rationale: str
    predicted_energy_mj: Dict[str, float] = field(default_factory=dict)
    warnings: Tuple[str, ...] = ()
    confidence: str = "high"

    def to_dict(self) -> dict:
        return {
            "platform": self.platform.value,
            "rule_fired": self.rule_fired.value,
            "rationale": self.rationale,
            "confidence": self.confidence,
            "predicted_energy_mj": dict(self.predicted_energy_mj),
            "warnings": list(self.warnings),
        }


def decide(size_mb: float, max_width: int, t: Thresholds = DEFAULT_THRESHOLDS) -> Tuple[Platform, Rule]:
    """Bare decision chart on model size and widest layer."""
    if size_mb < t.crossover1_mb:
        return Platform.CORTEX_A53, Rule.TOO_SMALL
    if max_width > t.width_limit:
        return Platform.CORTEX_A53, Rule.WIDTH_EXCEEDED
    if size_mb > t.crossover2_mb:
        return Platform.CORTEX_A53, Rule.TOO_LARGE
    if size_mb <= t.on_chip_limit_mb:
        return Platform.EDGE_TPU, Rule.SWEET_SPOT
    return Platform.EDGE_TPU, Rule.MARGINAL_TPU


def _rationale(rule: Rule, size_mb: float, max_width: int, t: Thresholds) -> str:
    if rule is Rule.TOO_SMALL:
        return (
            f"model size {size_mb:.4g} MB is below cross-over point 1 ({t.crossover1_mb:g} MB); "
            "the Cortex-A53 is more energy efficient for models this small"
        )
    if rule is Rule.WIDTH_EXCEEDED:
        return (
            f"widest layer has {max_width} nodes, more than the {t.width_limit}-entry on-chip "
            "parameter memory; parameters are streamed off-chip and the Cortex-A53 is more efficient"
        )
    if rule is Rule.TOO_LARGE:
        return (
            f"model size {size_mb:.4g} MB exceeds cross-over point 2 ({t.crossover2_mb:g} MB); "
            "the Cortex-A53 is more efficient"
        )
    if rule is Rule.SWEET_SPOT:
        return (
            f"model size {size_mb:.4g} MB fits the {t.on_chip_limit_mb:g} MB on-chip memory and "
            f"the widest layer ({max_width} nodes) fits the parameter memory; "
            "the Edge TPU runs at its sweet spot"
        )
    return (
        f"model size {size_mb:.4g} MB exceeds the {t.on_chip_limit_mb:g} MB on-chip memory but is "
        f"below cross-over point 2 ({t.crossover2_mb:g} MB); the Edge TPU is expected to stay "
        "ahead by a small margin (low confidence)"
    )


def recommend(
    f: ArchFeatures,
    t: Thresholds = DEFAULT_THRESHOLDS,
    platforms: Optional[Mapping[str, PlatformProfile]] = None,
) -> Recommendation:
    platform, rule = decide(f.size_mb, f.max_width, t)
    if platforms is None:
        platforms = default_platforms()
    energies = {name: predict_energy_mj(p, f) for name, p in platforms.items()}

    notes = []
    if WIDTH_WARNING_START <= f.max_width <= t.width_limit:
        notes.append(
            f"widest layer ({f.max_width}) is in the [{WIDTH_WARNING_START}, {t.width_limit}] "
            f"warning zone; keep layers below {WIDTH_WARNING_START} nodes to stay on chip"
        )
    if rule in (Rule.TOO_LARGE, Rule.MARGINAL_TPU) or (
        ALTERNATE_CROSSOVER2_MB < f.size_mb <= t.crossover2_mb
    ):
        notes.append(
            f"cross-over point 2 is reported both as {ALTERNATE_CROSSOVER2_MB:g} MB and 13.5 MB; "
            f"using {t.crossover2_mb:g} MB"
        )
    return Recommendation(
        platform,
        rule,
        _rationale(rule, f.size_mb, f.max_width, t),
        energies,
        tuple(notes),
        "low" if rule is Rule.MARGINAL_TPU else "high",
    )


def efficiency_ratio(f: ArchFeatures, tpu: PlatformProfile, a53: PlatformProfile) -> float:
    """Cortex-A53 energy over Edge TPU energy; above 1 favours the TPU."""
    e_tpu = predict_energy_mj(tpu, f)
    if e_tpu == 0:
        raise ZeroEnergy(f"{tpu.name} predicts zero energy for {f}")
    return predict_energy_mj(a53, f) / e_tpu


def crossover_size_mb(a: AffineModel, b: AffineModel) -> float:
    """Size at which two size-keyed affine energy models intersect."""
    if a.slope == b.slope:
        raise ValueError("parallel models never cross")
    return (b.intercept - a.intercept) / (a.slope - b.slope)


def default_platform_pair(platforms: Optional[Mapping[str, PlatformProfile]] = None):
    platforms = default_platforms() if platforms is None else platforms
    return platforms[EDGE_TPU], platforms[CORTEX_A53]
