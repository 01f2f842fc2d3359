"""Evaluate architectures end to end and tabulate the results."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional

from .advisor import DEFAULT_THRESHOLDS, Recommendation, Thresholds, efficiency_ratio, recommend
from .archmodel import (
    DEFAULT_PROFILE,
    KIB,
    ArchitectureSpec,
    QuantizationProfile,
    format_hidden,
)
from .energymodel import (
    CORTEX_A53,
    EDGE_TPU,
    I7,
    ArchFeatures,
    PlatformProfile,
    default_platforms,
    features,
    predict_energy_mj,
    predict_latency_ms,
    select_segment,
)
from .placement import DEFAULT_BUDGET, MemoryBudget, PlacementReport, place

CSV_COLUMNS = (
    "input_width",
    "depth",
    "hidden_spec",
    "size_mb",
    "residency",
    "on_chip_kb",
    "off_chip_kb",
    "e_tpu_mj",
    "e_a53_mj",
    "e_i7_mj",
    "ratio",
    "recommendation",
    "rule",
    "low_confidence",
)

UNITS = {
    "size_mb": "MB = 2**20 bytes",
    "on_chip_kb": "KB = 2**10 bytes",
    "off_chip_kb": "KB = 2**10 bytes",
    "e_tpu_mj": "mJ per inference",
    "e_a53_mj": "mJ per inference",
    "e_i7_mj": "mJ per inference",
    "ratio": "Cortex-A53 energy / Edge TPU energy",
}


def fmt(x: float) -> str:
    return f"{x:.6g}"


@dataclass(frozen=True)
class SweepRow:
    spec: ArchitectureSpec
    features: ArchFeatures
    placement: PlacementReport
    energy_mj: Dict[str, float]
    latency_ms: Dict[str, float]
    ratio: float
    recommendation: Recommendation
    low_confidence: tuple

    @property
    def size_mb(self) -> float:
        return self.features.size_mb

    @property
    def on_chip_kb(self) -> float:
        return self.placement.on_chip_used_bytes / KIB

    @property
    def off_chip_kb(self) -> float:
        return self.placement.off_chip_used_bytes / KIB

    def csv_record(self) -> Dict[str, str]:
        return {
            "input_width": str(self.spec.input_width),
            "depth": str(self.spec.depth),
            "hidden_spec": format_hidden(self.spec.hidden_widths),
            "size_mb": fmt(self.size_mb),
            "residency": self.placement.residency.value,
            "on_chip_kb": fmt(self.on_chip_kb),
            "off_chip_kb": fmt(self.off_chip_kb),
            "e_tpu_mj": fmt(self.energy_mj[EDGE_TPU]),
            "e_a53_mj": fmt(self.energy_mj[CORTEX_A53]),
            "e_i7_mj": fmt(self.energy_mj[I7]),
            "ratio": fmt(self.ratio),
            "recommendation": self.recommendation.platform.value,
            "rule": self.recommendation.rule_fired.value,
            "low_confidence": ";".join(self.low_confidence),
        }

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "features": self.features.to_dict(),
            "placement": self.placement.to_dict(),
            "energy_mj": dict(self.energy_mj),
            "latency_ms": dict(self.latency_ms),
            "ratio": self.ratio,
            "recommendation": self.recommendation.to_dict(),
            "low_confidence": list(self.low_confidence),
            "row": self.csv_record(),
        }


def evaluate(
    spec: ArchitectureSpec,
    profile: QuantizationProfile = DEFAULT_PROFILE,
    budget: MemoryBudget = DEFAULT_BUDGET,
    platforms: Optional[Mapping[str, PlatformProfile]] = None,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> SweepRow:
    platforms = default_platforms() if platforms is None else platforms
    f = features(spec, profile, budget)
    energies = {name: predict_energy_mj(p, f) for name, p in platforms.items()}
    latencies = {name: predict_latency_ms(p, f) for name, p in platforms.items()}
    low = tuple(
        name for name, p in platforms.items() if select_segment(p, f).confidence == "low"
    )
    return SweepRow(
        spec=spec,
        features=f,
        placement=place(spec, profile, budget),
        energy_mj=energies,
        latency_ms=latencies,
        ratio=efficiency_ratio(f, platforms[EDGE_TPU], platforms[CORTEX_A53]),
        recommendation=recommend(f, thresholds, platforms),
        low_confidence=low,
    )


def sweep(specs: Iterable[ArchitectureSpec], **kwargs) -> List[SweepRow]:
    return [evaluate(s, **kwargs) for s in specs]


def rows_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.csv_record())
    return buf.getvalue()


def rows_to_json(rows: Iterable[SweepRow]) -> str:
    return json.dumps([r.to_dict() for r in rows], indent=2, sort_keys=True) + "\n"


def describe(row: SweepRow) -> str:
    """Human-readable report for a single architecture."""
    s, p, rec = row.spec, row.placement, row.recommendation
    lines = [
        f"architecture   : {s.input_width} -> [{format_hidden(s.hidden_widths)}] -> {s.output_width}"
        f" (depth {s.depth})",
        f"model size     : {row.size_mb:.6g} MB ({p.size_bytes} bytes)",
        f"placement      : {p.residency.value} (trigger {p.trigger.value}); "
        f"on-chip {row.on_chip_kb:.6g} KB, off-chip {row.off_chip_kb:.6g} KB",
    ]
    for name in row.energy_mj:
        lines.append(
            f"energy         : {name} {row.energy_mj[name]:.6g} mJ, latency {row.latency_ms[name]:.6g} ms"
        )
    lines.append(f"A53/TPU ratio  : {row.ratio:.6g}")
    lines.append(f"recommendation : {rec.platform.value} [{rec.rule_fired.value}]")
    lines.append(f"rationale      : {rec.rationale}")
    for w in rec.warnings:
        lines.append(f"warning        : {w}")
    if row.low_confidence:
        lines.append(f"low confidence : {', '.join(row.low_confidence)} energy from extrapolated defaults")
    return "\n".join(lines)
