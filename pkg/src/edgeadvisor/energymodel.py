"""Per-inference energy prediction from piecewise affine calibration tables.

Each platform carries an ordered list of segments. A segment has a guard
over :class:`ArchFeatures`, the regression variable it reads (model size in
MB or first hidden width in nodes), an affine model and an energy band that
predictions are clamped into. The first segment whose guard matches wins,
so specific segments come first and catch-alls last.
"""

from __future__ import annotations

import json
import logging
import math
import os
import warnings
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from .archmodel import (
    DEFAULT_PROFILE,
    ArchitectureSpec,
    QuantizationProfile,
    max_layer_width,
    model_size_mb,
)
from .placement import DEFAULT_BUDGET, MemoryBudget, Residency, place

logger = logging.getLogger(__name__)

FEATURE_KEYS = ("size_mb", "first_hidden_width")

EDGE_TPU = "edge_tpu"
CORTEX_A53 = "cortex_a53"
I7 = "i7"


class NoSegmentMatches(LookupError):
    """The calibration table has no segment covering the given features."""


class DegenerateInput(ValueError):
    """Fewer than two distinct x values were supplied to a regression."""


class CalibrationError(ValueError):
    """A calibration document is malformed or inconsistent."""


@dataclass(frozen=True)
class AffineModel:
    slope: float
    intercept: float

    def __call__(self, x: float) -> float:
        return self.slope * x + self.intercept


@dataclass(frozen=True)
class ArchFeatures:
    size_mb: float
    input_width: int
    max_width: int
    first_hidden_width: int
    depth: int
    residency: Residency
    max_hidden_width: int = 0

    def to_dict(self) -> dict:
        return {
            "size_mb": self.size_mb,
            "input_width": self.input_width,
            "max_width": self.max_width,
            "first_hidden_width": self.first_hidden_width,
            "depth": self.depth,
            "residency": self.residency.value,
            "max_hidden_width": self.max_hidden_width,
        }


def features(
    arch: ArchitectureSpec,
    profile: QuantizationProfile = DEFAULT_PROFILE,
    budget: MemoryBudget = DEFAULT_BUDGET,
) -> ArchFeatures:
    return ArchFeatures(
        size_mb=model_size_mb(arch, profile),
        input_width=arch.input_width,
        max_width=max_layer_width(arch),
        first_hidden_width=arch.first_hidden_width,
        depth=arch.depth,
        residency=place(arch, profile, budget).residency,
        max_hidden_width=max(arch.hidden_widths, default=0),
    )


@dataclass(frozen=True)
class Guard:
    """Conjunction of optional bounds; an empty guard matches everything."""

    residency: Optional[Residency] = None
    input_width_max: Optional[int] = None
    first_hidden_width_range: Optional[Tuple[int, int]] = None
    max_width_max: Optional[int] = None
    max_hidden_width_max: Optional[int] = None

    def matches(self, f: ArchFeatures) -> bool:
        if self.residency is not None and f.residency != self.residency:
            return False
        if self.input_width_max is not None and f.input_width > self.input_width_max:
            return False
        if self.first_hidden_width_range is not None:
            lo, hi = self.first_hidden_width_range
            if not lo <= f.first_hidden_width <= hi:
                return False
        if self.max_width_max is not None and f.max_width > self.max_width_max:
            return False
        if self.max_hidden_width_max is not None and f.max_hidden_width > self.max_hidden_width_max:
            return False
        return True

    @property
    def is_catch_all(self) -> bool:
        return self == Guard()

    def to_dict(self) -> dict:
        out: dict = {}
        if self.residency is not None:
            out["residency"] = self.residency.value
        if self.input_width_max is not None:
            out["input_width_max"] = self.input_width_max
        if self.first_hidden_width_range is not None:
            out["first_hidden_width_range"] = list(self.first_hidden_width_range)
        if self.max_width_max is not None:
            out["max_width_max"] = self.max_width_max
        if self.max_hidden_width_max is not None:
            out["max_hidden_width_max"] = self.max_hidden_width_max
        return out


@dataclass(frozen=True)
class Segment:
    guard: Guard
    feature: str
    model: AffineModel
    band: Tuple[float, Optional[float]] = (0.0, None)
    confidence: str = "high"
    label: str = ""

    def value(self, f: ArchFeatures) -> float:
        return float(getattr(f, self.feature))

    def raw(self, f: ArchFeatures) -> float:
        return self.model(self.value(f))

    def clamp(self, energy: float) -> float:
        lo, hi = self.band
        if lo is not None:
            energy = max(energy, lo)
        if hi is not None:
            energy = min(energy, hi)
        return energy


@dataclass(frozen=True)
class PlatformProfile:
    name: str
    power_watts: float
    segments: Tuple[Segment, ...]
    power_confidence: str = "high"

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.power_watts > 0:
            raise CalibrationError(f"{self.name}: power_watts must be positive")
        if not self.segments:
            raise CalibrationError(f"{self.name}: at least one segment is required")


def select_segment(platform: PlatformProfile, f: ArchFeatures) -> Segment:
    for seg in platform.segments:
        if seg.guard.matches(f):
            return seg
    raise NoSegmentMatches(f"no calibration segment of {platform.name!r} matches {f}")


def predict_energy_mj(platform: PlatformProfile, f: ArchFeatures) -> float:
    seg = select_segment(platform, f)
    raw = seg.raw(f)
    if raw < 0:
        warnings.warn(
            f"{platform.name}: segment {seg.label or seg.guard} extrapolates to "
            f"{raw:.4g} mJ; clamped to zero",
            RuntimeWarning,
            stacklevel=2,
        )
    return max(seg.clamp(raw), 0.0)


def predict_latency_ms(platform: PlatformProfile, f: ArchFeatures) -> float:
    # mJ / W = ms
    return predict_energy_mj(platform, f) / platform.power_watts


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r: float
    r2: float

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r": self.r, "r2": self.r2}


def fit_affine(points: Iterable[Sequence[float]]) -> FitResult:
    """Ordinary least-squares line through ``(x, y)`` points.

    Raises DegenerateInput when fewer than two distinct x values are given.
    If all y are equal the correlation is undefined and reported as 0.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len({x for x, _ in pts}) < 2:
        raise DegenerateInput("need at least two distinct x values")
    n = len(pts)
    mx = math.fsum(x for x, _ in pts) / n
    my = math.fsum(y for _, y in pts) / n
    sxx = math.fsum((x - mx) ** 2 for x, _ in pts)
    syy = math.fsum((y - my) ** 2 for _, y in pts)
    sxy = math.fsum((x - mx) * (y - my) for x, y in pts)
    if sxx == 0:
        raise DegenerateInput("x values are too close together to fit a slope")
    slope = sxy / sxx
    intercept = my - slope * mx
    if syy == 0:
        r = 0.0
    else:
        r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    return FitResult(slope, intercept, r, r * r)


# --- shipped calibration -----------------------------------------------------

A53_MODEL = AffineModel(2.157, 0.001)
I7_MODEL = AffineModel(13.623, 1.74)
TPU_ON_CHIP_MODEL = AffineModel(0.84, 0.161)
OFF_CHIP_A53_FACTOR = 1.1


def _through(x0: float, y0: float, x1: float, y1: float) -> AffineModel:
    slope = (y1 - y0) / (x1 - x0)
    return AffineModel(slope, y0 - slope * x0)


def default_platforms() -> Dict[str, PlatformProfile]:
    on, off = Residency.ON_CHIP, Residency.OFF_CHIP
    tpu = PlatformProfile(
        EDGE_TPU,
        2.0,
        (
            Segment(
                Guard(residency=on, first_hidden_width_range=(5000, 5999)),
                "first_hidden_width",
                AffineModel(0.0, 0.39),
                (0.39, 0.39),
                label="wide-plateau",
            ),
            Segment(
                Guard(residency=on, first_hidden_width_range=(6000, 8000)),
                "first_hidden_width",
                _through(6000, 0.63, 8000, 0.72),
                (0.63, 0.72),
                label="wide-ramp",
            ),
            Segment(
                Guard(residency=on, input_width_max=5400, max_hidden_width_max=512),
                "size_mb",
                TPU_ON_CHIP_MODEL,
                # measured floor of the on-chip regime; the regression alone dips below it
                (0.29, None),
                label="on-chip",
            ),
            Segment(
                Guard(residency=on),
                "size_mb",
                TPU_ON_CHIP_MODEL,
                (0.29, None),
                confidence="low",
                label="on-chip-extrapolated",
            ),
            Segment(
                Guard(residency=off, first_hidden_width_range=(8100, 10000)),
                "first_hidden_width",
                _through(8100, 1.72, 10000, 2.13),
                (1.72, 2.13),
                label="wide-off-chip",
            ),
            Segment(
                Guard(),
                "size_mb",
                AffineModel(OFF_CHIP_A53_FACTOR * A53_MODEL.slope, OFF_CHIP_A53_FACTOR * A53_MODEL.intercept),
                (0.0, None),
                confidence="low",
                label="off-chip",
            ),
        ),
    )
    a53 = PlatformProfile(CORTEX_A53, 2.0, (Segment(Guard(), "size_mb", A53_MODEL, label="linear"),))
    # RAPL-measured in the source data; 84 W is the i7-4790 TDP, used only for latency
    i7 = PlatformProfile(
        I7, 84.0, (Segment(Guard(), "size_mb", I7_MODEL, label="linear"),), power_confidence="low"
    )
    return {p.name: p for p in (tpu, a53, i7)}


# --- calibration files -------------------------------------------------------

CALIBRATION_ENV = "EDGE_ADVISOR_CALIBRATION"
_GUARD_KEYS = {
    "residency",
    "input_width_max",
    "first_hidden_width_range",
    "max_width_max",
    "max_hidden_width_max",
}


def _guard_from_dict(d: Mapping) -> Guard:
    unknown = set(d) - _GUARD_KEYS
    if unknown:
        raise CalibrationError(f"unknown guard keys: {sorted(unknown)}")
    residency = d.get("residency")
    rng = d.get("first_hidden_width_range")
    if rng is not None:
        if len(rng) != 2 or rng[0] > rng[1]:
            raise CalibrationError(f"bad first_hidden_width_range: {rng}")
        rng = (int(rng[0]), int(rng[1]))
    try:
        return Guard(
            residency=Residency(residency) if residency is not None else None,
            input_width_max=d.get("input_width_max"),
            first_hidden_width_range=rng,
            max_width_max=d.get("max_width_max"),
            max_hidden_width_max=d.get("max_hidden_width_max"),
        )
    except ValueError as exc:
        raise CalibrationError(str(exc)) from exc


def _segment_from_dict(d: Mapping) -> Segment:
    try:
        feature = d["feature"]
        slope = float(d["slope"])
        intercept = float(d["intercept"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CalibrationError(f"segment needs feature, slope and intercept: {d}") from exc
    if feature not in FEATURE_KEYS:
        raise CalibrationError(f"feature must be one of {FEATURE_KEYS}, got {feature!r}")
    band = d.get("band", [0.0, None])
    if len(band) != 2:
        raise CalibrationError(f"band must be [min, max], got {band}")
    lo = None if band[0] is None else float(band[0])
    hi = None if band[1] is None else float(band[1])
    if lo is not None and hi is not None and lo > hi:
        raise CalibrationError(f"band minimum exceeds maximum: {band}")
    confidence = d.get("confidence", "high")
    if confidence not in ("high", "low"):
        raise CalibrationError(f"confidence must be 'high' or 'low', got {confidence!r}")
    return Segment(
        _guard_from_dict(d.get("guard", {})),
        feature,
        AffineModel(slope, intercept),
        (lo, hi),
        confidence,
        d.get("label", ""),
    )


def platform_from_dict(d: Mapping) -> PlatformProfile:
    try:
        name = d["name"]
        power = float(d["power_watts"])
        raw_segments = d["segments"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CalibrationError(f"platform needs name, power_watts and segments: {exc}") from exc
    segments = tuple(_segment_from_dict(s) for s in raw_segments)
    if not segments or not segments[-1].guard.is_catch_all:
        raise CalibrationError(f"{name}: the last segment must be a catch-all (empty guard)")
    return PlatformProfile(name, power, segments, d.get("power_confidence", "high"))


def platform_to_dict(p: PlatformProfile) -> dict:
    return {
        "name": p.name,
        "power_watts": p.power_watts,
        "power_confidence": p.power_confidence,
        "segments": [
            {
                "guard": s.guard.to_dict(),
                "feature": s.feature,
                "slope": s.model.slope,
                "intercept": s.model.intercept,
                "band": list(s.band),
                "confidence": s.confidence,
                "label": s.label,
            }
            for s in p.segments
        ],
    }


def calibration_to_dict(platforms: Mapping[str, PlatformProfile]) -> dict:
    return {"platforms": [platform_to_dict(p) for p in platforms.values()]}


def load_calibration(
    source: Union[str, os.PathLike, Mapping, None] = None,
) -> Dict[str, PlatformProfile]:
    """Shipped defaults overridden, platform by platform, by a calibration file.

    ``source`` may be a path, an already parsed document or ``None``; with
    ``None`` the ``EDGE_ADVISOR_CALIBRATION`` environment variable is used
    when set.
    """
    platforms = default_platforms()
    if source is None:
        source = os.environ.get(CALIBRATION_ENV) or None
        if source is None:
            return platforms
    if isinstance(source, Mapping):
        doc = source
    else:
        try:
            with open(source) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise CalibrationError(f"cannot read calibration file {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CalibrationError(f"calibration file {source} is not valid JSON: {exc}") from exc
    if not isinstance(doc, Mapping) or not isinstance(doc.get("platforms"), list):
        raise CalibrationError("calibration document needs a 'platforms' array")
    for entry in doc["platforms"]:
        p = platform_from_dict(entry)
        if p.name in platforms:
            logger.info("calibration overrides platform %s", p.name)
        platforms[p.name] = p
    return platforms


def segment_band_violations(platform: PlatformProfile, fs: Iterable[ArchFeatures]):
    """Features whose prediction falls outside the band of the segment used."""
    bad = []
    for f in fs:
        seg = select_segment(platform, f)
        e = predict_energy_mj(platform, f)
        lo, hi = seg.band
        if (lo is not None and e < lo) or (hi is not None and e > hi):
            bad.append((f, seg, e))
    return bad
