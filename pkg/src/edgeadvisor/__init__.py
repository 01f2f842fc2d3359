"""Edge inference design-space exploration: model size, Edge TPU memory
placement, per-platform energy and platform recommendation."""

__version__ = "0.1.0"

from .advisor import (
    Platform,
    Recommendation,
    Rule,
    Thresholds,
    ZeroEnergy,
    crossover_size_mb,
    efficiency_ratio,
    recommend,
)
from .archmodel import (
    MIB,
    ArchitectureSpec,
    Grid,
    ParamBreakdown,
    QuantizationProfile,
    generate_grid,
    layer_param_counts,
    max_layer_width,
    model_size_bytes,
    model_size_mb,
)
from .energymodel import (
    AffineModel,
    ArchFeatures,
    CalibrationError,
    DegenerateInput,
    FitResult,
    NoSegmentMatches,
    PlatformProfile,
    default_platforms,
    features,
    fit_affine,
    load_calibration,
    predict_energy_mj,
    predict_latency_ms,
)
from .placement import MemoryBudget, PlacementReport, Residency, Trigger, place, placement_sweep
from .spectro import (
    Spectrogram,
    SpectrogramParams,
    TimeSeriesWindow,
    bicubic_resize,
    flatten_inputs,
    resolution_to_input_width,
    stft_spectrogram,
)
