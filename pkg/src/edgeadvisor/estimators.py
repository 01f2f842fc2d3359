"""scikit-learn compatible wrappers.

These let the analysis take part in ``Pipeline`` / ``GridSearchCV`` style
workflows: architectures in, feature matrices or energies out, and
spectrogram windows in, flattened network inputs out.
"""

from __future__ import annotations

from typing import Iterable, List, Optional

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .archmodel import DEFAULT_PROFILE, ArchitectureSpec, QuantizationProfile
from .energymodel import (
    EDGE_TPU,
    features,
    fit_affine,
    load_calibration,
    predict_energy_mj,
    predict_latency_ms,
)
from .placement import DEFAULT_BUDGET, MemoryBudget, Residency
from .spectro import (
    SpectrogramParams,
    TimeSeriesWindow,
    bicubic_resize,
    flatten_inputs,
    stft_spectrogram,
)

FEATURE_NAMES = (
    "size_mb",
    "input_width",
    "max_width",
    "first_hidden_width",
    "depth",
    "on_chip",
)


def check_architectures(X) -> List[ArchitectureSpec]:
    """Coerce specs, dicts or JSON strings into a list of ArchitectureSpec."""
    if isinstance(X, (ArchitectureSpec, dict, str)):
        raise ValueError("expected a sequence of architectures, got a single one")
    out = []
    for item in X:
        if isinstance(item, ArchitectureSpec):
            out.append(item)
        elif isinstance(item, dict):
            out.append(ArchitectureSpec.from_dict(item))
        elif isinstance(item, str):
            out.append(ArchitectureSpec.from_json(item))
        else:
            raise TypeError(f"cannot interpret {type(item).__name__} as an architecture")
    if not out:
        raise ValueError("no architectures given")
    return out


class ArchitectureFeaturizer(TransformerMixin, BaseEstimator):
    """Turn architectures into the numeric features the energy tables use."""

    def __init__(self, profile: QuantizationProfile = DEFAULT_PROFILE, budget: MemoryBudget = DEFAULT_BUDGET):
        self.profile = profile
        self.budget = budget

    def fit(self, X, y=None):
        check_architectures(X)
        self.n_features_out_ = len(FEATURE_NAMES)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "n_features_out_")
        rows = []
        for spec in check_architectures(X):
            f = features(spec, self.profile, self.budget)
            rows.append([
                f.size_mb,
                f.input_width,
                f.max_width,
                f.first_hidden_width,
                f.depth,
                float(f.residency is Residency.ON_CHIP),
            ])
        return np.asarray(rows, dtype=float)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURE_NAMES, dtype=object)


class PlatformEnergyRegressor(RegressorMixin, BaseEstimator):
    """Predict per-inference energy (mJ) of architectures on one platform.

    ``fit`` only resolves the calibration; the shipped tables are not
    re-estimated from ``y``. Use :class:`AffineRegressor` to derive new
    coefficients from measurements.
    """

    def __init__(
        self,
        platform: str = EDGE_TPU,
        calibration=None,
        profile: QuantizationProfile = DEFAULT_PROFILE,
        budget: MemoryBudget = DEFAULT_BUDGET,
    ):
        self.platform = platform
        self.calibration = calibration
        self.profile = profile
        self.budget = budget

    def fit(self, X, y=None):
        check_architectures(X)
        platforms = load_calibration(self.calibration)
        if self.platform not in platforms:
            raise ValueError(f"unknown platform {self.platform!r}; known: {sorted(platforms)}")
        self.platform_ = platforms[self.platform]
        return self

    def _features(self, X):
        check_is_fitted(self, "platform_")
        return [features(s, self.profile, self.budget) for s in check_architectures(X)]

    def predict(self, X) -> np.ndarray:
        return np.array([predict_energy_mj(self.platform_, f) for f in self._features(X)])

    def predict_latency(self, X) -> np.ndarray:
        return np.array([predict_latency_ms(self.platform_, f) for f in self._features(X)])


class AffineRegressor(RegressorMixin, BaseEstimator):
    """Single-feature least-squares line with correlation diagnostics."""

    def fit(self, X, y):
        X = check_array(X, ensure_2d=False)
        y = check_array(y, ensure_2d=False)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise ValueError(f"AffineRegressor takes one feature, got {X.shape[1]}")
            X = X[:, 0]
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y lengths differ")
        result = fit_affine(zip(X, y))
        self.coef_ = np.array([result.slope])
        self.intercept_ = result.intercept
        self.r_ = result.r
        self.r2_ = result.r2
        self.n_features_in_ = 1
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "coef_")
        X = check_array(X, ensure_2d=False)
        if X.ndim == 2:
            X = X[:, 0]
        return self.coef_[0] * X + self.intercept_


class SpectrogramTransformer(TransformerMixin, BaseEstimator):
    """Multi-axis windows ``(n_windows, axes, samples)`` to flattened inputs.

    Each axis is turned into a power spectrogram, rescaled to
    ``resolution_percent`` and the grids are concatenated in axis order.
    """

    def __init__(
        self,
        window_kind: str = "hann",
        window_length: int = 64,
        hop: int = 12,
        normalize: bool = True,
        resolution_percent: int = 100,
        sample_rate_hz: float = 50.0,
    ):
        self.window_kind = window_kind
        self.window_length = window_length
        self.hop = hop
        self.normalize = normalize
        self.resolution_percent = resolution_percent
        self.sample_rate_hz = sample_rate_hz

    def _check(self, X) -> np.ndarray:
        X = check_array(X, allow_nd=True, ensure_2d=False)
        if X.ndim == 2:
            X = X[:, None, :]
        if X.ndim != 3:
            raise ValueError("expected windows shaped (n_windows, axes, samples)")
        return X

    def fit(self, X, y=None):
        X = self._check(X)
        self.params_ = SpectrogramParams(self.window_kind, self.window_length, self.hop, self.normalize)
        if self.window_length > X.shape[2]:
            raise ValueError(f"window_length {self.window_length} exceeds {X.shape[2]} samples")
        self.n_axes_ = X.shape[1]
        self.n_samples_ = X.shape[2]
        return self

    def _one(self, window: np.ndarray) -> np.ndarray:
        w = TimeSeriesWindow.from_samples(window, self.sample_rate_hz)
        grids = [
            bicubic_resize(stft_spectrogram(w, axis, self.params_), self.resolution_percent)
            for axis in range(w.n_axes)
        ]
        return flatten_inputs(grids)

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "params_")
        X = self._check(X)
        if X.shape[1:] != (self.n_axes_, self.n_samples_):
            raise ValueError(
                f"fitted on windows of shape {(self.n_axes_, self.n_samples_)}, got {X.shape[1:]}"
            )
        return np.vstack([self._one(x) for x in X])
