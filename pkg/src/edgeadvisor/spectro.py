"""Power spectrograms of multi-axis sensor windows, bicubic resolution
scaling and flattening into network input vectors.

For frame ``f`` and one-sided bin ``k`` the grid holds::

    S[k, f] = | sum_n x[n] * w[n - f*hop] * exp(-2j*pi*k*n / N) |**2

where ``w`` is an ``N``-sample analysis window. Only the phase of the
exponential depends on the absolute sample index, so each frame is computed
with a real FFT of the windowed segment.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import get_window

RESOLUTION_INPUT_WIDTHS = {
    10: 377,
    20: 1350,
    30: 3420,
    40: 5400,
    50: 9072,
    60: 12150,
    70: 17424,
    80: 22500,
    90: 28476,
    100: 34875,
}


class ParamsExceedWindow(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class UnknownResolution(ValueError):
    pass


class WindowKind(str, enum.Enum):
    HANN = "hann"
    HAMMING = "hamming"
    RECTANGULAR = "rectangular"


@dataclass(frozen=True)
class TimeSeriesWindow:
    samples: np.ndarray
    sample_rate_hz: float = 50.0
    window_seconds: float = 10.0

    def __post_init__(self):
        samples = np.atleast_2d(np.asarray(self.samples, dtype=float))
        object.__setattr__(self, "samples", samples)
        if self.sample_rate_hz <= 0 or self.window_seconds <= 0:
            raise ValueError("sample rate and window length must be positive")
        expected = round(self.sample_rate_hz * self.window_seconds)
        if samples.shape[1] != expected:
            raise ValueError(
                f"window holds {samples.shape[1]} samples, expected {expected} "
                f"({self.sample_rate_hz} Hz x {self.window_seconds} s)"
            )

    @property
    def n_axes(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @classmethod
    def from_samples(cls, samples, sample_rate_hz: float = 50.0) -> "TimeSeriesWindow":
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        return cls(samples, sample_rate_hz, samples.shape[1] / sample_rate_hz)


@dataclass(frozen=True)
class SpectrogramParams:
    window_kind: WindowKind = WindowKind.HANN
    window_length: int = 64
    hop: int = 12
    normalize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "window_kind", WindowKind(self.window_kind))
        if self.window_length < 1 or self.hop < 1:
            raise ValueError("window_length and hop must be positive")
        if self.hop > self.window_length:
            raise ValueError("hop must not exceed window_length")

    def window(self) -> np.ndarray:
        if self.window_kind is WindowKind.RECTANGULAR:
            return np.ones(self.window_length)
        # periodic (DFT-even) windows
        return get_window(self.window_kind.value, self.window_length, fftbins=True)


@dataclass(frozen=True)
class Spectrogram:
    grid: np.ndarray
    resolution_percent: int = 100

    @property
    def shape(self) -> Tuple[int, int]:
        return self.grid.shape

    @property
    def pixels(self) -> int:
        return self.grid.size


def normalize_grid(grid: np.ndarray) -> np.ndarray:
    peak = grid.max(initial=0.0)
    return grid / peak if peak > 0 else np.zeros_like(grid)


def stft_spectrogram(
    w: TimeSeriesWindow, axis: int = 0, p: SpectrogramParams = SpectrogramParams()
) -> Spectrogram:
    """Power spectrogram of one axis, shape ``(window_length // 2 + 1, frames)``."""
    if not 0 <= axis < w.n_axes:
        raise IndexError(f"axis {axis} out of range for {w.n_axes} axes")
    if p.window_length > w.n_samples:
        raise ParamsExceedWindow(
            f"window_length {p.window_length} exceeds the {w.n_samples}-sample window"
        )
    x = w.samples[axis]
    n_frames = 1 + (w.n_samples - p.window_length) // p.hop
    starts = np.arange(n_frames) * p.hop
    frames = x[starts[:, None] + np.arange(p.window_length)] * p.window()
    grid = np.abs(np.fft.rfft(frames, axis=1)) ** 2
    grid = grid.T
    if p.normalize:
        grid = normalize_grid(grid)
    return Spectrogram(grid, 100)


def cubic_kernel(x, a: float = -0.5):
    """Cubic convolution kernel; ``a = -0.5`` is the usual bicubic choice."""
    x = np.abs(np.asarray(x, dtype=float))
    near = ((a + 2) * x - (a + 3)) * x * x + 1
    far = ((a * x - 5 * a) * x + 8 * a) * x - 4 * a
    return np.where(x <= 1, near, np.where(x < 2, far, 0.0))


def scaled_length(n: int, resolution_percent: int) -> int:
    # round half up, never below one pixel
    return max(1, (n * resolution_percent + 50) // 100)


def _resample_matrix(n_in: int, n_out: int, a: float) -> np.ndarray:
    scale = n_in / n_out
    src = (np.arange(n_out) + 0.5) * scale - 0.5
    base = np.floor(src).astype(int)
    m = np.zeros((n_out, n_in))
    rows = np.arange(n_out)
    for off in (-1, 0, 1, 2):
        idx = base + off
        weights = cubic_kernel(src - idx, a)
        np.add.at(m, (rows, np.clip(idx, 0, n_in - 1)), weights)
    return m


def bicubic_resize(s: Spectrogram, resolution_percent: int, a: float = -0.5) -> Spectrogram:
    """Scale both grid dimensions to ``resolution_percent`` of the original.

    Sample positions follow pixel-centre alignment and out-of-range taps
    clamp to the nearest edge pixel. No anti-alias prefilter is applied.
    """
    if not 10 <= resolution_percent <= 100:
        raise ValueError(f"resolution_percent must lie in [10, 100], got {resolution_percent}")
    rows, cols = s.grid.shape
    out_rows = scaled_length(rows, resolution_percent)
    out_cols = scaled_length(cols, resolution_percent)
    if (out_rows, out_cols) == (rows, cols):
        return Spectrogram(s.grid.copy(), resolution_percent)
    mr = _resample_matrix(rows, out_rows, a)
    mc = _resample_matrix(cols, out_cols, a)
    return Spectrogram(mr @ s.grid @ mc.T, resolution_percent)


def flatten_inputs(spectrograms: Sequence[Spectrogram]) -> np.ndarray:
    """Concatenate grids row-major, one after another in axis order."""
    if not spectrograms:
        return np.empty(0)
    shape = spectrograms[0].grid.shape
    for s in spectrograms[1:]:
        if s.grid.shape != shape:
            raise DimensionMismatch(f"grid shapes differ: {shape} vs {s.grid.shape}")
    return np.concatenate([s.grid.ravel(order="C") for s in spectrograms])


def resolution_to_input_width(resolution_percent: int) -> int:
    try:
        return RESOLUTION_INPUT_WIDTHS[resolution_percent]
    except KeyError:
        raise UnknownResolution(
            f"no input width tabulated for {resolution_percent}%; use one of "
            f"{sorted(RESOLUTION_INPUT_WIDTHS)}"
        ) from None


# --- file formats ------------------------------------------------------------

def read_timeseries_csv(path) -> Tuple[np.ndarray, np.ndarray]:
    """Read ``timestamp, axis0, axis1, ...`` rows.

    A non-numeric first row is treated as a header. Returns the timestamps
    and a ``(axes, samples)`` array.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if rows:
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    if width < 2:
        raise ValueError(f"{path}: need a timestamp column and at least one axis")
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: rows have inconsistent column counts")
    try:
        data = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric value ({exc})") from None
    return data[:, 0], data[:, 1:].T


def write_grid_csv(path, grid: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in grid:
            writer.writerow(f"{v:.6g}" for v in row)


def write_pgm(path, grid: np.ndarray, maxval: int = 255) -> None:
    """Plain-text portable graymap (P2), scaled so the peak maps to ``maxval``."""
    scaled = normalize_grid(np.clip(grid, 0, None))
    pixels = np.rint(scaled * maxval).astype(int)
    lines = ["P2", f"{grid.shape[1]} {grid.shape[0]}", str(maxval)]
    lines += [" ".join(str(v) for v in row) for row in pixels]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
