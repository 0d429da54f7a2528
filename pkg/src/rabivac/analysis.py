"""Estimators for the features of P_e(t) the figures are read for."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .model import ModelParams

MIN_SAMPLES = 16


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class SeriesSummary:
    local_maxima: list = field(default_factory=list)
    local_minima: list = field(default_factory=list)
    dominant_period: Optional[float] = None
    period_uncertainty: Optional[float] = None
    peak_to_trough: float = 0.0


def _check_grid(times, values):
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.ndim != 1:
        raise SeriesError("times and values must be 1-d arrays of equal length")
    if len(times) < MIN_SAMPLES:
        raise SeriesError(f"series too short: {len(times)} samples, need >= {MIN_SAMPLES}")
    steps = np.diff(times)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * max(1.0, abs(steps[0])):
        raise SeriesError("times must be a uniform, strictly increasing grid")
    return times, values


def moving_average(times, values, window: int):
    """Boxcar average over ``window`` samples, keeping only fully covered samples."""
    if window <= 1:
        return times, values
    kernel = np.ones(window) / window
    smooth = np.convolve(values, kernel, mode="valid")
    centers = np.convolve(times, kernel, mode="valid")
    return centers, smooth


def find_extrema(times, values, smoothing_window: int = 1) -> SeriesSummary:
    """Local extrema by three-point comparison, after optional boxcar smoothing.

    The dominant period is the mean spacing of consecutive maxima and its
    uncertainty the standard deviation of those spacings.
    """
    times, values = _check_grid(times, values)
    if smoothing_window < 1:
        raise SeriesError("smoothing_window must be >= 1")
    peak_to_trough = float(values.max() - values.min())
    t, y = moving_average(times, values, smoothing_window)
    if len(y) < 3:
        raise SeriesError("smoothing window leaves fewer than 3 samples")

    left, mid, right = y[:-2], y[1:-1], y[2:]
    imax = np.flatnonzero((mid > left) & (mid >= right)) + 1
    imin = np.flatnonzero((mid < left) & (mid <= right)) + 1
    maxima = [(float(t[i]), float(y[i])) for i in imax]
    minima = [(float(t[i]), float(y[i])) for i in imin]

    period = uncertainty = None
    if len(imax) >= 2:
        spacings = np.diff(t[imax])
        period = float(spacings.mean())
        uncertainty = float(spacings.std())
    return SeriesSummary(maxima, minima, period, uncertainty, peak_to_trough)


def counter_rotating_window(params: ModelParams, dt: float) -> int:
    """Samples spanning one period 2 pi / (omega0 + omega) of the counter-rotating wiggle."""
    return max(1, int(round(2.0 * math.pi / params.bigdelta / dt)))


class EnvelopeModel(str, Enum):
    GAUSSIAN_HALF = "gaussian_half"  # exp(-g^2 t^2 / 2), compared with raw l(t)
    GAUSSIAN = "gaussian"            # exp(-g^2 t^2), compared with normalized P_e


def envelope(times, model, g: float) -> np.ndarray:
    model = EnvelopeModel(model)
    t = np.asarray(times, dtype=float)
    rate = 0.5 if model is EnvelopeModel.GAUSSIAN_HALF else 1.0
    return np.exp(-rate * (g * t) ** 2)


def envelope_check(times, series, model, g: float) -> float:
    """Maximum absolute deviation of ``series`` from the Gaussian envelope."""
    series = np.asarray(series, dtype=float)
    return float(np.max(np.abs(series - envelope(times, model, g))))


@dataclass(frozen=True)
class SeriesComparison:
    max_abs_diff: float
    rms_diff: float
    t_of_max: float


def compare_series(times_a, values_a, times_b, values_b) -> SeriesComparison:
    """Elementwise difference statistics of two series on the same grid."""
    ta, tb = np.asarray(times_a, dtype=float), np.asarray(times_b, dtype=float)
    if ta.shape != tb.shape or not np.allclose(ta, tb, rtol=0.0, atol=1e-12):
        raise SeriesError("series are not sampled on the same grid")
    diff = np.abs(np.asarray(values_a, dtype=float) - np.asarray(values_b, dtype=float))
    i = int(np.argmax(diff))
    return SeriesComparison(float(diff[i]), float(np.sqrt(np.mean(diff**2))), float(ta[i]))
