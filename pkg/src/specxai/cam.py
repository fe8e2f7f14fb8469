"""Class activation maps over spectrograms.

In a conv -> global-average-pool -> linear network, the importance of each
spatial cell for class k is the dot product of the final conv features
with row k of the head weights. By construction the spatial mean of that
raw map equals the class logit minus the head bias (the structural
identity this module's tests pin down). Maps are min-max normalized per
map, bilinearly rescaled onto the spectrogram grid, and summarized into
per-frequency-band importance profiles.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dsp import Spectrogram, resize_bilinear
from .errors import InvalidInput, ShapeError

PROFILE_BAND_EDGES = (0.0, 700.0, 1500.0, 2500.0, 4000.0)


@dataclass(frozen=True)
class CamMap:
    raw: np.ndarray  # [h, w] on the final conv grid
    normalized: np.ndarray  # [h, w] in [0, 1]
    upsampled: np.ndarray  # [n_freq_bins, n_frames] in [0, 1]
    class_id: int
    logit: float


@dataclass(frozen=True)
class BandImportance:
    low_hz: float
    high_hz: float
    importance: float
    empty: bool  # no spectrogram rows fell inside the band


@dataclass(frozen=True)
class FrequencyImportance:
    bands: list[BandImportance]
    peak_band: tuple[float, float]


def compute_cam(features: np.ndarray, fc_weights: np.ndarray, class_id: int) -> np.ndarray:
    """raw[x, y] = sum_c w[class_id, c] * features[c, x, y], in float64."""
    if features.ndim != 3 or fc_weights.ndim != 2:
        raise ShapeError(
            f"expected features [C,h,w] and weights [K,C], got "
            f"{features.shape}, {fc_weights.shape}"
        )
    if features.shape[0] != fc_weights.shape[1]:
        raise ShapeError(
            f"channel mismatch: features {features.shape[0]}, weights {fc_weights.shape[1]}"
        )
    if not 0 <= class_id < fc_weights.shape[0]:
        raise InvalidInput(f"class_id {class_id} outside [0, {fc_weights.shape[0]})")
    w = fc_weights[class_id].astype(np.float64)
    return np.tensordot(w, features.astype(np.float64), axes=([0], [0]))


def normalize_cam(raw: np.ndarray) -> np.ndarray:
    """Min-max normalize to [0, 1]; a constant map becomes all zeros."""
    if not np.all(np.isfinite(raw)):
        raise InvalidInput("CAM contains non-finite values")
    lo = raw.min()
    hi = raw.max()
    if hi == lo:
        return np.zeros_like(raw, dtype=np.float64)
    return (raw - lo) / (hi - lo)


def upsample_cam(normalized: np.ndarray, spec: Spectrogram) -> np.ndarray:
    """Rescale a normalized map onto the spectrogram grid (shared bilinear)."""
    return resize_bilinear(normalized, spec.n_bins, spec.n_frames)


def cam_for_class(features, fc_weights, fc_bias, class_id, spec: Spectrogram) -> CamMap:
    """Assemble the full CamMap for one sample and one class."""
    raw = compute_cam(features, fc_weights, class_id)
    normalized = normalize_cam(raw)
    upsampled = upsample_cam(normalized, spec)
    logit = float(raw.mean() + float(fc_bias[class_id]))
    return CamMap(raw, normalized, upsampled, class_id, logit)


def default_bands(f_top: float) -> list[tuple[float, float]]:
    """Band partition of [0, f_top] on the standard analysis edges."""
    edges = [e for e in PROFILE_BAND_EDGES if e < f_top] + [f_top]
    return list(zip(edges[:-1], edges[1:]))


def frequency_profile(
    cam_full: np.ndarray,
    bin_freqs: np.ndarray,
    bands: list[tuple[float, float]],
) -> FrequencyImportance:
    """Mean importance per frequency band, averaged over all frames.

    A row belongs to the band containing its center frequency (low edge
    inclusive; the final band also includes its high edge). Bands must
    tile [0, f_top] contiguously.
    """
    if cam_full.ndim != 2 or cam_full.shape[0] != bin_freqs.shape[0]:
        raise ShapeError(
            f"map rows {cam_full.shape} do not match axis bins {bin_freqs.shape}"
        )
    if not bands:
        raise InvalidInput("need at least one band")
    if bands[0][0] != 0:
        raise InvalidInput(f"bands must start at 0 Hz, got {bands[0][0]}")
    for (lo_a, hi_a), (lo_b, _) in zip(bands, bands[1:]):
        if hi_a != lo_b:
            raise InvalidInput(f"bands not contiguous at {hi_a} != {lo_b}")
    for lo, hi in bands:
        if lo >= hi:
            raise InvalidInput(f"empty band interval ({lo}, {hi})")
    if bands[-1][1] < bin_freqs[-1]:
        raise InvalidInput(
            f"bands end at {bands[-1][1]} Hz but the axis reaches {bin_freqs[-1]} Hz"
        )

    out = []
    for i, (lo, hi) in enumerate(bands):
        if i == len(bands) - 1:
            rows = (bin_freqs >= lo) & (bin_freqs <= hi)
        else:
            rows = (bin_freqs >= lo) & (bin_freqs < hi)
        if rows.any():
            out.append(BandImportance(lo, hi, float(cam_full[rows].mean()), False))
        else:
            out.append(BandImportance(lo, hi, 0.0, True))
    best = max(
        (b for b in out if not b.empty), key=lambda b: b.importance, default=out[0]
    )
    return FrequencyImportance(out, (best.low_hz, best.high_hz))


def save_profile_csv(profile: FrequencyImportance, path) -> None:
    lines = [f"# peak_band = {profile.peak_band[0]:g}-{profile.peak_band[1]:g}"]
    empty = [b for b in profile.bands if b.empty]
    if empty:
        names = ",".join(f"{b.low_hz:g}-{b.high_hz:g}" for b in empty)
        lines.append(f"# empty_bands = {names}")
    lines.append("band_low_hz,band_high_hz,mean_importance")
    for b in profile.bands:
        lines.append(f"{b.low_hz:g},{b.high_hz:g},{b.importance!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
