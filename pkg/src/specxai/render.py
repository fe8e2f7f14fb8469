"""Heatmap overlays: grayscale spectrogram + color-ramped CAM -> RGB PNG.

The importance ramp is a fixed 5-stop gradient, linearly interpolated:
0.00 blue (0,0,255) -> 0.25 cyan (0,255,255) -> 0.50 green (0,255,0)
-> 0.75 yellow (255,255,0) -> 1.00 red (255,0,0). Blending is per pixel:
out = (1-alpha)*gray + alpha*ramp(cam). Images are drawn with low
frequencies at the bottom.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

from .dsp import Spectrogram
from .errors import InvalidInput, ShapeError

RAMP_POSITIONS = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
RAMP_COLORS = np.array(
    [
        [0, 0, 255],
        [0, 255, 255],
        [0, 255, 0],
        [255, 255, 0],
        [255, 0, 0],
    ],
    dtype=np.float64,
)


def color_ramp(values: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] to ramp RGB (float, 0..255)."""
    v = np.asarray(values, dtype=np.float64)
    if v.min() < -1e-9 or v.max() > 1 + 1e-9:
        raise InvalidInput("ramp input must lie in [0, 1]")
    v = np.clip(v, 0.0, 1.0)
    out = np.empty(v.shape + (3,), dtype=np.float64)
    for ch in range(3):
        out[..., ch] = np.interp(v, RAMP_POSITIONS, RAMP_COLORS[:, ch])
    return out


def grayscale(values: np.ndarray) -> np.ndarray:
    """Min-max map to [0, 1]; a constant image maps to all zeros."""
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.zeros_like(values, dtype=np.float64)
    return (values - lo) / (hi - lo)


def overlay(spec: Spectrogram, cam_full: np.ndarray, alpha: float = 0.45) -> np.ndarray:
    """Blend a CAM onto its spectrogram; returns uint8 RGB [H, W, 3].

    Row 0 of the output is the highest frequency (low Hz at the bottom).
    """
    if not 0 <= alpha <= 1:
        raise InvalidInput(f"alpha must lie in [0, 1], got {alpha}")
    if cam_full.shape != spec.values.shape:
        raise ShapeError(
            f"CAM shape {cam_full.shape} != spectrogram shape {spec.values.shape}"
        )
    gray = grayscale(spec.values)[..., None] * 255.0
    heat = color_ramp(cam_full)
    blended = (1.0 - alpha) * gray + alpha * heat
    flipped = np.flipud(np.rint(blended).astype(np.uint8))
    return np.ascontiguousarray(flipped)


def save_png(rgb: np.ndarray, path) -> None:
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise InvalidInput("expected a uint8 [H, W, 3] array")
    Image.fromarray(rgb, mode="RGB").save(path, format="PNG")
