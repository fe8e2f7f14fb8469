"""Clip-to-image pipeline shared by training, evaluation, and explanation.

A pipeline fixes the STFT parameters, the frequency cap, and the output
image size. Images are single-channel log-magnitude spectrograms resized
with the shared bilinear routine; per-dataset normalization constants are
computed from the train split and stored in the checkpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import AudioClip, read_wav
from .dsp import Spectrogram, StftParams, cap_frequency, log_spectrogram, resize_bilinear
from .errors import InvalidInput
from .manifest import DatasetManifest


@dataclass(frozen=True)
class SpectroPipeline:
    stft_params: StftParams
    f_max: float | None  # None disables capping (full band)
    image_hw: tuple[int, int]

    def spectrogram(self, clip: AudioClip) -> Spectrogram:
        spec = log_spectrogram(clip, self.stft_params)
        if self.f_max is not None:
            spec = cap_frequency(spec, self.f_max)
        return spec

    def image(self, clip: AudioClip) -> np.ndarray:
        """[H, W] float32 image of the (possibly capped) spectrogram."""
        spec = self.spectrogram(clip)
        h, w = self.image_hw
        return resize_bilinear(spec.values, h, w).astype(np.float32)


def load_split(
    manifest: DatasetManifest, root, pipeline: SpectroPipeline, split: str
):
    """Load one split as (images [N,1,H,W] float32, labels [N], sample_rate)."""
    entries = manifest.paths_for(split)
    label_to_id = {label: i for i, label in enumerate(manifest.label_set)}
    images = []
    labels = []
    sample_rate = None
    root = Path(root)
    for e in entries:
        clip = read_wav(root / e.path, label=e.label, source_id=e.path)
        if sample_rate is None:
            sample_rate = clip.sample_rate
        images.append(pipeline.image(clip))
        labels.append(label_to_id[e.label])
    if not images:
        raise InvalidInput(f"manifest has no entries in split {split!r}")
    return (
        np.stack(images)[:, None, :, :],
        np.asarray(labels, dtype=np.int64),
        sample_rate,
    )


def normalization_stats(images: np.ndarray) -> tuple[float, float]:
    """Mean/std of a stack of images, with a variance floor."""
    mean = float(np.mean(images, dtype=np.float64))
    std = float(np.std(images, dtype=np.float64))
    return mean, max(std, 1e-6)


def normalize_images(images: np.ndarray, mean: float, std: float) -> np.ndarray:
    return ((images - mean) / std).astype(np.float32)
