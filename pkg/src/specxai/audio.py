"""Audio clips and WAV file I/O.

Clips hold mono float samples in [-1, 1]. WAV reading accepts PCM 16-bit
and IEEE float32 RIFF files; multichannel input is averaged down to mono.
16-bit samples are normalized by 1/32768. Writing always emits PCM 16-bit
mono.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

from .errors import InvalidInput

PCM16_SCALE = 32768.0


@dataclass(frozen=True)
class AudioClip:
    """A labeled mono sample buffer.

    samples are float64 in [-1, 1]; source_id is a provenance tag (for
    synthesized or extracted clips, the relative path the clip is stored
    under).
    """

    samples: np.ndarray
    sample_rate: int
    label: str = ""
    source_id: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise InvalidInput("clip samples must be a nonempty 1-D array")
        if not np.all(np.isfinite(samples)):
            raise InvalidInput("clip samples must be finite")
        if np.max(np.abs(samples)) > 1.0 + 1e-9:
            raise InvalidInput("clip samples must lie in [-1, 1]")
        object.__setattr__(self, "samples", samples)
        if self.sample_rate <= 0:
            raise InvalidInput(f"sample_rate must be positive, got {self.sample_rate}")

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def with_label(self, label: str) -> "AudioClip":
        return AudioClip(self.samples, self.sample_rate, label, self.source_id)


def read_wav(path, label: str = "", source_id: str = "") -> AudioClip:
    """Read a RIFF WAV file (PCM16 or float32) into a mono AudioClip."""
    rate, data = wavfile.read(path)
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / PCM16_SCALE
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise InvalidInput(
            f"{path}: unsupported WAV sample format {data.dtype} "
            "(expected int16 or float32)"
        )
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    samples = np.clip(samples, -1.0, 1.0)
    return AudioClip(samples, int(rate), label, source_id or str(path))


def write_wav(path, clip: AudioClip) -> None:
    """Write a clip as PCM 16-bit mono."""
    pcm = np.clip(np.round(clip.samples * PCM16_SCALE), -32768, 32767).astype(np.int16)
    wavfile.write(path, clip.sample_rate, pcm)
