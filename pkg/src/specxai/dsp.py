"""Spectrogram computation: STFT, dB conversion, frequency capping, resizing.

Framing convention: frame t covers samples [t*hop, t*hop + window_len), no
centering, full windows only. Clips shorter than one window are zero-padded
up to window_len so every clip yields at least one frame. The window is a
periodic Hann; frames are zero-padded to fft_size before the FFT.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioClip
from .errors import InvalidInput

MAG_EPS = 1e-10  # added to |STFT| before the log so silence stays finite


@dataclass(frozen=True)
class StftParams:
    fft_size: int = 512
    window_len: int = 512
    hop: int = 128
    db_floor: float = -80.0

    def __post_init__(self):
        if self.fft_size < 2 or self.fft_size & (self.fft_size - 1):
            raise InvalidInput(f"fft_size must be a power of two, got {self.fft_size}")
        if not 0 < self.hop <= self.window_len <= self.fft_size:
            raise InvalidInput(
                f"need 0 < hop <= window_len <= fft_size, got "
                f"hop={self.hop} window_len={self.window_len} fft_size={self.fft_size}"
            )
        if self.db_floor >= 0:
            raise InvalidInput(f"db_floor must be negative, got {self.db_floor}")


@dataclass(frozen=True)
class Spectrogram:
    """Log-magnitude image [n_freq_bins x n_frames] with explicit axis maps."""

    values: np.ndarray
    bin_freqs: np.ndarray  # Hz, strictly increasing, one per row
    frame_times: np.ndarray  # seconds, one per column
    params: StftParams
    sample_rate: int

    @property
    def n_bins(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]

    def freq_of_bin(self, b: int) -> float:
        return float(self.bin_freqs[b])

    def time_of_frame(self, t: int) -> float:
        return float(self.frame_times[t])


def hann_window(n: int) -> np.ndarray:
    """Periodic Hann window: 0.5 * (1 - cos(2*pi*k/n))."""
    k = np.arange(n)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * k / n))


def frame_signal(samples: np.ndarray, window_len: int, hop: int) -> np.ndarray:
    """Slice a signal into full analysis frames, one per row.

    Short signals are zero-padded to a single full window.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size < window_len:
        x = np.pad(x, (0, window_len - x.size))
    n_frames = 1 + (x.size - window_len) // hop
    idx = hop * np.arange(n_frames)[:, None] + np.arange(window_len)[None, :]
    return x[idx]


def stft(clip: AudioClip, params: StftParams) -> np.ndarray:
    """Complex STFT, shape [fft_size/2 + 1, n_frames]."""
    frames = frame_signal(clip.samples, params.window_len, params.hop)
    windowed = frames * hann_window(params.window_len)[None, :]
    if params.window_len < params.fft_size:
        windowed = np.pad(windowed, ((0, 0), (0, params.fft_size - params.window_len)))
    return np.fft.rfft(windowed, axis=1).T


def log_spectrogram(clip: AudioClip, params: StftParams) -> Spectrogram:
    """20*log10(|STFT| + eps), floored at params.db_floor."""
    mag = np.abs(stft(clip, params))
    values = np.maximum(20.0 * np.log10(mag + MAG_EPS), params.db_floor)
    n_bins, n_frames = values.shape
    bin_freqs = np.arange(n_bins) * (clip.sample_rate / params.fft_size)
    frame_times = np.arange(n_frames) * (params.hop / clip.sample_rate)
    return Spectrogram(values, bin_freqs, frame_times, params, clip.sample_rate)


def cap_frequency(spec: Spectrogram, f_max: float) -> Spectrogram:
    """Keep only the rows with center frequency <= f_max."""
    nyquist = spec.sample_rate / 2.0
    if not 0 < f_max <= nyquist:
        raise InvalidInput(f"f_max must be in (0, {nyquist}], got {f_max}")
    keep = int(np.searchsorted(spec.bin_freqs, f_max, side="right"))
    return Spectrogram(
        spec.values[:keep],
        spec.bin_freqs[:keep],
        spec.frame_times,
        spec.params,
        spec.sample_rate,
    )


def resize_bilinear(values: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Corner-aligned bilinear resize of a 2-D array.

    Sample positions are i*(H-1)/(out_h-1); a singleton output axis samples
    the source center, a singleton source axis is treated as constant.
    """
    a = np.asarray(values, dtype=np.float64)
    if a.ndim != 2 or a.size == 0:
        raise InvalidInput("resize input must be a nonempty 2-D array")
    if out_h < 1 or out_w < 1:
        raise InvalidInput(f"output dims must be >= 1, got {out_h}x{out_w}")

    def axis_coords(n_in: int, n_out: int) -> np.ndarray:
        if n_in == 1:
            return np.zeros(n_out)
        if n_out == 1:
            return np.array([(n_in - 1) / 2.0])
        return np.arange(n_out) * ((n_in - 1) / (n_out - 1))

    r = axis_coords(a.shape[0], out_h)
    c = axis_coords(a.shape[1], out_w)
    r0 = np.minimum(np.floor(r).astype(int), a.shape[0] - 1)
    c0 = np.minimum(np.floor(c).astype(int), a.shape[1] - 1)
    r1 = np.minimum(r0 + 1, a.shape[0] - 1)
    c1 = np.minimum(c0 + 1, a.shape[1] - 1)
    fr = (r - r0)[:, None]
    fc = (c - c0)[None, :]
    top = a[r0][:, c0] * (1 - fc) + a[r0][:, c1] * fc
    bot = a[r1][:, c0] * (1 - fc) + a[r1][:, c1] * fc
    return top * (1 - fr) + bot * fr
