"""Deterministic speech-sound synthesis with known ground truth.

Vowels: an impulse train at the fundamental is passed through a cascade of
four second-order resonators centered on the formant frequencies, then
peak-normalized to 0.9. Unvoiced consonants: white noise shaped to a
frequency band, with an exponential onset burst for plosives.

All randomness (formant jitter, noise) comes from a numpy generator seeded
from the `seed` argument, so equal inputs give bit-identical outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.signal import lfilter

from .audio import AudioClip
from .errors import InvalidInput

PEAK_LEVEL = 0.9
FADE_SECONDS = 0.008
DEFAULT_FORMANT_JITTER = 0.02  # fractional, uniform in [-j, +j] per formant
NOISE_EDGE_HZ = 200.0  # raised-cosine transition width of the band mask
NOISE_STOP_GAIN = 0.02  # residual broadband level outside the band


@dataclass(frozen=True)
class VowelSpec:
    name: str
    formants_hz: tuple[float, float, float, float]
    bandwidths_hz: tuple[float, float, float, float]
    duration_range: tuple[float, float]
    f0_range: tuple[float, float]

    def __post_init__(self):
        f = self.formants_hz
        if not (0 < f[0] < f[1] < f[2] < f[3]):
            raise InvalidInput(f"{self.name}: formants must be positive and increasing")
        if any(b <= 0 for b in self.bandwidths_hz):
            raise InvalidInput(f"{self.name}: bandwidths must be positive")
        for lo, hi in (self.duration_range, self.f0_range):
            if not 0 < lo < hi:
                raise InvalidInput(f"{self.name}: ranges must be nonempty intervals")


@dataclass(frozen=True)
class ConsonantSpec:
    name: str
    noise_band_hz: tuple[float, float]
    burst: bool
    duration_range: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.noise_band_hz
        if not 0 <= lo < hi:
            raise InvalidInput(f"{self.name}: noise band must satisfy 0 <= low < high")
        dlo, dhi = self.duration_range
        if not 0 < dlo < dhi:
            raise InvalidInput(f"{self.name}: duration range must be a nonempty interval")


def load_phone_specs(path=None):
    """Load (vowels, consonants) from a phone-spec JSON file.

    With no path, the table shipped with the package is used. Formant
    values beyond F1 in the shipped table are standard American English
    reference values, not measurements.
    """
    if path is None:
        text = resources.files("specxai").joinpath("data/phones.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    raw = json.loads(text)
    vowels = [
        VowelSpec(
            name=v["name"],
            formants_hz=tuple(v["formants_hz"]),
            bandwidths_hz=tuple(v["bandwidths_hz"]),
            duration_range=tuple(v["duration_range"]),
            f0_range=tuple(v["f0_range"]),
        )
        for v in raw["vowels"]
    ]
    consonants = [
        ConsonantSpec(
            name=c["name"],
            noise_band_hz=tuple(c["noise_band_hz"]),
            burst=bool(c["burst"]),
            duration_range=tuple(c["duration_range"]),
        )
        for c in raw["consonants"]
    ]
    return vowels, consonants


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def _resonator_coeffs(center_hz: float, bandwidth_hz: float, sample_rate: int):
    """Two-pole resonator with unit gain at the center frequency."""
    r = np.exp(-np.pi * bandwidth_hz / sample_rate)
    theta = 2.0 * np.pi * center_hz / sample_rate
    gain = (1.0 - r) * abs(1.0 - r * np.exp(-2j * theta))
    return np.array([gain]), np.array([1.0, -2.0 * r * np.cos(theta), r * r])


def _impulse_train(f0: float, n_samples: int, sample_rate: int) -> np.ndarray:
    x = np.zeros(n_samples)
    period = sample_rate / f0
    positions = np.floor(period * np.arange(int(n_samples / period) + 1) + 0.5)
    positions = positions[positions < n_samples].astype(int)
    x[positions] = 1.0
    return x


def _fade(n_samples: int, sample_rate: int) -> np.ndarray:
    env = np.ones(n_samples)
    k = min(int(FADE_SECONDS * sample_rate), n_samples // 2)
    if k > 0:
        ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(k) / k))
        env[:k] *= ramp
        env[-k:] *= ramp[::-1]
    return env


def synth_vowel(
    spec: VowelSpec,
    f0: float,
    duration: float,
    sample_rate: int,
    seed: int,
    formant_jitter: float = DEFAULT_FORMANT_JITTER,
) -> AudioClip:
    """Synthesize one vowel clip; the seed jitters the formant frequencies."""
    if not spec.f0_range[0] <= f0 <= spec.f0_range[1]:
        raise InvalidInput(f"f0 {f0} outside {spec.name} range {spec.f0_range}")
    if not spec.duration_range[0] <= duration <= spec.duration_range[1]:
        raise InvalidInput(
            f"duration {duration} outside {spec.name} range {spec.duration_range}"
        )
    if f0 >= spec.formants_hz[0]:
        raise InvalidInput(f"f0 {f0} must lie below F1 {spec.formants_hz[0]}")

    rng = _rng(seed)
    jitter = rng.uniform(-formant_jitter, formant_jitter, size=4)
    formants = np.array(spec.formants_hz) * (1.0 + jitter)

    n = max(int(round(duration * sample_rate)), 1)
    x = _impulse_train(f0, n, sample_rate)
    for fc, bw in zip(formants, spec.bandwidths_hz):
        b, a = _resonator_coeffs(fc, bw, sample_rate)
        x = lfilter(b, a, x)
    x *= _fade(n, sample_rate)
    x *= PEAK_LEVEL / np.max(np.abs(x))
    return AudioClip(x, sample_rate, label=spec.name)


def synth_unvoiced(
    spec: ConsonantSpec, duration: float, sample_rate: int, seed: int
) -> AudioClip:
    """Synthesize one unvoiced-consonant clip (band-shaped noise)."""
    lo, hi = spec.noise_band_hz
    nyquist = sample_rate / 2.0
    if hi > nyquist:
        raise InvalidInput(
            f"{spec.name}: noise band {spec.noise_band_hz} exceeds Nyquist {nyquist}"
        )
    if not spec.duration_range[0] <= duration <= spec.duration_range[1]:
        raise InvalidInput(
            f"duration {duration} outside {spec.name} range {spec.duration_range}"
        )

    rng = _rng(seed)
    n = max(int(round(duration * sample_rate)), 8)
    noise = rng.standard_normal(n)
    spectrum = np.fft.rfft(noise)
    freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
    mask = np.full(freqs.size, NOISE_STOP_GAIN)
    inside = (freqs >= lo) & (freqs <= hi)
    mask[inside] = 1.0
    edge = (freqs >= lo - NOISE_EDGE_HZ) & (freqs < lo)
    mask[edge] = NOISE_STOP_GAIN + (1 - NOISE_STOP_GAIN) * 0.5 * (
        1 + np.cos(np.pi * (lo - freqs[edge]) / NOISE_EDGE_HZ)
    )
    edge = (freqs > hi) & (freqs <= hi + NOISE_EDGE_HZ)
    mask[edge] = NOISE_STOP_GAIN + (1 - NOISE_STOP_GAIN) * 0.5 * (
        1 + np.cos(np.pi * (freqs[edge] - hi) / NOISE_EDGE_HZ)
    )
    x = np.fft.irfft(spectrum * mask, n=n)

    if spec.burst:
        t = np.arange(n) / sample_rate
        x *= np.exp(-t / (0.25 * duration))
    x *= _fade(n, sample_rate)
    x *= PEAK_LEVEL / np.max(np.abs(x))
    return AudioClip(x, sample_rate, label=spec.name)
