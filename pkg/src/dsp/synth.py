"""Deterministic synthetic material for checks: band-limited noise and speech-like utterances."""

import numpy as np

from src.config import SAMPLE_RATE
from src.dsp.models import FloatArray, Signal

FORMANTS_HZ = (550.0, 1650.0, 2600.0)
FORMANT_WIDTH_HZ = 350.0


def _peak_normalize(samples: FloatArray, peak: float) -> FloatArray:
    top = np.max(np.abs(samples))
    return samples * (peak / top) if top > 0 else samples


def _partials(gen: np.random.Generator, max_freq: float, n_partials: int) -> tuple[FloatArray, ...]:
    freqs = gen.uniform(0.002, max_freq, size=n_partials)
    phases = gen.uniform(0.0, 2.0 * np.pi, size=n_partials)
    amplitudes = gen.uniform(0.2, 1.0, size=n_partials)
    return freqs, phases, amplitudes


def _render(length: int, partials: tuple[FloatArray, ...], delay: float = 0.0) -> FloatArray:
    freqs, phases, amplitudes = partials
    n = np.arange(length) - delay
    return np.cos(2.0 * np.pi * np.outer(n, freqs) + phases) @ amplitudes


def bandlimited(
    gen: np.random.Generator,
    length: int,
    max_freq: float = 0.2,
    n_partials: int = 32,
    sample_rate: int = SAMPLE_RATE,
    peak: float = 0.9,
) -> Signal:
    """
    Sum of random sinusoids below `max_freq` cycles/sample.

    Strictly band-limited, so fractional delays have an exact reference.
    """
    samples = _render(length, _partials(gen, max_freq, n_partials))
    return Signal(_peak_normalize(samples, peak), sample_rate)


def bandlimited_reference(
    gen: np.random.Generator, length: int, delay: float, max_freq: float = 0.2, n_partials: int = 32
) -> tuple[Signal, Signal]:
    """A band-limited signal and its exact continuous-time delay by `delay` samples."""
    partials = _partials(gen, max_freq, n_partials)
    base = _render(length, partials)
    scale = 0.9 / np.max(np.abs(base))
    return Signal(base * scale), Signal(_render(length, partials, delay) * scale)


def utterance(
    gen: np.random.Generator, length: int, sample_rate: int = SAMPLE_RATE, peak: float = 0.8
) -> Signal:
    """
    Voiced speech stand-in: gliding harmonic source, formant envelope, syllabic gating.

    Non-stationary on the scale of a few STFT hops so that sample-level misalignment
    shows up in frame-level features.
    """
    t = np.arange(length) / sample_rate

    # pitch contour: slow glide plus vibrato
    f0_start, f0_end = gen.uniform(95.0, 140.0), gen.uniform(150.0, 230.0)
    f0 = np.linspace(f0_start, f0_end, length) * (1.0 + 0.03 * np.sin(2.0 * np.pi * gen.uniform(4.0, 6.0) * t))
    phase = 2.0 * np.pi * np.cumsum(f0) / sample_rate

    samples = np.zeros(length)
    formants = np.array(FORMANTS_HZ) * gen.uniform(0.85, 1.15, size=len(FORMANTS_HZ))
    for harmonic in range(1, int(4000.0 / f0_start)):
        freq = harmonic * f0
        weight = sum(np.exp(-0.5 * ((freq - f) / FORMANT_WIDTH_HZ) ** 2) for f in formants) + 0.02
        samples += weight * np.sin(harmonic * phase + gen.uniform(0.0, 2.0 * np.pi)) / harmonic

    syllable_rate = gen.uniform(3.0, 5.0)
    gate = np.clip(np.sin(2.0 * np.pi * syllable_rate * t + gen.uniform(0.0, 2.0 * np.pi)), 0.0, None) ** 1.5
    samples = samples * gate + 0.003 * gen.standard_normal(length)
    return Signal(_peak_normalize(samples, peak), sample_rate)


def matched_noise(gen: np.random.Generator, reference: Signal) -> Signal:
    """White gaussian noise with the RMS of `reference`."""
    rms = float(np.sqrt(np.mean(reference.samples**2)))
    return reference.with_samples(gen.standard_normal(len(reference)) * rms)
