"""Fidelity gauges between an original and an augmented signal."""

from dataclasses import dataclass, field
from functools import lru_cache

import librosa
import numpy as np

from src.config import F_MAX, F_MIN, MEL_FLOOR, MSTFT_FLOOR, MSTFT_RESOLUTIONS, N_MELS, SAMPLE_RATE
from src.dsp.models import FloatArray, Signal, StftConfig
from src.dsp.stft import stft
from src.utils.exceptions import ConfigError, SignalError
from src.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class MelConfig:
    sample_rate: int = SAMPLE_RATE
    n_mels: int = N_MELS
    f_min: float = F_MIN
    f_max: float = F_MAX
    stft: StftConfig = field(default_factory=StftConfig)
    floor: float = MEL_FLOOR

    def __post_init__(self) -> None:
        if self.n_mels < 1:
            raise ConfigError(f"n_mels must be >= 1, got {self.n_mels}")
        if not 0.0 <= self.f_min < self.f_max <= self.sample_rate / 2:
            raise ConfigError(
                f"Need 0 <= f_min < f_max <= sample_rate/2, got f_min={self.f_min}, f_max={self.f_max}, "
                f"sample_rate={self.sample_rate}"
            )
        if not self.floor > 0.0:
            raise ConfigError(f"Log floor must be positive, got {self.floor}")


@dataclass(frozen=True)
class MultiResConfig:
    """(n_fft, hop, window_length) per resolution; the window spans the whole FFT."""

    resolutions: tuple[tuple[int, int, int], ...] = MSTFT_RESOLUTIONS
    floor: float = MSTFT_FLOOR

    def __post_init__(self) -> None:
        if not self.resolutions:
            raise ConfigError("At least one STFT resolution is required")
        for n_fft, hop, window_length in self.resolutions:
            StftConfig(n_fft=n_fft, hop=hop)
            if window_length != n_fft:
                raise ConfigError(f"Window length must equal n_fft, got {window_length} for n_fft={n_fft}")

    def stft_configs(self) -> list[StftConfig]:
        return [StftConfig(n_fft=n_fft, hop=hop) for n_fft, hop, _ in self.resolutions]


@lru_cache(maxsize=8)
def mel_basis(cfg: MelConfig) -> FloatArray:
    """Area-normalized triangular filters on the HTK mel scale, shape (n_mels, n_fft/2 + 1)."""
    basis = librosa.filters.mel(
        sr=cfg.sample_rate,
        n_fft=cfg.stft.n_fft,
        n_mels=cfg.n_mels,
        fmin=cfg.f_min,
        fmax=cfg.f_max,
        htk=True,
        norm="slaney",
        dtype=np.float64,
    )
    basis.setflags(write=False)
    return basis


def mel_band_edges(cfg: MelConfig) -> FloatArray:
    """Corner frequencies in Hz; band i spans edges[i] .. edges[i + 2]."""
    return librosa.mel_frequencies(n_mels=cfg.n_mels + 2, fmin=cfg.f_min, fmax=cfg.f_max, htk=True)


def mel_spectrogram(x: Signal, cfg: MelConfig = MelConfig()) -> FloatArray:
    """
    Natural-log mel spectrogram of shape (frames, n_mels).

    Magnitudes (not power) are pooled through the filterbank and clamped at
    `cfg.floor` before the log.
    """
    if x.sample_rate != cfg.sample_rate:
        raise SignalError(f"Signal is sampled at {x.sample_rate} Hz, mel config expects {cfg.sample_rate} Hz")
    magnitude = np.abs(stft(x, cfg.stft).bins)
    return np.log(np.maximum(magnitude @ mel_basis(cfg).T, cfg.floor))


def _check_pair(a: Signal, b: Signal) -> None:
    if len(a) != len(b):
        raise SignalError(f"Signals differ in length: {len(a)} vs {len(b)}")
    if a.sample_rate != b.sample_rate:
        raise SignalError(f"Signals differ in sample rate: {a.sample_rate} vs {b.sample_rate}")


def mel_mae(a: Signal, b: Signal, cfg: MelConfig = MelConfig()) -> float:
    """Mean absolute difference of the two log-mel spectrograms."""
    _check_pair(a, b)
    return float(np.mean(np.abs(mel_spectrogram(a, cfg) - mel_spectrogram(b, cfg))))


def mstft_distance(a: Signal, b: Signal, cfg: MultiResConfig = MultiResConfig()) -> float:
    """
    Multi-resolution STFT distance.

    Per resolution: spectral convergence ||A| - |B||_F / ||A||_F plus the mean absolute
    log-magnitude difference; the result averages over resolutions.
    """
    _check_pair(a, b)
    terms = []
    for stft_cfg in cfg.stft_configs():
        mag_a = np.abs(stft(a, stft_cfg).bins)
        mag_b = np.abs(stft(b, stft_cfg).bins)
        reference = np.linalg.norm(mag_a)
        difference = np.linalg.norm(mag_a - mag_b)
        convergence = difference / reference if reference > 0 else (0.0 if difference == 0 else np.inf)
        log_magnitude = np.mean(np.abs(np.log(np.maximum(mag_a, cfg.floor)) - np.log(np.maximum(mag_b, cfg.floor))))
        terms.append(convergence + log_magnitude)
    return float(np.mean(terms))


def relative_l2(estimate: FloatArray, reference: FloatArray, margin: int = 0) -> float:
    """||estimate - reference|| / ||reference|| over samples [margin, len - margin)."""
    estimate = np.asarray(estimate, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    if estimate.shape != reference.shape:
        raise SignalError(f"Shapes differ: {estimate.shape} vs {reference.shape}")
    stop = reference.shape[0] - margin
    if stop <= margin:
        raise SignalError(f"Margin {margin} leaves no interior samples out of {reference.shape[0]}")
    reference_norm = np.linalg.norm(reference[margin:stop])
    return float(np.linalg.norm(estimate[margin:stop] - reference[margin:stop]) / max(reference_norm, 1e-300))


def delayed(samples: FloatArray, shift: int) -> FloatArray:
    """Integer shift with zero fill: positive delays, negative advances."""
    samples = np.asarray(samples, dtype=np.float64)
    out = np.zeros_like(samples)
    if shift >= 0:
        out[shift:] = samples[: samples.shape[0] - shift]
    else:
        out[:shift] = samples[-shift:]
    return out
