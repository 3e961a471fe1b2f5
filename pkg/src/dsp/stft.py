"""Hann-windowed STFT and its overlap-add inverse.

Framing is centred: the signal is reflect-padded by n_fft/2 on both sides. The inverse
applies no synthesis window and divides the overlap-add by the per-sample sum of the
analysis window, which equals 2 in the interior for n_fft=1024, hop=256.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft
import scipy.signal
from numpy.lib.stride_tricks import sliding_window_view

from src.config import ENVELOPE_FLOOR
from src.dsp.models import FloatArray, Signal, Spectrogram, StftConfig
from src.utils.exceptions import SignalError, SpectrogramError
from src.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class WindowEnvelope:
    """Analysis window and the overlap-add normalization it produces."""

    taps: FloatArray
    overlap_sum: FloatArray


@lru_cache(maxsize=16)
def _hann(n_fft: int) -> FloatArray:
    taps = scipy.signal.windows.hann(n_fft, sym=False).astype(np.float64)
    taps.setflags(write=False)
    return taps


def hann_window(n_fft: int) -> FloatArray:
    """
    Periodic Hann window w[n] = (1 - cos(2*pi*n/N)) / 2.

    Args:
        n_fft: Window length N, even and at least 2.

    Returns:
        Read-only array of length n_fft.
    """
    if not isinstance(n_fft, int | np.integer) or n_fft < 2 or n_fft % 2:
        raise SignalError(f"n_fft must be an even integer >= 2, got {n_fft}")
    return _hann(int(n_fft))


def window_envelope(cfg: StftConfig, n_frames: int) -> WindowEnvelope:
    """Sum the analysis window over `n_frames` frames spaced by `cfg.hop`."""
    taps = hann_window(cfg.n_fft)
    padded_length = cfg.n_fft + (n_frames - 1) * cfg.hop
    overlap_sum = np.zeros(padded_length)
    for m in range(n_frames):
        overlap_sum[m * cfg.hop : m * cfg.hop + cfg.n_fft] += taps
    return WindowEnvelope(taps=taps, overlap_sum=overlap_sum)


def pad_indices(length: int, n_fft: int) -> np.ndarray:
    """Source index of every sample of the reflect-padded signal."""
    return np.pad(np.arange(length), n_fft // 2, mode="reflect")


def frame_signal(samples: FloatArray, cfg: StftConfig) -> FloatArray:
    """Reflect-pad and cut into (frames, n_fft) hops; frames are views, not copies."""
    padded = samples[pad_indices(len(samples), cfg.n_fft)]
    n_frames = cfg.n_frames(len(samples))
    return sliding_window_view(padded, cfg.n_fft)[:: cfg.hop][:n_frames]


def stft(x: Signal, cfg: StftConfig = StftConfig()) -> Spectrogram:
    """
    Centred one-sided STFT.

    Args:
        x: Finite, non-empty signal.
        cfg: Window length and hop.

    Returns:
        Spectrogram with floor(len(x)/hop) + 1 frames and n_fft/2 + 1 bins.
    """
    if len(x) == 0:
        raise SignalError("Cannot analyse an empty signal")

    frames = frame_signal(x.samples, cfg)
    bins = scipy.fft.rfft(frames * hann_window(cfg.n_fft), axis=-1)
    logger.debug(f"stft: {len(x)} samples -> {bins.shape[0]} frames x {bins.shape[1]} bins")
    return Spectrogram(bins=bins, n_fft=cfg.n_fft, hop=cfg.hop, original_length=len(x))


def overlap_add(frames: FloatArray, hop: int) -> FloatArray:
    n_frames, n_fft = frames.shape
    out = np.zeros(n_fft + (n_frames - 1) * hop)
    for m in range(n_frames):
        out[m * hop : m * hop + n_fft] += frames[m]
    return out


def retained_envelope(cfg: StftConfig, n_frames: int, length: int) -> FloatArray:
    """
    Window-overlap sum over the `length` samples the inverse keeps.

    Raises SpectrogramError when any kept sample has (numerically) no window coverage.
    """
    envelope = window_envelope(cfg, n_frames).overlap_sum
    start = cfg.n_fft // 2
    kept = envelope[start : start + length]
    if kept.shape[0] < length:
        raise SpectrogramError(f"{n_frames} frames cannot cover {length} samples with hop={cfg.hop}")
    if np.any(kept < ENVELOPE_FLOOR):
        raise SpectrogramError(f"Window overlap vanishes inside the signal (hop={cfg.hop}, n_fft={cfg.n_fft})")
    return np.maximum(kept, ENVELOPE_FLOOR)


def istft(spec: Spectrogram) -> Signal:
    """
    Inverse of `stft` by overlap-add and window-sum normalization.

    The one-sided rows are extended by conjugate symmetry inside the real inverse
    FFT, so the output carries no imaginary part.
    """
    envelope = retained_envelope(spec.config, spec.n_frames, spec.original_length)
    frames = scipy.fft.irfft(spec.bins, n=spec.n_fft, axis=-1)
    start = spec.n_fft // 2
    samples = overlap_add(frames, spec.hop)[start : start + spec.original_length] / envelope
    return Signal(samples)


def roundtrip(x: Signal, cfg: StftConfig = StftConfig()) -> Signal:
    """istft(stft(x)) with the input's sample rate preserved."""
    return x.with_samples(istft(stft(x, cfg)).samples)
