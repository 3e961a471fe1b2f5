"""Mono RIFF/WAVE input and output for 16-bit PCM and 32-bit float data."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from src.dsp.models import FloatArray, Signal
from src.utils.enums import WavEncoding
from src.utils.exceptions import SignalError, WavFormatError
from src.utils.logging import get_logger

logger = get_logger(__name__)

PCM16_SCALE = 32768.0


@dataclass(frozen=True)
class WavFile:
    signal: Signal
    encoding: WavEncoding
    path: Path | None = None

    @property
    def sample_rate(self) -> int:
        return self.signal.sample_rate


def read_wav(path: str | Path) -> WavFile:
    """
    Read a mono WAV file.

    16-bit PCM is decoded by dividing by 32768; 32-bit float is taken as is.
    Multichannel files and any other sample format are rejected.
    """
    path = Path(path)
    try:
        sample_rate, data = wavfile.read(path)
    except Exception as e:
        raise WavFormatError(f"Cannot read WAV file {path}: {e}") from e

    if data.ndim != 1:
        raise WavFormatError(f"{path} has {data.shape[1]} channels; only mono input is supported")

    if data.dtype == np.int16:
        encoding = WavEncoding.PCM16
        samples = data.astype(np.float64) / PCM16_SCALE
    elif data.dtype == np.float32:
        encoding = WavEncoding.FLOAT32
        samples = data.astype(np.float64)
    else:
        raise WavFormatError(f"{path} uses unsupported sample format {data.dtype}; expected PCM16 or float32")

    try:
        signal = Signal(samples, int(sample_rate))
    except SignalError as e:
        raise WavFormatError(f"{path} holds invalid samples: {e}") from e
    logger.debug(f"Read {path}: {len(signal)} samples at {sample_rate} Hz ({encoding.value})")
    return WavFile(signal=signal, encoding=encoding, path=path)


def quantize_pcm16(samples: FloatArray) -> np.ndarray:
    """Scale by 32768, round half away from zero and clip to the int16 range."""
    scaled = np.asarray(samples, dtype=np.float64) * PCM16_SCALE
    rounded = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    clipped = np.clip(rounded, -32768, 32767)
    n_clipped = int(np.count_nonzero(clipped != rounded))
    if n_clipped:
        logger.warning(f"Clipped {n_clipped} samples while quantizing to 16-bit PCM")
    return clipped.astype(np.int16)


def write_wav(path: str | Path, signal: Signal, encoding: WavEncoding = WavEncoding.FLOAT32) -> Path:
    """Write `signal` as a mono WAV file, creating parent directories as needed."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    encoding = WavEncoding(encoding)
    if encoding is WavEncoding.PCM16:
        data = quantize_pcm16(signal.samples)
    else:
        data = signal.samples.astype(np.float32)

    wavfile.write(path, signal.sample_rate, data)
    logger.debug(f"Wrote {path}: {len(signal)} samples ({encoding.value})")
    return path
