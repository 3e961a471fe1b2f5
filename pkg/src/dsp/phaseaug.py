"""Phase rotation of STFT bins and the fractional time shift built on it."""

import numpy as np

from src.dsp.models import PhaseVector, Signal, Spectrogram, StftConfig
from src.dsp.stft import istft, stft
from src.utils.exceptions import PhaseError, SignalError
from src.utils.logging import get_logger

logger = get_logger(__name__)


def phi_ref(n_fft: int) -> PhaseVector:
    """
    Reference rotation 2*pi/N * [0, 1, ..., N/2].

    Rotating by -delta * phi_ref delays a signal by delta samples.
    """
    if not isinstance(n_fft, int | np.integer) or n_fft < 2 or n_fft % 2:
        raise PhaseError(f"n_fft must be an even integer >= 2, got {n_fft}")
    return PhaseVector(2.0 * np.pi / n_fft * np.arange(n_fft // 2 + 1), int(n_fft))


def max_shift(cfg: StftConfig) -> float:
    return cfg.n_fft / 8


def _check_shift(delta: float, cfg: StftConfig) -> float:
    delta = float(delta)
    if not np.isfinite(delta) or abs(delta) > max_shift(cfg):
        raise PhaseError(f"|delta| must be at most n_fft/8 = {max_shift(cfg)} samples, got {delta}")
    return delta


def rotate_spectrogram(spec: Spectrogram, phi: PhaseVector) -> Spectrogram:
    """
    Multiply column k of the spectrogram by exp(j*phi[k]).

    Each bin is treated as a (real, imag) pair and multiplied by the 2x2 rotation
    matrix [[cos, -sin], [sin, cos]], so magnitudes are untouched.
    """
    if phi.n_fft != spec.n_fft:
        raise PhaseError(f"Phase vector is for n_fft={phi.n_fft}, spectrogram uses n_fft={spec.n_fft}")

    cos, sin = np.cos(phi.angles), np.sin(phi.angles)
    rotation = np.stack([np.stack([cos, -sin], axis=-1), np.stack([sin, cos], axis=-1)], axis=-2)
    pairs = np.stack([spec.bins.real, spec.bins.imag], axis=-1)
    rotated = np.einsum("kij,mkj->mki", rotation, pairs)
    return spec.with_bins(rotated[..., 0] + 1j * rotated[..., 1])


def phaseaug(x: Signal, phi: PhaseVector, cfg: StftConfig = StftConfig()) -> Signal:
    """
    Rotate the phase of every STFT bin of `x` by `phi` and resynthesize.

    Args:
        x: Input signal.
        phi: Rotation per one-sided bin, phi[0] == 0.
        cfg: STFT parameters; must match phi.n_fft.

    Returns:
        Real signal of the same length and sample rate as `x`.
    """
    if phi.n_fft != cfg.n_fft:
        raise PhaseError(f"Phase vector is for n_fft={phi.n_fft}, STFT uses n_fft={cfg.n_fft}")
    if phi.angles[0] != 0.0:
        raise PhaseError("phi[0] must be 0 to avoid a DC offset")
    if len(x) == 0:
        raise SignalError("Cannot augment an empty signal")

    rotated = rotate_spectrogram(stft(x, cfg), phi)
    return x.with_samples(istft(rotated).samples)


def shift_phase(delta: float, cfg: StftConfig = StftConfig()) -> PhaseVector:
    """Rotation that delays by `delta` samples: -delta * phi_ref."""
    return phi_ref(cfg.n_fft).scaled(-_check_shift(delta, cfg))


def time_shift(x: Signal, delta: float, cfg: StftConfig = StftConfig()) -> Signal:
    """
    Delay `x` by a possibly fractional number of samples.

    Positive delta delays, negative delta advances. |delta| is limited to n_fft/8.
    """
    phi = shift_phase(delta, cfg)
    logger.debug(f"time_shift: delta={delta} on {len(x)} samples")
    return phaseaug(x, phi, cfg)
