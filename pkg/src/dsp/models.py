"""Immutable values passed between the signal-processing stages.

Arrays are stored as read-only float64/complex128 copies so a value can be shared
between threads without defensive copying.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.config import CUTOFF, HOP, KERNEL_SIZE, N_FFT, SAMPLE_RATE, TRANSITION_HALF_WIDTH
from src.utils.exceptions import FilterError, PhaseError, SignalError, SpectrogramError

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]


def _frozen(values: ArrayLike, dtype: type) -> NDArray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Signal:
    """
    Real-valued mono sample sequence.

    The sample rate is metadata only; no transform depends on it.
    """

    samples: FloatArray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self) -> None:
        samples = _frozen(self.samples, np.float64)
        if samples.ndim != 1:
            raise SignalError(f"Signal must be one-dimensional, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise SignalError("Signal contains NaN or infinite samples")
        if int(self.sample_rate) <= 0:
            raise SignalError(f"Sample rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    def with_samples(self, samples: ArrayLike) -> "Signal":
        """Return a signal with new samples and the same sample rate."""
        return Signal(np.asarray(samples, dtype=np.float64), self.sample_rate)


@dataclass(frozen=True)
class StftConfig:
    n_fft: int = N_FFT
    hop: int = HOP

    def __post_init__(self) -> None:
        if self.n_fft < 2 or self.n_fft % 2:
            raise SignalError(f"n_fft must be an even integer >= 2, got {self.n_fft}")
        if self.hop < 1 or self.hop > self.n_fft:
            raise SignalError(f"hop must be in [1, n_fft], got {self.hop} for n_fft={self.n_fft}")

    @property
    def n_bins(self) -> int:
        """Number of one-sided frequency bins, N/2 + 1."""
        return self.n_fft // 2 + 1

    def n_frames(self, length: int) -> int:
        return length // self.hop + 1


@dataclass(frozen=True)
class Spectrogram:
    """
    One-sided STFT matrix of shape (frames, n_fft/2 + 1).

    `original_length` is the sample count of the analysed signal; the inverse
    transform returns exactly that many samples.
    """

    bins: ComplexArray
    n_fft: int
    hop: int
    original_length: int

    def __post_init__(self) -> None:
        bins = _frozen(self.bins, np.complex128)
        if bins.ndim != 2:
            raise SpectrogramError(f"Spectrogram bins must be a matrix, got shape {bins.shape}")
        if bins.shape[1] != self.n_fft // 2 + 1:
            raise SpectrogramError(f"Expected {self.n_fft // 2 + 1} bins per frame for n_fft={self.n_fft}, got {bins.shape[1]}")
        if not np.all(np.isfinite(bins)):
            raise SpectrogramError("Spectrogram contains non-finite entries")
        if self.original_length < 1:
            raise SpectrogramError(f"original_length must be positive, got {self.original_length}")
        object.__setattr__(self, "bins", bins)

    @property
    def config(self) -> StftConfig:
        return StftConfig(n_fft=self.n_fft, hop=self.hop)

    @property
    def n_frames(self) -> int:
        return int(self.bins.shape[0])

    def with_bins(self, bins: ArrayLike) -> "Spectrogram":
        """Return a spectrogram with new bins and the same framing metadata."""
        return Spectrogram(np.asarray(bins, dtype=np.complex128), self.n_fft, self.hop, self.original_length)


@dataclass(frozen=True)
class PhaseVector:
    """Per-bin rotation angles in radians; the DC entry is always zero."""

    angles: FloatArray
    n_fft: int

    def __post_init__(self) -> None:
        angles = _frozen(self.angles, np.float64)
        if angles.shape != (self.n_fft // 2 + 1,):
            raise PhaseError(f"Phase vector for n_fft={self.n_fft} needs {self.n_fft // 2 + 1} entries, got {angles.shape}")
        if not np.all(np.isfinite(angles)):
            raise PhaseError("Phase vector contains non-finite angles")
        if angles[0] != 0.0:
            raise PhaseError(f"phi[0] must be 0 to avoid a DC offset, got {angles[0]}")
        object.__setattr__(self, "angles", angles)

    @classmethod
    def zeros(cls, n_fft: int) -> "PhaseVector":
        return cls(np.zeros(n_fft // 2 + 1), n_fft)

    def scaled(self, factor: float) -> "PhaseVector":
        return PhaseVector(self.angles * factor, self.n_fft)

    def __neg__(self) -> "PhaseVector":
        return self.scaled(-1.0)

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        if other.n_fft != self.n_fft:
            raise PhaseError(f"Cannot add phase vectors for n_fft={self.n_fft} and n_fft={other.n_fft}")
        return PhaseVector(self.angles + other.angles, self.n_fft)


@dataclass(frozen=True)
class FilterSpec:
    kernel_size: int = KERNEL_SIZE
    cutoff: float = CUTOFF
    transition_half_width: float = TRANSITION_HALF_WIDTH

    def __post_init__(self) -> None:
        if self.kernel_size < 8:
            raise FilterError(f"kernel_size must be >= 8, got {self.kernel_size}")
        if not 0.0 < self.cutoff < 0.5:
            raise FilterError(f"cutoff must lie in (0, 0.5) cycles/sample, got {self.cutoff}")
        if not self.transition_half_width > 0.0:
            raise FilterError(f"transition_half_width must be positive, got {self.transition_half_width}")


@dataclass(frozen=True)
class FilterKernel:
    taps: FloatArray
    spec: FilterSpec = field(default_factory=FilterSpec)

    def __post_init__(self) -> None:
        taps = _frozen(self.taps, np.float64)
        if taps.shape != (self.spec.kernel_size,):
            raise FilterError(f"Kernel has {taps.shape} taps, spec asks for {self.spec.kernel_size}")
        object.__setattr__(self, "taps", taps)

    @property
    def dc_gain(self) -> float:
        return float(np.sum(self.taps))

    @property
    def noise_gain(self) -> float:
        """Sum of squared taps: the white-noise variance ratio output/input."""
        return float(np.sum(self.taps**2))


@dataclass(frozen=True)
class TangentSignal:
    """Perturbation direction or gradient with respect to a primal signal."""

    samples: FloatArray

    def __post_init__(self) -> None:
        samples = _frozen(self.samples, np.float64)
        if samples.ndim != 1:
            raise SignalError(f"Tangent must be one-dimensional, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise SignalError("Tangent contains non-finite entries")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.shape[0])
