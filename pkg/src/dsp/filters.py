"""Kaiser-windowed sinc low-pass used to smooth the per-bin time shifts."""

import math

import numpy as np
import scipy.signal
from numpy.typing import ArrayLike

from src.dsp.models import FilterKernel, FilterSpec, FloatArray
from src.utils.exceptions import FilterError
from src.utils.logging import get_logger

logger = get_logger(__name__)


def kaiser_attenuation(spec: FilterSpec) -> float:
    """Stop-band attenuation in dB implied by the kernel length and transition width."""
    return 2.285 * (spec.kernel_size - 1) * math.pi * (2.0 * spec.transition_half_width) + 7.95


def design_kaiser_sinc(spec: FilterSpec = FilterSpec()) -> FilterKernel:
    """
    Design a unit-DC-gain low-pass kernel.

    The ideal sinc at `spec.cutoff` (cycles/sample) is centred on (L - 1)/2, so even
    lengths carry a half-sample delay, and tapered by a Kaiser window whose beta
    follows the usual three-branch rule for the attenuation above.
    """
    attenuation = kaiser_attenuation(spec)
    beta = float(scipy.signal.kaiser_beta(attenuation))

    time = np.arange(spec.kernel_size) - (spec.kernel_size - 1) / 2.0
    window = scipy.signal.windows.kaiser(spec.kernel_size, beta, sym=True)
    taps = 2.0 * spec.cutoff * np.sinc(2.0 * spec.cutoff * time) * window

    total = taps.sum()
    if not total > 0.0:
        raise FilterError(f"Kernel for {spec} has no DC gain to normalize")
    taps = taps / total

    kernel = FilterKernel(taps=taps, spec=spec)
    logger.debug(
        f"Kaiser sinc: L={spec.kernel_size}, cutoff={spec.cutoff}, A={attenuation:.2f} dB, "
        f"beta={beta:.4f}, sum(h^2)={kernel.noise_gain:.5f}"
    )
    return kernel


def extended_length(n_bins: int, kernel: FilterKernel) -> int:
    """Input length the valid-mode filter needs to produce `n_bins` outputs."""
    return n_bins + kernel.spec.kernel_size - 1


def filter_mu(mu_extended: ArrayLike, kernel: FilterKernel, n_bins: int | None = None) -> FloatArray:
    """
    Valid-mode correlation of the over-sampled shift sequence with the kernel.

    Accepts a single vector or a stack of vectors along the leading axes; the last axis
    of length n_bins + L - 1 shrinks to n_bins. When `n_bins` is given the input length
    must match it exactly.
    """
    mu = np.asarray(mu_extended, dtype=np.float64)
    size = kernel.spec.kernel_size
    if mu.ndim == 0 or mu.shape[-1] < size:
        raise FilterError(f"Shift sequence needs at least {size} entries, got shape {mu.shape}")
    if n_bins is not None and mu.shape[-1] != extended_length(n_bins, kernel):
        raise FilterError(f"Expected {extended_length(n_bins, kernel)} entries for {n_bins} bins, got {mu.shape[-1]}")
    taps = kernel.taps.reshape((1,) * (mu.ndim - 1) + (size,))
    return scipy.signal.correlate(mu, taps, mode="valid")
