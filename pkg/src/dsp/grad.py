"""
Hand-derived adjoints and shift derivatives of the phase-rotation operator.

With the real inner products <x, y> = sum(x * y) on signals and
<X, Y> = Re sum(X * conj(Y)) on one-sided spectrograms, the operator
A(x) = istft(rotate(stft(x), phi)) is real-linear and its adjoint is obtained by
running the stages backwards: istft adjoint, rotation by -phi, stft adjoint.
"""

from collections.abc import Callable

import numpy as np
import scipy.fft
from numpy.lib.stride_tricks import sliding_window_view

from src.config import FD_STEP_DELTA
from src.dsp.models import FloatArray, PhaseVector, Signal, Spectrogram, StftConfig, TangentSignal
from src.dsp.phaseaug import phaseaug, phi_ref, rotate_spectrogram, shift_phase
from src.dsp.stft import hann_window, istft, overlap_add, pad_indices, retained_envelope, stft
from src.utils.exceptions import SignalError, SpectrogramError
from src.utils.logging import get_logger

logger = get_logger(__name__)


def _bin_weights(n_fft: int) -> FloatArray:
    """Multiplicity of each one-sided bin in the two-sided spectrum."""
    weights = np.full(n_fft // 2 + 1, 2.0)
    weights[0] = weights[-1] = 1.0
    return weights


def stft_adjoint(cotangent: Spectrogram) -> TangentSignal:
    """
    Adjoint of `stft` for a signal of `cotangent.original_length` samples.

    Each row goes back through the adjoint of the real FFT, is windowed, overlap-added
    on the padded grid and folded back through the reflect padding.
    """
    n_fft, length = cotangent.n_fft, cotangent.original_length
    if cotangent.n_frames != cotangent.config.n_frames(length):
        raise SpectrogramError(f"{cotangent.n_frames} frames do not match a signal of {length} samples")

    frames = n_fft * scipy.fft.irfft(cotangent.bins / _bin_weights(n_fft), n=n_fft, axis=-1)
    padded = overlap_add(frames * hann_window(n_fft), cotangent.hop)
    # the last frame may stop short of the padded signal, which is length + n_fft long
    padded = np.pad(padded, (0, length + n_fft - padded.shape[0]))

    grad = np.zeros(length)
    np.add.at(grad, pad_indices(length, n_fft), padded)
    return TangentSignal(grad)


def istft_adjoint(g: TangentSignal, cfg: StftConfig = StftConfig()) -> Spectrogram:
    """Adjoint of `istft` for spectrograms framed like `stft` of a len(g)-sample signal."""
    length = len(g)
    if length == 0:
        raise SignalError("Cannot take the adjoint of an empty tangent")
    n_frames = cfg.n_frames(length)
    envelope = retained_envelope(cfg, n_frames, length)

    padded = np.zeros(cfg.n_fft + (n_frames - 1) * cfg.hop)
    start = cfg.n_fft // 2
    padded[start : start + length] = g.samples / envelope

    frames = sliding_window_view(padded, cfg.n_fft)[:: cfg.hop][:n_frames]
    bins = scipy.fft.rfft(frames, axis=-1) * (_bin_weights(cfg.n_fft) / cfg.n_fft)
    return Spectrogram(bins=bins, n_fft=cfg.n_fft, hop=cfg.hop, original_length=length)


def phaseaug_adjoint(g: TangentSignal, phi: PhaseVector, cfg: StftConfig = StftConfig()) -> TangentSignal:
    """
    Adjoint of x -> phaseaug(x, phi), satisfying <A x, g> = <x, A* g>.

    This is the backward pass: given dL/dy for y = phaseaug(x, phi) it returns dL/dx.
    """
    if phi.n_fft != cfg.n_fft:
        raise SpectrogramError(f"Phase vector is for n_fft={phi.n_fft}, STFT uses n_fft={cfg.n_fft}")
    return stft_adjoint(rotate_spectrogram(istft_adjoint(g, cfg), -phi))


def phaseaug_loss_grad(
    x: Signal, target: Signal, phi: PhaseVector, cfg: StftConfig = StftConfig()
) -> tuple[float, TangentSignal]:
    """Value and gradient in x of L(x) = 0.5 * ||phaseaug(x, phi) - target||^2."""
    if len(x) != len(target):
        raise SignalError(f"Signal has {len(x)} samples, target has {len(target)}")
    residual = phaseaug(x, phi, cfg).samples - target.samples
    loss = 0.5 * float(residual @ residual)
    return loss, phaseaug_adjoint(TangentSignal(residual), phi, cfg)


def time_shift_ddelta(x: Signal, delta: float, cfg: StftConfig = StftConfig()) -> TangentSignal:
    """
    Derivative of time_shift(x, delta) with respect to delta.

    Differentiating exp(-j*delta*phi_ref) bin by bin gives the factor -j*phi_ref,
    pushed through the same inverse as the forward shift.
    """
    spec = rotate_spectrogram(stft(x, cfg), shift_phase(delta, cfg))
    slope = phi_ref(cfg.n_fft).angles
    return TangentSignal(istft(spec.with_bins(spec.bins * (-1j * slope))).samples)


def central_difference(f: Callable[[float], FloatArray], at: float, step: float = FD_STEP_DELTA) -> FloatArray:
    """(f(at + h) - f(at - h)) / 2h."""
    return (np.asarray(f(at + step)) - np.asarray(f(at - step))) / (2.0 * step)


def richardson_derivative(f: Callable[[float], FloatArray], at: float, step: float = FD_STEP_DELTA) -> FloatArray:
    """One-sided difference at `at`, Richardson-extrapolated from steps h and h/2."""
    base = np.asarray(f(at))
    coarse = (np.asarray(f(at + step)) - base) / step
    fine = (np.asarray(f(at + step / 2)) - base) / (step / 2)
    return 2.0 * fine - coarse


def dot_product_gap(
    forward: Callable[[FloatArray], FloatArray],
    adjoint: Callable[[FloatArray], FloatArray],
    x: FloatArray,
    g: FloatArray,
) -> float:
    """|<A x, g> - <x, A* g>| / (||x|| ||g||)."""
    lhs = float(np.dot(forward(x), g))
    rhs = float(np.dot(x, adjoint(g)))
    scale = float(np.linalg.norm(x) * np.linalg.norm(g))
    return abs(lhs - rhs) / scale if scale > 0 else abs(lhs - rhs)
