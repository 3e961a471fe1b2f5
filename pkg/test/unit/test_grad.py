import numpy as np
import pytest

from src.dsp.grad import (
    central_difference,
    dot_product_gap,
    istft_adjoint,
    phaseaug_adjoint,
    phaseaug_loss_grad,
    richardson_derivative,
    stft_adjoint,
    time_shift_ddelta,
)
from src.dsp.metrics import relative_l2
from src.dsp.models import PhaseVector, Signal, Spectrogram, StftConfig, TangentSignal
from src.dsp.phaseaug import phaseaug, time_shift
from src.dsp.stft import istft, roundtrip, stft
from src.dsp.synth import bandlimited
from src.services.policy_service import AugmentationPolicy, PolicyConfig
from src.utils.exceptions import SignalError, SpectrogramError


def _inner(a: Spectrogram, b: Spectrogram) -> float:
    return float(np.real(np.sum(a.bins * np.conj(b.bins))))


def _as_matrix(operator, length: int) -> np.ndarray:
    """Columns are the operator applied to each unit vector."""
    return np.stack([operator(column) for column in np.eye(length)], axis=1)


@pytest.mark.parametrize("length", [300, 4096, 5000])
def test_stft_adjoint_dot_product(gen, length):
    x = Signal(gen.standard_normal(length))
    cotangent = stft(Signal(gen.standard_normal(length)))
    cotangent = cotangent.with_bins(cotangent.bins + 1j * gen.standard_normal(cotangent.bins.shape))
    lhs = _inner(stft(x), cotangent)
    rhs = float(x.samples @ stft_adjoint(cotangent).samples)
    assert abs(lhs - rhs) <= 1e-10 * abs(lhs) + 1e-9


@pytest.mark.parametrize("length", [300, 4096, 5000])
def test_istft_adjoint_dot_product(gen, length):
    spec = stft(Signal(gen.standard_normal(length)))
    spec = spec.with_bins(spec.bins + 1j * gen.standard_normal(spec.bins.shape))
    g = TangentSignal(gen.standard_normal(length))
    lhs = float(istft(spec).samples @ g.samples)
    rhs = _inner(spec, istft_adjoint(g))
    assert abs(lhs - rhs) <= 1e-10 * abs(lhs) + 1e-9


def test_stft_adjoint_frame_mismatch():
    with pytest.raises(SpectrogramError):
        stft_adjoint(Spectrogram(np.zeros((3, 513), dtype=complex), 1024, 256, 4096))


def test_istft_adjoint_empty():
    with pytest.raises(SignalError):
        istft_adjoint(TangentSignal(np.zeros(0)))


class TestPhaseaugAdjoint:
    """Backward pass of the rotation operator."""

    def test_dot_product(self, gen, policy):
        for _ in range(10):
            phi = policy.sample_phase_vector(gen)
            x, g = gen.standard_normal(4100), gen.standard_normal(4100)
            gap = dot_product_gap(
                lambda v, phi=phi: phaseaug(Signal(v), phi).samples,
                lambda v, phi=phi: phaseaug_adjoint(TangentSignal(v), phi).samples,
                x,
                g,
            )
            assert gap < 1e-10

    def test_zero_rotation(self, gen):
        g = gen.standard_normal(2048)
        x = gen.standard_normal(2048)
        zero = PhaseVector.zeros(1024)
        lhs = float(phaseaug(Signal(x), zero).samples @ g)
        rhs = float(x @ phaseaug_adjoint(TangentSignal(g), zero).samples)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    @pytest.mark.parametrize("length", [1025, 1100, 4100, 4351])
    def test_lengths_off_the_hop_grid(self, gen, policy, length):
        phi = policy.sample_phase_vector(gen)
        g = TangentSignal(gen.standard_normal(length))
        x = gen.standard_normal(length)
        back = phaseaug_adjoint(g, phi)
        assert len(back) == length
        assert float(phaseaug(Signal(x), phi).samples @ g.samples) == pytest.approx(float(x @ back.samples), rel=1e-10)

    def test_adjoint_of_adjoint_is_forward(self, gen):
        cfg = StftConfig(16, 4)
        phi = PhaseVector(np.concatenate([[0.0], gen.uniform(-np.pi, np.pi, size=8)]), 16)
        forward = _as_matrix(lambda v: phaseaug(Signal(v), phi, cfg).samples, 37)
        backward = _as_matrix(lambda v: phaseaug_adjoint(TangentSignal(v), phi, cfg).samples, 37)
        np.testing.assert_allclose(backward.T, forward, atol=1e-12)

    def test_zero_rotation_matches_roundtrip_transpose(self):
        cfg = StftConfig(16, 4)
        zero = PhaseVector.zeros(16)
        round_trip = _as_matrix(lambda v: roundtrip(Signal(v), cfg).samples, 37)
        backward = _as_matrix(lambda v: phaseaug_adjoint(TangentSignal(v), zero, cfg).samples, 37)
        np.testing.assert_allclose(backward, round_trip.T, atol=1e-12)

    def test_other_resolution(self, gen):
        cfg = StftConfig(256, 64)
        policy = AugmentationPolicy(PolicyConfig(stft=cfg))
        phi = policy.sample_phase_vector(gen)
        x, g = gen.standard_normal(1000), gen.standard_normal(1000)
        gap = dot_product_gap(
            lambda v: phaseaug(Signal(v), phi, cfg).samples,
            lambda v: phaseaug_adjoint(TangentSignal(v), phi, cfg).samples,
            x,
            g,
        )
        assert gap < 1e-10


def test_loss_gradient_matches_finite_differences(gen, policy):
    length = 4096
    x = Signal(gen.uniform(-1, 1, size=length))
    target = Signal(gen.uniform(-1, 1, size=length))
    phi = policy.sample_phase_vector(gen)
    loss, grad = phaseaug_loss_grad(x, target, phi)
    assert loss > 0

    residual = phaseaug(x, phi).samples - target.samples
    assert loss == pytest.approx(0.5 * residual @ residual)

    scale = 1e-2 * np.sqrt(np.mean(grad.samples**2))
    for index in gen.choice(length, size=20, replace=False):

        def along(step: float, index: int = int(index)) -> float:
            moved = x.samples.copy()
            moved[index] += step
            return phaseaug_loss_grad(Signal(moved), target, phi)[0]

        numeric = float(central_difference(along, 0.0, 1e-5))
        analytic = float(grad.samples[index])
        assert abs(numeric - analytic) / max(abs(numeric), abs(analytic), scale) < 1e-5


def test_loss_gradient_length_mismatch(policy, gen):
    with pytest.raises(SignalError):
        phaseaug_loss_grad(Signal(np.zeros(100)), Signal(np.zeros(101)), policy.sample_phase_vector(gen))


class TestShiftDerivative:
    """d/d(delta) of the fractional shift."""

    @pytest.mark.parametrize("delta", [-1.7, -0.3, 0.0, 0.5, 1.9])
    def test_matches_central_difference(self, smooth, delta):
        analytic = time_shift_ddelta(smooth, delta).samples
        numeric = central_difference(lambda d: time_shift(smooth, d).samples, delta)
        assert relative_l2(analytic, numeric) < 1e-4

    def test_matches_richardson_at_zero(self, smooth):
        analytic = time_shift_ddelta(smooth, 0.0).samples
        numeric = richardson_derivative(lambda d: time_shift(smooth, d).samples, 0.0)
        assert relative_l2(analytic, numeric) < 1e-4

    def test_constant_signal_has_no_derivative(self):
        derivative = time_shift_ddelta(Signal(np.full(8192, 0.4)), 0.7).samples
        assert np.max(np.abs(derivative[1024:-1024])) < 1e-8

    def test_pure_tone_closed_form(self):
        # x = a cos(w n) on bin 20; d/d(delta) cos(w (n - delta)) = w sin(w (n - delta))
        n = np.arange(16384)
        omega = 2 * np.pi * 20 / 1024
        tone = Signal(0.5 * np.cos(omega * n))
        delta = 0.3
        expected = 0.5 * omega * np.sin(omega * (n - delta))
        assert relative_l2(time_shift_ddelta(tone, delta).samples, expected, margin=1024) < 1e-6

    def test_approximates_negative_time_derivative(self, gen):
        # delaying by delta changes x(n) by -delta * dx/dn to first order
        slow = bandlimited(gen, 16384, max_freq=0.05)
        derivative = np.gradient(slow.samples)
        assert relative_l2(-time_shift_ddelta(slow, 0.0).samples, derivative, margin=1024) < 0.05


def test_central_difference_exact_for_quadratic():
    assert float(central_difference(lambda t: np.array(3.0 * t**2), 2.0, 1e-3)) == pytest.approx(12.0, rel=1e-9)


def test_richardson_second_order():
    value = float(richardson_derivative(lambda t: np.array(np.sin(t)), 0.3, 1e-2))
    assert value == pytest.approx(np.cos(0.3), abs=2e-5)


def test_dot_product_gap_detects_wrong_adjoint(gen):
    matrix = gen.standard_normal((8, 8))
    x, g = gen.standard_normal(8), gen.standard_normal(8)
    assert dot_product_gap(lambda v: matrix @ v, lambda v: matrix.T @ v, x, g) < 1e-12
    assert dot_product_gap(lambda v: matrix @ v, lambda v: matrix @ v, x, g) > 1e-3
