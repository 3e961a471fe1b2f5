import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.dsp.models import Signal, Spectrogram, StftConfig
from src.dsp.stft import hann_window, istft, retained_envelope, roundtrip, stft, window_envelope
from src.utils.exceptions import SignalError, SpectrogramError


class TestHannWindow:
    """Periodic Hann window."""

    def test_endpoints_and_peak(self):
        w = hann_window(1024)
        assert w.shape == (1024,)
        assert w[0] == 0.0
        assert w[512] == pytest.approx(1.0)
        # periodic: no second zero at the end
        assert w[-1] > 0.0

    def test_matches_closed_form(self):
        n = np.arange(16)
        np.testing.assert_allclose(hann_window(16), 0.5 - 0.5 * np.cos(2 * np.pi * n / 16), atol=1e-15)

    def test_read_only(self):
        with pytest.raises(ValueError):
            hann_window(1024)[0] = 1.0

    @pytest.mark.parametrize("n_fft", [0, 7, 1023])
    def test_rejects_odd_or_tiny(self, n_fft):
        with pytest.raises(SignalError):
            hann_window(n_fft)


def test_envelope_is_two_in_interior():
    env = window_envelope(StftConfig(), 20).overlap_sum
    np.testing.assert_allclose(env[1024:-1024], 2.0, atol=1e-12)


def test_envelope_vanishing_is_an_error():
    # hop == n_fft leaves the periodic window's zero uncovered
    with pytest.raises(SpectrogramError):
        retained_envelope(StftConfig(n_fft=16, hop=16), 5, 64)


class TestStft:
    """Forward transform shapes and errors."""

    @pytest.mark.parametrize("length", [1, 255, 256, 1000, 16384])
    def test_frame_count(self, length):
        spec = stft(Signal(np.ones(length)))
        assert spec.bins.shape == (length // 256 + 1, 513)
        assert spec.original_length == length

    def test_empty_signal(self):
        with pytest.raises(SignalError):
            stft(Signal(np.zeros(0)))

    def test_non_finite_signal(self):
        with pytest.raises(SignalError):
            Signal(np.array([0.0, np.nan, 1.0]))

    def test_cosine_on_bin_centre(self):
        n = np.arange(8192)
        spec = stft(Signal(np.cos(2 * np.pi * 64 * n / 1024)))
        interior = np.abs(spec.bins[4:-4])
        assert np.all(np.argmax(interior, axis=1) == 64)


class TestRoundtrip:
    """istft(stft(x)) reproduces x."""

    @pytest.mark.parametrize("length", [1, 100, 1023, 1024, 4097, 16384])
    def test_lengths(self, gen, length):
        x = Signal(gen.uniform(-1, 1, size=length))
        np.testing.assert_allclose(istft(stft(x)).samples, x.samples, atol=1e-6)

    def test_impulse_and_silence(self):
        impulse = np.zeros(4096)
        impulse[2000] = 1.0
        np.testing.assert_allclose(roundtrip(Signal(impulse)).samples, impulse, atol=1e-6)
        np.testing.assert_allclose(roundtrip(Signal(np.zeros(4096))).samples, 0.0, atol=1e-12)

    def test_keeps_sample_rate(self, gen):
        x = Signal(gen.standard_normal(2048), sample_rate=16000)
        assert roundtrip(x).sample_rate == 16000

    @pytest.mark.parametrize("n_fft,hop", [(512, 128), (2048, 512), (64, 16), (256, 64)])
    def test_other_resolutions(self, gen, n_fft, hop):
        x = Signal(gen.standard_normal(5000))
        np.testing.assert_allclose(roundtrip(x, StftConfig(n_fft, hop)).samples, x.samples, atol=1e-6)

    @settings(max_examples=25, deadline=None)
    @given(length=st.integers(min_value=1, max_value=6000), seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_property(self, length, seed):
        x = Signal(np.random.default_rng(seed).uniform(-1, 1, size=length))
        assert np.max(np.abs(roundtrip(x).samples - x.samples)) < 1e-6


def test_istft_rejects_short_spectrogram():
    spec = Spectrogram(np.zeros((2, 513), dtype=complex), 1024, 256, 4096)
    with pytest.raises(SpectrogramError):
        istft(spec)


def test_spectrogram_bin_count_checked():
    with pytest.raises(SpectrogramError):
        Spectrogram(np.zeros((3, 100), dtype=complex), 1024, 256, 512)


class TestSpectralIdentities:
    """Energy, linearity and DC behaviour of the transform."""

    def test_parseval_on_interior_frame(self, gen):
        x = gen.standard_normal(8192)
        spec = stft(Signal(x))
        m = 10
        frame = x[m * 256 - 512 : m * 256 + 512] * hann_window(1024)
        row = spec.bins[m]
        two_sided = np.concatenate([row, np.conj(row[-2:0:-1])])
        assert np.sum(frame**2) == pytest.approx(np.sum(np.abs(two_sided) ** 2) / 1024, rel=1e-9)

    def test_stft_is_linear(self, gen):
        x, y = gen.standard_normal(5000), gen.standard_normal(5000)
        a, b = 0.7, -2.3
        combined = stft(Signal(a * x + b * y)).bins
        separate = a * stft(Signal(x)).bins + b * stft(Signal(y)).bins
        np.testing.assert_allclose(combined, separate, rtol=0, atol=1e-9 * np.max(np.abs(separate)))

    def test_istft_is_linear(self, gen):
        shape = stft(Signal(np.zeros(5000))).bins.shape
        first = gen.standard_normal(shape) + 1j * gen.standard_normal(shape)
        second = gen.standard_normal(shape) + 1j * gen.standard_normal(shape)
        a, b = 1.5, -0.25

        def inverse(bins):
            return istft(Spectrogram(bins, 1024, 256, 5000)).samples

        separate = a * inverse(first) + b * inverse(second)
        combined = inverse(a * first + b * second)
        np.testing.assert_allclose(combined, separate, rtol=0, atol=1e-9 * np.max(np.abs(separate)))

    def test_constant_signal_lives_in_dc_lobe(self):
        c = 0.7
        spec = stft(Signal(np.full(8192, c)))
        np.testing.assert_allclose(np.abs(spec.bins[:, 0]), c * np.sum(hann_window(1024)), rtol=1e-12)
        # periodic Hann only reaches the neighbouring bin
        assert np.max(np.abs(spec.bins[:, 2:])) < 1e-9
