import numpy as np
import pytest

from src.audio.wav import read_wav
from src.dsp.metrics import relative_l2


class TestShiftCommand:
    """`phaseaug shift`."""

    def test_zero_delta_returns_input(self, cli, ramp_wav, tmp_path, parse_summary):
        code, lines, _ = cli("shift", ramp_wav, "--delta", "0", "--out-dir", tmp_path / "out")
        assert code == 0
        summary = parse_summary(lines[0])
        assert summary["delta"] == "0"
        output = read_wav(summary["output"]).signal.samples
        np.testing.assert_allclose(output, read_wav(ramp_wav).signal.samples, atol=1e-6)

    def test_explicit_output_path(self, cli, ramp_wav, tmp_path):
        target = tmp_path / "somewhere" / "shifted.wav"
        assert cli("shift", ramp_wav, "--delta", "1", "--output", target)[0] == 0
        assert target.exists()

    def test_half_steps_compose(self, cli, ramp_wav, tmp_path):
        half = tmp_path / "half.wav"
        cli("shift", ramp_wav, "--delta", "0.5", "--output", half)
        cli("shift", half, "--delta", "0.5", "--output", tmp_path / "twice.wav")
        cli("shift", ramp_wav, "--delta", "1.0", "--output", tmp_path / "once.wav")
        twice = read_wav(tmp_path / "twice.wav").signal.samples
        once = read_wav(tmp_path / "once.wav").signal.samples
        assert relative_l2(twice, once, margin=1024) < 5e-2

    def test_plot_shows_one_sample_delay(self, cli, ramp_wav, tmp_path):
        out = tmp_path / "out"
        code, _, _ = cli("shift", ramp_wav, "--delta", "1", "--out-dir", out, "--emit-plot", "--plot-image", tmp_path / "fig.png")
        assert code == 0
        plot = out / "tone.plot.txt"
        assert plot.read_text().startswith("# n x x_shifted\n")
        n, x, shifted = np.loadtxt(plot, unpack=True)
        np.testing.assert_array_equal(n, np.arange(4096))
        # interior samples trail the input by one sample
        np.testing.assert_allclose(shifted[1024:3072], x[1023:3071], atol=1e-3)
        assert (tmp_path / "fig.png").stat().st_size > 0

    def test_negative_delta_advances(self, cli, ramp_wav, tmp_path):
        cli("shift", ramp_wav, "--delta", "-2", "--output", tmp_path / "early.wav")
        x = read_wav(ramp_wav).signal.samples
        early = read_wav(tmp_path / "early.wav").signal.samples
        np.testing.assert_allclose(early[1024:3072], x[1026:3074], atol=1e-3)

    @pytest.mark.parametrize("delta", ["200", "-128.5"])
    def test_bound_violation(self, cli, ramp_wav, tmp_path, delta):
        code, _, err = cli("shift", ramp_wav, "--delta", delta, "--out-dir", tmp_path)
        assert code == 2
        assert "n_fft/8" in err

    def test_smaller_fft_lowers_bound(self, cli, ramp_wav, tmp_path):
        assert cli("shift", ramp_wav, "--delta", "100", "--n-fft", "512", "--hop", "128", "--out-dir", tmp_path)[0] == 2

    def test_missing_input(self, cli, tmp_path):
        assert cli("shift", tmp_path / "nope.wav", "--delta", "1", "--out-dir", tmp_path)[0] == 1

    def test_delta_required(self, cli, ramp_wav):
        assert cli("shift", ramp_wav)[0] == 2
