import logging

import numpy as np
import pytest

from src.audio.wav import write_wav
from src.dsp.models import Signal
from src.dsp.synth import utterance
from src.main import run
from src.utils.enums import WavEncoding


@pytest.fixture(scope="function", autouse=True)
def _reset_logging():
    """Drop the handlers main() installs so runs do not share log files."""
    yield
    logger = logging.getLogger("phaseaug")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()


@pytest.fixture
def cli(capsys):
    """Run the command line in-process; returns (exit code, stdout lines, stderr)."""

    def invoke(*argv: str) -> tuple[int, list[str], str]:
        code = run([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out.splitlines(), captured.err

    return invoke


@pytest.fixture
def wav_dir(tmp_path):
    """Three short speech-like PCM16 files."""
    directory = tmp_path / "in"
    gen = np.random.default_rng(99)
    for name in ("a", "b", "c"):
        write_wav(directory / f"{name}.wav", utterance(gen, 8192), WavEncoding.PCM16)
    return directory


@pytest.fixture
def ramp_wav(tmp_path):
    """Slow sinusoid for shift tests, float32."""
    n = np.arange(4096)
    return write_wav(tmp_path / "tone.wav", Signal(0.5 * np.sin(2 * np.pi * 0.01 * n)), WavEncoding.FLOAT32)


@pytest.fixture
def parse_summary():
    """Split a key=value summary line into a dict."""

    def parse(line: str) -> dict[str, str]:
        return dict(part.split("=", 1) for part in line.split() if "=" in part)

    return parse
