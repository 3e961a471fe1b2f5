import numpy as np
import pytest

from src.dsp.models import Signal, StftConfig
from src.dsp.synth import bandlimited, utterance
from src.services.policy_service import AugmentationPolicy, PolicyConfig


@pytest.fixture(scope="function", autouse=True)
def _log_dir(monkeypatch, tmp_path):
    """Keep log files of every test inside its temporary directory."""
    monkeypatch.setenv("PHASEAUG_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setattr("src.utils.logging.LOG_DIR", tmp_path / "logs")
    yield


@pytest.fixture
def gen():
    return np.random.default_rng(1234)


@pytest.fixture
def stft_cfg():
    return StftConfig()


@pytest.fixture
def noise(gen):
    """Uniform white noise in [-1, 1]."""
    return Signal(gen.uniform(-1.0, 1.0, size=16384))


@pytest.fixture
def smooth(gen):
    return bandlimited(gen, 16384)


@pytest.fixture
def speech(gen):
    return utterance(gen, 44100)


@pytest.fixture
def policy():
    return AugmentationPolicy(PolicyConfig())
