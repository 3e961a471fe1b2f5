from pathlib import Path

import pytest

from src.config.run_config import RunConfig
from src.dsp.models import FilterSpec, StftConfig
from src.utils.enums import PolicyMode, WavEncoding
from src.utils.exceptions import ConfigError


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text(
        "# reproducible run\n"
        "seed = 17\n"
        "\n"
        "sigma2 = 5.5   # a bit less rotation\n"
        "mode = unfiltered\n"
        "encoding = pcm16\n"
        "sample_rate_check = false\n"
    )
    return path


def test_defaults():
    run = RunConfig()
    cfg = run.to_policy_config()
    assert (cfg.seed, cfg.sigma2, cfg.delta_max, cfg.probability) == (0, 6.0, 2.0, 1.0)
    assert cfg.stft == StftConfig()
    assert cfg.filter_spec == FilterSpec()
    assert run.encoding is WavEncoding.FLOAT32
    assert run.workers == 1
    assert run.get("sample_rate_check") is True


def test_file_values(config_file):
    run = RunConfig(config_file)
    cfg = run.to_policy_config()
    assert cfg.seed == 17
    assert cfg.sigma2 == 5.5
    assert cfg.mode is PolicyMode.UNFILTERED
    assert run.encoding is WavEncoding.PCM16
    assert run.get("sample_rate_check") is False


def test_flags_override_file(config_file):
    run = RunConfig(config_file, {"seed": 3, "sigma2": None, "out_dir": Path("out")})
    assert run.get("seed") == 3
    # None means the flag was not given
    assert run.get("sigma2") == 5.5
    assert run.out_dir == Path("out")


def test_unknown_key_in_file(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("seed = 1\ncolour = blue\n")
    with pytest.raises(ConfigError, match="colour"):
        RunConfig(path)


def test_unknown_override():
    with pytest.raises(ConfigError):
        RunConfig(overrides={"volume": 11})


@pytest.mark.parametrize("line", ["seed = many", "mode = sideways", "sample_rate_check = maybe", "just words"])
def test_unparsable_lines(tmp_path, line):
    path = tmp_path / "bad.conf"
    path.write_text(line + "\n")
    with pytest.raises(ConfigError):
        RunConfig(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig(tmp_path / "nope.conf")


def test_set_and_get_all():
    run = RunConfig()
    run.set("kernel_size", "64")
    assert run.get("kernel_size") == 64
    settings = run.get_all()
    settings["kernel_size"] = 1
    assert run.get("kernel_size") == 64


def test_save_reproduces_run(tmp_path, config_file):
    run = RunConfig(config_file, {"hop": 128})
    saved = run.save(tmp_path / "saved" / "effective.conf")
    reloaded = RunConfig(saved)
    assert reloaded.get_all() == run.get_all()
    assert reloaded.to_policy_config() == run.to_policy_config()


def test_invalid_domain_values_are_config_errors():
    with pytest.raises(ConfigError):
        RunConfig(overrides={"n_fft": 1023}).to_policy_config()
    with pytest.raises(ConfigError):
        RunConfig(overrides={"cutoff": 0.7}).filter_spec()
    with pytest.raises(ConfigError):
        RunConfig(overrides={"probability": 2.0}).to_policy_config()
    with pytest.raises(ConfigError):
        RunConfig(overrides={"workers": 0}).workers


def test_mel_config_follows_sample_rate():
    mel = RunConfig().mel_config(8000)
    assert mel.sample_rate == 8000
    assert mel.f_max == 4000
    assert RunConfig().mel_config(22050).f_max == 8000
