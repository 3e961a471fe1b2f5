from collections.abc import Callable, Mapping
from pathlib import Path
from typing import Any

from src.config import (
    CUTOFF,
    DELTA_MAX,
    HOP,
    KERNEL_SIZE,
    MEL_FLOOR,
    N_FFT,
    PROBABILITY,
    SEED,
    SIGMA2,
    TRANSITION_HALF_WIDTH,
)
from src.dsp.metrics import MelConfig
from src.dsp.models import FilterSpec, StftConfig
from src.services.policy_service import PolicyConfig
from src.utils.enums import PolicyMode, WavEncoding
from src.utils.exceptions import ConfigError, PhaseAugError
from src.utils.logging import get_logger

logger = get_logger(__name__)


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


PARSERS: dict[str, Callable[[str], Any]] = {
    "seed": int,
    "sigma2": float,
    "delta_max": float,
    "probability": float,
    "n_fft": int,
    "hop": int,
    "kernel_size": int,
    "cutoff": float,
    "transition": float,
    "mode": PolicyMode,
    "encoding": WavEncoding,
    "out_dir": Path,
    "workers": int,
    "sample_rate_check": _parse_bool,
    "mel_floor": float,
}


class RunConfig:
    """
    Effective configuration of one command-line run.

    Values come from the built-in defaults, then an optional flat `key = value` file,
    then command-line flags, each layer overriding the previous one. Unknown keys and
    unparsable values raise ConfigError.
    """

    def __init__(self, config_file: str | Path | None = None, overrides: Mapping[str, Any] | None = None):
        """
        Args:
            config_file: Optional path to a `key = value` file.
            overrides: Values taken from command-line flags; None entries are ignored.
        """
        self._settings: dict[str, Any] = {
            "seed": SEED,
            "sigma2": SIGMA2,
            "delta_max": DELTA_MAX,
            "probability": PROBABILITY,
            "n_fft": N_FFT,
            "hop": HOP,
            "kernel_size": KERNEL_SIZE,
            "cutoff": CUTOFF,
            "transition": TRANSITION_HALF_WIDTH,
            "mode": PolicyMode.FILTERED,
            "encoding": WavEncoding.FLOAT32,
            "out_dir": Path("."),
            "workers": 1,
            "sample_rate_check": True,
            "mel_floor": MEL_FLOOR,
        }
        self._config_file = Path(config_file) if config_file is not None else None

        if self._config_file is not None:
            self._load_settings(self._config_file)
        for key, value in (overrides or {}).items():
            if value is not None:
                self.set(key, value)

    def _load_settings(self, path: Path) -> None:
        """Read a flat `key = value` file; `#` starts a comment, blank lines are skipped."""
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read config file {path}: {e}") from e

        for number, line in enumerate(text.splitlines(), start=1):
            content = line.split("#", 1)[0].strip()
            if not content:
                continue
            if "=" not in content:
                raise ConfigError(f"{path}:{number}: expected 'key = value', got {line.strip()!r}")
            key, raw = (part.strip() for part in content.split("=", 1))
            self.set(key, raw, source=f"{path}:{number}")
        logger.debug(f"Run configuration loaded from {path}")

    def _coerce(self, key: str, value: Any, source: str) -> Any:
        if key not in PARSERS:
            raise ConfigError(f"{source}: unknown configuration key {key!r}")
        parser = PARSERS[key]
        if isinstance(parser, type) and isinstance(value, parser) and not isinstance(value, bool):
            return value
        try:
            return parser(value if isinstance(value, Path | PolicyMode | WavEncoding) else str(value))
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{source}: invalid value {value!r} for {key}: {e}") from e

    def get(self, key: str, default: Any = None) -> Any:
        return self._settings.get(key, default)

    def set(self, key: str, value: Any, source: str = "override") -> None:
        self._settings[key] = self._coerce(key, value, source)

    def get_all(self) -> dict[str, Any]:
        return self._settings.copy()

    def save(self, path: str | Path) -> Path:
        """Write the effective configuration as a `key = value` file that reproduces this run."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = []
        for key, value in self._settings.items():
            if isinstance(value, PolicyMode | WavEncoding):
                value = value.value
            elif isinstance(value, bool):
                value = str(value).lower()
            lines.append(f"{key} = {value}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.debug(f"Run configuration saved to {path}")
        return path

    @property
    def out_dir(self) -> Path:
        return Path(self._settings["out_dir"])

    @property
    def encoding(self) -> WavEncoding:
        return WavEncoding(self._settings["encoding"])

    @property
    def workers(self) -> int:
        workers = int(self._settings["workers"])
        if workers < 1:
            raise ConfigError(f"workers must be >= 1, got {workers}")
        return workers

    def stft_config(self) -> StftConfig:
        return self._build(lambda: StftConfig(n_fft=self.get("n_fft"), hop=self.get("hop")))

    def filter_spec(self) -> FilterSpec:
        return self._build(
            lambda: FilterSpec(
                kernel_size=self.get("kernel_size"),
                cutoff=self.get("cutoff"),
                transition_half_width=self.get("transition"),
            )
        )

    def to_policy_config(self) -> PolicyConfig:
        return self._build(
            lambda: PolicyConfig(
                delta_max=self.get("delta_max"),
                sigma2=self.get("sigma2"),
                probability=self.get("probability"),
                stft=self.stft_config(),
                filter_spec=self.filter_spec(),
                seed=self.get("seed"),
                mode=self.get("mode"),
            )
        )

    def mel_config(self, sample_rate: int) -> MelConfig:
        """Mel features at the file's own rate; the upper band edge drops to Nyquist if needed."""
        return self._build(
            lambda: MelConfig(
                sample_rate=sample_rate,
                f_max=min(MelConfig().f_max, sample_rate / 2),
                floor=self.get("mel_floor"),
            )
        )

    @staticmethod
    def _build(factory: Callable[[], Any]) -> Any:
        # Domain validation errors of configured values are usage errors
        try:
            return factory()
        except ConfigError:
            raise
        except PhaseAugError as e:
            raise ConfigError(str(e)) from e
