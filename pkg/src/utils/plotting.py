"""Plot data for shifted and augmented waveforms: text columns and optional PNG figures."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.dsp.models import FloatArray  # noqa: E402
from src.utils.exceptions import SignalError  # noqa: E402
from src.utils.logging import get_logger  # noqa: E402

logger = get_logger(__name__)


def plot_columns(original: FloatArray, processed: FloatArray, label: str) -> str:
    """
    Whitespace-separated columns `n original <label>` under a `#` header.

    `label` names the third column, e.g. `x_shifted` or `x_aug`.
    """
    original = np.asarray(original, dtype=np.float64)
    processed = np.asarray(processed, dtype=np.float64)
    if original.shape != processed.shape:
        raise SignalError(f"Plot columns differ in length: {original.shape} vs {processed.shape}")

    lines = [f"# n x {label}"]
    lines.extend(f"{n} {a:.9g} {b:.9g}" for n, (a, b) in enumerate(zip(original, processed, strict=True)))
    return "\n".join(lines) + "\n"


def write_plot_data(path: str | Path, original: FloatArray, processed: FloatArray, label: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(plot_columns(original, processed, label), encoding="utf-8")
    logger.debug(f"Plot data written to {path}")
    return path


def render_plot(
    path: str | Path,
    original: FloatArray,
    processed: FloatArray,
    label: str,
    title: str = "",
    window: tuple[int, int] | None = None,
) -> Path:
    """Overlay the two traces as markers plus lines and save a PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    start, stop = window if window is not None else (0, len(original))
    n = np.arange(start, stop)

    fig, ax = plt.subplots(figsize=(8, 3.5))
    try:
        ax.plot(n, np.asarray(original)[start:stop], "o-", markersize=3, label="x")
        ax.plot(n, np.asarray(processed)[start:stop], "s--", markersize=3, label=label)
        ax.set_xlabel("sample")
        ax.set_ylabel("amplitude")
        if title:
            ax.set_title(title)
        ax.legend(loc="upper right")
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
    finally:
        plt.close(fig)
    logger.debug(f"Plot image written to {path}")
    return path
