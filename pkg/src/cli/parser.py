"""Argument parsing for the `phaseaug` command-line tool."""

import argparse
from pathlib import Path
from typing import Any

from src.config import APP_NAME, APP_VERSION
from src.utils.enums import PolicyMode, WavEncoding

# Flags that map one-to-one onto RunConfig keys
CONFIG_FLAGS = (
    "seed",
    "sigma2",
    "delta_max",
    "probability",
    "n_fft",
    "hop",
    "kernel_size",
    "cutoff",
    "transition",
    "mode",
    "encoding",
    "out_dir",
    "workers",
)


def _common_options() -> argparse.ArgumentParser:
    # Defaults stay None so that unset flags never override config-file values
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="Flat 'key = value' configuration file")
    common.add_argument("--seed", type=int, default=None, help="Base seed of all random draws (default 0)")
    common.add_argument("--sigma2", type=float, default=None, help="Variance of the per-bin shifts (default 6.0)")
    common.add_argument("--delta-max", type=float, default=None, help="Bound of the uniform mean shift (default 2.0)")
    common.add_argument("--probability", type=float, default=None, help="Chance of rotating a signal (default 1.0)")
    common.add_argument("--n-fft", type=int, default=None, help="STFT size (default 1024)")
    common.add_argument("--hop", type=int, default=None, help="STFT hop (default 256)")
    common.add_argument("--kernel-size", type=int, default=None, help="Low-pass kernel length (default 128)")
    common.add_argument("--cutoff", type=float, default=None, help="Low-pass cutoff in cycles/sample (default 0.05)")
    common.add_argument("--transition", type=float, default=None, help="Transition half-width (default 0.06)")
    common.add_argument("--mode", choices=[m.value for m in PolicyMode], default=None, help="Rotation sampling mode")
    common.add_argument(
        "--encoding", choices=[e.value for e in WavEncoding], default=None, help="Output WAV encoding (default float32)"
    )
    common.add_argument("--out-dir", type=Path, default=None, help="Directory for output files (default .)")
    common.add_argument("--workers", type=int, default=None, help="Files processed in parallel (default 1)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog=APP_NAME,
        description="Phase-rotation augmentation for waveform discriminators.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    augment = subparsers.add_parser("augment", parents=[common], help="Randomly rotate the phase of WAV files")
    augment.add_argument("inputs", nargs="+", type=Path, help="WAV files or directories of WAV files")
    augment.add_argument("--emit-plot", action="store_true", help="Write n, x, x_aug columns per file")
    augment.add_argument("--plot-image", type=Path, default=None, help="Directory for one PNG per file")

    shift = subparsers.add_parser("shift", parents=[common], help="Fractionally delay a WAV file")
    shift.add_argument("input", type=Path, help="Mono WAV file")
    shift.add_argument("--delta", type=float, required=True, help="Delay in samples; negative values advance")
    shift.add_argument("--output", type=Path, default=None, help="Output path (default <out-dir>/<stem>.shift.wav)")
    shift.add_argument("--emit-plot", action="store_true", help="Write n, x, x_shifted columns")
    shift.add_argument("--plot-image", type=Path, default=None, help="PNG path for the shifted trace")

    subparsers.add_parser("design-filter", parents=[common], help="Print the low-pass kernel and its gains")

    verify = subparsers.add_parser("verify", parents=[common], help="Run the invariant and calibration checks")
    verify.add_argument("--quick", action="store_true", help="Fewer probes and draws")

    return parser


def config_overrides(args: argparse.Namespace) -> dict[str, Any]:
    """RunConfig overrides taken from the parsed flags; unset flags are left out."""
    return {key: getattr(args, key) for key in CONFIG_FLAGS if getattr(args, key, None) is not None}
