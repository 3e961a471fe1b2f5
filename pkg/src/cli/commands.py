import argparse
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from src.audio.wav import read_wav, write_wav
from src.cli.parser import config_overrides
from src.config import OUTPUT_SUFFIX, PLOT_SUFFIX, SAMPLE_RATE, SHIFT_SUFFIX
from src.config.run_config import RunConfig
from src.dsp.filters import design_kaiser_sinc, kaiser_attenuation
from src.dsp.metrics import mel_mae, mstft_distance
from src.dsp.phaseaug import max_shift, time_shift
from src.services.policy_service import AugmentationPolicy, RngState
from src.services.verify_service import VerificationService
from src.utils.decorators import cli_command
from src.utils.enums import ExitCode
from src.utils.exceptions import ConfigError
from src.utils.logging import get_logger
from src.utils.plotting import render_plot, write_plot_data

logger = get_logger(__name__)


def load_run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(getattr(args, "config", None), config_overrides(args))


def collect_inputs(inputs: list[Path]) -> list[Path]:
    """
    Expand directories to their *.wav files and order everything by file name.

    File stems must be unique: they key the random substream and name the outputs.
    """
    files: dict[Path, Path] = {}
    for path in inputs:
        found = [p for p in path.iterdir() if p.is_file() and p.suffix.lower() == ".wav"] if path.is_dir() else [path]
        for p in found:
            files.setdefault(p.resolve(), p)
    if not files:
        raise ConfigError(f"No WAV files found in {', '.join(str(p) for p in inputs)}")

    by_stem: dict[str, list[Path]] = {}
    for p in files.values():
        by_stem.setdefault(p.stem, []).append(p)
    clashes = {stem: paths for stem, paths in by_stem.items() if len(paths) > 1}
    if clashes:
        details = "; ".join(f"{stem}: {', '.join(sorted(str(p) for p in paths))}" for stem, paths in sorted(clashes.items()))
        raise ConfigError(f"Input files share a name and would overwrite each other's output ({details})")
    return sorted(files.values(), key=lambda p: (p.name, str(p)))


def substream_key(path: Path) -> int:
    """Stable 64-bit key derived from the file name, so other inputs never change a file's draw."""
    return int.from_bytes(hashlib.blake2b(path.name.encode("utf-8"), digest_size=8).digest(), "big")


def _check_sample_rate(run: RunConfig, path: Path, sample_rate: int) -> None:
    if run.get("sample_rate_check") and sample_rate != SAMPLE_RATE:
        logger.warning(f"{path} is sampled at {sample_rate} Hz; defaults are tuned for {SAMPLE_RATE} Hz")


@dataclass(frozen=True)
class FileOutcome:
    path: Path
    summary: str | None = None
    error: str | None = None


def _augment_file(path: Path, run: RunConfig, policy: AugmentationPolicy, args: argparse.Namespace) -> FileOutcome:
    try:
        source = read_wav(path)
        _check_sample_rate(run, path, source.sample_rate)
        x = source.signal
        result = policy.augment_with_draw(x, RngState(policy.cfg.seed).split(substream_key(path)))

        output = write_wav(run.out_dir / f"{path.stem}{OUTPUT_SUFFIX}", result.signal, run.encoding)
        mel = mel_mae(x, result.signal, run.mel_config(x.sample_rate))
        mstft = mstft_distance(x, result.signal)

        summary = (
            f"file={path.name} seed={policy.cfg.seed} delta={result.draw.delta:.6f} applied={str(result.applied).lower()} "
            f"mel_mae={mel:.6g} mstft={mstft:.6g} output={output}"
        )
        if args.emit_plot:
            plot = write_plot_data(run.out_dir / f"{path.stem}{PLOT_SUFFIX}", x.samples, result.signal.samples, "x_aug")
            summary += f" plot={plot}"
        if args.plot_image is not None:
            render_plot(
                args.plot_image / f"{path.stem}.png",
                x.samples,
                result.signal.samples,
                "x_aug",
                title=f"{path.name}: random phase rotation, delta={result.draw.delta:.3f}",
                window=(0, min(len(x), 200)),
            )
        logger.info(f"Augmented {path} -> {output}")
        return FileOutcome(path, summary=summary)
    except Exception as e:
        logger.error(f"Failed to augment {path}: {e}", exc_info=True)
        return FileOutcome(path, error=str(e))


@cli_command
def cmd_augment(args: argparse.Namespace) -> ExitCode:
    """Augment every input file with its own substream; failures do not stop the other files."""
    run = load_run_config(args)
    policy = AugmentationPolicy(run.to_policy_config())
    files = collect_inputs(args.inputs)
    logger.info(f"Augmenting {len(files)} file(s) with seed={policy.cfg.seed}, workers={run.workers}")

    if run.workers > 1:
        with ThreadPoolExecutor(max_workers=run.workers) as pool:
            outcomes = list(pool.map(lambda p: _augment_file(p, run, policy, args), files))
    else:
        outcomes = [_augment_file(p, run, policy, args) for p in files]

    # summaries are written in input order by this thread only
    for outcome in outcomes:
        if outcome.summary is not None:
            print(outcome.summary)
        else:
            print(f"file={outcome.path.name} status=error")

    failed = [o for o in outcomes if o.error is not None]
    if failed:
        logger.error(f"{len(failed)} of {len(outcomes)} file(s) failed")
        return ExitCode.FAILURE
    return ExitCode.SUCCESS


@cli_command
def cmd_shift(args: argparse.Namespace) -> ExitCode:
    run = load_run_config(args)
    stft_cfg = run.stft_config()
    if abs(args.delta) > max_shift(stft_cfg):
        raise ConfigError(f"|delta| must be at most n_fft/8 = {max_shift(stft_cfg)} samples, got {args.delta}")

    source = read_wav(args.input)
    _check_sample_rate(run, args.input, source.sample_rate)
    shifted = time_shift(source.signal, args.delta, stft_cfg)

    output = args.output if args.output is not None else run.out_dir / f"{args.input.stem}{SHIFT_SUFFIX}"
    write_wav(output, shifted, run.encoding)
    summary = f"file={args.input.name} delta={args.delta:g} output={output}"

    if args.emit_plot:
        plot = write_plot_data(
            run.out_dir / f"{args.input.stem}{PLOT_SUFFIX}", source.signal.samples, shifted.samples, "x_shifted"
        )
        summary += f" plot={plot}"
    if args.plot_image is not None:
        render_plot(
            args.plot_image,
            source.signal.samples,
            shifted.samples,
            "x_shifted",
            title=f"time shift by {args.delta:g} samples",
            window=(0, min(len(source.signal), 64)),
        )

    print(summary)
    logger.info(f"Shifted {args.input} by {args.delta} samples -> {output}")
    return ExitCode.SUCCESS


@cli_command
def cmd_design_filter(args: argparse.Namespace) -> ExitCode:
    run = load_run_config(args)
    spec = run.filter_spec()
    kernel = design_kaiser_sinc(spec)
    sigma2 = run.to_policy_config().sigma2

    print(
        f"kernel_size={spec.kernel_size} cutoff={spec.cutoff:g} transition={spec.transition_half_width:g} "
        f"attenuation_db={kaiser_attenuation(spec):.4f}"
    )
    print(f"sum_h={kernel.dc_gain:.9f}")
    print(f"sum_h2={kernel.noise_gain:.9f}")
    print(f"variance_reduction_pct={100.0 * (1.0 - kernel.noise_gain):.2f}")
    print(f"predicted_var={sigma2 * kernel.noise_gain:.6f} sigma2={sigma2:g}")
    for index, tap in enumerate(kernel.taps):
        print(f"h[{index}]={tap:.12g}")
    return ExitCode.SUCCESS


@cli_command
def cmd_verify(args: argparse.Namespace) -> ExitCode:
    run = load_run_config(args)
    cfg = run.to_policy_config()
    service = VerificationService(cfg, seed=cfg.seed, quick=args.quick)

    results = service.run()
    for result in results:
        print(result.summary_line())

    failed = [r.name for r in results if not r.passed]
    status = "PASS" if not failed else "FAIL"
    line = f"summary checks={len(results)} failed={len(failed)} status={status}"
    if failed:
        line += f" failed_checks={','.join(failed)}"
    print(line)
    return ExitCode.FAILURE if failed else ExitCode.SUCCESS


COMMANDS = {
    "augment": cmd_augment,
    "shift": cmd_shift,
    "design-filter": cmd_design_filter,
    "verify": cmd_verify,
}
