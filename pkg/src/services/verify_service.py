import dataclasses
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from src.config import SIGMA2
from src.dsp.filters import design_kaiser_sinc
from src.dsp.grad import (
    central_difference,
    dot_product_gap,
    phaseaug_adjoint,
    phaseaug_loss_grad,
    richardson_derivative,
    time_shift_ddelta,
)
from src.dsp.metrics import MelConfig, delayed, mel_mae, mstft_distance, relative_l2
from src.dsp.models import Signal, StftConfig, TangentSignal
from src.dsp.phaseaug import phaseaug, rotate_spectrogram, time_shift
from src.dsp.stft import istft, stft
from src.dsp.synth import bandlimited, matched_noise, utterance
from src.services.policy_service import AugmentationPolicy, PolicyConfig, RngState
from src.utils.decorators import logged_check
from src.utils.enums import PolicyMode
from src.utils.logging import get_logger

logger = get_logger(__name__)

# Thresholds of the acceptance suite
ROUNDTRIP_MAX_ERROR = 1e-6
ROTATION_MAGNITUDE_ERROR = 1e-12
MAGNITUDE_DRIFT = 5e-2
SHIFT_RELATIVE_L2 = 5e-2
NOISE_GAIN_RANGE = (0.085, 0.110)
SHIFT_VARIANCE_TOLERANCE = 0.05
SHIFT_VARIANCE_FLOOR = 0.5
VARIANCE_ANCHOR = 0.58
CALIBRATION_SIGMA2 = 5.2
CALIBRATION_TARGET = 0.5
ADJOINT_GAP = 1e-10
LOSS_GRADIENT_ERROR = 1e-5
DDELTA_ERROR = 1e-4
MSTFT_NOISE_RATIO = 0.2
ENERGY_RANGE = (0.98, 1.02)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: str
    passed: bool

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"check={self.name} value={self.value:.6g} threshold={self.threshold} status={status}"


@dataclass(frozen=True)
class SuiteSize:
    roundtrip_signals: int
    roundtrip_max_length: int
    rotation_pairs: int
    shift_signals: int
    variance_draws: int
    distribution_draws: int
    dc_draws: int
    adjoint_probes: int
    ddelta_signals: int
    utterances: int


FULL = SuiteSize(100, 65536, 50, 10, 2000, 100_000, 10_000, 100, 20, 10)
QUICK = SuiteSize(12, 16384, 8, 3, 2000, 20_000, 1_000, 12, 4, 10)


class VerificationService:
    """
    Runs the invariant and calibration checks against one policy configuration.

    Every check draws from its own substream of `seed`, so adding or skipping a check
    does not change the material any other check sees.
    """

    def __init__(self, cfg: PolicyConfig = PolicyConfig(), seed: int = 0, quick: bool = False) -> None:
        self.cfg = cfg
        self.rng = RngState(seed)
        self.size = QUICK if quick else FULL
        self.policy = AugmentationPolicy(cfg)
        self.stft_cfg: StftConfig = cfg.stft
        self.mel_cfg = MelConfig(stft=StftConfig())
        self.logger = get_logger(self.__class__.__name__)

    def _gen(self, index: int) -> np.random.Generator:
        return self.rng.split(index).generator()

    def checks(self) -> list[Callable[[], CheckResult]]:
        return [
            self.check_roundtrip,
            self.check_rotation_magnitude,
            self.check_magnitude_drift,
            self.check_shift_fidelity,
            self.check_shift_composition,
            self.check_filter_noise_gain,
            self.check_shift_variance,
            self.check_variance_anchor,
            self.check_calibration,
            self.check_shift_distribution,
            self.check_phase_dc,
            self.check_determinism,
            self.check_batch_independence,
            self.check_adjoint,
            self.check_loss_gradient,
            self.check_shift_derivative,
            self.check_mel_leakage,
            self.check_mstft_leakage,
            self.check_energy,
        ]

    def run(self) -> list[CheckResult]:
        results = [check() for check in self.checks()]
        failed = [r.name for r in results if not r.passed]
        if failed:
            self.logger.warning(f"Verification failed: {', '.join(failed)}")
        else:
            self.logger.info(f"All {len(results)} checks passed")
        return results

    # Transform checks

    @logged_check("roundtrip")
    def check_roundtrip(self) -> CheckResult:
        gen = self._gen(0)
        worst = 0.0
        for _ in range(self.size.roundtrip_signals):
            length = int(gen.integers(4096, self.size.roundtrip_max_length + 1))
            x = Signal(gen.uniform(-1.0, 1.0, size=length))
            worst = max(worst, float(np.max(np.abs(istft(stft(x, self.stft_cfg)).samples - x.samples))))
        return CheckResult("roundtrip", worst, f"<{ROUNDTRIP_MAX_ERROR:g}", worst < ROUNDTRIP_MAX_ERROR)

    @logged_check("rotation_magnitude")
    def check_rotation_magnitude(self) -> CheckResult:
        gen = self._gen(1)
        worst = 0.0
        for _ in range(self.size.rotation_pairs):
            spec = stft(Signal(gen.uniform(-1.0, 1.0, size=8192)), self.stft_cfg)
            rotated = rotate_spectrogram(spec, self.policy.sample_phase_vector(gen))
            before, after = np.abs(spec.bins), np.abs(rotated.bins)
            worst = max(worst, float(np.max(np.abs(after - before)) / np.max(before)))
        return CheckResult("rotation_magnitude", worst, f"<{ROTATION_MAGNITUDE_ERROR:g}", worst < ROTATION_MAGNITUDE_ERROR)

    @logged_check("magnitude_drift")
    def check_magnitude_drift(self) -> CheckResult:
        gen = self._gen(2)
        worst = 0.0
        for _ in range(self.size.rotation_pairs):
            x = utterance(gen, 32768)
            y = phaseaug(x, self.policy.sample_phase_vector(gen), self.stft_cfg)
            before = np.abs(stft(x, self.stft_cfg).bins)[4:-4]
            after = np.abs(stft(y, self.stft_cfg).bins)[4:-4]
            worst = max(worst, float(np.linalg.norm(after - before) / np.linalg.norm(before)))
        return CheckResult("magnitude_drift", worst, f"<{MAGNITUDE_DRIFT:g}", worst < MAGNITUDE_DRIFT)

    @logged_check("shift_fidelity")
    def check_shift_fidelity(self) -> CheckResult:
        gen = self._gen(3)
        margin = self.stft_cfg.n_fft
        worst = 0.0
        for _ in range(self.size.shift_signals):
            x = bandlimited(gen, 16384)
            for delta in (-2, -1, 1, 2):
                shifted = time_shift(x, delta, self.stft_cfg).samples
                worst = max(worst, relative_l2(shifted, delayed(x.samples, delta), margin))
        return CheckResult("shift_fidelity", worst, f"<{SHIFT_RELATIVE_L2:g}", worst < SHIFT_RELATIVE_L2)

    @logged_check("shift_composition")
    def check_shift_composition(self) -> CheckResult:
        gen = self._gen(4)
        margin = self.stft_cfg.n_fft
        worst = 0.0
        for _ in range(self.size.shift_signals):
            x = bandlimited(gen, 16384)
            twice = time_shift(time_shift(x, 0.5, self.stft_cfg), 0.5, self.stft_cfg).samples
            once = time_shift(x, 1.0, self.stft_cfg).samples
            worst = max(worst, relative_l2(twice, once, margin))
        return CheckResult("shift_composition", worst, f"<{SHIFT_RELATIVE_L2:g}", worst < SHIFT_RELATIVE_L2)

    # Calibration checks

    @logged_check("filter_noise_gain")
    def check_filter_noise_gain(self) -> CheckResult:
        gain = design_kaiser_sinc(self.cfg.filter_spec).noise_gain
        low, high = NOISE_GAIN_RANGE
        return CheckResult("filter_noise_gain", gain, f"[{low},{high}]", low <= gain <= high)

    def _measured_shift_variance(self, sigma2: float, index: int) -> float:
        """Mean square of filtered shifts drawn around a zero mean shift."""
        cfg = dataclasses.replace(self.cfg, delta_max=0.0, sigma2=sigma2, mode=PolicyMode.FILTERED)
        shifts = AugmentationPolicy(cfg).sample_time_shifts(self.rng.split(index), self.size.variance_draws)
        return float(np.mean(shifts**2))

    @logged_check("shift_variance")
    def check_shift_variance(self) -> CheckResult:
        measured = self._measured_shift_variance(self.cfg.sigma2, 5)
        predicted = self.cfg.sigma2 * design_kaiser_sinc(self.cfg.filter_spec).noise_gain
        passed = measured > SHIFT_VARIANCE_FLOOR and abs(measured - predicted) < SHIFT_VARIANCE_TOLERANCE
        threshold = f">{SHIFT_VARIANCE_FLOOR:g}&|v-{predicted:.4f}|<{SHIFT_VARIANCE_TOLERANCE:g}"
        return CheckResult("shift_variance", measured, threshold, passed)

    @logged_check("variance_anchor")
    def check_variance_anchor(self) -> CheckResult:
        """Shift variance at the default sigma2 against the fixed 0.58 target."""
        measured = self._measured_shift_variance(SIGMA2, 17)
        passed = abs(measured - VARIANCE_ANCHOR) < SHIFT_VARIANCE_TOLERANCE
        return CheckResult(
            "variance_anchor", measured, f"|v-{VARIANCE_ANCHOR:g}|<{SHIFT_VARIANCE_TOLERANCE:g}", passed
        )

    @logged_check("calibration_sigma2")
    def check_calibration(self) -> CheckResult:
        measured = self._measured_shift_variance(CALIBRATION_SIGMA2, 6)
        passed = abs(measured - CALIBRATION_TARGET) < SHIFT_VARIANCE_TOLERANCE
        return CheckResult(
            "calibration_sigma2", measured, f"|v-{CALIBRATION_TARGET:g}|<{SHIFT_VARIANCE_TOLERANCE:g}", passed
        )

    @logged_check("shift_distribution")
    def check_shift_distribution(self) -> CheckResult:
        """Grand mean of the per-draw mean shift and the pooled variance of all shifts."""
        if self.cfg.mode is PolicyMode.PHASE:
            return CheckResult("shift_distribution", 0.0, "n/a", True)
        gen = self._gen(7)
        draws, chunk = self.size.distribution_draws, 10_000
        means, squares, count = [], 0.0, 0
        while count < draws:
            shifts = self.policy.sample_time_shifts(gen, min(chunk, draws - count))
            means.append(shifts.mean(axis=1))
            squares += float(np.sum(shifts**2))
            count += shifts.shape[0]
        per_draw = np.concatenate(means)
        grand_mean = float(per_draw.mean())
        pooled = squares / (count * self.policy.n_bins)

        noise = self.cfg.sigma2 * self.policy.kernel.noise_gain
        if self.cfg.mode is PolicyMode.UNFILTERED:
            noise = self.cfg.sigma2
        predicted = self.cfg.delta_max**2 / 3.0 + noise
        mean_tolerance = max(0.02, 4.0 * float(np.sqrt(predicted / count)))
        passed = abs(grand_mean) < mean_tolerance and abs(pooled - predicted) < 0.05 * max(predicted, 1e-12)
        return CheckResult("shift_distribution", abs(grand_mean), f"<{mean_tolerance:.3g}&var~{predicted:.4f}", passed)

    # Policy contracts

    @logged_check("phase_dc")
    def check_phase_dc(self) -> CheckResult:
        gen = self._gen(8)
        worst = 0.0
        for _ in range(self.size.dc_draws):
            worst = max(worst, abs(float(self.policy.sample_phase_vector(gen).angles[0])))
        return CheckResult("phase_dc", worst, "==0", worst == 0.0)

    @logged_check("determinism")
    def check_determinism(self) -> CheckResult:
        x = utterance(self._gen(9), 16384)
        first = self.policy.augment(x, self.rng.split(9))
        second = self.policy.augment(x, self.rng.split(9))
        identical = first.samples.tobytes() == second.samples.tobytes()
        return CheckResult("determinism", 0.0 if identical else 1.0, "==0", identical)

    @logged_check("batch_independence")
    def check_batch_independence(self) -> CheckResult:
        gen = self._gen(10)
        batch = [utterance(gen, 8192) for _ in range(3)]
        full = self.policy.augment_batch(batch, self.rng.split(10))
        partial = self.policy.augment_batch(batch[1:], self.rng.split(10), keys=[1, 2])
        gap = max(float(np.max(np.abs(a.samples - b.samples))) for a, b in zip(full[1:], partial, strict=True))
        return CheckResult("batch_independence", gap, "==0", gap == 0.0)

    # Differentiability checks

    @logged_check("adjoint_dot")
    def check_adjoint(self) -> CheckResult:
        gen = self._gen(11)
        length = 4 * self.stft_cfg.n_fft + int(gen.integers(0, self.stft_cfg.hop))
        worst = 0.0
        for _ in range(self.size.adjoint_probes):
            phi = self.policy.sample_phase_vector(gen)
            x, g = gen.standard_normal(length), gen.standard_normal(length)
            gap = dot_product_gap(
                lambda v, phi=phi: phaseaug(Signal(v), phi, self.stft_cfg).samples,
                lambda v, phi=phi: phaseaug_adjoint(TangentSignal(v), phi, self.stft_cfg).samples,
                x,
                g,
            )
            worst = max(worst, gap)
        return CheckResult("adjoint_dot", worst, f"<{ADJOINT_GAP:g}", worst < ADJOINT_GAP)

    @logged_check("loss_gradient")
    def check_loss_gradient(self) -> CheckResult:
        return CheckResult("loss_gradient", *self._loss_gradient_error(self._gen(12)))

    def _loss_gradient_error(self, gen: np.random.Generator, coordinates: int = 20) -> tuple[float, str, bool]:
        length = 4 * self.stft_cfg.n_fft
        x = Signal(gen.uniform(-1.0, 1.0, size=length))
        target = Signal(gen.uniform(-1.0, 1.0, size=length))
        phi = self.policy.sample_phase_vector(gen)
        _, grad = phaseaug_loss_grad(x, target, phi, self.stft_cfg)
        scale = 1e-2 * float(np.sqrt(np.mean(grad.samples**2)))

        def loss_along(index: int) -> Callable[[float], float]:
            def loss(step: float) -> float:
                moved = x.samples.copy()
                moved[index] += step
                return phaseaug_loss_grad(Signal(moved), target, phi, self.stft_cfg)[0]

            return loss

        worst = 0.0
        for index in gen.choice(length, size=coordinates, replace=False):
            numeric = float(central_difference(loss_along(int(index)), 0.0, 1e-5))
            analytic = float(grad.samples[index])
            worst = max(worst, abs(numeric - analytic) / max(abs(numeric), abs(analytic), scale))
        return worst, f"<{LOSS_GRADIENT_ERROR:g}", worst < LOSS_GRADIENT_ERROR

    @logged_check("shift_derivative")
    def check_shift_derivative(self) -> CheckResult:
        gen = self._gen(13)
        worst = 0.0
        for _ in range(self.size.ddelta_signals):
            x = bandlimited(gen, 8192)
            delta = float(gen.uniform(-2.0, 2.0))
            analytic = time_shift_ddelta(x, delta, self.stft_cfg).samples
            numeric = central_difference(lambda d, x=x: time_shift(x, d, self.stft_cfg).samples, delta)
            worst = max(worst, relative_l2(analytic, numeric))
        x = bandlimited(gen, 8192)
        extrapolated = richardson_derivative(lambda d: time_shift(x, d, self.stft_cfg).samples, 0.0)
        worst = max(worst, relative_l2(time_shift_ddelta(x, 0.0, self.stft_cfg).samples, extrapolated))
        return CheckResult("shift_derivative", worst, f"<{DDELTA_ERROR:g}", worst < DDELTA_ERROR)

    # Leakage checks

    def _utterance_pairs(self, index: int) -> list[tuple[Signal, Signal]]:
        gen = self._gen(index)
        pairs = []
        for i in range(self.size.utterances):
            x = utterance(gen, 2 * self.mel_cfg.sample_rate, self.mel_cfg.sample_rate)
            pairs.append((x, self.policy.augment(x, self.rng.split(index).split(i))))
        return pairs

    @logged_check("mel_leakage")
    def check_mel_leakage(self) -> CheckResult:
        worst = 0.0
        for x, augmented in self._utterance_pairs(14):
            baseline = mel_mae(x, x.with_samples(delayed(x.samples, -64)), self.mel_cfg)
            worst = max(worst, mel_mae(x, augmented, self.mel_cfg) / baseline)
        return CheckResult("mel_leakage", worst, "<1", worst < 1.0)

    @logged_check("mstft_leakage")
    def check_mstft_leakage(self) -> CheckResult:
        gen = self._gen(15)
        worst = 0.0
        for x, augmented in self._utterance_pairs(14):
            ratio = mstft_distance(x, augmented) / mstft_distance(x, matched_noise(gen, x))
            worst = max(worst, ratio)
        return CheckResult("mstft_leakage", worst, f"<{MSTFT_NOISE_RATIO:g}", worst < MSTFT_NOISE_RATIO)

    @logged_check("energy")
    def check_energy(self) -> CheckResult:
        low, high = ENERGY_RANGE
        worst = 0.0
        for x, augmented in self._utterance_pairs(16):
            ratio = float(np.linalg.norm(augmented.samples) / np.linalg.norm(x.samples))
            worst = max(worst, abs(ratio - 1.0))
        return CheckResult("energy", 1.0 + worst, f"[{low},{high}]", worst <= high - 1.0)
