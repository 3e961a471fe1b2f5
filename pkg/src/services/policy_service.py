from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from src.config import DELTA_MAX, PROBABILITY, SEED, SIGMA2
from src.dsp.filters import design_kaiser_sinc, extended_length, filter_mu
from src.dsp.models import FilterSpec, FloatArray, PhaseVector, Signal, StftConfig
from src.dsp.phaseaug import phaseaug, phi_ref
from src.dsp.stft import roundtrip
from src.utils.enums import PolicyMode
from src.utils.exceptions import ConfigError, SignalError
from src.utils.logging import get_logger

logger = get_logger(__name__)

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class PolicyConfig:
    """Parameters of the random phase-rotation policy."""

    delta_max: float = DELTA_MAX
    sigma2: float = SIGMA2
    probability: float = PROBABILITY
    stft: StftConfig = field(default_factory=StftConfig)
    filter_spec: FilterSpec = field(default_factory=FilterSpec)
    seed: int = SEED
    mode: PolicyMode = PolicyMode.FILTERED

    def __post_init__(self) -> None:
        if not (np.isfinite(self.delta_max) and self.delta_max >= 0):
            raise ConfigError(f"delta_max must be a finite value >= 0, got {self.delta_max}")
        if not (np.isfinite(self.sigma2) and self.sigma2 >= 0):
            raise ConfigError(f"sigma2 must be a finite value >= 0, got {self.sigma2}")
        if not 0.0 <= self.probability <= 1.0:
            raise ConfigError(f"probability must lie in [0, 1], got {self.probability}")
        if not 0 <= int(self.seed) <= MAX_SEED:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        object.__setattr__(self, "mode", PolicyMode(self.mode))

    @property
    def predicted_shift_variance(self) -> float:
        """sigma^2 * sum(h^2): variance of the filtered per-bin shifts around delta."""
        return self.sigma2 * design_kaiser_sinc(self.filter_spec).noise_gain

    def rng(self) -> "RngState":
        return RngState(int(self.seed))


@dataclass(frozen=True)
class RngState:
    """
    Seed plus substream path.

    Every call to `generator()` starts the same stream, so identical states give
    identical draws; `split(i)` derives an independent substream keyed by `i`.
    """

    seed: int = SEED
    key: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) <= MAX_SEED:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def split(self, index: int) -> "RngState":
        return RngState(self.seed, (*self.key, int(index)))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.key)))


RngLike = RngState | np.random.Generator


def as_generator(rng: RngLike) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngState) else rng


@dataclass(frozen=True)
class PhaseDraw:
    """One realization of the policy: the mean shift, the per-bin shifts and the rotation."""

    delta: float
    shifts: FloatArray | None
    phi: PhaseVector


@dataclass(frozen=True)
class AugmentResult:
    signal: Signal
    draw: PhaseDraw
    applied: bool


class AugmentationPolicy:
    """
    Random phase-rotation augmentation.

    Draws delta ~ U(-delta_max, delta_max) and per-bin shifts mu ~ N(delta, sigma^2)
    over n_bins + L - 1 positions, low-passes them to n_bins values and rotates
    bin k by mu_l[k] * phi_ref[k]. No phase vector is cached between calls.
    """

    def __init__(self, cfg: PolicyConfig = PolicyConfig()) -> None:
        self.cfg = cfg
        self.kernel = design_kaiser_sinc(cfg.filter_spec)
        self.reference = phi_ref(cfg.stft.n_fft).angles
        self.n_bins = cfg.stft.n_bins
        self.logger = get_logger(self.__class__.__name__)

    def _draw(self, gen: np.random.Generator, pinned_delta: float | None = None) -> PhaseDraw:
        """Sample one rotation; `pinned_delta` replaces the uniform draw and exists for tests only."""
        cfg = self.cfg
        delta = float(gen.uniform(-cfg.delta_max, cfg.delta_max)) if pinned_delta is None else float(pinned_delta)
        scale = float(np.sqrt(cfg.sigma2))

        shifts: FloatArray | None
        if cfg.mode is PolicyMode.FILTERED:
            mu = gen.normal(delta, scale, size=extended_length(self.n_bins, self.kernel))
            shifts = filter_mu(mu, self.kernel, self.n_bins)
            angles = shifts * self.reference
        elif cfg.mode is PolicyMode.UNFILTERED:
            shifts = gen.normal(delta, scale, size=self.n_bins)
            angles = shifts * self.reference
        else:
            shifts = None
            angles = gen.normal(delta * self.reference, scale)

        angles[0] = 0.0
        return PhaseDraw(delta=delta, shifts=shifts, phi=PhaseVector(angles, cfg.stft.n_fft))

    def sample_draw(self, rng: RngLike) -> PhaseDraw:
        return self._draw(as_generator(rng))

    def sample_phase_vector(self, rng: RngLike) -> PhaseVector:
        """Draw a fresh rotation vector; phi[0] is always 0."""
        return self._draw(as_generator(rng)).phi

    def sample_time_shifts(self, rng: RngLike, count: int) -> FloatArray:
        """
        Draw `count` per-bin shift vectors at once, shape (count, n_fft/2 + 1).

        Uses its own draw order, so rows do not coincide with `sample_draw` results.
        """
        if self.cfg.mode is PolicyMode.PHASE:
            raise ConfigError("Phase-domain sampling has no per-bin time shifts")
        gen = as_generator(rng)
        cfg = self.cfg
        deltas = gen.uniform(-cfg.delta_max, cfg.delta_max, size=count)
        width = extended_length(self.n_bins, self.kernel) if cfg.mode is PolicyMode.FILTERED else self.n_bins
        mu = deltas[:, None] + np.sqrt(cfg.sigma2) * gen.standard_normal((count, width))
        return filter_mu(mu, self.kernel, self.n_bins) if cfg.mode is PolicyMode.FILTERED else mu

    def augment_with_draw(self, x: Signal, rng: RngLike) -> AugmentResult:
        """
        Augment `x` and report the draw that was used.

        The rotation is drawn before the probability test, so the draw is reported even
        when the identity path (STFT round trip) is taken.
        """
        if len(x) == 0:
            raise SignalError("Cannot augment an empty signal")
        gen = as_generator(rng)
        draw = self._draw(gen)
        applied = bool(gen.random() < self.cfg.probability)
        signal = phaseaug(x, draw.phi, self.cfg.stft) if applied else roundtrip(x, self.cfg.stft)
        self.logger.debug(f"augment: {len(x)} samples, delta={draw.delta:.4f}, applied={applied}")
        return AugmentResult(signal=signal, draw=draw, applied=applied)

    def augment(self, x: Signal, rng: RngLike) -> Signal:
        return self.augment_with_draw(x, rng).signal

    def augment_pair(self, x_real: Signal, x_gen: Signal, rng: RngLike) -> tuple[Signal, Signal]:
        """
        Rotate a real and a generated waveform with one shared draw.

        For GAN training, call this for the discriminator inputs, then call it again with
        an advanced generator for the generator update so the two steps see different
        rotations. The mel-spectrogram reconstruction loss belongs on the un-augmented pair.
        """
        if len(x_real) != len(x_gen):
            raise SignalError(f"Paired signals differ in length: {len(x_real)} vs {len(x_gen)}")
        gen = as_generator(rng)
        draw = self._draw(gen)
        if gen.random() < self.cfg.probability:
            return phaseaug(x_real, draw.phi, self.cfg.stft), phaseaug(x_gen, draw.phi, self.cfg.stft)
        return roundtrip(x_real, self.cfg.stft), roundtrip(x_gen, self.cfg.stft)

    def augment_batch(
        self,
        xs: Sequence[Signal],
        rng: RngState,
        keys: Sequence[int] | None = None,
        workers: int = 1,
    ) -> list[Signal]:
        """
        Augment each element with its own substream `rng.split(key)`.

        Keys default to the element indices; element i depends only on
        (seed, keys[i], xs[i]), whatever the worker count.
        """
        if not xs:
            raise SignalError("Cannot augment an empty batch")
        keys = list(range(len(xs))) if keys is None else list(keys)
        if len(keys) != len(xs):
            raise ConfigError(f"Got {len(keys)} substream keys for {len(xs)} signals")
        if len(set(keys)) != len(keys):
            raise ConfigError("Substream keys must be distinct")

        self.logger.debug(f"augment_batch: {len(xs)} signals, workers={workers}")
        if workers <= 1:
            return [self.augment(x, rng.split(key)) for x, key in zip(xs, keys, strict=True)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda item: self.augment(item[0], rng.split(item[1])), zip(xs, keys, strict=True)))


@lru_cache(maxsize=8)
def get_policy(cfg: PolicyConfig) -> AugmentationPolicy:
    logger.debug(f"Building augmentation policy for {cfg}")
    return AugmentationPolicy(cfg)


def sample_phase_vector(rng: RngLike, cfg: PolicyConfig = PolicyConfig()) -> PhaseVector:
    return get_policy(cfg).sample_phase_vector(rng)


def augment(x: Signal, rng: RngLike, cfg: PolicyConfig = PolicyConfig()) -> Signal:
    return get_policy(cfg).augment(x, rng)


def augment_pair(x_real: Signal, x_gen: Signal, rng: RngLike, cfg: PolicyConfig = PolicyConfig()) -> tuple[Signal, Signal]:
    return get_policy(cfg).augment_pair(x_real, x_gen, rng)


def augment_batch(xs: Sequence[Signal], rng: RngState, cfg: PolicyConfig = PolicyConfig()) -> list[Signal]:
    return get_policy(cfg).augment_batch(xs, rng)
