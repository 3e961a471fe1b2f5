class PhaseAugError(ValueError):
    """Base class for every error raised by the toolkit."""


class SignalError(PhaseAugError):
    """Empty, non-finite or mismatched sample data."""


class SpectrogramError(PhaseAugError):
    """Malformed spectrogram or an inverse that cannot be normalized."""


class PhaseError(PhaseAugError):
    """Invalid phase-rotation vector or time shift."""


class FilterError(PhaseAugError):
    """Invalid low-pass design parameters or input length."""


class ConfigError(PhaseAugError):
    """Invalid configuration value, unknown key or bad command-line usage."""


class WavFormatError(PhaseAugError):
    """Unreadable, corrupt, multichannel or unsupported WAV data."""
