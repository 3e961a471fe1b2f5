from enum import Enum, IntEnum


class ExitCode(IntEnum):
    """Process exit status of the command-line tool."""

    SUCCESS = 0
    FAILURE = 1
    USAGE = 2


class WavEncoding(str, Enum):
    """Sample encodings accepted for mono WAV input and output."""

    PCM16 = "pcm16"
    FLOAT32 = "float32"


class PolicyMode(str, Enum):
    """How the per-bin phase rotation is sampled."""

    FILTERED = "filtered"  # low-passed per-bin time shift
    UNFILTERED = "unfiltered"  # raw per-bin time shift
    PHASE = "phase"  # gaussian directly around delta * phi_ref
