import os
from pathlib import Path

from src import __version__

# Application metadata
APP_NAME = "phaseaug"
APP_VERSION = __version__

# File paths
HOME_DIR = Path.home()
CONFIG_DIR = Path(os.environ.get("PHASEAUG_HOME", HOME_DIR / ".phaseaug"))


# Logging Configuration
LOG_DIR = Path(os.environ.get("PHASEAUG_LOG_DIR", CONFIG_DIR / "logs"))
LOG_LEVEL = os.environ.get("PHASEAUG_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s"
LOG_MAX_SIZE = 5 * 1024 * 1024  # 5 MB
LOG_BACKUP_COUNT = 5


# STFT
N_FFT = 1024
HOP = 256
ENVELOPE_FLOOR = 1e-11

# Kaiser-windowed sinc low-pass applied to the per-bin time shifts
KERNEL_SIZE = 128
CUTOFF = 0.05  # cycles per sample of the shift sequence
TRANSITION_HALF_WIDTH = 0.06

# Augmentation policy
DELTA_MAX = 2.0  # samples
SIGMA2 = 6.0
PROBABILITY = 1.0
SEED = 0

# Mel features (HiFi-GAN V1 public configuration)
SAMPLE_RATE = 22050
N_MELS = 80
F_MIN = 0.0
F_MAX = 8000.0
MEL_FLOOR = 1e-5

# Multi-resolution STFT: (n_fft, hop, window_length)
MSTFT_RESOLUTIONS = ((512, 128, 512), (1024, 256, 1024), (2048, 512, 2048))
MSTFT_FLOOR = 1e-7

# Finite-difference steps for double precision
FD_STEP_LOSS = 1e-5
FD_STEP_DELTA = 1e-4

# Output
OUTPUT_SUFFIX = ".aug.wav"
SHIFT_SUFFIX = ".shift.wav"
PLOT_SUFFIX = ".plot.txt"
