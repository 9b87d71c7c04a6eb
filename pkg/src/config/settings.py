"""Configuration settings for the SAR / multispectral fusion system."""

import logging
import os
from pathlib import Path

from dotenv import load_dotenv
from rich.logging import RichHandler

load_dotenv()

# Base paths
BASE_DIR = Path(__file__).resolve().parent.parent.parent
CONFIGS_DIR = Path(os.getenv("CONFIGS_DIR", BASE_DIR / "configs"))
OUTPUT_DIR = Path(os.getenv("OUTPUT_DIR", BASE_DIR / "output"))

# Patch geometry
PATCH_SIDE = int(os.getenv("FUSION_PATCH_SIDE", 8))
STRIDE = int(os.getenv("FUSION_STRIDE", 4))

# Coupled dictionary training
ATOM_COUNT = int(os.getenv("FUSION_ATOM_COUNT", 256))
SPARSITY = int(os.getenv("FUSION_SPARSITY", 4))
ROUNDS = int(os.getenv("FUSION_ROUNDS", 20))
RESIDUAL_TOL = float(os.getenv("FUSION_RESIDUAL_TOL", 1e-8))
LSTSQ_RCOND = float(os.getenv("FUSION_LSTSQ_RCOND", 1e-10))
SEED = int(os.getenv("FUSION_SEED", 42))

# Brovey pre-processing
BROVEY_EPSILON = float(os.getenv("FUSION_BROVEY_EPSILON", 1e-6))

# Reporting
METRIC_SCALE = float(os.getenv("FUSION_METRIC_SCALE", 255.0))
OUTPUT_DEPTH = int(os.getenv("FUSION_OUTPUT_DEPTH", 8))

# Baselines
BASELINE_METHODS = ("brovey", "pca", "hsv")

# Dictionary file format
DICTIONARY_MAGIC = b"CDLF"
DICTIONARY_VERSION = 1

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")


def configure_logging(level: str = LOG_LEVEL) -> None:
    """Route all package loggers through a rich handler."""
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=False, show_path=False)],
        force=True,
    )
