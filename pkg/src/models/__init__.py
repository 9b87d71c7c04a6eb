"""Data models for SAR / multispectral fusion."""
from .image import MultiBandImage, PatchGrid, PatchMatrix
from .sparse_code import SparseCode, SparseCodeMatrix
from .dictionary import CoupledDictionary, TrainConfig, TrainTrace
from .fusion import BroveyConfig, BroveyOutput, FusionMask, FusionResult
from .metrics_report import MetricsReport
from .run_config import RunConfig
from .baseline import PcaBasis
