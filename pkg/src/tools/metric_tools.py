"""Reference-based fusion quality metrics."""

import logging
from typing import List, Optional, Tuple

import numpy as np

from src.config.settings import METRIC_SCALE
from src.errors import BandCountError, DegenerateInput, DimensionError
from src.models.image import MultiBandImage
from src.models.metrics_report import MetricsReport

logger = logging.getLogger(__name__)


def _pair(fused_band, ref_band) -> Tuple[np.ndarray, np.ndarray]:
    fused = np.asarray(fused_band, dtype=np.float64)
    ref = np.asarray(ref_band, dtype=np.float64)
    if fused.shape != ref.shape:
        raise DimensionError(f"band sizes differ: {fused.shape} vs {ref.shape}")
    return fused, ref


def spectral_distortion(fused_band, ref_band, scale: float = METRIC_SCALE) -> float:
    """Mean absolute difference on the 0-`scale` range."""
    fused, ref = _pair(fused_band, ref_band)
    return float(np.mean(np.abs(fused - ref)) * scale)


def correlation_coefficient(fused_band, ref_band) -> float:
    """Pearson correlation; raises DegenerateInput for a constant band."""
    fused, ref = _pair(fused_band, ref_band)
    a = fused.ravel() - fused.mean()
    b = ref.ravel() - ref.mean()
    norm_a = np.sqrt(a @ a)
    norm_b = np.sqrt(b @ b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise DegenerateInput("correlation is undefined for a constant band")
    return float(np.clip((a @ b) / (norm_a * norm_b), -1.0, 1.0))


def mse(fused_band, ref_band, scale: float = METRIC_SCALE) -> Tuple[float, float]:
    """(MSE, RMSE) on the 0-`scale` range."""
    fused, ref = _pair(fused_band, ref_band)
    diff = (fused - ref) * scale
    value = float(np.mean(diff * diff))
    return value, float(np.sqrt(value))


def _safe_cc(fused_band, ref_band, label: str) -> Optional[float]:
    try:
        return correlation_coefficient(fused_band, ref_band)
    except DegenerateInput:
        logger.warning("correlation %s undefined: constant band", label)
        return None


def _mean_defined(values: List[Optional[float]]) -> Optional[float]:
    defined = [v for v in values if v is not None]
    if len(defined) != len(values):
        return None
    return float(np.mean(defined))


def metrics_report(
    fused: MultiBandImage,
    ms: MultiBandImage,
    sar: MultiBandImage,
    scale: float = METRIC_SCALE,
) -> MetricsReport:
    """Per-band and overall metrics of a fused image against MS and SAR."""
    if fused.bands != 3 or ms.bands != 3:
        raise BandCountError("fused and multispectral images must have 3 bands")
    if sar.bands != 1:
        raise BandCountError(f"SAR image must have 1 band, got {sar.bands}")
    if not fused.shape == ms.shape == sar.shape:
        raise DimensionError(
            f"image sizes differ: fused {fused.shape}, MS {ms.shape}, SAR {sar.shape}"
        )

    distortion, errors, roots, cc_ms, cc_sar = [], [], [], [], []
    for i in range(3):
        f = fused.band(i)
        distortion.append(spectral_distortion(f, ms.band(i), scale))
        value, root = mse(f, ms.band(i), scale)
        errors.append(value)
        roots.append(root)
        cc_ms.append(_safe_cc(f, ms.band(i), f"band {i + 1} vs MS"))
        cc_sar.append(_safe_cc(f, sar.band(0), f"band {i + 1} vs SAR"))

    cc_ms_mean = _mean_defined(cc_ms)
    cc_sar_mean = _mean_defined(cc_sar)
    cc_overall = _mean_defined([cc_ms_mean, cc_sar_mean])
    return MetricsReport(
        distortion=distortion,
        cc_ms_bands=cc_ms,
        cc_sar_bands=cc_sar,
        mse=errors,
        rmse=roots,
        overall_distortion=float(np.mean(distortion)),
        cc_ms=cc_ms_mean,
        cc_sar=cc_sar_mean,
        cc_overall=cc_overall,
        overall_mse=float(np.mean(errors)),
        overall_rmse=float(np.mean(roots)),
        scale=scale,
    )
