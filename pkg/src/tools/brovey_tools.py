"""Brovey ratio-transform pre-processing."""

import logging
from typing import Optional

import numpy as np

from src.errors import BandCountError, DimensionError
from src.models.fusion import BroveyConfig, BroveyOutput
from src.models.image import MultiBandImage

logger = logging.getLogger(__name__)


def _check_pair(ms: MultiBandImage, sar: MultiBandImage) -> None:
    if ms.bands != 3:
        raise BandCountError(f"multispectral image must have 3 bands, got {ms.bands}")
    if sar.bands != 1:
        raise BandCountError(f"SAR image must have 1 band, got {sar.bands}")
    if ms.shape != sar.shape:
        raise DimensionError(f"image sizes differ: {ms.shape} vs {sar.shape}")


def brovey_transform(
    ms: MultiBandImage,
    sar: MultiBandImage,
    cfg: Optional[BroveyConfig] = None,
) -> BroveyOutput:
    """Multiply each MS band by SAR / (sum of MS bands).

    Pixels whose band sum falls below epsilon carry no chromaticity and
    come out black. Products above 1 are clipped and counted.
    """
    cfg = cfg or BroveyConfig()
    _check_pair(ms, sar)

    theta = ms.data.sum(axis=0)
    valid = theta >= cfg.epsilon
    gain = np.zeros_like(theta)
    np.divide(sar.data[0], theta, out=gain, where=valid)
    fused = ms.data * gain

    clipped = int(np.count_nonzero(fused > 1.0))
    if clipped:
        logger.info("Brovey transform clipped %d band values to 1", clipped)
    image = MultiBandImage(data=np.minimum(fused, 1.0), bit_depth_origin=ms.bit_depth_origin)
    return BroveyOutput(image=image, clipped_values=clipped)


def brovey_fuse(
    ms: MultiBandImage,
    sar: MultiBandImage,
    cfg: Optional[BroveyConfig] = None,
) -> MultiBandImage:
    """Brovey image I_B used as the pseudo-SAR source."""
    return brovey_transform(ms, sar, cfg).image
