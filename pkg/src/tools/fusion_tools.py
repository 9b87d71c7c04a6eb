"""Reconstruction-error patch selection, mask construction and pixel blending."""

import logging
from typing import Tuple

import numpy as np

from src.errors import DimensionError
from src.models.dictionary import CoupledDictionary, TrainConfig
from src.models.fusion import FusionMask
from src.models.image import MultiBandImage, PatchGrid
from src.models.sparse_code import SparseCode, SparseCodeMatrix
from src.tools.patch_tools import reassemble_scalar
from src.tools.sparse_tools import joint_code, stack_pair

logger = logging.getLogger(__name__)

LABEL_BROVEY = 1
LABEL_MULTISPECTRAL = 2


def stacked_dictionary(dictionary: CoupledDictionary) -> np.ndarray:
    """D = [D_MS; D_B], a 2p x A matrix."""
    return stack_pair(dictionary.d_ms, dictionary.d_b)


def split_dictionary(stacked: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Inverse of `stacked_dictionary`."""
    stacked = np.asarray(stacked, dtype=np.float64)
    if stacked.shape[0] % 2:
        raise DimensionError(f"stacked dictionary has an odd row count {stacked.shape[0]}")
    half = stacked.shape[0] // 2
    return stacked[:half], stacked[half:]


def code_patches(
    dictionary: CoupledDictionary,
    x_ms: np.ndarray,
    x_b: np.ndarray,
    cfg: TrainConfig,
) -> SparseCodeMatrix:
    """Fresh joint codes for patch pairs not seen during training."""
    return joint_code(
        dictionary.d_ms, dictionary.d_b, x_ms, x_b,
        cfg.sparsity, cfg.residual_tol, cfg.lstsq_rcond,
    )


def reconstruction_errors(
    stacked: np.ndarray,
    code: SparseCode,
    x_ms: np.ndarray,
    x_b: np.ndarray,
) -> Tuple[float, float]:
    """(e_MS, e_B) for one patch pair.

    e_MS compares the reconstruction with the swapped stack [x_B; x_MS],
    e_B with the natural stack [x_MS; x_B].
    """
    x_ms = np.asarray(x_ms, dtype=np.float64).ravel()
    x_b = np.asarray(x_b, dtype=np.float64).ravel()
    if x_ms.shape != x_b.shape or stacked.shape[0] != 2 * x_ms.shape[0]:
        raise DimensionError(
            f"patches of length {x_ms.shape[0]}/{x_b.shape[0]} do not match a "
            f"{stacked.shape[0]}-row stacked dictionary"
        )
    reconstruction = code.to_dense(stacked.shape[1]) @ stacked.T
    swapped = reconstruction - np.concatenate([x_b, x_ms])
    natural = reconstruction - np.concatenate([x_ms, x_b])
    return float(swapped @ swapped), float(natural @ natural)


def select_patch_labels(
    dictionary: CoupledDictionary,
    codes: SparseCodeMatrix,
    x_ms: np.ndarray,
    x_b: np.ndarray,
) -> np.ndarray:
    """Per-patch labels: 2 (multispectral) where e_MS < e_B, else 1 (Brovey)."""
    x_ms = np.asarray(x_ms, dtype=np.float64)
    x_b = np.asarray(x_b, dtype=np.float64)
    if codes.q != x_ms.shape[1] or x_ms.shape != x_b.shape:
        raise DimensionError(
            f"{codes.q} codes for patch matrices {x_ms.shape} and {x_b.shape}"
        )
    stacked = stacked_dictionary(dictionary)
    labels = np.full(codes.q, LABEL_BROVEY, dtype=np.int64)
    for m, code in enumerate(codes.codes):
        e_ms, e_b = reconstruction_errors(stacked, code, x_ms[:, m], x_b[:, m])
        if e_ms < e_b:
            labels[m] = LABEL_MULTISPECTRAL
    logger.info(
        "selected multispectral patches for %d of %d positions",
        int(np.count_nonzero(labels == LABEL_MULTISPECTRAL)), codes.q,
    )
    return labels


def build_mask(labels: np.ndarray, grid: PatchGrid) -> FusionMask:
    """K = P*(K_alpha) - 1."""
    return FusionMask(plane=reassemble_scalar(labels, grid) - 1.0)


def blend(ms: MultiBandImage, brovey: MultiBandImage, mask: FusionMask) -> MultiBandImage:
    """I_F = K * I_MS + (1 - K) * I_B, per pixel and band."""
    if ms.shape != brovey.shape or ms.shape != mask.shape:
        raise DimensionError(
            f"cannot blend images {ms.shape} and {brovey.shape} with mask {mask.shape}"
        )
    if ms.bands != brovey.bands:
        raise DimensionError(f"band counts differ: {ms.bands} vs {brovey.bands}")
    k = mask.plane[np.newaxis]
    fused = k * ms.data + (1.0 - k) * brovey.data
    return MultiBandImage(data=np.clip(fused, 0.0, 1.0), bit_depth_origin=ms.bit_depth_origin)
