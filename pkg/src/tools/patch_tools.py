"""Patch geometry, extraction, centering and overlap-averaging placement."""

from typing import List, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.errors import DimensionError
from src.models.image import MultiBandImage, PatchGrid, PatchMatrix


def _axis_origins(extent: int, side: int, stride: int) -> List[int]:
    origins = list(range(0, extent - side + 1, stride))
    if origins[-1] != extent - side:
        origins.append(extent - side)
    return origins


def build_patch_grid(height: int, width: int, patch_side: int, stride: int) -> PatchGrid:
    """Row-major patch origins covering every pixel, last origins clamped to the border."""
    if patch_side < 1 or patch_side > min(height, width):
        raise DimensionError(
            f"patch side {patch_side} does not fit a {height}x{width} image"
        )
    if stride < 1 or stride > patch_side:
        raise DimensionError(f"stride must lie in [1, {patch_side}], got {stride}")
    return PatchGrid(
        patch_side=patch_side,
        stride=stride,
        image_height=height,
        image_width=width,
        rows=tuple(_axis_origins(height, patch_side, stride)),
        cols=tuple(_axis_origins(width, patch_side, stride)),
    )


def coverage(grid: PatchGrid) -> np.ndarray:
    """Number of patches covering each pixel."""
    counts = np.zeros(grid.shape)
    s = grid.patch_side
    for r, c in grid.origins:
        counts[r:r + s, c:c + s] += 1.0
    return counts


def _check_grid(image: MultiBandImage, grid: PatchGrid) -> None:
    if image.shape != grid.shape:
        raise DimensionError(f"grid is for {grid.shape}, image is {image.shape}")


def extract_patches(image: MultiBandImage, grid: PatchGrid) -> PatchMatrix:
    """Vectorize every grid patch into a column.

    Within a column the bands are contiguous blocks of s*s values, each block
    in row-major order.
    """
    _check_grid(image, grid)
    s = grid.patch_side
    windows = sliding_window_view(image.data, (s, s), axis=(1, 2))
    windows = windows[:, list(grid.rows)][:, :, list(grid.cols)]
    # (B, nr, nc, s, s) -> (nr, nc, B, s, s) -> q x p
    columns = windows.transpose(1, 2, 0, 3, 4).reshape(grid.count, image.bands * s * s)
    return PatchMatrix(values=columns.T, bands=image.bands, patch_side=s)


def center_patches(patches: PatchMatrix) -> PatchMatrix:
    """Subtract each column's mean and record it."""
    means = patches.values.mean(axis=0)
    return PatchMatrix(
        values=patches.values - means,
        bands=patches.bands,
        patch_side=patches.patch_side,
        means=means,
    )


def reassemble_scalar(labels: Sequence[float], grid: PatchGrid) -> np.ndarray:
    """Place one value per patch on the pixel grid, averaging overlaps (P*)."""
    labels = np.asarray(labels, dtype=np.float64).ravel()
    if labels.shape[0] != grid.count:
        raise DimensionError(f"expected {grid.count} labels, got {labels.shape[0]}")
    s = grid.patch_side
    acc = np.zeros(grid.shape)
    for label, (r, c) in zip(labels, grid.origins):
        acc[r:r + s, c:c + s] += label
    return acc / coverage(grid)


def reassemble_values(patches: PatchMatrix, grid: PatchGrid) -> MultiBandImage:
    """Place vectorized patches back on the image, averaging overlaps uniformly.

    Centered matrices get their recorded means added back first.
    """
    if patches.patch_side != grid.patch_side or patches.q != grid.count:
        raise DimensionError(
            f"patch matrix {patches.p}x{patches.q} does not match a grid of "
            f"{grid.count} patches of side {grid.patch_side}"
        )
    s = grid.patch_side
    values = patches.values
    if patches.means is not None:
        values = values + patches.means
    blocks = values.T.reshape(grid.count, patches.bands, s, s)
    acc = np.zeros((patches.bands,) + grid.shape)
    for block, (r, c) in zip(blocks, grid.origins):
        acc[:, r:r + s, c:c + s] += block
    data = np.clip(acc / coverage(grid), 0.0, 1.0)
    return MultiBandImage(data=data)
