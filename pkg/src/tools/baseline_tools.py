"""PCA and HSV component-substitution baselines."""

import logging

import numpy as np
from skimage import color

from src.errors import BandCountError, DegenerateInput, DimensionError
from src.models.baseline import PcaBasis
from src.models.image import MultiBandImage

logger = logging.getLogger(__name__)

HUE_DEGREES = 360.0


def _check_pair(ms: MultiBandImage, sar: MultiBandImage) -> None:
    if ms.bands != 3 or sar.bands != 1:
        raise BandCountError(f"expected 3-band MS and 1-band SAR, got {ms.bands} and {sar.bands}")
    if ms.shape != sar.shape:
        raise DimensionError(f"image sizes differ: {ms.shape} vs {sar.shape}")


def _pixels(ms: MultiBandImage) -> np.ndarray:
    return ms.data.reshape(3, -1).T


def pca_basis(ms: MultiBandImage) -> PcaBasis:
    """Eigen-decomposition of the band covariance."""
    pixels = _pixels(ms)
    means = pixels.mean(axis=0)
    covariance = np.cov(pixels - means, rowvar=False, bias=True)
    eigenvalues, vectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    vectors = vectors[:, order]
    if eigenvalues[0] <= 0.0:
        raise DegenerateInput("band covariance is rank 0; every pixel has the same colour")
    signs = np.where(vectors.sum(axis=0) < 0, -1.0, 1.0)
    return PcaBasis(means=means, components=vectors * signs, eigenvalues=eigenvalues)


def pca_project(ms: MultiBandImage, basis: PcaBasis) -> np.ndarray:
    """N x 3 component scores, one row per pixel."""
    return (_pixels(ms) - basis.means) @ basis.components


def pca_inverse(scores: np.ndarray, basis: PcaBasis, shape) -> np.ndarray:
    """Back-project scores to a 3 x H x W band stack (unclipped)."""
    pixels = scores @ basis.components.T + basis.means
    return pixels.T.reshape((3,) + tuple(shape))


def match_moments(values: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Affinely map `values` onto the mean and standard deviation of `reference`."""
    spread = values.std()
    if spread == 0.0:
        return np.full_like(values, reference.mean())
    return (values - values.mean()) / spread * reference.std() + reference.mean()


def pca_fuse(ms: MultiBandImage, sar: MultiBandImage, match: bool = True) -> MultiBandImage:
    """Replace the first principal component with the SAR band."""
    _check_pair(ms, sar)
    basis = pca_basis(ms)
    scores = pca_project(ms, basis)
    replacement = sar.data.reshape(-1)
    scores[:, 0] = match_moments(replacement, scores[:, 0]) if match else replacement
    fused = pca_inverse(scores, basis, ms.shape)
    return MultiBandImage(data=np.clip(fused, 0.0, 1.0), bit_depth_origin=ms.bit_depth_origin)


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """3 x H x W RGB to 3 x H x W HSV with hue in degrees [0, 360)."""
    hsv = color.rgb2hsv(np.moveaxis(np.asarray(rgb, dtype=np.float64), 0, -1))
    hsv[..., 0] *= HUE_DEGREES
    return np.moveaxis(hsv, -1, 0)


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    """Inverse of `rgb_to_hsv` (hexcone model)."""
    hsv = np.moveaxis(np.array(hsv, dtype=np.float64), 0, -1)
    hsv[..., 0] = np.mod(hsv[..., 0], HUE_DEGREES) / HUE_DEGREES
    return np.moveaxis(color.hsv2rgb(hsv), -1, 0)


def hsv_fuse(ms: MultiBandImage, sar: MultiBandImage) -> MultiBandImage:
    """Replace the HSV value channel with the SAR intensity."""
    _check_pair(ms, sar)
    hsv = rgb_to_hsv(ms.data)
    hsv[2] = sar.data[0]
    fused = hsv_to_rgb(hsv)
    return MultiBandImage(data=np.clip(fused, 0.0, 1.0), bit_depth_origin=ms.bit_depth_origin)
