"""PCA and HSV component substitution."""

import numpy as np
import pytest

from src.errors import BandCountError, DegenerateInput
from src.models.image import MultiBandImage
from src.tools.baseline_tools import (
    hsv_fuse,
    hsv_to_rgb,
    match_moments,
    pca_basis,
    pca_fuse,
    pca_inverse,
    pca_project,
    rgb_to_hsv,
)


class TestPca:
    def test_basis_is_orthonormal_and_ordered(self, ms_image):
        basis = pca_basis(ms_image)
        np.testing.assert_allclose(basis.components.T @ basis.components, np.eye(3), atol=1e-10)
        assert list(basis.eigenvalues) == sorted(basis.eigenvalues, reverse=True)
        assert np.all(basis.components.sum(axis=0) >= 0)

    def test_projection_round_trip(self, ms_image):
        basis = pca_basis(ms_image)
        restored = pca_inverse(pca_project(ms_image, basis), basis, ms_image.shape)
        np.testing.assert_allclose(restored, ms_image.data, atol=1e-12)

    def test_sar_affine_in_first_component_reproduces_ms(self, ms_image):
        basis = pca_basis(ms_image)
        first = pca_project(ms_image, basis)[:, 0]
        sar = MultiBandImage(data=((first - first.min()) / np.ptp(first)).reshape(ms_image.shape))
        fused = pca_fuse(ms_image, sar)
        np.testing.assert_allclose(fused.data, ms_image.data, atol=1e-10)

    def test_unmatched_substitution_uses_raw_sar(self, ms_image, sar_image):
        matched = pca_fuse(ms_image, sar_image, match=True)
        raw = pca_fuse(ms_image, sar_image, match=False)
        assert not np.allclose(matched.data, raw.data)

    def test_constant_image_has_no_components(self):
        ms = MultiBandImage(data=np.full((3, 4, 4), 0.4))
        with pytest.raises(DegenerateInput):
            pca_basis(ms)

    def test_match_moments(self, rng):
        values = rng.uniform(size=50)
        reference = rng.normal(3.0, 2.0, size=50)
        matched = match_moments(values, reference)
        assert matched.mean() == pytest.approx(reference.mean())
        assert matched.std() == pytest.approx(reference.std())


class TestHsv:
    def test_primary_hues_in_degrees(self):
        rgb = np.zeros((3, 1, 3))
        rgb[0, 0, 0] = 1.0
        rgb[1, 0, 1] = 1.0
        rgb[2, 0, 2] = 1.0
        hsv = rgb_to_hsv(rgb)
        np.testing.assert_allclose(hsv[0, 0], [0.0, 120.0, 240.0])
        np.testing.assert_allclose(hsv[2, 0], 1.0)

    def test_conversion_round_trip(self, ms_image):
        np.testing.assert_allclose(hsv_to_rgb(rgb_to_hsv(ms_image.data)), ms_image.data, atol=1e-12)

    def test_value_channel_sar_reproduces_ms(self, ms_image):
        sar = MultiBandImage(data=ms_image.data.max(axis=0))
        np.testing.assert_allclose(hsv_fuse(ms_image, sar).data, ms_image.data, atol=1e-12)

    def test_sar_sets_brightness(self, ms_image, sar_image):
        fused = hsv_fuse(ms_image, sar_image)
        np.testing.assert_allclose(fused.data.max(axis=0), sar_image.data[0], atol=1e-12)

    def test_band_counts(self, ms_image):
        with pytest.raises(BandCountError):
            hsv_fuse(ms_image, ms_image)
