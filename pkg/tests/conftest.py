"""Shared fixtures: small synthetic scenes and a fast run configuration."""

import numpy as np
import pytest

from src.models.image import MultiBandImage
from src.models.run_config import RunConfig


def smooth_field(rng: np.random.Generator, height: int, width: int, waves: int = 3) -> np.ndarray:
    """Sum of random low-frequency waves plus a little noise, scaled into [0.05, 0.95]."""
    yy, xx = np.mgrid[0:height, 0:width] / max(height, width)
    field = np.zeros((height, width))
    for _ in range(waves):
        fy, fx = rng.uniform(0.5, 3.0, size=2)
        phase = rng.uniform(0, 2 * np.pi)
        field += np.sin(2 * np.pi * (fy * yy + fx * xx) + phase)
    field += 0.1 * rng.standard_normal((height, width))
    field = (field - field.min()) / (field.max() - field.min())
    return 0.05 + 0.9 * field


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)


@pytest.fixture
def ms_image(rng) -> MultiBandImage:
    return MultiBandImage(data=np.stack([smooth_field(rng, 16, 16) for _ in range(3)]))


@pytest.fixture
def sar_image(rng) -> MultiBandImage:
    return MultiBandImage(data=smooth_field(rng, 16, 16, waves=5))


@pytest.fixture
def gray_equal_pair(rng):
    """MS with three equal bands and SAR equal to their sum."""
    v = smooth_field(rng, 16, 16) / 3.0
    ms = MultiBandImage(data=np.stack([v, v, v]))
    sar = MultiBandImage(data=np.clip(3.0 * v, 0.0, 1.0))
    return ms, sar


@pytest.fixture
def small_config() -> RunConfig:
    return RunConfig(patch_side=4, stride=2, atom_count=16, sparsity=2, rounds=3, seed=1)


@pytest.fixture
def make_scene():
    """Factory for MS / SAR pairs of any size."""
    def build(height: int, width: int, seed: int = 0):
        rng = np.random.default_rng(seed)
        ms = MultiBandImage(data=np.stack([smooth_field(rng, height, width) for _ in range(3)]))
        sar = MultiBandImage(data=smooth_field(rng, height, width, waves=5))
        return ms, sar
    return build
