"""Fusion data models."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.config.settings import BROVEY_EPSILON
from src.models.dictionary import CoupledDictionary, TrainTrace
from src.models.image import MultiBandImage, PatchGrid
from src.models.sparse_code import SparseCodeMatrix


class BroveyConfig(BaseModel):
    """Brovey ratio-transform parameters."""
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(
        default=BROVEY_EPSILON,
        gt=0.0,
        description="Lower bound on the band sum before division",
    )


class BroveyOutput(BaseModel):
    """Brovey image plus the number of band values clipped to 1."""
    model_config = ConfigDict(frozen=True)

    image: MultiBandImage
    clipped_values: int = Field(default=0, ge=0)


class FusionMask(BaseModel):
    """Pixel-level convex weight K in [0, 1]; 1 selects multispectral."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    plane: np.ndarray

    @field_validator("plane", mode="before")
    @classmethod
    def _validate_plane(cls, value):
        arr = np.array(value, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"mask must be H x W, got shape {arr.shape}")
        if not np.all((arr >= 0.0) & (arr <= 1.0)):
            raise ValueError("mask values must lie in [0, 1]")
        arr.setflags(write=False)
        return arr

    @property
    def shape(self):
        return self.plane.shape

    def multispectral_share(self) -> float:
        return float(self.plane.mean())


class FusionResult(BaseModel):
    """Fused image together with every intermediate artifact."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    fused: MultiBandImage
    brovey: MultiBandImage
    mask: FusionMask
    labels: np.ndarray
    grid: PatchGrid
    dictionary: CoupledDictionary
    codes: SparseCodeMatrix
    trace: Optional[TrainTrace] = None
    clipped_values: int = 0
