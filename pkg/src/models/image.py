"""Image and patch data models."""

from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _frozen_array(value, ndim: Optional[int] = None) -> np.ndarray:
    arr = np.array(value, dtype=np.float64, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-D array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


class MultiBandImage(BaseModel):
    """B x H x W grid of intensities in [0, 1].

    Houses the SAR (1 band), multispectral, Brovey and fused (3 bands) images.
    A 2-D array is accepted as a single band.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray
    bit_depth_origin: int = Field(default=8, description="Source bit depth, 8 or 16")

    @field_validator("data", mode="before")
    @classmethod
    def _validate_data(cls, value):
        arr = np.array(value, dtype=np.float64, copy=True)
        if arr.ndim == 2:
            arr = arr[np.newaxis]
        if arr.ndim != 3:
            raise ValueError(f"image data must be B x H x W, got shape {arr.shape}")
        if arr.shape[0] not in (1, 3):
            raise ValueError(f"images carry 1 or 3 bands, got {arr.shape[0]}")
        if arr.shape[1] < 1 or arr.shape[2] < 1:
            raise ValueError("image must have at least one pixel")
        if not np.all((arr >= 0.0) & (arr <= 1.0)):
            raise ValueError("intensities must lie in [0, 1]")
        arr.setflags(write=False)
        return arr

    @field_validator("bit_depth_origin")
    @classmethod
    def _validate_depth(cls, value: int) -> int:
        if value not in (8, 16):
            raise ValueError(f"bit depth must be 8 or 16, got {value}")
        return value

    @property
    def bands(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    def band(self, index: int) -> np.ndarray:
        return self.data[index]


class PatchGrid(BaseModel):
    """Top-left origins of square patches covering an image.

    Origins are row-major; the last row and column origins are clamped so the
    final patch ends exactly at the image border.
    """
    model_config = ConfigDict(frozen=True)

    patch_side: int = Field(..., ge=1)
    stride: int = Field(..., ge=1)
    image_height: int = Field(..., ge=1)
    image_width: int = Field(..., ge=1)
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_geometry(self) -> "PatchGrid":
        s = self.patch_side
        if self.stride > s:
            raise ValueError(f"stride {self.stride} exceeds patch side {s}")
        if s > min(self.image_height, self.image_width):
            raise ValueError(f"patch side {s} exceeds image extent")
        for origins, extent in ((self.rows, self.image_height), (self.cols, self.image_width)):
            if not origins or origins[0] != 0 or origins[-1] != extent - s:
                raise ValueError("origins must start at 0 and end at extent - patch_side")
            if any(b <= a or b - a > s for a, b in zip(origins, origins[1:])):
                raise ValueError("origins must increase without leaving gaps")
        return self

    @property
    def origins(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((r, c) for r in self.rows for c in self.cols)

    @property
    def count(self) -> int:
        return len(self.rows) * len(self.cols)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.image_height, self.image_width


class PatchMatrix(BaseModel):
    """p x q matrix with one vectorized patch per column.

    Multi-band patches are band-concatenated, so p = bands * patch_side**2.
    `means` holds the per-column DC offsets once the matrix is centered.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    bands: int = Field(..., ge=1)
    patch_side: int = Field(..., ge=1)
    means: Optional[np.ndarray] = None

    @field_validator("values", mode="before")
    @classmethod
    def _validate_values(cls, value):
        return _frozen_array(value, ndim=2)

    @field_validator("means", mode="before")
    @classmethod
    def _validate_means(cls, value):
        if value is None:
            return None
        return _frozen_array(value, ndim=1)

    @model_validator(mode="after")
    def _check_shape(self) -> "PatchMatrix":
        if self.values.shape[0] != self.bands * self.patch_side ** 2:
            raise ValueError(
                f"patch dimension {self.values.shape[0]} does not match "
                f"{self.bands} band(s) of side {self.patch_side}"
            )
        if self.means is not None and self.means.shape[0] != self.values.shape[1]:
            raise ValueError("one mean per column is required")
        return self

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]

    @property
    def centered(self) -> bool:
        return self.means is not None
