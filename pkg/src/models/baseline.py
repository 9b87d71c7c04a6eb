"""Component-substitution baseline models."""

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class PcaBasis(BaseModel):
    """Principal components of the pixel-wise band triples.

    `components` holds one orthonormal component per column, ordered by
    descending eigenvalue; each component is oriented so its loadings sum to
    a non-negative value.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    means: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray

    @field_validator("means", "components", "eigenvalues", mode="before")
    @classmethod
    def _as_array(cls, value):
        arr = np.array(value, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_basis(self) -> "PcaBasis":
        if self.means.shape != (3,) or self.components.shape != (3, 3) or self.eigenvalues.shape != (3,):
            raise ValueError("PCA basis must describe exactly 3 bands")
        if not np.allclose(self.components.T @ self.components, np.eye(3), atol=1e-10, rtol=0.0):
            raise ValueError("PCA components must be orthonormal")
        if np.any(np.diff(self.eigenvalues) > 0) or np.any(self.eigenvalues < 0):
            raise ValueError("eigenvalues must be non-negative and non-increasing")
        return self
