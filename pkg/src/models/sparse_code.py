"""Sparse code data models."""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class SparseCode(BaseModel):
    """One column of the shared code matrix: support indices and coefficients."""
    model_config = ConfigDict(frozen=True)

    support: Tuple[int, ...] = ()
    coefficients: Tuple[float, ...] = ()

    @model_validator(mode="after")
    def _check_alignment(self) -> "SparseCode":
        if len(self.support) != len(self.coefficients):
            raise ValueError("support and coefficients must have equal length")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support indices must be distinct")
        if any(index < 0 for index in self.support):
            raise ValueError("support indices must be non-negative")
        return self

    @property
    def size(self) -> int:
        return len(self.support)

    def to_dense(self, atom_count: int) -> np.ndarray:
        column = np.zeros(atom_count)
        if self.support:
            column[list(self.support)] = self.coefficients
        return column


class SparseCodeMatrix(BaseModel):
    """The shared code L (A x q), stored column by column."""
    model_config = ConfigDict(frozen=True)

    codes: Tuple[SparseCode, ...]
    atom_count: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _check_bounds(self) -> "SparseCodeMatrix":
        for code in self.codes:
            if code.support and max(code.support) >= self.atom_count:
                raise ValueError(f"support index out of range for {self.atom_count} atoms")
        return self

    @property
    def q(self) -> int:
        return len(self.codes)

    @property
    def max_support(self) -> int:
        return max((code.size for code in self.codes), default=0)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.atom_count, self.q))
        for m, code in enumerate(self.codes):
            if code.support:
                dense[list(code.support), m] = code.coefficients
        return dense

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "SparseCodeMatrix":
        """Build codes from a dense A x q matrix; exact zeros are dropped."""
        codes = []
        for column in np.asarray(dense, dtype=np.float64).T:
            support = np.flatnonzero(column)
            codes.append(SparseCode(
                support=tuple(int(i) for i in support),
                coefficients=tuple(float(c) for c in column[support]),
            ))
        return cls(codes=tuple(codes), atom_count=dense.shape[0])
