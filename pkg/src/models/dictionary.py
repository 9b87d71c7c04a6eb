"""Coupled dictionary and training data models."""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config.settings import (
    ATOM_COUNT,
    LSTSQ_RCOND,
    RESIDUAL_TOL,
    ROUNDS,
    SEED,
    SPARSITY,
)

UNIT_NORM_TOL = 1e-9


class CoupledDictionary(BaseModel):
    """Paired p x A dictionaries sharing one sparse code per sample.

    Every atom of both dictionaries has unit l2 norm.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d_ms: np.ndarray
    d_b: np.ndarray

    @field_validator("d_ms", "d_b", mode="before")
    @classmethod
    def _validate_matrix(cls, value):
        arr = np.array(value, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"dictionary must be 2-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("dictionary contains NaN or Inf")
        norms = np.linalg.norm(arr, axis=0)
        if np.max(np.abs(norms - 1.0), initial=0.0) > UNIT_NORM_TOL:
            raise ValueError("dictionary atoms must have unit l2 norm")
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_pair(self) -> "CoupledDictionary":
        if self.d_ms.shape != self.d_b.shape:
            raise ValueError(f"dictionary shapes differ: {self.d_ms.shape} vs {self.d_b.shape}")
        return self

    @property
    def atom_count(self) -> int:
        return self.d_ms.shape[1]

    @property
    def patch_dim(self) -> int:
        return self.d_ms.shape[0]

    def max_norm_deviation(self) -> float:
        norms = np.concatenate([np.linalg.norm(self.d_ms, axis=0), np.linalg.norm(self.d_b, axis=0)])
        return float(np.max(np.abs(norms - 1.0)))


class TrainConfig(BaseModel):
    """Coupled dictionary training parameters."""
    model_config = ConfigDict(frozen=True)

    atom_count: int = Field(default=ATOM_COUNT, ge=1, description="Number of atoms A")
    sparsity: int = Field(default=SPARSITY, ge=1, description="Maximum non-zeros per code H0")
    rounds: int = Field(default=ROUNDS, ge=1, description="Training rounds R")
    seed: int = Field(default=SEED, ge=0)
    residual_tol: float = Field(default=RESIDUAL_TOL, ge=0.0)
    lstsq_rcond: float = Field(default=LSTSQ_RCOND, gt=0.0)
    refresh_failed_atoms: bool = Field(
        default=True,
        description="Re-seed atoms whose update degenerated via the empty-support rule",
    )

    @model_validator(mode="after")
    def _check_sparsity(self) -> "TrainConfig":
        if self.sparsity > self.atom_count:
            raise ValueError(f"sparsity {self.sparsity} exceeds atom count {self.atom_count}")
        return self


class TrainTrace(BaseModel):
    """Per-round training diagnostics."""

    initial_objective: Optional[float] = None
    coded_objectives: List[float] = []
    objectives: List[float] = []
    empty_atoms: List[int] = []
    refreshed_atoms: List[int] = []
    round_seconds: List[float] = []
    coding_cost: int = 0
    update_cost: int = 0

    @property
    def rounds(self) -> int:
        return len(self.objectives)

    @property
    def final_objective(self) -> Optional[float]:
        return self.objectives[-1] if self.objectives else None

    def summary(self) -> dict:
        return {
            "rounds": self.rounds,
            "initial_objective": self.initial_objective,
            "final_objective": self.final_objective,
            "total_empty_atoms": sum(self.empty_atoms),
            "total_refreshed_atoms": sum(self.refreshed_atoms),
            "coding_cost_per_round": self.coding_cost,
            "update_cost_per_round": self.update_cost,
        }
