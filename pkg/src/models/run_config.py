"""Run configuration model."""

from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config import settings
from src.models.dictionary import TrainConfig
from src.models.fusion import BroveyConfig


class RunConfig(BaseModel):
    """Every tunable of a CLI run. Unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    # Paths
    ms: Optional[Path] = None
    sar: Optional[Path] = None
    output: Optional[Path] = None

    # Patch geometry
    patch_side: int = Field(default=settings.PATCH_SIDE, ge=1)
    stride: int = Field(default=settings.STRIDE, ge=1)

    # Training
    atom_count: int = Field(default=settings.ATOM_COUNT, ge=1)
    sparsity: int = Field(default=settings.SPARSITY, ge=1)
    rounds: int = Field(default=settings.ROUNDS, ge=1)
    seed: int = Field(default=settings.SEED, ge=0)
    residual_tol: float = Field(default=settings.RESIDUAL_TOL, ge=0.0)

    # Brovey
    epsilon: float = Field(default=settings.BROVEY_EPSILON, gt=0.0)

    # Reporting
    metric_scale: float = Field(default=settings.METRIC_SCALE, gt=0.0)
    output_depth: int = settings.OUTPUT_DEPTH

    # Baselines
    baseline: Literal["brovey", "pca", "hsv"] = "brovey"
    match_sar: bool = True

    @model_validator(mode="after")
    def _check_ranges(self) -> "RunConfig":
        if self.stride > self.patch_side:
            raise ValueError(f"stride {self.stride} exceeds patch_side {self.patch_side}")
        if self.output_depth not in (8, 16):
            raise ValueError(f"output_depth must be 8 or 16, got {self.output_depth}")
        if self.sparsity > self.atom_count:
            raise ValueError(f"sparsity {self.sparsity} exceeds atom_count {self.atom_count}")
        return self

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            atom_count=self.atom_count,
            sparsity=self.sparsity,
            rounds=self.rounds,
            seed=self.seed,
            residual_tol=self.residual_tol,
        )

    def brovey_config(self) -> BroveyConfig:
        return BroveyConfig(epsilon=self.epsilon)

    def echo(self) -> dict:
        """Config values as written to reports; paths excluded."""
        return self.model_dump(exclude={"ms", "sar", "output"})
