"""Quality metrics report model."""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field

BAND_NAMES = ("band1", "band2", "band3")


def _fmt(value: Optional[float]) -> str:
    return "undefined" if value is None else f"{value:.4f}"


class MetricsReport(BaseModel):
    """Reference-based metrics of a fused image against its MS and SAR sources.

    Distortion, MSE and RMSE are on the 0-255 scale. CC entries are None
    where the correlation is undefined (constant band).
    """

    distortion: List[float] = Field(..., min_length=3, max_length=3)
    cc_ms_bands: List[Optional[float]] = Field(..., min_length=3, max_length=3)
    cc_sar_bands: List[Optional[float]] = Field(..., min_length=3, max_length=3)
    mse: List[float] = Field(..., min_length=3, max_length=3)
    rmse: List[float] = Field(..., min_length=3, max_length=3)

    overall_distortion: float = Field(..., ge=0)
    cc_ms: Optional[float] = Field(default=None, ge=-1, le=1)
    cc_sar: Optional[float] = Field(default=None, ge=-1, le=1)
    cc_overall: Optional[float] = Field(default=None, ge=-1, le=1)
    overall_mse: float = Field(..., ge=0)
    overall_rmse: float = Field(..., ge=0)
    scale: float = 255.0

    def to_entries(self) -> Dict[str, object]:
        """Flat key/value view used by the report writer."""
        entries: Dict[str, object] = {"scale": self.scale}
        for i, name in enumerate(BAND_NAMES):
            entries[f"distortion.{name}"] = self.distortion[i]
        entries["distortion.overall"] = self.overall_distortion
        for i, name in enumerate(BAND_NAMES):
            entries[f"cc_ms.{name}"] = self.cc_ms_bands[i]
        entries["cc_ms.mean"] = self.cc_ms
        for i, name in enumerate(BAND_NAMES):
            entries[f"cc_sar.{name}"] = self.cc_sar_bands[i]
        entries["cc_sar.mean"] = self.cc_sar
        entries["cc.overall"] = self.cc_overall
        for i, name in enumerate(BAND_NAMES):
            entries[f"mse.{name}"] = self.mse[i]
        entries["mse.overall"] = self.overall_mse
        for i, name in enumerate(BAND_NAMES):
            entries[f"rmse.{name}"] = self.rmse[i]
        entries["rmse.overall"] = self.overall_rmse
        return entries

    def to_summary(self) -> str:
        """Generate a human-readable summary."""
        rows = "\n".join(
            f"{name:<8} {_fmt(self.distortion[i]):>12} {_fmt(self.cc_ms_bands[i]):>10} "
            f"{_fmt(self.cc_sar_bands[i]):>10} {_fmt(self.mse[i]):>10} {_fmt(self.rmse[i]):>10}"
            for i, name in enumerate(BAND_NAMES)
        )
        return f"""
FUSION QUALITY SUMMARY
======================
{'':<8} {'distortion':>12} {'CC(MS)':>10} {'CC(SAR)':>10} {'MSE':>10} {'RMSE':>10}
{rows}
{'overall':<8} {_fmt(self.overall_distortion):>12} {_fmt(self.cc_ms):>10} {_fmt(self.cc_sar):>10} {_fmt(self.overall_mse):>10} {_fmt(self.overall_rmse):>10}

CC overall (mean of MS and SAR): {_fmt(self.cc_overall)}
Values on the 0-{self.scale:g} scale.
"""
