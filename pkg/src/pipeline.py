"""Sequential orchestration of the fusion workflow.

Each stage reads what it needs from a shared context and adds its outputs;
a failure is re-raised as StageError naming the stage.
"""

import logging
import time
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from src.errors import ConfigError, StageError
from src.models.dictionary import CoupledDictionary, TrainTrace
from src.models.fusion import FusionResult
from src.models.image import MultiBandImage
from src.models.run_config import RunConfig
from src.models.sparse_code import SparseCodeMatrix
from src.tools.baseline_tools import hsv_fuse, pca_fuse
from src.tools.brovey_tools import brovey_fuse, brovey_transform
from src.tools.dictionary_tools import train
from src.tools.fusion_tools import blend, build_mask, code_patches, select_patch_labels
from src.tools.patch_tools import build_patch_grid, center_patches, extract_patches

logger = logging.getLogger(__name__)

Context = Dict[str, Any]


class Stage(BaseModel):
    """One named step of the workflow."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    description: str
    action: Callable[[Context], Context]


class FusionPipeline(BaseModel):
    """Stages executed in order over a shared context."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    stages: List[Stage]

    def kickoff(self, inputs: Context) -> Context:
        context = dict(inputs)
        for stage in self.stages:
            logger.info("stage %s: %s", stage.name, stage.description)
            started = time.perf_counter()
            try:
                context.update(stage.action(context))
            except Exception as e:
                raise StageError(stage.name, e) from e
            logger.info("stage %s finished in %.2fs", stage.name, time.perf_counter() - started)
        return context


def _brovey(ctx: Context) -> Context:
    output = brovey_transform(ctx["ms"], ctx["sar"], ctx["config"].brovey_config())
    return {"brovey": output.image, "clipped_values": output.clipped_values}


def _patches(ctx: Context) -> Context:
    config: RunConfig = ctx["config"]
    ms: MultiBandImage = ctx["ms"]
    grid = build_patch_grid(ms.height, ms.width, config.patch_side, config.stride)
    return {
        "grid": grid,
        "x_ms": center_patches(extract_patches(ms, grid)),
        "x_b": center_patches(extract_patches(ctx["brovey"], grid)),
    }


def _train(ctx: Context) -> Context:
    dictionary, codes, trace = train(ctx["x_ms"].values, ctx["x_b"].values, ctx["config"].train_config())
    return {"dictionary": dictionary, "codes": codes, "trace": trace}


def _code(ctx: Context) -> Context:
    dictionary: CoupledDictionary = ctx["dictionary"]
    codes = code_patches(dictionary, ctx["x_ms"].values, ctx["x_b"].values, ctx["config"].train_config())
    return {"codes": codes, "trace": None}


def _select(ctx: Context) -> Context:
    labels = select_patch_labels(ctx["dictionary"], ctx["codes"], ctx["x_ms"].values, ctx["x_b"].values)
    return {"labels": labels}


def _mask(ctx: Context) -> Context:
    return {"mask": build_mask(ctx["labels"], ctx["grid"])}


def _blend(ctx: Context) -> Context:
    return {"fused": blend(ctx["ms"], ctx["brovey"], ctx["mask"])}


def create_fusion_pipeline(pretrained: bool = False, stop_after_training: bool = False) -> FusionPipeline:
    """
    Creates the fusion pipeline.

    Args:
        pretrained: Code patches against a dictionary supplied in the inputs
            instead of training one
        stop_after_training: End once the coupled dictionary is available

    Returns:
        Configured pipeline ready to kick off
    """
    stages = [
        Stage(name="brovey", description="Brovey pre-processing", action=_brovey),
        Stage(name="patches", description="extract and center patch matrices", action=_patches),
        Stage(name="code", description="joint coding against a loaded dictionary", action=_code)
        if pretrained else
        Stage(name="train", description="coupled dictionary training", action=_train),
    ]
    if not stop_after_training:
        stages += [
            Stage(name="select", description="reconstruction-error patch labels", action=_select),
            Stage(name="mask", description="pixel mask via overlap averaging", action=_mask),
            Stage(name="blend", description="convex blend of MS and Brovey", action=_blend),
        ]
    return FusionPipeline(stages=stages)


def fuse_pipeline(
    ms: MultiBandImage,
    sar: MultiBandImage,
    config: Optional[RunConfig] = None,
    dictionary: Optional[CoupledDictionary] = None,
) -> FusionResult:
    """Full Brovey -> coupled dictionary -> mask -> blend run."""
    config = config or RunConfig()
    pipeline = create_fusion_pipeline(pretrained=dictionary is not None)
    inputs: Context = {"ms": ms, "sar": sar, "config": config}
    if dictionary is not None:
        inputs["dictionary"] = dictionary
    ctx = pipeline.kickoff(inputs)
    return FusionResult(
        fused=ctx["fused"],
        brovey=ctx["brovey"],
        mask=ctx["mask"],
        labels=ctx["labels"],
        grid=ctx["grid"],
        dictionary=ctx["dictionary"],
        codes=ctx["codes"],
        trace=ctx["trace"],
        clipped_values=ctx["clipped_values"],
    )


def train_dictionary(
    ms: MultiBandImage,
    sar: MultiBandImage,
    config: Optional[RunConfig] = None,
) -> Tuple[CoupledDictionary, SparseCodeMatrix, TrainTrace]:
    """Stop once the coupled dictionary has been trained."""
    config = config or RunConfig()
    ctx = create_fusion_pipeline(stop_after_training=True).kickoff(
        {"ms": ms, "sar": sar, "config": config}
    )
    return ctx["dictionary"], ctx["codes"], ctx["trace"]


BASELINES: Dict[str, Callable[[MultiBandImage, MultiBandImage, RunConfig], MultiBandImage]] = {
    "brovey": lambda ms, sar, config: brovey_fuse(ms, sar, config.brovey_config()),
    "pca": lambda ms, sar, config: pca_fuse(ms, sar, match=config.match_sar),
    "hsv": lambda ms, sar, config: hsv_fuse(ms, sar),
}


def run_baseline(method: str, ms: MultiBandImage, sar: MultiBandImage, config: Optional[RunConfig] = None) -> MultiBandImage:
    """Fuse with one of the component-substitution baselines."""
    if method not in BASELINES:
        raise ConfigError(f"unknown baseline '{method}'; choose from {sorted(BASELINES)}")
    config = config or RunConfig()
    stage = Stage(
        name=f"baseline-{method}",
        description=f"{method} component substitution",
        action=lambda ctx: {"fused": BASELINES[method](ctx["ms"], ctx["sar"], ctx["config"])},
    )
    return FusionPipeline(stages=[stage]).kickoff({"ms": ms, "sar": sar, "config": config})["fused"]
