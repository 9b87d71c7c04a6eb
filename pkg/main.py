#!/usr/bin/env python3
"""
SAR / Multispectral Pseudo-Color Fusion
=======================================
Brovey pre-processing, coupled dictionary learning and reconstruction-error
mask blending, with reference metrics and component-substitution baselines.

Usage:
    python main.py fuse --ms MS.png --sar SAR.png [--out FUSED.png] [--config CFG] [--save-dict D.cdlf] [--report R.txt]
    python main.py train-dict --ms MS.png --sar SAR.png --out D.cdlf
    python main.py evaluate --fused FUSED.png --ms MS.png --sar SAR.png --report R.txt
    python main.py baseline --method {brovey|pca|hsv} --ms MS.png --sar SAR.png [--out OUT.png] [--report R.txt]
    python main.py compare --ms MS.png --sar SAR.png [--report R.txt]
    python main.py --list       # List sample configurations

Exit codes: 0 success, 2 config error, 3 I/O error, 4 numerical failure.
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from src.config.run_config import build_run_config, load_config_file
from src.config.settings import BASELINE_METHODS, CONFIGS_DIR, LOG_LEVEL, OUTPUT_DIR, configure_logging
from src.errors import FusionError, describe
from src.models.image import MultiBandImage
from src.models.metrics_report import BAND_NAMES, MetricsReport
from src.models.run_config import RunConfig
from src.pipeline import fuse_pipeline, run_baseline, train_dictionary
from src.tools.io_tools import (
    load_dictionary,
    load_image,
    quantize,
    save_dictionary,
    save_image,
    write_report,
)
from src.tools.metric_tools import metrics_report

console = Console(markup=False)

# CLI flag -> RunConfig field
OVERRIDES = {
    "patch_side": "patch_side",
    "stride": "stride",
    "atoms": "atom_count",
    "sparsity": "sparsity",
    "rounds": "rounds",
    "seed": "seed",
    "tol": "residual_tol",
    "epsilon": "epsilon",
    "depth": "output_depth",
}


def banner(title: str) -> None:
    console.print("\n" + "=" * 60)
    console.print(f"  {title}")
    console.print("=" * 60)


def list_configs() -> List[Path]:
    """List the sample run configurations."""
    configs = sorted(CONFIGS_DIR.glob("*.cfg"))
    if not configs:
        console.print(f"\nNo configurations found in {CONFIGS_DIR}")
        return []
    banner("AVAILABLE CONFIGURATIONS")
    for path in configs:
        try:
            values = load_config_file(path)
            console.print(f"\n  [{path.stem}]")
            for key, value in values.items():
                console.print(f"    {key} = {value}")
        except FusionError as e:
            console.print(f"\n  [{path.stem}] - Error reading: {e}")
    console.print("\n" + "=" * 60)
    return configs


def default_output(ms_path: Path, tag: str) -> Path:
    """Output path under OUTPUT_DIR when --out is not given."""
    OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
    return OUTPUT_DIR / f"{ms_path.stem}_{tag}.png"


def _config(args: argparse.Namespace, **extra) -> RunConfig:
    overrides: Dict[str, object] = {field: getattr(args, flag, None) for flag, field in OVERRIDES.items()}
    overrides.update(extra)
    return build_run_config(args.config, overrides)


def _report(fused: MultiBandImage, ms: MultiBandImage, sar: MultiBandImage, config: RunConfig) -> MetricsReport:
    """Metrics of the image exactly as written to disk."""
    return metrics_report(quantize(fused, config.output_depth), ms, sar, config.metric_scale)


def cmd_fuse(args: argparse.Namespace) -> int:
    out = args.out or default_output(args.ms, "fused")
    config = _config(args, ms=args.ms, sar=args.sar, output=out)
    ms, sar = load_image(args.ms), load_image(args.sar)
    dictionary = load_dictionary(args.dict) if args.dict else None

    console.print(f"\n🚀 Fusing {args.ms} with {args.sar}")
    result = fuse_pipeline(ms, sar, config, dictionary)
    save_image(result.fused, out, config.output_depth)
    console.print(f"📄 Fused image saved to: {out}")
    if args.save_dict:
        save_dictionary(result.dictionary, args.save_dict)
        console.print(f"📄 Dictionary saved to: {args.save_dict}")

    report = _report(result.fused, ms, sar, config)
    if args.report:
        run = {
            "patches": result.grid.count,
            "multispectral_patches": int((result.labels == 2).sum()),
            "mask_mean": result.mask.multispectral_share(),
            "brovey_clipped_values": result.clipped_values,
        }
        sections = {"metrics": report.to_entries(), "config": config.echo(), "run": run}
        if result.trace is not None:
            sections["trace"] = result.trace.summary()
        write_report(args.report, sections)
        console.print(f"📄 Report saved to: {args.report}")
    console.print(report.to_summary())
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = _config(args, ms=args.ms, sar=args.sar, output=args.out)
    ms, sar = load_image(args.ms), load_image(args.sar)
    console.print(f"\n🚀 Training coupled dictionary on {args.ms} / {args.sar}")
    dictionary, _, trace = train_dictionary(ms, sar, config)
    save_dictionary(dictionary, args.out)
    console.print(f"📄 Dictionary saved to: {args.out}")
    for key, value in trace.summary().items():
        console.print(f"   {key}: {value}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _config(args)
    fused, ms, sar = load_image(args.fused), load_image(args.ms), load_image(args.sar)
    report = metrics_report(fused, ms, sar, config.metric_scale)
    write_report(args.report, {"metrics": report.to_entries()})
    console.print(report.to_summary())
    console.print(f"📄 Report saved to: {args.report}")
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    out = args.out or default_output(args.ms, args.method)
    config = _config(args, baseline=args.method, match_sar=not args.no_match)
    ms, sar = load_image(args.ms), load_image(args.sar)
    fused = run_baseline(config.baseline, ms, sar, config)
    save_image(fused, out, config.output_depth)
    report = _report(fused, ms, sar, config)
    if args.report:
        write_report(args.report, {"metrics": report.to_entries(), "config": config.echo()})
    console.print(report.to_summary())
    console.print(f"📄 {config.baseline} result saved to: {out}")
    return 0


def _comparison_table(reports: Dict[str, MetricsReport]) -> Table:
    table = Table(title="Fusion comparison (0-255 scale)")
    table.add_column("method")
    for name in BAND_NAMES:
        table.add_column(f"dist {name}", justify="right")
    table.add_column("dist overall", justify="right")
    table.add_column("CC MS", justify="right")
    table.add_column("CC SAR", justify="right")
    table.add_column("CC overall", justify="right")
    table.add_column("MSE overall", justify="right")

    def cell(value: Optional[float]) -> str:
        return "n/a" if value is None else f"{value:.4f}"

    for method, report in reports.items():
        table.add_row(
            method,
            *(cell(v) for v in report.distortion),
            cell(report.overall_distortion),
            cell(report.cc_ms),
            cell(report.cc_sar),
            cell(report.cc_overall),
            cell(report.overall_mse),
        )
    return table


def cmd_compare(args: argparse.Namespace) -> int:
    config = _config(args, ms=args.ms, sar=args.sar, match_sar=not args.no_match)
    ms, sar = load_image(args.ms), load_image(args.sar)
    reports: Dict[str, MetricsReport] = {}
    result = fuse_pipeline(ms, sar, config)
    reports["sparse"] = _report(result.fused, ms, sar, config)
    for method in BASELINE_METHODS:
        reports[method] = _report(run_baseline(method, ms, sar, config), ms, sar, config)

    console.print(_comparison_table(reports))
    if args.report:
        sections = {method: report.to_entries() for method, report in reports.items()}
        sections["config"] = config.echo()
        write_report(args.report, sections)
        console.print(f"📄 Report saved to: {args.report}")
    return 0


def _add_tuning(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="flat key = value config file")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--patch-side", dest="patch_side", type=int)
    parser.add_argument("--stride", type=int)
    parser.add_argument("--atoms", type=int, help="dictionary atom count A")
    parser.add_argument("--sparsity", type=int, help="maximum non-zeros per code H0")
    parser.add_argument("--rounds", type=int, help="training rounds R")
    parser.add_argument("--tol", type=float, help="OMP residual tolerance")
    parser.add_argument("--epsilon", type=float, help="Brovey band-sum guard")
    parser.add_argument("--depth", type=int, choices=(8, 16), help="output bit depth")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="SAR / multispectral pseudo-color fusion",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--list", "-l", action="store_true", help="list sample configurations")
    parser.add_argument("--log-level", default=LOG_LEVEL)
    commands = parser.add_subparsers(dest="command")

    fuse = commands.add_parser("fuse", help="full fusion pipeline")
    fuse.add_argument("--ms", type=Path, required=True)
    fuse.add_argument("--sar", type=Path, required=True)
    fuse.add_argument("--out", type=Path, help="default: OUTPUT_DIR/<ms>_fused.png")
    fuse.add_argument("--dict", type=Path, help="fuse with a previously trained dictionary")
    fuse.add_argument("--save-dict", dest="save_dict", type=Path)
    fuse.add_argument("--report", type=Path)
    _add_tuning(fuse)
    fuse.set_defaults(handler=cmd_fuse)

    train = commands.add_parser("train-dict", help="train and save a coupled dictionary")
    train.add_argument("--ms", type=Path, required=True)
    train.add_argument("--sar", type=Path, required=True)
    train.add_argument("--out", type=Path, required=True)
    _add_tuning(train)
    train.set_defaults(handler=cmd_train)

    evaluate = commands.add_parser("evaluate", help="metrics of an existing fused image")
    evaluate.add_argument("--fused", type=Path, required=True)
    evaluate.add_argument("--ms", type=Path, required=True)
    evaluate.add_argument("--sar", type=Path, required=True)
    evaluate.add_argument("--report", type=Path, required=True)
    evaluate.add_argument("--config", type=Path)
    evaluate.set_defaults(handler=cmd_evaluate)

    baseline = commands.add_parser("baseline", help="component-substitution baseline")
    baseline.add_argument("--method", choices=BASELINE_METHODS, required=True)
    baseline.add_argument("--ms", type=Path, required=True)
    baseline.add_argument("--sar", type=Path, required=True)
    baseline.add_argument("--out", type=Path, help="default: OUTPUT_DIR/<ms>_<method>.png")
    baseline.add_argument("--report", type=Path)
    baseline.add_argument("--no-match", dest="no_match", action="store_true",
                          help="substitute raw SAR without mean/std matching (PCA)")
    _add_tuning(baseline)
    baseline.set_defaults(handler=cmd_baseline)

    compare = commands.add_parser("compare", help="sparse fusion against all baselines")
    compare.add_argument("--ms", type=Path, required=True)
    compare.add_argument("--sar", type=Path, required=True)
    compare.add_argument("--report", type=Path)
    compare.add_argument("--no-match", dest="no_match", action="store_true")
    _add_tuning(compare)
    compare.set_defaults(handler=cmd_compare)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    if args.list:
        list_configs()
        return 0
    if not args.command:
        console.print(__doc__)
        return 0

    banner("🛰️  SAR / MULTISPECTRAL PSEUDO-COLOR FUSION")
    try:
        return args.handler(args)
    except FusionError as e:
        console.print(f"\n❌ {describe(e, getattr(e, 'stage', None))}")
        return e.exit_code
    except ValidationError as e:
        console.print(f"\n❌ invalid input data: {e}")
        return 3


if __name__ == "__main__":
    sys.exit(main())
