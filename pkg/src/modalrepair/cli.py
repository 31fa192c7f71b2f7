"""Command-line pipeline: generate -> degrade -> reconstruct -> analyze.

Subcommands: generate, inject-gaps, downsample, repair, enhance, analyze,
matrix.  Exit codes: 0 success, 1 numerical failure (divergence,
factorization breakdown, undefined relative error), 2 usage or I/O error.
Set MODALREPAIR_LOG=DEBUG|INFO|WARNING to control verbosity on stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import analysis, mft, synthetic, tensors
from .decomposition import RankRule
from .gappy import GappyConfig, RepairDivergenceError, gappy_repair
from .superres import SuperresConfig, superresolve

log = logging.getLogger("modalrepair")

_INIT_BY_FLAG = {"zeros": "zeros", "mean": "mean", "interp": "linear-interp"}


def _setup_logging() -> None:
    level = os.environ.get("MODALREPAIR_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr, format="%(name)s %(levelname)s %(message)s")
    log.setLevel(level if level in ("DEBUG", "INFO", "WARNING", "ERROR") else "WARNING")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _rank_rule(args: argparse.Namespace) -> RankRule:
    if args.threshold is not None:
        return RankRule.relative(args.threshold)
    return RankRule.fixed_rank(args.modes if args.modes is not None else 5)


def _add_rank_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--modes", type=int, default=None, help="fixed number of retained modes (default 5)")
    p.add_argument("--threshold", type=float, default=None, help="relative singular value threshold instead of --modes")


def _add_loop_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-6, help="gap-change tolerance (default 1e-6)")
    p.add_argument("--max-iter", type=int, default=500, help="iteration budget (default 500)")
    p.add_argument("--init", choices=sorted(_INIT_BY_FLAG), default="interp", help="initial fill strategy")


def _write_report(path: str | Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_tensor(path: str) -> np.ndarray:
    return mft.read_mft(path)


def cmd_generate(args: argparse.Namespace) -> int:
    kind, spec = synthetic.load_spec(args.spec)
    field = synthetic.generate(kind, spec)
    mft.write_mft(args.out, field)
    if args.csv:
        mft.export_csv(args.csv, field)
    log.info("generated %s field of shape %s -> %s", kind, field.shape, args.out)
    return 0


def cmd_inject_gaps(args: argparse.Namespace) -> int:
    data = _load_tensor(args.input)
    gapped, mask = tensors.inject_gaps(data, args.fraction, args.seed)
    mft.write_mft(args.out, gapped)
    if args.mask_out:
        mft.write_mft(args.mask_out, mask.astype(np.float64))
    log.info("blanked %d of %d entries -> %s", int(mask.sum()), mask.size, args.out)
    return 0


def cmd_downsample(args: argparse.Namespace) -> int:
    data = _load_tensor(args.input)
    coarse = tensors.downsample(data, args.factors)
    mft.write_mft(args.out, coarse)
    log.info("downsampled %s -> %s (%s)", data.shape, coarse.shape, args.out)
    return 0


def _repair_config(args: argparse.Namespace) -> GappyConfig:
    return GappyConfig(
        rank_rule=_rank_rule(args),
        init_strategy=_INIT_BY_FLAG[args.init],
        tolerance=args.tol,
        max_iterations=args.max_iter,
    )


def _config_dict(cfg) -> dict:
    # asdict recurses into nested RankRule dataclasses; tuples serialize as lists
    return json.loads(json.dumps(asdict(cfg)))


def cmd_repair(args: argparse.Namespace) -> int:
    data = _load_tensor(args.input)
    reference = None
    if args.fraction is not None:
        if np.isnan(data).any():
            raise ValueError("--fraction expects a complete input to blank out")
        reference = data
        data, mask = tensors.inject_gaps(data, args.fraction, args.seed)
    elif args.mask:
        mask = _load_tensor(args.mask) != 0.0
        if mask.shape != data.shape:
            raise ValueError(f"mask shape {mask.shape} does not match data shape {data.shape}")
    else:
        mask = np.isnan(data)
    if args.reference:
        reference = _load_tensor(args.reference)
    cfg = _repair_config(args)
    result = gappy_repair(data, mask, cfg)
    mft.write_mft(args.out, result.repaired)
    payload = {
        "command": "repair",
        "config": _config_dict(cfg),
        "gap_fraction": tensors.gap_fraction(mask) if mask.size else 0.0,
        "seed": args.seed,
        "iterations": result.iterations,
        "converged": result.converged,
        "trace": list(result.trace),
        "output": str(args.out),
    }
    if reference is not None:
        value = analysis.rrmse(reference, result.repaired)
        payload["rrmse"] = value
        payload["rrmse_percent"] = 100.0 * value
        print(f"RRMSE: {100.0 * value:.2f}%")
    if args.report:
        _write_report(args.report, payload)
    return 0


def cmd_enhance(args: argparse.Namespace) -> int:
    data = _load_tensor(args.input)
    cfg = SuperresConfig(
        target_dims=tuple(args.target_dims),
        strides=tuple(args.strides) if args.strides else None,
        rank_rule=_rank_rule(args),
        init_strategy="zeros" if args.init == "zeros" else "linear-interp",
        tolerance=args.tol,
        max_iterations=args.max_iter,
        enhance_time=args.enhance_time,
    )
    result = superresolve(data, cfg)
    mft.write_mft(args.out, result.repaired)
    payload = {
        "command": "enhance",
        "config": _config_dict(cfg),
        "source_dims": list(data.shape),
        "iterations": result.iterations,
        "converged": result.converged,
        "trace": list(result.trace),
        "output": str(args.out),
    }
    if args.reference:
        reference = _load_tensor(args.reference)
        value = analysis.rrmse(reference, result.repaired)
        payload["rrmse"] = value
        payload["rrmse_percent"] = 100.0 * value
        if not cfg.enhance_time:
            # initial-guess quality, for judging what the iteration added
            from .superres import interpolate_initial, place_on_target

            base, mask = place_on_target(data, cfg)
            if cfg.init_strategy == "zeros":
                base[mask] = 0.0
                initial = base
            else:
                initial = interpolate_initial(base, mask)
            baseline = analysis.rrmse(reference, initial)
            payload["initial_rrmse"] = baseline
            payload["initial_rrmse_percent"] = 100.0 * baseline
        print(f"RRMSE: {100.0 * value:.2f}%")
    if args.report:
        _write_report(args.report, payload)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    original = _load_tensor(args.original)
    recon = _load_tensor(args.recon)
    report = analysis.build_report(
        original, recon, bins=args.bins, smooth=args.smooth, per_snapshot_pdf=args.per_snapshot
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    payload = {"command": "analyze", **report.summary_dict()}
    for c, err in enumerate(report.per_component_error):
        mft.write_mft(outdir / f"error_component{c}.mft", err)
        mft.write_mft(outdir / f"normalized_error_component{c}.mft", report.normalized_error[c])
        centers, densities = report.pdf[c]
        pdf_lines = ["bin_center,density"] + [
            f"{x!r},{y!r}" for x, y in zip(centers, densities)
        ]
        (outdir / f"pdf_component{c}.csv").write_text("\n".join(pdf_lines) + "\n")
        k, plane = report.worst[c]
        worst_field = np.abs(err[..., k])
        if plane is not None:
            worst_field = worst_field[..., plane]
        if worst_field.ndim == 1:
            worst_field = worst_field[np.newaxis, :]
        analysis.write_error_map_pgm(outdir / f"abs_error_component{c}.pgm", worst_field)
        mft.write_mft(outdir / f"abs_error_component{c}.mft", worst_field)
    _write_report(outdir / "report.json", payload)
    print(f"RRMSE: {100.0 * report.rrmse:.2f}%")
    return 0


def _matrix_cell_repair(data, fraction, modes, init, tol, max_iter, seed, outdir):
    gapped, mask = tensors.inject_gaps(data, fraction, seed)
    cfg = GappyConfig(
        rank_rule=RankRule.fixed_rank(modes),
        init_strategy=_INIT_BY_FLAG[init],
        tolerance=tol,
        max_iterations=max_iter,
    )
    result = gappy_repair(gapped, mask, cfg)
    value = analysis.rrmse(data, result.repaired)
    name = f"repair_f{fraction:g}_m{modes}"
    _write_report(
        outdir / f"{name}.json",
        {
            "cell": name,
            "fraction": fraction,
            "modes": modes,
            "seed": seed,
            "iterations": result.iterations,
            "converged": result.converged,
            "rrmse": value,
            "rrmse_percent": 100.0 * value,
        },
    )
    log.info("%s: rrmse %.2f%%", name, 100.0 * value)
    return {"fraction": fraction, "modes": modes, "rrmse": value}


def _matrix_cell_enhance(data, factor, modes, init, tol, max_iter, outdir):
    spatial = [data.shape[a] for a in tensors.spatial_axes(data.ndim)]
    coarse = tensors.downsample(data, [factor] * len(spatial))
    cfg = SuperresConfig(
        target_dims=tuple(spatial),
        strides=tuple([factor] * len(spatial)),
        rank_rule=RankRule.fixed_rank(modes),
        init_strategy="zeros" if init == "zeros" else "linear-interp",
        tolerance=tol,
        max_iterations=max_iter,
    )
    result = superresolve(coarse, cfg)
    value = analysis.rrmse(data, result.repaired)
    name = f"enhance_x{factor}_m{modes}"
    _write_report(
        outdir / f"{name}.json",
        {
            "cell": name,
            "factor": factor,
            "modes": modes,
            "iterations": result.iterations,
            "converged": result.converged,
            "rrmse": value,
            "rrmse_percent": 100.0 * value,
        },
    )
    log.info("%s: rrmse %.2f%%", name, 100.0 * value)
    return {"factor": factor, "modes": modes, "rrmse": value}


def cmd_matrix(args: argparse.Namespace) -> int:
    data = _load_tensor(args.input)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = []
    if args.task == "repair":
        for i, fraction in enumerate(args.fractions):
            for j, modes in enumerate(args.modes):
                cell_seed = args.seed + 1000 * i + j
                jobs.append(
                    (
                        _matrix_cell_repair,
                        (data, fraction, modes, args.init, args.tol, args.max_iter, cell_seed, outdir),
                    )
                )
    else:
        for factor in args.factors:
            for modes in args.modes:
                jobs.append(
                    (_matrix_cell_enhance, (data, factor, modes, args.init, args.tol, args.max_iter, outdir))
                )
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(lambda fa: fa[0](*fa[1]), jobs))
    else:
        rows = [fn(*fargs) for fn, fargs in jobs]
    key = "fraction" if args.task == "repair" else "factor"
    lines = [f"{key},modes,rrmse,rrmse_percent"]
    for row in rows:
        lines.append(f"{row[key]:g},{row['modes']},{row['rrmse']!r},{100.0 * row['rrmse']:.2f}")
    summary = outdir / "summary.csv"
    summary.write_text("\n".join(lines) + "\n")
    print(f"wrote {summary} ({len(rows)} cells)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modalrepair",
        description="Repair gappy snapshot data and enhance its resolution via truncated SVD/HOSVD.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="evaluate a synthetic generator spec into an MFT file")
    p.add_argument("spec", help="generator spec JSON")
    p.add_argument("--out", required=True, help="output MFT path")
    p.add_argument("--csv", default=None, help="also export entries as CSV")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("inject-gaps", help="blank out a random fraction of entries")
    p.add_argument("input", help="input MFT")
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--mask-out", default=None, help="also write the gap mask (0/1) as MFT")
    p.set_defaults(func=cmd_inject_gaps)

    p = sub.add_parser("downsample", help="keep every f-th point along each spatial axis")
    p.add_argument("input", help="input MFT")
    p.add_argument("--factors", type=_int_list, required=True, help="per-spatial-axis strides, e.g. 4,4")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_downsample)

    p = sub.add_parser("repair", help="fill gaps by iterated truncated factorization")
    p.add_argument("input", help="gappy MFT (NaN marks gaps) or complete MFT with --fraction/--mask")
    p.add_argument("--fraction", type=float, default=None, help="inject this gap fraction first")
    p.add_argument("--mask", default=None, help="explicit gap mask MFT (nonzero = missing)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reference", default=None, help="ground-truth MFT for RRMSE reporting")
    _add_rank_flags(p)
    _add_loop_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None, help="write a JSON run report")
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("enhance", help="enhance spatial resolution onto a target grid")
    p.add_argument("input", help="coarse MFT")
    p.add_argument("--target-dims", type=_int_list, required=True, help="target spatial shape, e.g. 100,40")
    p.add_argument("--strides", type=_int_list, default=None, help="placement strides (default target//source)")
    p.add_argument("--enhance-time", action="store_true", help="also insert midpoint snapshots")
    p.add_argument("--reference", default=None)
    _add_rank_flags(p)
    _add_loop_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("analyze", help="error report for an original/reconstruction pair")
    p.add_argument("original")
    p.add_argument("recon")
    p.add_argument("--bins", type=int, default=101)
    p.add_argument("--smooth", action="store_true", help="Gaussian-smooth the error PDFs")
    p.add_argument("--per-snapshot", action="store_true", help="PDF over the worst snapshot only")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("matrix", help="run a grid of repair or enhancement cases")
    p.add_argument("input", help="ground-truth MFT")
    p.add_argument("--task", choices=("repair", "enhance"), default="repair")
    p.add_argument("--fractions", type=_float_list, default=[0.2, 0.4, 0.6])
    p.add_argument("--factors", type=_int_list, default=[2, 4, 8, 16])
    p.add_argument("--modes", type=_int_list, default=[5, 10, 15])
    p.add_argument("--init", choices=sorted(_INIT_BY_FLAG), default="interp")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_matrix)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RepairDivergenceError, np.linalg.LinAlgError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
