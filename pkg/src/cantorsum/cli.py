"""Command-line entry point: ``cantorsum {dimension,region-map,sum,verify,sweep}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import Axis, Config, SweepSpec
from .errors import CapExceeded, CantorSumError, ConfigError, InfeasibleTriple
from .geometry import middle_alpha_classify, region_grid, sum_cover_analysis
from .ifs import generation_cover
from .measures import box_dimension_estimate, entropy, lyapunov_exponent, moran_dimension
from .sweep import fmt, run_sweep, sweep_csv
from .transversality import assemble_report

EXIT_OK, EXIT_CONFIG, EXIT_CAP, EXIT_VERIFY = 0, 1, 2, 3
REGION_DEFAULT = Axis("a", 0.01, 0.49, 200), Axis("b", 0.01, 0.49, 200)


def _write(out: Path | None, name: str, text: str):
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def _load(args, required=True) -> Config:
    if args.config is None:
        if required:
            raise ConfigError("--config is required for this command")
        doc = {}
    else:
        return _with_seed(Config.load(args.config), args.seed)
    return _with_seed(Config(doc), args.seed)


def _with_seed(cfg: Config, seed):
    if seed is not None:
        cfg = Config({**cfg.doc, "seed": seed})
    return cfg


def cmd_dimension(args) -> int:
    cfg = _load(args)
    ifs = cfg.build_ifs()
    depth = args.depth or 10
    rows = [("maps", ifs.m), ("affine", ifs.is_affine),
            ("moran_dimension" if ifs.is_affine else "moran_dimension_affine_part", moran_dimension(np.abs(ifs.ratios)))]
    depths = cfg.section("measure").get("depths") or list(range(2, depth + 1))
    fit = box_dimension_estimate(lambda k: generation_cover(ifs, k), depths)
    rows += [("box_dimension", fit.dimension), ("box_depths", f"{depths[0]}..{depths[-1]}"),
             ("box_max_residual", float(np.max(np.abs(fit.residuals))))]
    if cfg.has("measure"):
        w = cfg.weights(ifs.m, ifs.ratios)
        h = entropy(w)
        lyap = lyapunov_exponent(ifs, w, seed=cfg.seed)
        rows += [("entropy", h), ("lyapunov", lyap.value), ("lyapunov_stderr", lyap.stderr),
                 ("measure_dimension", h / lyap.value)]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k.ljust(width)}  {fmt(v)}")
    _write(args.out, "dimension.csv", "quantity,value\n" + "".join(f"{k},{fmt(v)}\n" for k, v in rows))
    return EXIT_OK


def pgm(codes: np.ndarray) -> str:
    """Plain PGM, maxval 2; first image row is the first row of ``codes``."""
    h, w = codes.shape
    lines = ["P2", f"{w} {h}", "2"] + [" ".join(str(int(v)) for v in row) for row in codes]
    return "\n".join(lines) + "\n"


def cmd_region_map(args) -> int:
    cfg = _load(args, required=False)
    axes = cfg.sweep.axes if cfg.sweep is not None else REGION_DEFAULT
    if len(axes) != 2:
        raise ConfigError("region-map needs exactly two axes (a, b)", "sweep.axes")
    a_ax, b_ax = axes
    for ax in axes:
        if not (0 < ax.lo and ax.hi < 0.5):
            raise ConfigError(f"axis {ax.name} must stay inside (0, 1/2)", "sweep.axes")
    a_vals, b_vals = a_ax.values, b_ax.values
    codes = region_grid(a_vals, b_vals)
    lines = ["a,b,tag,dim_sum,thickness_product"]
    for j, b in enumerate(b_vals):
        for i, a in enumerate(a_vals):
            v = middle_alpha_classify(float(a), float(b))
            lines.append(f"{fmt(float(a))},{fmt(float(b))},{v.tag},{fmt(v.dim_sum)},{fmt(v.thickness_product)}")
    counts = np.bincount(codes.ravel(), minlength=3)
    print(f"grid {len(a_vals)}x{len(b_vals)}: cantor_zone {counts[0]}, region_R {counts[1]}, interval_zone {counts[2]}")
    out = args.out or Path(".")
    _write(out, "region_map.csv", "\n".join(lines) + "\n")
    _write(out, "region_map.pgm", pgm(codes))
    return EXIT_OK


def cmd_sum(args) -> int:
    cfg = _load(args)
    ifs = cfg.build_ifs()
    other = cfg.build_compact()
    depth = args.depth or cfg.section("measure").get("depth", 8)
    res = sum_cover_analysis(ifs, ifs if other is None else other, depth)
    lines = ["depth,interval_count,measure,verdict_hint"]
    lines += [f"{d},{c},{fmt(mu)},{h}" for d, c, mu, h in zip(res.depths, res.counts, res.measures, res.hints)]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    print(f"verdict_hint {res.verdict_hint}, fitted_ratio {fmt(res.fitted_ratio)}")
    _write(args.out, "sum.csv", text)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load(args)
    fam = cfg.build_family()
    settings = cfg.verify_settings()
    if args.depth:
        settings.depth = args.depth
    rep = assemble_report(fam, cfg.build_eta(fam), settings)
    print(rep.summary())
    _write(args.out, "report.json", json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if cfg.sweep is None:
        raise ConfigError("section is required for this command", "sweep")
    spec = cfg.sweep
    if args.depth:
        spec = SweepSpec(spec.axes, spec.task, args.depth)
    rows = run_sweep(cfg, args.workers, spec)
    text = sweep_csv(rows, spec)
    failed = sum(1 for r in rows if r["error"])
    print(f"{len(rows)} cells, task {spec.task}, {failed} with errors")
    _write(args.out or Path("."), "sweep.csv", text)
    return EXIT_OK


COMMANDS = {"dimension": cmd_dimension, "region-map": cmd_region_map, "sum": cmd_sum,
            "verify": cmd_verify, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration file")
    common.add_argument("--depth", type=int, help="construction depth (overrides the config)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--seed", type=int, help="64-bit seed (overrides the config)")
    common.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")
    parser = argparse.ArgumentParser(prog="cantorsum", description="Sums of nearly affine Cantor sets.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"dimension": "dimension of an IFS attractor", "region-map": "classify middle-alpha pairs on a grid",
             "sum": "measure of generation-cover sums", "verify": "check the absolute-continuity hypotheses",
             "sweep": "run a task over a parameter grid"}
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.depth is not None and args.depth < 1:
        print("error: --depth must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: --seed must fit in 64 unsigned bits", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceeded as exc:
        hint = "" if exc.suggested_depth is None else f"; suggested depth {exc.suggested_depth}"
        print(f"cap exceeded: {exc}{hint}", file=sys.stderr)
        return EXIT_CAP
    except InfeasibleTriple as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (CantorSumError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
