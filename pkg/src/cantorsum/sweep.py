"""Parallel parameter sweeps with grid-ordered, worker-count-independent output."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import Config, SweepSpec
from .geometry import middle_alpha_classify, sum_cover_analysis
from .transversality import assemble_report

TASK_COLUMNS = {
    "classify": ["tag", "dim_sum", "thickness_product"],
    "sum-measure": ["depth", "interval_count", "measure", "verdict_hint"],
    "verify": ["passed", "delta_star", "blackbox0", "blackbox1", "blackbox2", "blackbox3"],
}


def cell_seed(seed: int, index: int) -> int:
    """Seed for one cell, independent of scheduling."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _classify(cfg: Config, params: dict) -> dict:
    if cfg.has("ifs") and cfg.has("compact_set"):
        a = cfg.num(cfg.section("ifs").get("middle_alpha"), "ifs.middle_alpha", params)
        b = cfg.num(cfg.section("compact_set").get("middle_alpha"), "compact_set.middle_alpha", params)
    else:
        a, b = params["a"], params["b"]
    v = middle_alpha_classify(a, b)
    return {"tag": v.tag, "dim_sum": v.dim_sum, "thickness_product": v.thickness_product}


def _sum_measure(cfg: Config, params: dict, depth: int) -> dict:
    ifs = cfg.build_ifs(params)
    other = cfg.build_compact(params)
    res = sum_cover_analysis(ifs, ifs if other is None else other, depth)
    return {"depth": res.depths[-1], "interval_count": res.counts[-1], "measure": res.measures[-1],
            "verdict_hint": res.verdict_hint}


def _verify(cfg: Config, params: dict, seed: int) -> dict:
    fam = cfg.build_family(params)
    settings = cfg.verify_settings(params)
    settings.seed = seed
    rep = assemble_report(fam, cfg.build_eta(fam, params), settings)
    out = {"passed": rep.passed, "delta_star": rep.delta_star}
    out.update({k: rep.verdicts[k] for k in ("blackbox0", "blackbox1", "blackbox2", "blackbox3")})
    return out


def run_cell(doc: dict, task: str, depth: int, index: int, params: dict) -> dict:
    """Evaluate one cell; failures are captured in the ``error`` field."""
    cfg = Config(doc)
    try:
        if task == "classify":
            out = _classify(cfg, params)
        elif task == "sum-measure":
            out = _sum_measure(cfg, params, depth)
        else:
            out = _verify(cfg, params, cell_seed(cfg.seed, index))
        out["error"] = ""
    except Exception as exc:  # recorded per cell; the sweep continues
        out = {"error": f"{type(exc).__name__}: {exc}".replace("\n", " ")}
    return out


def _star(args):
    return run_cell(*args)


def run_sweep(cfg: Config, workers: int = 1, spec: SweepSpec | None = None) -> list[dict]:
    """Rows (axis values + task columns + error) in grid order."""
    spec = spec or cfg.sweep
    if spec is None:
        raise ValueError("configuration has no sweep section")
    points = list(spec.points())
    jobs = [(cfg.doc, spec.task, spec.depth, i, p) for i, p in enumerate(points)]
    if workers <= 1 or len(jobs) == 1:
        results = [_star(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_star, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [{**p, **r} for p, r in zip(points, results)]


def sweep_csv(rows: list[dict], spec: SweepSpec) -> str:
    header = [a.name for a in spec.axes] + TASK_COLUMNS[spec.task] + ["error"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(row[h]) if h in row else "" for h in header])
    return buf.getvalue()
