"""Batch experiment runner.

Reads a JSON config with a top-level "subcommand" key, drives the library,
and writes CSV/JSON/SVG artifacts plus a manifest with content digests.
Subcommands: simulate, integrate, classify, phase-diagram, convergence,
selftest.  Exit codes: 0 success, 1 failed run or failed selftest suite,
2 usage or config error.

Everything numeric is written with shortest round-trip formatting and all
files are written atomically (temp then rename), so a fixed seed gives
byte-identical artifacts across runs and thread counts.  The manifest's
wall-clock field is the one deliberate exception.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from . import __version__, _svg, estimation, formulas, geometry, process
from .estimation import CompositionQuery
from .formulas import MarkLaw, ThreeStateParams
from .process import SimConfig, SimWindow

__all__ = ["ConfigError", "main", "load_config", "run_selftest"]


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


# ----------------------------------------------------------------------------
# config plumbing


def _check_keys(section: Mapping[str, Any], allowed: set[str], required: set[str], where: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")
    missing = sorted(required - set(section))
    if missing:
        raise ConfigError(f"missing key(s) in {where}: {', '.join(missing)}")


def load_config(path: str) -> dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if "subcommand" not in cfg:
        raise ConfigError('config needs a top-level "subcommand" key')
    return cfg


def _angle_scale(cfg: Mapping[str, Any]) -> float:
    unit = cfg.get("angle_unit")
    if unit == "degrees":
        return math.pi / 180.0
    if unit == "radians":
        return 1.0
    raise ConfigError('angle_unit must be "degrees" or "radians"')


def _number(cfg: Mapping[str, Any], key: str, where: str, lo: float | None = None) -> float:
    v = cfg.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"{where}.{key} must be a number")
    if lo is not None and v < lo:
        raise ConfigError(f"{where}.{key} must be >= {lo}")
    return float(v)


def _integer(cfg: Mapping[str, Any], key: str, where: str, lo: int = 0) -> int:
    v = cfg.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"{where}.{key} must be an integer")
    if v < lo:
        raise ConfigError(f"{where}.{key} must be >= {lo}")
    return v


def _marks_from(cfg: Mapping[str, Any], scale: float) -> MarkLaw:
    model = cfg.get("model")
    if not isinstance(model, dict):
        raise ConfigError('"model" must be an object')
    _check_keys(model, {"angles", "half_lengths", "probs"}, {"angles", "half_lengths", "probs"}, "model")
    for key in ("angles", "half_lengths", "probs"):
        if not isinstance(model[key], list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in model[key]
        ):
            raise ConfigError(f"model.{key} must be a list of numbers")
    try:
        return MarkLaw(
            tuple(scale * float(a) for a in model["angles"]),
            tuple(float(r) for r in model["half_lengths"]),
            tuple(float(p) for p in model["probs"]),
        )
    except formulas.FormulaError as exc:
        raise ConfigError(f"invalid model: {exc}") from exc


def _three_state_from(section: Mapping[str, Any], scale: float, where: str) -> ThreeStateParams:
    keys = {"alpha", "beta", "r0", "r_alpha", "r_beta", "p0", "p_alpha", "p_beta"}
    _check_keys(section, keys, keys, where)
    try:
        return ThreeStateParams(
            scale * _number(section, "alpha", where),
            scale * _number(section, "beta", where),
            _number(section, "r0", where),
            _number(section, "r_alpha", where),
            _number(section, "r_beta", where),
            _number(section, "p0", where),
            _number(section, "p_alpha", where),
            _number(section, "p_beta", where),
        )
    except formulas.FormulaError as exc:
        raise ConfigError(f"invalid {where}: {exc}") from exc


def _grid_from(section: Any, where: str) -> list[float]:
    """Either an explicit list of numbers or {"min", "max", "count"}."""
    if isinstance(section, list):
        if not section:
            raise ConfigError(f"{where} must not be empty")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in section):
            raise ConfigError(f"{where} must hold numbers")
        return [float(v) for v in section]
    if isinstance(section, dict):
        _check_keys(section, {"min", "max", "count"}, {"min", "max", "count"}, where)
        lo = _number(section, "min", where)
        hi = _number(section, "max", where)
        n = _integer(section, "count", where, lo=1)
        if hi < lo:
            raise ConfigError(f"{where}: max must be >= min")
        if n == 1:
            return [lo]
        return [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    raise ConfigError(f"{where} must be a list or a min/max/count object")


def _composition_from(value: Any, d: int, where: str) -> tuple[int, ...]:
    if (
        not isinstance(value, list)
        or len(value) != d
        or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in value)
    ):
        raise ConfigError(f"{where} must be a list of {d} non-negative integers")
    if sum(value) < 1:
        raise ConfigError(f"{where} must name at least one needle")
    return tuple(value)


# ----------------------------------------------------------------------------
# output plumbing


def _fmt_cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv_bytes(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt_cell(v) for v in row])
    return buf.getvalue().encode("utf-8")


def _json_bytes(obj: Any) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _atomic_write(path: str, data: bytes) -> None:
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _emit(out_dir: str, outputs: list[tuple[str, bytes]], manifest_fields: dict[str, Any], t0: float) -> None:
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for name, data in outputs:
        _atomic_write(os.path.join(out_dir, name), data)
        entries.append(
            {"path": name, "bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()}
        )
        print(f"wrote {os.path.join(out_dir, name)}")
    manifest = dict(manifest_fields)
    manifest["artifact"] = "needleperc"
    manifest["version"] = __version__
    manifest["wall_clock_seconds"] = round(time.time() - t0, 3)
    manifest["outputs"] = sorted(entries, key=lambda e: e["path"])
    _atomic_write(os.path.join(out_dir, "manifest.json"), _json_bytes(manifest))
    print(f"wrote {os.path.join(out_dir, 'manifest.json')}")


def _comp_str(kvec: Sequence[int]) -> str:
    return "-".join(str(k) for k in kvec)


# ----------------------------------------------------------------------------
# subcommands


_SIM_KEYS = {
    "subcommand", "angle_unit", "model", "lam", "trials", "total_size",
    "target_size", "window_half", "snapshot", "seed", "threads",
}


def run_simulate(cfg: Mapping[str, Any], seed: int, threads: int) -> list[tuple[str, bytes]]:
    _check_keys(cfg, _SIM_KEYS, {"subcommand", "angle_unit", "model", "lam", "trials", "seed"}, "config")
    marks = _marks_from(cfg, _angle_scale(cfg))
    lam = _number(cfg, "lam", "config", lo=1e-12)
    trials = _integer(cfg, "trials", "config", lo=1)
    total_size = None
    if cfg.get("total_size") is not None:
        total_size = _integer(cfg, "total_size", "config", lo=1)
    target_size = 4
    if "target_size" in cfg:
        target_size = None if cfg["target_size"] is None else _integer(cfg, "target_size", "config", lo=2)
    if "window_half" in cfg:
        wh = _number(cfg, "window_half", "config", lo=1e-12)
        window = SimWindow(wh, wh)
    else:
        window = process.default_window(marks, lam)
    sim = SimConfig(lam, window, marks, seed, palm=True)

    hist = process.composition_histogram(sim, trials, total_size, threads)
    hist_rows = [
        [_comp_str(key), hist.counts[key], hist.estimates[key][0], hist.estimates[key][1]]
        for key in hist.counts
    ]
    outputs = [
        ("composition_histogram.csv", _csv_bytes(["composition", "count", "share", "stderr"], hist_rows))
    ]
    summary: dict[str, Any] = {
        "lam": lam,
        "trials": trials,
        "censored_trials": hist.censored_trials,
        "conditioning_trials": hist.conditioning_trials,
        "total_size": total_size,
        "window_half_width": window.half_width,
        "window_half_height": window.half_height,
    }
    if target_size is not None:
        comp = process.compression_stats(sim, trials, target_size, threads)
        comp_rows = [
            [hull, off[0], off[1]]
            for hull, off in zip(comp.bunch_hull_areas.tolist(), comp.offsets.tolist())
        ]
        outputs.append(
            ("compression.csv", _csv_bytes(["hull_area", "offset_hub", "offset_bunch"], comp_rows))
        )
        summary["compression"] = {
            "target_size": target_size,
            "n_target": comp.n_target,
            "censored_trials": comp.censored_trials,
            "mean_bunch_hull_area": None if math.isnan(comp.mean_bunch_hull_area) else comp.mean_bunch_hull_area,
        }
    if cfg.get("snapshot"):
        outputs.append(("snapshot.svg", _snapshot_svg(sim)))
    outputs.append(("simulate_summary.json", _json_bytes(summary)))
    return outputs


def _snapshot_svg(sim: SimConfig) -> bytes:
    """One palm realization; the origin cluster drawn on top in a second color.

    Every needle is exactly one line element, so the realization can be
    checked against the file by counting lines.
    """
    needles = process.palm_sample(sim)
    report = process.origin_cluster(needles, sim.window)
    members = {(n.center, n.angle, n.half_length) for n in report.needles}
    side = 640.0
    canvas = _svg.Canvas(side, side * sim.window.half_height / sim.window.half_width)
    sx = side / (2.0 * sim.window.half_width)
    sy = canvas.height / (2.0 * sim.window.half_height)

    def pix(p: tuple[float, float]) -> tuple[float, float]:
        return (side / 2.0 + p[0] * sx, canvas.height / 2.0 - p[1] * sy)

    canvas.rect(0, 0, canvas.width, canvas.height, "#ffffff", stroke="#000000")
    ordered = sorted(needles, key=lambda n: (n.center, n.angle, n.half_length) in members)
    for n in ordered:
        (x0, y0), (x1, y1) = (pix(p) for p in n.endpoints())
        color = "#ee6677" if (n.center, n.angle, n.half_length) in members else "#4477aa"
        canvas.line(x0, y0, x1, y1, color, 1.2)
    return canvas.render().encode("utf-8")


_CLASSIFY_KEYS = {"subcommand", "angle_unit", "params", "seed", "threads"}


def run_classify(cfg: Mapping[str, Any], seed: int, threads: int) -> list[tuple[str, bytes]]:
    _check_keys(cfg, _CLASSIFY_KEYS, {"subcommand", "angle_unit", "params"}, "config")
    if not isinstance(cfg.get("params"), dict):
        raise ConfigError('"params" must be an object')
    params = _three_state_from(cfg["params"], _angle_scale(cfg), "params")
    verdict = formulas.classify_regime(params)
    hu = formulas.h_units(params)
    doc = {
        "params": {
            "alpha": params.alpha,
            "beta": params.beta,
            "r0": params.r0,
            "r_alpha": params.r_alpha,
            "r_beta": params.r_beta,
            "p0": params.p0,
            "p_alpha": params.p_alpha,
            "p_beta": params.p_beta,
        },
        "reach_ratios": {"a": hu.a, "b": hu.b},
        "survivors": [list(pair) for pair in verdict.survivors],
        "fixation": verdict.fixation,
        "case_label": verdict.case_label,
        "rates": list(verdict.rates),
        "thresholds": {
            "l1": formulas.l1_threshold(params.p0, params.p_alpha, params.p_beta),
            "l2": formulas.l2_threshold(params.p0, params.p_alpha, params.p_beta),
        },
    }
    return [("verdict.json", _json_bytes(doc))]


_PHASE_KEYS = {
    "subcommand", "angle_unit", "mode", "alpha", "beta", "r0", "a_grid",
    "b_grid", "p0_grid", "palpha_share", "p0", "p_alpha", "p_beta",
    "seed", "threads",
}


def _params_for_reach(alpha: float, beta: float, r0: float, a: float, b: float,
                      p0: float, p_alpha: float, p_beta: float) -> ThreeStateParams:
    """Half lengths chosen so the reach ratios come out at (a, b)."""
    sg = math.sin(beta - alpha)
    return ThreeStateParams(
        alpha, beta, r0,
        a * r0 * math.sin(beta) / sg,
        b * r0 * math.sin(alpha) / sg,
        p0, p_alpha, p_beta,
    )


def run_phase_diagram(cfg: Mapping[str, Any], seed: int, threads: int) -> list[tuple[str, bytes]]:
    _check_keys(cfg, _PHASE_KEYS, {"subcommand", "angle_unit", "mode", "alpha", "beta", "r0"}, "config")
    scale = _angle_scale(cfg)
    alpha = scale * _number(cfg, "alpha", "config")
    beta = scale * _number(cfg, "beta", "config")
    r0 = _number(cfg, "r0", "config", lo=1e-12)
    mode = cfg.get("mode")
    rows: list[list[Any]] = []
    header = ["a", "b", "p0", "p_alpha", "p_beta", "case_label", "survivors", "fixation",
              "rate0", "rate1", "rate2"]
    if mode == "a-p0":
        for key in ("a_grid", "p0_grid"):
            if key not in cfg:
                raise ConfigError(f'mode "a-p0" needs {key}')
        a_grid = _grid_from(cfg["a_grid"], "a_grid")
        p0_grid = _grid_from(cfg["p0_grid"], "p0_grid")
        share = _number(cfg, "palpha_share", "config") if "palpha_share" in cfg else 0.5
        if not (0.0 < share < 1.0):
            raise ConfigError("palpha_share must sit strictly between 0 and 1")
        cells: list[tuple[float, float, str]] = []
        for p0 in p0_grid:
            if not (0.0 <= p0 < 1.0):
                raise ConfigError("p0 grid values must sit in [0, 1)")
            pa = share * (1.0 - p0)
            pb = (1.0 - share) * (1.0 - p0)
            for a in a_grid:
                params = _params_for_reach(alpha, beta, r0, a, a, p0, pa, pb)
                v = formulas.classify_regime(params)
                label = _region_label(v)
                rows.append([a, a, p0, pa, pb, v.case_label, _survivor_str(v), v.fixation, *v.rates])
                cells.append((p0, a, label))
        boundary = []
        for p0 in p0_grid:
            pa = share * (1.0 - p0)
            pb = (1.0 - share) * (1.0 - p0)
            l1 = formulas.l1_threshold(p0, pa, pb)
            boundary.append([p0, l1 if l1 <= 1.0 else formulas.l2_threshold(p0, pa, pb)])
        svg = _phase_svg(cells, "p0", "a", [(p, v) for p, v in boundary])
        return [
            ("phase_diagram.csv", _csv_bytes(header, rows)),
            ("boundary.csv", _csv_bytes(["p0", "a_boundary"], boundary)),
            ("phase_diagram.svg", svg),
        ]
    if mode == "a-b":
        for key in ("a_grid", "b_grid", "p0", "p_alpha", "p_beta"):
            if key not in cfg:
                raise ConfigError(f'mode "a-b" needs {key}')
        a_grid = _grid_from(cfg["a_grid"], "a_grid")
        b_grid = _grid_from(cfg["b_grid"], "b_grid")
        p0 = _number(cfg, "p0", "config")
        pa = _number(cfg, "p_alpha", "config")
        pb = _number(cfg, "p_beta", "config")
        cells = []
        for b in b_grid:
            for a in a_grid:
                params = _params_for_reach(alpha, beta, r0, a, b, p0, pa, pb)
                v = formulas.classify_regime(params)
                rows.append([a, b, p0, pa, pb, v.case_label, _survivor_str(v), v.fixation, *v.rates])
                cells.append((a, b, _region_label(v)))
        svg = _phase_svg(cells, "a", "b", [])
        return [
            ("phase_diagram.csv", _csv_bytes(header, rows)),
            ("phase_diagram.svg", svg),
        ]
    raise ConfigError('mode must be "a-p0" or "a-b"')


def _survivor_str(v: formulas.RegimeVerdict) -> str:
    return ";".join(f"{i}{j}" for i, j in v.survivors)


def _region_label(v: formulas.RegimeVerdict) -> str:
    tag = _survivor_str(v)
    return f"{tag}+fix" if v.fixation else tag


def _phase_svg(cells: list[tuple[float, float, str]], xlabel: str, ylabel: str,
               boundary: list[tuple[float, float]]) -> bytes:
    xs = sorted({c[0] for c in cells})
    ys = sorted({c[1] for c in cells})
    dx = min(b - a for a, b in zip(xs, xs[1:])) if len(xs) > 1 else 1.0
    dy = min(b - a for a, b in zip(ys, ys[1:])) if len(ys) > 1 else 1.0
    canvas = _svg.Canvas(560, 440)
    frame = _svg.Frame(
        canvas,
        (xs[0] - dx / 2, xs[-1] + dx / 2),
        (ys[0] - dy / 2, ys[-1] + dy / 2),
    )
    colors: dict[str, str] = {}
    for x, y, label in cells:
        fill = colors.setdefault(label, _svg.PALETTE[len(colors) % len(_svg.PALETTE)])
        frame.cell(x - dx / 2, y - dy / 2, dx, dy, fill)
    if boundary:
        inside = [(x, y) for x, y in boundary if ys[0] - dy / 2 <= y <= ys[-1] + dy / 2]
        if len(inside) >= 2:
            frame.curve(inside, "#000000", 2.0)
    frame.axes(xlabel, ylabel, xs[:: max(1, len(xs) // 6)], ys[:: max(1, len(ys) // 6)], fmt=".2g")
    for i, (label, color) in enumerate(sorted(colors.items())):
        y = frame.top + 14 * (i + 1)
        canvas.rect(frame.right - 92, y - 8, 10, 10, color)
        canvas.text(frame.right - 78, y, label, size=10)
    return canvas.render().encode("utf-8")


_INTEGRATE_KEYS = {
    "subcommand", "angle_unit", "model", "lam", "m", "composition",
    "budget", "seed", "threads",
}


def _live_compositions(m: int, marks: MarkLaw) -> list[tuple[int, ...]]:
    """Compositions whose cluster probability is not structurally zero."""
    out = []
    for kvec in estimation._compositions(m, marks.d):
        if any(k > 0 and marks.probs[j] == 0.0 for j, k in enumerate(kvec)):
            continue
        if m >= 2 and sum(1 for k in kvec if k > 0) < 2:
            continue
        out.append(kvec)
    return out


def _ratio_row(query: CompositionQuery, budget: int, seed: int) -> list[Any]:
    value, err = estimation.cluster_probability(query, budget, seed)
    asym = estimation._asymptotic_value(query.kvec, query.lam, query.marks)
    ratio = value / asym if asym > 0.0 else math.nan
    return [query.lam, _comp_str(query.kvec), value, err, asym, ratio]


_TABLE_HEADER = ["lambda", "composition", "estimate", "stderr", "asymptotic", "ratio"]


def run_integrate(cfg: Mapping[str, Any], seed: int, threads: int) -> list[tuple[str, bytes]]:
    _check_keys(cfg, _INTEGRATE_KEYS, {"subcommand", "angle_unit", "model", "lam", "budget", "seed"}, "config")
    marks = _marks_from(cfg, _angle_scale(cfg))
    lam = _number(cfg, "lam", "config", lo=1e-12)
    budget = _integer(cfg, "budget", "config", lo=1)
    if ("m" in cfg) == ("composition" in cfg):
        raise ConfigError('give exactly one of "m" or "composition"')
    if "composition" in cfg:
        comps = [_composition_from(cfg["composition"], marks.d, "composition")]
    else:
        m = _integer(cfg, "m", "config", lo=1)
        if m > 6:
            raise ConfigError("cluster sizes beyond six needles are out of scope")
        comps = _live_compositions(m, marks)
    if any(sum(kv) > 6 for kv in comps):
        raise ConfigError("cluster sizes beyond six needles are out of scope")
    rows = [_ratio_row(CompositionQuery(kvec, lam, marks), budget, seed) for kvec in comps]
    return [("integrate.csv", _csv_bytes(_TABLE_HEADER, rows))]


_CONV_KEYS = {
    "subcommand", "angle_unit", "model", "lambda_grid", "compositions",
    "budget", "seed", "threads",
}


def run_convergence(cfg: Mapping[str, Any], seed: int, threads: int) -> list[tuple[str, bytes]]:
    _check_keys(cfg, _CONV_KEYS, {"subcommand", "angle_unit", "model", "lambda_grid", "compositions", "budget", "seed"}, "config")
    marks = _marks_from(cfg, _angle_scale(cfg))
    grid = _grid_from(cfg["lambda_grid"], "lambda_grid")
    if any(v <= 0.0 for v in grid):
        raise ConfigError("lambda_grid values must be positive")
    budget = _integer(cfg, "budget", "config", lo=1)
    if not isinstance(cfg["compositions"], list) or not cfg["compositions"]:
        raise ConfigError("compositions must be a non-empty list")
    kvecs = [_composition_from(kv, marks.d, "compositions") for kv in cfg["compositions"]]
    if any(sum(kv) > 6 for kv in kvecs):
        raise ConfigError("cluster sizes beyond six needles are out of scope")
    queries = [CompositionQuery(kv, grid[0], marks) for kv in kvecs]
    study = estimation.convergence_study(grid, queries, budget, seed)
    rows = [
        [r.lam, _comp_str(r.composition), r.estimate, r.stderr, r.asymptotic, r.ratio]
        for r in study.rows
    ]
    summary = {
        "fitted_powers": {_comp_str(k): v for k, v in study.fitted_powers.items()},
        "phis": {_comp_str(k): v for k, v in study.phis.items()},
    }
    return [
        ("convergence.csv", _csv_bytes(_TABLE_HEADER, rows)),
        ("convergence.svg", _convergence_svg(study)),
        ("convergence_summary.json", _json_bytes(summary)),
    ]


def _convergence_svg(study: estimation.ConvergenceStudy) -> bytes:
    usable = [r for r in study.rows if math.isfinite(r.ratio)]
    canvas = _svg.Canvas(560, 420)
    if not usable:
        canvas.text(40, 40, "no finite ratios to plot")
        return canvas.render().encode("utf-8")
    lams = sorted({r.lam for r in usable})
    vals = [r.ratio for r in usable]
    errs = [3.0 * r.stderr / r.asymptotic for r in usable if r.asymptotic > 0.0]
    lo = min(min(vals) - max(errs, default=0.0), 0.9)
    hi = max(max(vals) + max(errs, default=0.0), 1.1)
    frame = _svg.Frame(canvas, (lams[0] / 1.15, lams[-1] * 1.15), (lo, hi), logx=True)
    frame.hline(1.0)
    comps = sorted({r.composition for r in usable})
    for ci, comp in enumerate(comps):
        color = _svg.PALETTE[ci % len(_svg.PALETTE)]
        pts = [(r.lam, r.ratio) for r in usable if r.composition == comp]
        bars = [
            (r.lam, r.ratio, 3.0 * r.stderr / r.asymptotic)
            for r in usable
            if r.composition == comp and r.asymptotic > 0.0
        ]
        frame.curve(pts, color)
        frame.points(pts, color)
        frame.errorbars(bars, color)
        canvas.text(frame.left + 8, frame.top + 14 * (ci + 1), _comp_str(comp), size=10)
    frame.axes("lambda", "estimate / asymptotic", lams, [round(lo, 2), 1.0, round(hi, 2)], fmt="g")
    return canvas.render().encode("utf-8")


# ----------------------------------------------------------------------------
# selftest


def _random_params(rng: np.random.Generator) -> ThreeStateParams:
    alpha = float(rng.uniform(0.3, 1.3))
    beta = float(rng.uniform(alpha + 0.3, 2.8))
    radii = rng.uniform(0.2, 1.5, 3)
    probs = rng.dirichlet([1.0, 1.0, 1.0])
    return ThreeStateParams(alpha, beta, *map(float, radii), *map(float, probs))


def _suite_geometry(seed: int) -> tuple[bool, str]:
    rng = np.random.Generator(np.random.Philox(key=[seed, 1]))
    for trial in range(40):
        k = int(rng.integers(2, 6))
        alpha = float(rng.uniform(0.0, 1.2))
        beta = float(rng.uniform(alpha + 0.25, 3.0))
        dirs = geometry.DirPair(alpha, beta)
        half_a = float(rng.uniform(0.2, 1.5))
        half_b = float(rng.uniform(0.2, 1.5))
        centers = [(float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2))) for _ in range(k)]
        polys = [geometry.skewbox_polygon(geometry.SkewBox(c, dirs, half_a, half_b)) for c in centers]
        got = geometry.union_area(polys)
        ref = geometry.union_area_same_dirs(dirs, half_a, half_b, centers)
        if not math.isclose(got, ref, rel_tol=1e-12, abs_tol=1e-12):
            return False, (
                f"union mismatch at trial {trial} (seed {seed}): {got!r} vs {ref!r}, "
                f"dirs=({alpha!r}, {beta!r}) halfs=({half_a!r}, {half_b!r}) centers={centers!r}"
            )
    for trial in range(30):
        params = _random_params(rng)
        hu = formulas.h_units(params)
        polys = [
            geometry.skewbox_polygon(
                geometry.SkewBox((0.0, 0.0), geometry.DirPair(0.0, params.alpha), params.r0, params.r_alpha)
            ),
            geometry.skewbox_polygon(
                geometry.SkewBox((0.0, 0.0), geometry.DirPair(0.0, params.beta), params.r0, params.r_beta)
            ),
        ]
        got = geometry.union_area(polys)
        ref = formulas.contact_pair_union_area(hu.h0, hu.h_alpha, hu.h_beta, hu.c)
        if not math.isclose(got, ref, rel_tol=1e-9):
            return False, f"pair union {got!r} vs closed form {ref!r} at trial {trial} (seed {seed}): {params!r}"
    return True, "40 same-direction + 30 pair-union checks"


def _suite_formulas(seed: int) -> tuple[bool, str]:
    rng = np.random.Generator(np.random.Philox(key=[seed, 2]))
    for trial in range(100):
        dirs = geometry.DirPair(float(rng.uniform(0.1, 1.2)), float(rng.uniform(1.4, 3.0)))
        half_a = float(rng.uniform(0.3, 1.2))
        half_b = float(rng.uniform(0.3, 1.2))
        k = int(rng.integers(2, 6))
        # offsets kept inside the box so the union stays connected and the
        # sharper lower bound applies too
        comps_a = [0.0] + [float(rng.uniform(-0.9 * half_a, 0.9 * half_a)) for _ in range(k - 1)]
        comps_b = [0.0] + [float(rng.uniform(-0.9 * half_b, 0.9 * half_b)) for _ in range(k - 1)]
        lower1, lower2, upper = formulas.spread_excess_bounds(dirs, half_a, half_b, comps_a, comps_b)
        ea, eb = geometry.direction(dirs.alpha), geometry.direction(dirs.beta)
        centers = [(a * ea[0] + b * eb[0], a * ea[1] + b * eb[1]) for a, b in zip(comps_a, comps_b)]
        exact = geometry.union_area_same_dirs(dirs, half_a, half_b, centers)
        exact -= 4.0 * half_a * half_b * math.sin(dirs.gap)
        if not (max(lower1, lower2) - 1e-9 <= exact <= upper + 1e-9):
            return False, (
                f"sandwich broken at trial {trial} (seed {seed}): "
                f"{lower1!r}/{lower2!r} <= {exact!r} <= {upper!r} fails for "
                f"dirs={dirs!r} halfs=({half_a!r}, {half_b!r})"
            )
    law = formulas.composition_limit(3, 0.6)
    if not math.isclose(law.weights[(2, 1)], 27.0 / 35.0, rel_tol=1e-12):
        return False, f"limit weight {law.weights[(2, 1)]!r} != 27/35"
    if formulas.spread_integral(1.7, 0.9, 0.0, 1) != (1.0, 0.0):
        return False, "first spread integral must be exactly (1, 0)"
    g3 = formulas.spread_integral(2.0, 1.5, 0.0, 3)
    if not math.isclose(g3[0], (2.0 * 1.5) ** -2, rel_tol=1e-12):
        return False, f"factorized spread integral {g3[0]!r} != 1/9"
    return True, "100 sandwiches + frozen identities"


def _suite_classifier(seed: int) -> tuple[bool, str]:
    rng = np.random.Generator(np.random.Philox(key=[seed, 3]))
    l1 = formulas.l1_threshold(0.5, 0.25, 0.25)
    if not math.isclose(l1, 8.0 / 9.0, rel_tol=1e-12):
        return False, f"l1(0.5, 0.25, 0.25) = {l1!r} != 8/9"
    for trial in range(400):
        params = _random_params(rng)
        v = formulas.classify_regime(params)
        c = float(rng.uniform(0.5, 2.0))
        scaled = ThreeStateParams(
            params.alpha, params.beta, c * params.r0, c * params.r_alpha,
            c * params.r_beta, params.p0, params.p_alpha, params.p_beta,
        )
        if formulas.classify_regime(scaled).case_label != v.case_label:
            return False, f"scale invariance broken at trial {trial} (seed {seed}): {params!r}, c={c!r}"
    return True, "400 scale invariance draws"


def _suite_process(seed: int) -> tuple[bool, str]:
    marks = MarkLaw((0.0, math.pi / 2), (0.5, 0.5), (0.5, 0.5))
    sim = SimConfig(1.0, SimWindow(6.0, 6.0), marks, seed)
    a = process.composition_histogram(sim, 600, total_size=2, threads=2)
    b = process.composition_histogram(sim, 600, total_size=2, threads=1)
    if a.counts != b.counts:
        return False, f"thread count changed results (seed {seed})"
    if a.conditioning_trials == 0:
        return False, f"no conditioning events in 600 trials (seed {seed})"
    return True, f"{a.conditioning_trials} events, thread-stable"


def _suite_estimation(seed: int) -> tuple[bool, str]:
    marks = MarkLaw((0.0, math.pi / 2), (0.5, 0.5), (0.5, 0.5))
    single = estimation.integrate_F(CompositionQuery((1, 0), 3.0, marks), 1000, seed)
    expect = math.exp(-3.0 * 0.5)
    if not math.isclose(single.value, expect, rel_tol=1e-12):
        return False, f"one-needle value {single.value!r} != {expect!r}"
    q = CompositionQuery((1, 1), 6.0, marks)
    est = estimation.integrate_F(q, 40_000, seed)
    exact = math.exp(-6.0)
    if abs(est.value - exact) > 4.0 * est.stderr:
        return False, f"pair integral off by {abs(est.value - exact) / est.stderr:.1f} sigma (seed {seed})"
    rerun = estimation.integrate_F(q, 40_000, seed)
    if rerun.value != est.value:
        return False, "integrator is not deterministic"
    return True, "exact values + determinism"


_SUITES: tuple[tuple[str, Callable[[int], tuple[bool, str]]], ...] = (
    ("geometry", _suite_geometry),
    ("formulas", _suite_formulas),
    ("classifier", _suite_classifier),
    ("process", _suite_process),
    ("estimation", _suite_estimation),
)


def run_selftest(seed: int = 20260815) -> int:
    print(f"selftest seed {seed} (pass --seed to vary)")
    failed = []
    for name, suite in _SUITES:
        t0 = time.time()
        try:
            ok, detail = suite(seed)
        except Exception as exc:  # a crashed suite is a failed suite
            ok, detail = False, f"exception: {exc!r}"
        took = time.time() - t0
        status = "pass" if ok else "FAIL"
        print(f"  {name:<12} {status}  {detail}  ({took:.1f}s)")
        if not ok:
            failed.append(name)
    if failed:
        print(f"selftest failed: {', '.join(failed)}")
        return 1
    print("selftest passed")
    return 0


# ----------------------------------------------------------------------------
# entry point


_RUNNERS: dict[str, Callable[[Mapping[str, Any], int, int], list[tuple[str, bytes]]]] = {
    "simulate": run_simulate,
    "integrate": run_integrate,
    "classify": run_classify,
    "phase-diagram": run_phase_diagram,
    "convergence": run_convergence,
}


def _resolve_threads(args: argparse.Namespace, cfg: Mapping[str, Any]) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("NEEDLE_PERC_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"NEEDLE_PERC_THREADS must be an integer, got {env!r}") from exc
    if "threads" in cfg:
        return _integer(cfg, "threads", "config", lo=1)
    return 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="needle-perc",
        description="Finite-cluster experiments for Poisson needle percolation.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in (*_RUNNERS, "selftest"):
        p = sub.add_parser(name)
        if name != "selftest":
            p.add_argument("--config", required=True, help="JSON experiment config")
            p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.add_argument("--threads", type=int, default=None, help="worker threads (or NEEDLE_PERC_THREADS)")
    args = parser.parse_args(argv)

    if args.subcommand == "selftest":
        return run_selftest(**({} if args.seed is None else {"seed": args.seed}))

    t0 = time.time()
    try:
        cfg = load_config(args.config)
        if cfg["subcommand"] != args.subcommand:
            raise ConfigError(
                f"config is for {cfg['subcommand']!r} but {args.subcommand!r} was invoked"
            )
        threads = max(1, _resolve_threads(args, cfg))
        if args.seed is not None:
            seed = args.seed
        elif "seed" in cfg:
            seed = _integer(cfg, "seed", "config")
        else:
            seed = 0
        outputs = _RUNNERS[args.subcommand](cfg, seed, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (
        formulas.FormulaError,
        process.ProcessError,
        estimation.EstimationError,
        geometry.GeometryError,
    ) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    effective = dict(cfg)
    effective["seed"] = seed
    # thread count deliberately left out of the manifest: results must not
    # depend on it, and the manifest should be stable modulo wall clock
    _emit(
        args.out,
        outputs,
        {"subcommand": args.subcommand, "seed": seed, "config": effective},
        t0,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
