"""Config-driven experiments and their CSV output.

Each experiment returns a list of row dicts plus a summary dict.  The CSV
starts with a ``#`` comment block holding the config hash, seed, library
versions, the summary and the verbatim config (lines prefixed ``#| ``), so
that :func:`read_config_echo` recovers the input exactly.  No timing data
goes into the file, which keeps reruns byte-identical.
"""

from __future__ import annotations

import csv
import io
import os
import platform
import time
from dataclasses import dataclass, field

import numpy as np
import scipy

from . import __version__, counting, ergodic, fractal, gowers, oscillatory
from .config import build_functions
from .errors import BudgetError, ConfigError
from .torus_fn import NormKind, norm

ECHO_PREFIX = "#| "


@dataclass
class RunReport:
    config: object
    rows: list
    summary: dict
    status: int = 0
    wall_time: float = 0.0
    budget: dict = field(default_factory=dict)
    message: str = ""
    outputs: list = field(default_factory=list)


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _cutoff(cfg):
    if cfg.cutoff is None:
        return None
    return counting.SmoothCutoff(cfg.cutoff.get("a", 0.1), cfg.cutoff.get("b", 1.0))


def _measure(cfg):
    m = cfg.measure
    b, D = m["b"], m["D"]
    L = m.get("L", fractal.default_level(b, cfg.n))
    return fractal.cantor_measure(b, D, L, cfg.n)


def _N_values(cfg):
    if cfg.N_list is not None:
        return [float(v) for v in cfg.N_list]
    if cfg.N is not None:
        return [float(cfg.N)]
    raise ConfigError("need N or N_list")


def _need_k(cfg, fs, k):
    if len(fs) != k:
        raise ConfigError(f"experiment needs {k} functions for this family, got {len(fs)}")


# -- experiments -------------------------------------------------------------------


def exp_norms(cfg):
    rows = []
    for i, f in enumerate(build_functions(cfg)):
        vals = [("L2", norm(f, NormKind.Lp(2))), ("Linf", norm(f, NormKind.Linf()))]
        for s in cfg.s_list:
            vals.append((f"U{s}", gowers.gowers_norm(f, int(s))))
        if f.n <= gowers.DIRECT_MAX_N:
            vals.append(("U2_direct", gowers.gowers_norm(f, 2, gowers.DIRECT)))
        if cfg.box_H is not None:
            vals.append(("box2", gowers.box_norm(f, gowers.BoxWeights(tuple(cfg.box_H)))))
        rows += [{"function": i, "quantity": q, "value": v} for q, v in vals]
    return rows, {}


def exp_counting(cfg):
    fs = build_functions(cfg)
    _need_k(cfg, fs, cfg.family.k + 1)
    rows = []
    for N in _N_values(cfg):
        r = counting.counting_form(cfg.family, N, fs, _cutoff(cfg), cfg.method, cfg.density)
        rows.append({
            "N": N, "value_re": r.value.real, "value_im": r.value.imag,
            "main_term_re": r.main_term.real, "main_term_im": r.main_term.imag,
            "abs_error": abs(r.error), "est_error": r.est_error, "method": r.method, "nodes": r.node_count,
        })
    return rows, {}


def exp_decay(cfg):
    fs = build_functions(cfg)
    _need_k(cfg, fs, cfg.family.k + 1)
    fit, results = counting.decay_fit(cfg.family, fs, _N_values(cfg), _cutoff(cfg), cfg.method, cfg.density)
    rows = [{"N": r.N, "abs_error": abs(r.error), "est_error": r.est_error, "method": r.method} for r in results]
    return rows, {"slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2}


def exp_vdc(cfg):
    P = cfg.family.polys[0]
    Ns = _N_values(cfg)
    table, tmax, ests = oscillatory.vdc_check(P, cfg.xis, Ns)
    rows = []
    for a, xi in enumerate(cfg.xis):
        for b, N in enumerate(Ns):
            rows.append({"xi": xi, "N": N, "normalized": table[a, b], "est_error": ests[a, b]})
    return rows, {"max": tmax}


def exp_fractal(cfg):
    mu = _measure(cfg)
    rows = [
        {"quantity": "s", "index": "", "value": mu.s, "est_error": 0.0},
        {"quantity": "frostman_const", "index": "", "value": mu.frostman_const, "est_error": 0.0},
    ]
    t = float(cfg.t)
    if t < mu.s:
        methods = ["fourier", "sobolev"] + (["direct"] if mu.n <= 2048 else [])
        for m in methods:
            rows.append({"quantity": f"riesz_{m}", "index": t, "value": fractal.riesz_energy(mu, t, m), "est_error": ""})
    j_max = min(cfg.j_max, int(np.log2(mu.n)) - 1)
    tab = fractal.lp_sup_bound_check(mu, range(1, j_max + 1), cfg.lp_tau)
    for j, r in zip(tab.j, tab.ratio):
        rows.append({"quantity": "lp_ratio", "index": j, "value": r, "est_error": ""})
    summary = {"s": mu.s, "frostman_const": mu.frostman_const, "lp_max_ratio": tab.max_ratio}
    if cfg.family is not None and (cfg.N_list is not None or cfg.N is not None):
        M_list = cfg.M_list or [cfg.measure.get("M", 64)]
        for N in _N_values(cfg):
            res = fractal.frostman_sweep(cfg.family, N, [mu] * (cfg.family.k + 1), M_list, _cutoff(cfg))
            for M, r in zip(M_list, res):
                rows.append({"quantity": f"counting_error_M{M}", "index": N, "value": abs(r.error), "est_error": r.est_error})
    return rows, summary


def exp_nu(cfg):
    mu = _measure(cfg)
    chi = _cutoff(cfg) or counting.SmoothCutoff()
    M_list = cfg.M_list or [64, 128, 256]
    g = None
    if cfg.functions:
        g = build_functions(cfg)[0]
        if cfg.l:
            g = (g, cfg.l)
    vals = fractal.nu_pairing(mu, cfg.family, float(cfg.N), chi, g, M_list)
    rows = [{"M": v.M, "value_re": v.value.real, "value_im": v.value.imag, "est_error": v.est_error} for v in vals]
    diffs = [abs(b.value - a.value) for a, b in zip(vals, vals[1:])]
    summary = {"mass": chi.mass}
    if diffs:
        summary["last_difference"] = diffs[-1]
    return rows, summary


def _interval_set(cfg):
    if cfg.intervals is not None:
        return fractal.IntervalSet.from_text(cfg.intervals)
    if cfg.measure is not None:
        m = cfg.measure
        return fractal.IntervalSet.cantor(m["b"], m["D"], m.get("L", 1))
    return fractal.IntervalSet.full()


def exp_progression(cfg):
    E = _interval_set(cfg)
    ws = fractal.progression_search(E, cfg.family, cfg.y_range, cfg.y_step, cfg.pieces, cfg.limit)
    rows = []
    for w in ws:
        rows.append({
            "y_mid": w.y_mid, "y_lo": w.y[0], "y_hi": w.y[1], "x_lo": w.x[0], "x_hi": w.x[1],
            "reverified": fractal.reverify(w, E, cfg.family),
        })
    return rows, {"witnesses": len(ws), "measure_E": str(E.measure)}


def _x_grid(cfg):
    return np.arange(cfg.x_points) / cfg.x_points


def exp_ergodic(cfg):
    fs = build_functions(cfg)
    _need_k(cfg, fs, cfg.family.k)
    l_lo, l_hi = cfg.l_range
    tab = ergodic.lacunary_sweep(cfg.family, fs, cfg.tau, range(l_lo, l_hi + 1), _x_grid(cfg), cfg.method, cfg.density)
    rows = []
    for j, (l, N) in enumerate(zip(tab.l_list, tab.N_list)):
        rows.append({"l": l, "N": N, "max_dev": tab.dev[:, j].max(), "mean_dev": tab.dev[:, j].mean(), "est_error": tab.est_error[0, j]})
    gap = ergodic.interpolation_gap(cfg.family, fs, cfg.tau, cfg.l, _x_grid(cfg), method=cfg.method)
    return rows, {"complete": tab.complete, "gap": gap, "kappa": gap / cfg.tau}


def exp_deviation(cfg):
    fs = build_functions(cfg)
    _need_k(cfg, fs, cfg.family.k)
    l_lo, l_hi = cfg.l_range
    tab = ergodic.lacunary_sweep(cfg.family, fs, cfg.tau, range(l_lo, l_hi + 1), np.arange(cfg.n) / cfg.n, cfg.method, cfg.density)
    rows = []
    for l0 in tab.l_list:
        ds = ergodic.deviation_set(tab, cfg.delta, l0)
        rows.append({"l0": l0, "delta": cfg.delta, "count": ds.points.size, "measure": ds.measure, "box_dim": ds.box_dim})
    chosen = ergodic.deviation_set(tab, cfg.delta, max(cfg.l0, tab.l_list[0]))
    return rows, {"complete": tab.complete, "measure": chosen.measure, "box_dim": chosen.box_dim}


EXPERIMENT_FUNCS = {
    "norms": exp_norms,
    "counting": exp_counting,
    "decay": exp_decay,
    "vdc": exp_vdc,
    "fractal": exp_fractal,
    "nu": exp_nu,
    "progression": exp_progression,
    "ergodic": exp_ergodic,
    "deviation": exp_deviation,
}


# -- CSV ---------------------------------------------------------------------------


def versions():
    return {"torus_lab": __version__, "python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__}


def render_csv(cfg, rows, summary):
    buf = io.StringIO()
    buf.write(f"# torus-lab experiment: {cfg.experiment}\n")
    buf.write(f"# config_sha256: {cfg.digest}\n")
    buf.write(f"# seed: {cfg.seed}\n")
    buf.write("# versions: " + ", ".join(f"{k}={v}" for k, v in versions().items()) + "\n")
    for k, v in summary.items():
        buf.write(f"# summary {k}: {_num(v)}\n")
    buf.write("# config:\n")
    for line in cfg.text.splitlines():
        buf.write(ECHO_PREFIX + line + "\n")
    columns = []
    for r in rows:
        for k in r:
            if k not in columns:
                columns.append(k)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_num(r.get(c, "")) for c in columns])
    return buf.getvalue()


def read_config_echo(path_or_text):
    """Recover the verbatim config text embedded in a CSV."""
    text = path_or_text
    if os.path.exists(str(path_or_text)):
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln[len(ECHO_PREFIX):] for ln in text.splitlines() if ln.startswith(ECHO_PREFIX)]
    return "\n".join(lines) + ("\n" if lines else "")


def read_rows(path):
    """Data rows of an experiment CSV as dicts of strings."""
    with open(path, encoding="utf-8") as fh:
        data = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(data))


def run(cfg, output=None, figures=False):
    """Run one experiment and write its CSV (and optionally a figure).

    Exit status in the report: 0 success, 2 budget abort, 1 invalid input.
    Nothing is written unless the experiment succeeds.
    """
    start = time.perf_counter()
    report = RunReport(cfg, [], {})
    try:
        rows, summary = EXPERIMENT_FUNCS[cfg.experiment](cfg)
    except BudgetError as exc:
        report.status, report.message = 2, str(exc)
        report.budget = {"required": exc.required, "cap": exc.cap}
        report.wall_time = time.perf_counter() - start
        return report
    except (ConfigError, ValueError) as exc:
        report.status, report.message = 1, str(exc)
        report.wall_time = time.perf_counter() - start
        return report
    report.rows, report.summary = rows, summary
    path = output or cfg.output
    text = render_csv(cfg, rows, summary)
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    report.outputs.append(path)
    if figures:
        from .plotting import render_figure

        report.outputs.append(render_figure(cfg.experiment, rows, summary, path))
    report.wall_time = time.perf_counter() - start
    return report

