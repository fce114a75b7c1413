"""The acceptance battery: sixteen numbered criteria with time budgets.

Each check returns ``(passed, detail)``; :func:`run_criterion` adds timing
and folds the time budget into the verdict.  ``slow`` criteria are skipped
by the fast suite.
"""

from __future__ import annotations

import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from . import config, counting, ergodic, experiments, fractal, gowers, kernels, oscillatory
from .oscillatory import validate_family
from .torus_fn import from_fourier, from_samples, mean, random_trig

QUAD = validate_family([[0, 1], [0, 0, 1]])


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    budget: float  # seconds
    slow: bool
    check: object


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _rng(tag):
    return np.random.default_rng(20_000 + tag)


# -- 1-4: norms ----------------------------------------------------------------


def c01_parseval():
    rng = _rng(1)
    worst_p, worst_rt = 0.0, 0.0
    for _ in range(1000):
        n = int(rng.choice([64, 128, 256, 512]))
        f = random_trig(rng, n, int(rng.integers(0, n // 2)), one_bounded=False)
        l2 = float(np.mean(np.abs(f.samples) ** 2))
        worst_p = max(worst_p, abs(l2 - float(np.sum(np.abs(f.coeffs) ** 2))))
        g = from_samples(f.samples)
        worst_rt = max(worst_rt, float(np.abs(g.coeffs - f.coeffs).max()))
    ok = worst_p <= 1e-10 and worst_rt <= 1e-10
    return ok, f"max Parseval gap {worst_p:.2e}, max round-trip gap {worst_rt:.2e}"


def c02_u2_paths():
    rng = _rng(2)
    worst = 0.0
    for _ in range(100):
        f = random_trig(rng, 64, int(rng.integers(1, 16)))
        d = gowers.gowers_norm(f, 2, gowers.DIRECT)
        q = gowers.gowers_norm(f, 2, gowers.FOURIER)
        worst = max(worst, abs(d - q) / q)
    return worst <= 1e-6, f"max relative gap {worst:.2e}"


def c03_monotone_chain():
    rng = _rng(3)
    worst_mono = worst_a = worst_b = -np.inf
    for _ in range(200):
        f = random_trig(rng, 64, int(rng.integers(1, 16)))
        u2, u3 = gowers.gowers_norm(f, 2), gowers.gowers_norm(f, 3)
        sup = float(np.abs(f.coeffs).max())
        sup_nz = float(np.abs(f.coeffs[1:]).max())
        worst_mono = max(worst_mono, u2 - u3)
        worst_a = max(worst_a, u2**4 - sup**2)
        worst_b = max(worst_b, sup**2 - (abs(mean(f)) ** 2 + sup_nz**2))
    ok = worst_mono <= 1e-6 and worst_a <= 1e-6 and worst_b <= 1e-6
    return ok, f"max(U2-U3) {worst_mono:.2e}, max(U2^4-|f^|inf^2) {worst_a:.2e}, chain tail {worst_b:.2e}"


def c04_gcs():
    rng = _rng(4)
    worst = -np.inf
    for _ in range(100):
        fw = [random_trig(rng, 64, int(rng.integers(1, 12))) for _ in range(4)]
        lhs, rhs = gowers.gcs_check(fw)
        worst = max(worst, lhs - rhs)
    return worst <= 1e-8, f"max(lhs - rhs) {worst:.2e}"


# -- 5-9: oscillatory and counting --------------------------------------------------


def c05_vdc():
    P = [0.0, 0.0, 1.0]
    _, m1, e1 = oscillatory.vdc_check(P, range(1, 17), range(2, 1025))
    _, m2, e2 = oscillatory.vdc_check(P, range(1, 33), range(2, 2049))
    growth = (m2 - m1) / m1
    ok = np.isfinite(m1) and growth < 0.05
    return ok, f"max {m1:.6f} -> {m2:.6f} on doubled ranges (growth {growth:.2%}), est {max(e1.max(), e2.max()):.1e}"


def c06_two_term_decay():
    fam = validate_family([[0, 0, 1]])
    fs = [from_fourier({1: 1.0}, 64), from_fourier({-1: 1.0}, 64)]
    fit, res = counting.decay_fit(fam, fs, [2.0**j for j in range(3, 10)], method="grid")
    ok = fit.slope <= -0.45 and -1.15 <= fit.slope <= -0.85
    return ok, f"slope {fit.slope:.4f} (r2 {fit.r2:.5f})"


def c07_smoothing():
    n = 64
    bump = from_fourier({0: 0.5, 1: 0.25, -1: 0.25}, n)
    fs = [bump, bump, from_fourier({1: 1.0}, n)]
    Ns = [2.0**j for j in range(3, 9)]
    fit1, r1 = counting.decay_fit(QUAD, fs, Ns, method="grid", density=1.0)
    fit2, r2 = counting.decay_fit(QUAD, fs, Ns, method="grid", density=2.0)
    a1 = np.array([abs(r.value) for r in r1])
    a2 = np.array([abs(r.value) for r in r2])
    stable = float(np.max(np.abs(a1 - a2) / a2))
    decreasing = bool(np.all(np.diff(a1) < 0))
    ok = decreasing and fit1.slope < -0.1 and stable <= 0.02
    return ok, f"slope {fit1.slope:.4f}, monotone {decreasing}, density-doubling change {stable:.1e}"


def _random_slots(rng, k, n=64, band=3):
    return [random_trig(rng, n, int(rng.integers(1, band + 1))) for _ in range(k + 1)]


def c08_dualization():
    rng = _rng(8)
    worst = -np.inf
    for t in range(200):
        fs = _random_slots(rng, 2)
        N = float(rng.uniform(2.0, 6.0))
        lhs, rhs, est = counting.dualization_check(QUAD, N, fs, t % 3)
        worst = max(worst, lhs - rhs)
    return worst <= 1e-6, f"max(lhs - rhs) {worst:.2e}"


# relative allowance for the floating-point summation itself
_ROUND = 1e-13


def c09_dual_pairing():
    rng = _rng(9)
    worst = -np.inf
    fails = 0
    for _ in range(50):
        fs = _random_slots(rng, 2)
        N = float(rng.uniform(2.0, 8.0))
        for i in range(3):
            lhs, rhs, bound = counting.dual_pairing_check(QUAD, N, fs, i)
            gap = abs(lhs - rhs)
            worst = max(worst, gap - bound)
            fails += gap > bound + _ROUND
    return fails == 0, f"{fails} violations; max(gap - est) {worst:.2e}"


# -- 10-14: kernels and fractal measures ------------------------------------------


def c10_kernels():
    n = 1024
    x = np.arange(n) / n
    worst_neg, worst_mass, worst_part = 0.0, 0.0, 0.0
    for M in (1, 5, 32, 200, 511):
        for kind in ("dirichlet", "fejer"):
            K = kernels.kernel(kernels.KernelSpec(kind, M), n)
            worst_mass = max(worst_mass, abs(mean(K) - 1.0), abs(np.mean(K.samples.real) - 1.0))
            if kind == "fejer":
                worst_neg = min(worst_neg, float(kernels.fejer_closed_form(M, x).min()), float(K.samples.real.min()))
    rng = _rng(10)
    for _ in range(20):
        f = random_trig(rng, n, int(rng.integers(1, n // 2)))
        pieces = [kernels.lp_project(f, j) for j in range(kernels.max_annulus(n) + 1)]
        total = sum(p.coeffs for p in pieces)
        worst_part = max(worst_part, float(np.abs(total - f.coeffs).max()))
        for a in range(len(pieces)):
            for b in range(a + 1, len(pieces)):
                worst_part = max(worst_part, abs(np.vdot(pieces[a].coeffs, pieces[b].coeffs)))
    ok = worst_neg >= -1e-12 and worst_mass <= 1e-12 and worst_part <= 1e-12
    return ok, f"min Fejer {worst_neg:.1e}, mass gap {worst_mass:.1e}, partition/orthogonality gap {worst_part:.1e}"


def c11_lp_growth():
    maxes = []
    for n in (4096, 8192):
        mu = fractal.cantor_measure(3, (0, 2), fractal.default_level(3, n), n)
        maxes.append(fractal.lp_sup_bound_check(mu, range(1, 11), 0.05).max_ratio)
    change = abs(maxes[1] - maxes[0]) / maxes[0]
    return change < 0.10, f"max ratio {maxes[0]:.5f} (n=4096) vs {maxes[1]:.5f} (n=8192), change {change:.2%}"


FROSTMAN_M = (32, 64, 128, 256)


def c12_frostman_counting():
    # level 3: 5^3 = 125 lies below the M-sweep, so the Fejer means converge
    mu = fractal.cantor_measure(5, (0, 1, 2, 3), 3, 4096)
    errors, monotone = [], True
    worst = ""
    for N in [2.0**j for j in range(3, 8)]:
        res = fractal.frostman_sweep(QUAD, N, [mu] * 3, FROSTMAN_M)
        errors.append(abs(res[-1].error))
        diffs = [abs(b.value - a.value) for a, b in zip(res, res[1:])]
        tol = [a.est_error + b.est_error for a, b in zip(res, res[1:])]
        for d0, d1, t in zip(diffs, diffs[1:], tol[1:]):
            if d1 > d0 + t:
                monotone = False
        worst = " ".join(f"{d:.2e}" for d in diffs)
    dec = bool(np.all(np.diff(errors) < 0))
    return dec and monotone, f"|L-1| at M=256: {' '.join(f'{e:.2e}' for e in errors)}; M-diffs at N=128: {worst}"


def c13_nu():
    chi = counting.SmoothCutoff()
    leb = fractal.lebesgue(4096)
    vals = fractal.nu_pairing(leb, QUAD, 16.0, chi, None, (64, 128, 256))
    lebesgue_gap = max(abs(v.value - chi.mass) for v in vals)
    # orders below the 5^3 cell scale are still pre-asymptotic, so the sweep
    # starts at M = 64
    mu = fractal.cantor_measure(5, (0, 1, 2, 3), 3, 4096)
    cv = fractal.nu_pairing(mu, QUAD, 16.0, chi, None, (64, 128, 256))
    diffs = [abs(b.value - a.value) for a, b in zip(cv, cv[1:])]
    dec = all(d1 < d0 for d0, d1 in zip(diffs, diffs[1:]))
    ok = lebesgue_gap <= 1e-6 and dec
    return ok, f"Lebesgue gap {lebesgue_gap:.1e}; Cantor Cauchy diffs {' '.join(f'{d:.2e}' for d in diffs)}"


def search_battery():
    """(name, E, family, y_range, y_step, expect_nonempty) for the search criterion."""
    out = []
    for name, E, expect in fractal.scenario_battery():
        out.append((name, E, QUAD, (0.01, 0.99), 1e-3, expect))
    return out


def c14_progression():
    failures, counts = 0, []
    expectations = True
    for name, E, fam, yr, step, expect in search_battery():
        ws = fractal.progression_search(E, fam, yr, step, pieces=8)
        counts.append(f"{name}={len(ws)}")
        failures += sum(not fractal.reverify(w, E, fam) for w in ws)
        expectations &= bool(ws) == expect
    ok = failures == 0 and expectations
    return ok, f"{failures} re-verification failures; witnesses {' '.join(counts)}"


# -- 15-16: ergodic and determinism -------------------------------------------------


SLOW_FAMILY = validate_family([[0, 1 / 8], [0, 0, 1 / 64]])


def c15_ergodic():
    rng = _rng(15)
    fails, worst = 0, -np.inf
    for _ in range(50):
        fs = _random_slots(rng, 2)
        N = float(rng.uniform(2.0, 12.0))
        A, info = ergodic._average_function(QUAD, N, fs[1:], "auto", 1.0, None, None)
        lam = counting.counting_form(QUAD, N, fs, method="auto")
        gap = abs(mean(fs[0] * A) - lam.value)
        bound = lam.est_error + info.est_error + _ROUND
        worst = max(worst, gap - bound)
        fails += gap > bound
    # gap check in the regime where a lacunary bracket spans a fraction of one oscillation
    xs = np.arange(16) / 16
    gfs = [random_trig(_rng(150), 64, 1) for _ in range(2)]
    ls = range(0, 5)
    g10 = [ergodic.interpolation_gap(SLOW_FAMILY, gfs, 0.1, l, xs) for l in ls]
    g05 = [ergodic.interpolation_gap(SLOW_FAMILY, gfs, 0.05, 2 * l, xs) for l in ls]
    kappa = ergodic.fit_gap_constant(g10 + g05, [0.1] * len(g10) + [0.05] * len(g05))
    k_l = np.array(g10) / 0.1
    stable = bool(np.all(np.abs(k_l / kappa - 1) <= 0.25))
    bounded = all(g <= 1.25 * kappa * t for g, t in zip(g10 + g05, [0.1] * 5 + [0.05] * 5))
    ratios = np.array(g10) / np.array(g05)
    halving = bool(np.all(np.abs(ratios / 2 - 1) <= 0.25))
    ok = fails == 0 and stable and bounded and halving
    return ok, (
        f"Fubini violations {fails} (max excess {worst:.1e}); kappa {kappa:.4f}, "
        f"kappa_l {np.round(k_l, 4).tolist()}, halving ratios {np.round(ratios, 3).tolist()}"
    )


DETERMINISM_CONFIG = """\
experiment = "counting"
seed = 7
n = 64
band = 4
family = [[0, 1], [0, 0, 1]]
N_list = [8, 32.5]
functions = ["random", "random", "random0"]
method = "grid"
"""


def c16_determinism():
    cfg = config.loads(DETERMINISM_CONFIG)
    blobs = []
    old = os.environ.get("TORUS_LAB_WORKERS")
    try:
        with tempfile.TemporaryDirectory() as tmp:
            for w in ("1", "8"):
                os.environ["TORUS_LAB_WORKERS"] = w
                path = os.path.join(tmp, f"w{w}.csv")
                rep = experiments.run(cfg, path)
                if rep.status != 0:
                    return False, f"run failed: {rep.message}"
                with open(path, "rb") as fh:
                    blobs.append(fh.read())
    finally:
        if old is None:
            os.environ.pop("TORUS_LAB_WORKERS", None)
        else:
            os.environ["TORUS_LAB_WORKERS"] = old
    same = blobs[0] == blobs[1]
    return same, f"CSV bytes identical at 1 and 8 workers: {same} ({len(blobs[0])} bytes)"


CRITERIA = [
    Criterion(1, "Parseval and round-trip", 5, False, c01_parseval),
    Criterion(2, "U2 direct vs Fourier", 30, False, c02_u2_paths),
    Criterion(3, "Gowers monotonicity and U2-inverse chain", 120, False, c03_monotone_chain),
    Criterion(4, "Gowers-Cauchy-Schwarz", 120, False, c04_gcs),
    Criterion(5, "van der Corput table", 60, False, c05_vdc),
    Criterion(6, "two-term decay rate", 60, False, c06_two_term_decay),
    Criterion(7, "multilinear smoothing", 600, True, c07_smoothing),
    Criterion(8, "dualization inequality", 600, True, c08_dualization),
    Criterion(9, "dual pairing identity", 300, False, c09_dual_pairing),
    Criterion(10, "kernel suite", 10, False, c10_kernels),
    Criterion(11, "Littlewood-Paley growth bound", 120, False, c11_lp_growth),
    Criterion(12, "Frostman counting", 900, True, c12_frostman_counting),
    Criterion(13, "progression functional nu", 300, False, c13_nu),
    Criterion(14, "progression search soundness", 120, False, c14_progression),
    Criterion(15, "ergodic Fubini and lacunary gap", 600, True, c15_ergodic),
    Criterion(16, "determinism across worker counts", 300, False, c16_determinism),
]


def run_criterion(crit):
    start = time.perf_counter()
    try:
        passed, detail = crit.check()
    except Exception as exc:  # a crash is a failure, reported as such
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    seconds = time.perf_counter() - start
    if seconds > crit.budget:
        passed = False
        detail += f"; over time budget {crit.budget:.0f}s"
    return CriterionResult(crit.number, crit.title, bool(passed), detail, seconds)


def run_suite(fast=False, numbers=None, echo=print):
    results = []
    for crit in CRITERIA:
        if fast and crit.slow:
            continue
        if numbers and crit.number not in numbers:
            continue
        res = run_criterion(crit)
        if echo:
            echo(res.line())
        results.append(res)
    return results


