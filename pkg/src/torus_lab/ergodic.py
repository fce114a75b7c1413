"""Pointwise multiple ergodic averages along polynomial progressions.

``A_N(x) = (1/N) int_0^N prod_i f_i(x + P_i(y)) dy`` is computed once as a
band-limited function (the dual function with slot 0 removed) and then
evaluated exactly at any x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import multilinear
from .counting import fit_loglog
from .errors import BudgetError, ParameterError
from .fractal import mollify
from .torus_fn import mean


@dataclass(frozen=True)
class ErgodicAverage:
    values: np.ndarray
    est_error: float
    node_count: int
    method: str


def _average_function(family, N, fs, method, density, workers, cap):
    if len(fs) != family.k:
        raise ParameterError(f"need k = {family.k} functions, got {len(fs)}")
    multilinear.check_bands(fs)
    shifts = [np.asarray(p, dtype=float) for p in family.polys]
    return multilinear.shift_average(shifts, list(fs), N, fs[0].n, None, method, density, workers, cap)


def ergodic_average(family, N, fs, xs, method="auto", density=1.0, workers=None, cap=None):
    """``A_N(x)`` at the points ``xs``; see the module docstring."""
    N = float(N)
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    F, info = _average_function(family, N, fs, method, density, workers, cap)
    vals = F(np.asarray(xs, dtype=float))
    return ErgodicAverage(np.atleast_1d(vals), info.est_error, info.node_count, info.method)


def limit_value(fs):
    return complex(np.prod([mean(f) for f in fs]))


def lacunary_N(tau, l):
    return (1.0 + tau) ** l


@dataclass(frozen=True)
class DeviationTable:
    """``dev[i, j] = |A_{N_j}(x_i) - prod mean f|`` along ``N_j = (1 + tau)^{l_j}``.

    ``complete`` is False when a budget error stopped the sweep early; the
    columns computed so far are kept.
    """

    x_grid: np.ndarray
    l_list: tuple
    N_list: tuple
    dev: np.ndarray
    tau: float
    est_error: np.ndarray
    complete: bool = True

    @property
    def column_max(self):
        return self.dev.max(axis=0) if self.dev.size else np.array([])


def lacunary_sweep(family, fs, tau, l_range, x_grid, method="auto", density=1.0, workers=None, cap=None):
    if tau <= 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    x_grid = np.asarray(x_grid, dtype=float)
    limit = limit_value(fs)
    cols, ests, ls = [], [], []
    complete = True
    for l in l_range:
        N = lacunary_N(tau, l)
        try:
            avg = ergodic_average(family, N, fs, x_grid, method, density, workers, cap)
        except BudgetError:
            complete = False
            break
        cols.append(np.abs(avg.values - limit))
        ests.append(avg.est_error)
        ls.append(int(l))
    dev = np.stack(cols, axis=1) if cols else np.zeros((x_grid.size, 0))
    est = np.broadcast_to(np.asarray(ests, dtype=float), dev.shape).copy()
    return DeviationTable(
        x_grid, tuple(ls), tuple(lacunary_N(tau, l) for l in ls), dev, float(tau), est, complete
    )


def interpolation_gap(family, fs, tau, l, xs, samples=16, method="auto"):
    """``max |A_{N(tau,l)}(x) - A_M(x)|`` over M sampled in [N(tau,l), N(tau,l+1)] and x in xs."""
    lo, hi = lacunary_N(tau, l), lacunary_N(tau, l + 1)
    if lo < 1:
        raise ParameterError("N(tau, l) must be >= 1")
    base = ergodic_average(family, lo, fs, xs, method).values
    gap = 0.0
    for M in np.linspace(lo, hi, samples)[1:]:
        vals = ergodic_average(family, M, fs, xs, method).values
        gap = max(gap, float(np.max(np.abs(vals - base))))
    return gap


def fit_gap_constant(gaps, taus):
    """Least-squares ``kappa`` in ``gap ~ kappa * tau`` (through the origin)."""
    g = np.asarray(gaps, dtype=float)
    t = np.asarray(taus, dtype=float)
    return float(np.dot(g, t) / np.dot(t, t))


def box_dimension(points, n):
    """Least-squares box-counting dimension over scales 2^-2 .. 2^-(ceil(log2 n) - 1).

    The finest scale stays one dyadic step above the grid spacing 1/n.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return 0.0
    j_hi = math.ceil(math.log2(n)) - 1
    js = np.arange(2, max(j_hi, 2) + 1)
    counts = [np.unique(np.floor(pts * 2.0**j)).size for j in js]
    if js.size < 2:
        return 0.0
    slope, _ = np.polyfit(js * math.log(2), np.log(counts), 1)
    return float(slope)


@dataclass(frozen=True)
class DeviationSet:
    points: np.ndarray
    measure: float
    box_dim: float


def deviation_set(table, delta, l0):
    """Grid points whose deviation exceeds ``delta`` for some computed l >= l0.

    The sup over l only covers the computed range, so this is a finite
    surrogate of a lim-sup set.
    """
    if table.dev.size == 0:
        raise ParameterError("deviation table is empty")
    if delta <= 0:
        raise ParameterError("delta must be positive")
    cols = [j for j, l in enumerate(table.l_list) if l >= l0]
    if not cols:
        raise ParameterError(f"l0 = {l0} beyond the computed range")
    sup = table.dev[:, cols].max(axis=1)
    pts = table.x_grid[sup > delta]
    n = table.x_grid.size
    return DeviationSet(pts, pts.size / n, box_dimension(pts, n))


def l1_mu_convergence(family, fs, mu, N_list, M=None, method="auto"):
    """Fit the decay of ``int |A_N - prod mean f| dmu`` against N.

    ``mu`` enters through its Fejer mollification of order M (default n/4),
    a nonnegative density on the grid, and the integral is the grid mean.
    Returns (DecayFit, per-N integrals).
    """
    n = fs[0].n
    if mu.n != n:
        raise ParameterError("measure and functions must share one grid")
    M = n // 4 if M is None else int(M)
    rho = mollify(mu, M).samples.real
    x = np.arange(n) / n
    limit = limit_value(fs)
    vals, ests = [], []
    for N in N_list:
        avg = ergodic_average(family, N, fs, x, method)
        vals.append(float(np.mean(rho * np.abs(avg.values - limit))))
        ests.append(avg.est_error)
    return fit_loglog(list(N_list), vals, ests), vals
