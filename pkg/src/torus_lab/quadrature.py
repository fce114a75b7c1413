"""Composite Gauss-Legendre quadrature in the progression parameter y.

Everything that integrates over ``y`` goes through :func:`integrate_panels`.
Panels are grouped into fixed-size chunks that depend only on the problem,
never on the number of workers; chunk sums are then combined by a fixed
pairwise tree.  Results are therefore bit-identical for any worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import BudgetError, ParameterError

DEFAULT_NODE_CAP = 2**24
NODES_PER_PERIOD = 8
GL_ORDER = 8
_CHUNK_ELEMENTS = 2**20

_GL = {}


def gauss_legendre(order):
    if order not in _GL:
        _GL[order] = np.polynomial.legendre.leggauss(order)
    return _GL[order]


def worker_count(workers=None):
    """Explicit value, else ``TORUS_LAB_WORKERS``, else 1."""
    if workers is None:
        workers = os.environ.get("TORUS_LAB_WORKERS", "1")
    try:
        workers = int(workers)
    except ValueError as exc:
        raise ParameterError(f"bad worker count {workers!r}") from exc
    return max(1, workers)


def node_cap(cap=None):
    """Explicit value, else ``TORUS_LAB_NODE_CAP``, else 2**24."""
    if cap is None:
        cap = os.environ.get("TORUS_LAB_NODE_CAP", DEFAULT_NODE_CAP)
    try:
        cap = int(float(cap))
    except ValueError as exc:
        raise ParameterError(f"bad node cap {cap!r}") from exc
    return cap


def pairwise_sum(parts):
    """Sum a list of arrays/scalars by a fixed balanced tree."""
    parts = list(parts)
    if not parts:
        return 0.0
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def panel_count(lo, hi, rate, density=1.0, min_panels=4):
    """Panels needed so every period of a phase moving at ``rate`` cycles per
    unit gets ``NODES_PER_PERIOD * density`` nodes."""
    length = hi - lo
    nodes = NODES_PER_PERIOD * density * rate * length
    return max(int(min_panels), int(math.ceil(nodes / GL_ORDER)))


def integrate_panels(fn, lo, hi, panels, width=1, weight=None, workers=None, order=GL_ORDER):
    """Composite Gauss-Legendre sum of ``fn`` over ``panels`` equal panels.

    ``fn`` maps a 1-D array of y-nodes to an array of shape ``(m,)`` or
    ``(m, width)``.  ``weight`` (optional) maps nodes to real weights that
    multiply the integrand.  Returns the integral (not the average).
    """
    t, w = gauss_legendre(order)
    h = (hi - lo) / panels
    per_chunk = max(1, _CHUNK_ELEMENTS // (order * max(1, width)))
    starts = list(range(0, panels, per_chunk))

    def chunk(p0):
        p1 = min(panels, p0 + per_chunk)
        left = lo + h * np.arange(p0, p1, dtype=float)
        y = (left[:, None] + 0.5 * h * (t[None, :] + 1.0)).ravel()
        wt = np.tile(0.5 * h * w, p1 - p0)
        if weight is not None:
            wt = wt * weight(y)
        vals = fn(y)
        if vals.ndim == 1:
            return np.sum(wt * vals)
        return np.sum(wt[:, None] * vals, axis=0)

    nworkers = worker_count(workers)
    if nworkers == 1 or len(starts) == 1:
        parts = [chunk(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            parts = list(pool.map(chunk, starts))
    return pairwise_sum(parts)


def integrate_doubling(fn, lo, hi, panels, width=1, weight=None, workers=None, cap=None):
    """Integrate at ``panels`` and ``2*panels``; return (fine, est_error, nodes).

    ``est_error`` is the max-abs difference between the two levels and the
    returned value is the finer one.  Raises :class:`BudgetError` when the
    finer level would exceed the node cap.
    """
    cap = node_cap(cap)
    nodes = 2 * panels * GL_ORDER
    if nodes > cap:
        raise BudgetError(nodes, cap)
    coarse = integrate_panels(fn, lo, hi, panels, width, weight, workers)
    fine = integrate_panels(fn, lo, hi, 2 * panels, width, weight, workers)
    est = float(np.max(np.abs(np.asarray(fine) - np.asarray(coarse))))
    return fine, est, nodes + panels * GL_ORDER
