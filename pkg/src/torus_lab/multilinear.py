"""Shared engine for y-averages of products of translated functions.

Two independent evaluation paths are provided.

grid
    For each y-node the shifted functions are synthesised on a small
    working grid (phase multiplication followed by an inverse FFT) and
    multiplied.  The x-mean of a product of band-limited functions is exact
    once the working grid exceeds twice the total band, so the only error
    is the y-quadrature.
spectral
    Expand every function in Fourier series.  A frequency tuple
    ``(xi_1..xi_k)`` contributes ``prod f_i^(xi_i)`` times the Weyl average
    of the phase ``sum xi_i S_i(y)``, which :mod:`oscillatory` evaluates at
    a cost independent of N and of the frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import BandLimitError, BudgetError, ParameterError, ShapeError
from .oscillatory import Window, max_abs_derivative, poly_eval, weyl_batch
from .torus_fn import _from_coeff_array, signed_freqs

TUPLE_CAP = 2**22
GRID_WORK_LIMIT = 2**27
# node-equivalents for one Weyl integral on the panel engine
SPECTRAL_TUPLE_COST = 2**10


@dataclass(frozen=True)
class YAverage:
    """Outcome of an engine call: ``value`` is a scalar or a coefficient array."""

    value: object
    est_error: float
    node_count: int
    method: str


def working_grid(total_band, minimum=8):
    n = minimum
    while n <= 2 * total_band:
        n *= 2
    return n


def bands(fs):
    return [f.band() for f in fs]


def check_bands(fs):
    """Products of all inputs must stay inside the band of the common grid."""
    n = fs[0].n
    if any(f.n != n for f in fs):
        raise ShapeError("all functions must share one grid")
    total = sum(bands(fs))
    if 2 * total > n:
        raise BandLimitError(
            f"total active band {total} exceeds n/2 = {n // 2}; products would alias"
        )
    return total


def _pad(S, D):
    out = np.zeros(D + 1)
    S = np.asarray(S, dtype=float)
    out[: S.size] = S
    return out


def _window(N, cutoff):
    if cutoff is None:
        return Window(0.0, float(N))
    return cutoff.window(float(N))


def _slot(f, n_w):
    b = f.band()
    xi = np.arange(-b, b + 1)
    c = f.coeffs[xi % f.n]
    keep = c != 0
    return (xi[keep] % n_w), xi[keep].astype(float), c[keep]


def _shifted_samples(y, S, slot, n_w):
    idx, fr, c = slot
    t = np.mod(poly_eval(S, y), 1.0)
    spec = np.zeros((y.size, n_w), dtype=complex)
    spec[:, idx] = c[None, :] * np.exp(2j * np.pi * np.mod(np.outer(t, fr), 1.0))
    return np.fft.ifft(spec, axis=1) * n_w


def _rate(shifts, fs, N):
    xi_max = max((f.band() for f in fs), default=0)
    speed = max((max_abs_derivative(S, N) for S in shifts), default=0.0)
    return xi_max * speed


def _grid_panels(shifts, fs, N, cutoff, density):
    win = _window(N, cutoff)
    rate = _rate(shifts, fs, N)
    min_panels = 64 if cutoff is not None else 4
    return win, quadrature.panel_count(win.lo, win.hi, rate, density, min_panels)


def grid_nodes(shifts, fs, N, cutoff=None, density=1.0):
    _, panels = _grid_panels(shifts, fs, N, cutoff, density)
    return 3 * panels * quadrature.GL_ORDER


def _grid(shifts, fs, N, f0, cutoff, density, workers, cap):
    total = sum(bands(fs)) + (f0.band() if f0 is not None else 0)
    n_w = working_grid(total)
    slots = [_slot(f, n_w) for f in fs]
    win, panels = _grid_panels(shifts, fs, N, cutoff, density)
    if f0 is not None:
        g0 = f0.resample(n_w).samples

        def fn(y):
            acc = g0[None, :]
            for S, sl in zip(shifts, slots):
                acc = acc * _shifted_samples(y, S, sl, n_w)
            return acc.mean(axis=1)

        width = n_w
    else:

        def fn(y):
            acc = np.ones((y.size, n_w), dtype=complex)
            for S, sl in zip(shifts, slots):
                acc = acc * _shifted_samples(y, S, sl, n_w)
            return acc

        width = n_w
    weight = None if win.func is None else win.func
    val, est, nodes = quadrature.integrate_doubling(
        fn, win.lo, win.hi, panels, width, weight, workers, cap
    )
    return val / N, est / N, nodes, n_w


def _support(fs):
    """Frequencies where at least one of ``fs`` has a nonzero coefficient."""
    b = max(f.band() for f in fs)
    xi = np.arange(-b, b + 1)
    keep = np.zeros(xi.size, dtype=bool)
    for f in fs:
        keep |= f.coeffs[xi % f.n] != 0
    return xi[keep]


def _tuples(shifts, slot_freqs):
    """All frequency tuples over the given per-slot supports and their phases."""
    count = int(np.prod([len(x) for x in slot_freqs], dtype=float))
    if count > TUPLE_CAP:
        raise BudgetError(count, TUPLE_CAP, "frequency tuples")
    grids = np.meshgrid(*[np.arange(len(x)) for x in slot_freqs], indexing="ij")
    xis = np.stack([fl[g.ravel()] for fl, g in zip(slot_freqs, grids)], axis=1)
    D = max(len(np.asarray(S)) - 1 for S in shifts)
    Smat = np.stack([_pad(S, D) for S in shifts])  # (k, D+1)
    Q = xis.astype(float) @ Smat
    Q[:, 0] = 0.0
    return xis, Q


def _tuple_coeffs(xis, fs):
    coef = np.ones(xis.shape[0], dtype=complex)
    for j, f in enumerate(fs):
        coef = coef * f.coeffs[xis[:, j] % f.n]
    return coef


def spectral_sweep(shifts, members, N, cutoff=None):
    """Spectral ``product_mean`` for several inputs sharing one set of shifts.

    ``members`` is a list of ``(f0, fs)`` pairs.  The Weyl averages depend
    only on the frequency tuples, so they are computed once over the union
    of all supports and reused; this makes sweeps over a smoothing
    parameter nearly free.  Returns a list of :class:`YAverage`.
    """
    N = float(N)
    k = len(shifts)
    slot_freqs = [_support([fs[j] for _, fs in members]) for j in range(k)]
    xis, Q = _tuples(shifts, slot_freqs)
    eta = xis.sum(axis=1)
    weights = []
    for f0, fs in members:
        weights.append(_tuple_coeffs(xis, fs) * f0.coeffs[(-eta) % f0.n])
    used = np.zeros(xis.shape[0], dtype=bool)
    for w in weights:
        used |= w != 0
    if not used.any():
        return [YAverage(0j, 0.0, 0, "spectral") for _ in members]
    vals, est, panels = weyl_batch(Q[used], N, _window(N, cutoff))
    out = []
    for w in weights:
        w = w[used]
        out.append(YAverage(complex(np.sum(w * vals)), float(np.sum(np.abs(w) * est)), int(panels), "spectral"))
    return out


def _spectral_scalar(shifts, fs, N, f0, cutoff):
    res = spectral_sweep(shifts, [(f0, fs)], N, cutoff)[0]
    return res.value, res.est_error, res.node_count


def _spectral_coeffs(shifts, fs, N, cutoff, n):
    xis, Q = _tuples(shifts, [_support([f]) for f in fs])
    coef = _tuple_coeffs(xis, fs)
    eta = xis.sum(axis=1)
    keep = coef != 0
    out = np.zeros(n, dtype=complex)
    if not keep.any():
        return out, 0.0, 0
    vals, est, panels = weyl_batch(Q[keep], float(N), _window(N, cutoff))
    terms = coef[keep] * vals
    pos = eta[keep] % n
    out += np.bincount(pos, weights=terms.real, minlength=n)
    out += 1j * np.bincount(pos, weights=terms.imag, minlength=n)
    est_total = float(np.sum(np.abs(coef[keep]) * est))
    return out, est_total, panels


def choose_method(method, shifts, fs, N, cutoff=None, density=1.0, cap=None, extra_band=0):
    """Resolve ``"auto"`` by comparing rough work estimates of the two paths.

    Grid work is nodes times working-grid size times slots; spectral work is
    the tuple count times a nominal Weyl-integral cost.  Grid wins ties and
    is only chosen while it fits the node cap and ``GRID_WORK_LIMIT``.
    """
    if method in ("grid", "spectral"):
        return method
    if method != "auto":
        raise ParameterError(f"unknown method {method!r}")
    nodes = grid_nodes(shifts, fs, N, cutoff, density)
    n_w = working_grid(sum(bands(fs)) + extra_band)
    grid_work = nodes * n_w * max(1, len(fs))
    tuples = float(np.prod([len(_support([f])) for f in fs], dtype=float))
    spectral_work = tuples * SPECTRAL_TUPLE_COST
    if tuples > TUPLE_CAP:
        spectral_work = float("inf")
    fits = nodes <= quadrature.node_cap(cap) and grid_work <= GRID_WORK_LIMIT
    if fits and grid_work <= spectral_work:
        return "grid"
    return "spectral"


def product_mean(shifts, fs, N, f0, cutoff=None, method="grid", density=1.0, workers=None, cap=None):
    """``(1/N) int w(y) mean_x[f0(x) prod_i f_i(x + S_i(y))] dy``."""
    N = float(N)
    method = choose_method(method, shifts, fs, N, cutoff, density, cap, f0.band())
    if method == "grid":
        val, est, nodes, _ = _grid(shifts, fs, N, f0, cutoff, density, workers, cap)
        return YAverage(complex(val), float(est), int(nodes), "grid")
    val, est, panels = _spectral_scalar(shifts, fs, N, f0, cutoff)
    return YAverage(val, est, int(panels), "spectral")


def shift_average(shifts, fs, N, n, cutoff=None, method="grid", density=1.0, workers=None, cap=None):
    """The function ``x -> (1/N) int w(y) prod_i f_i(x + S_i(y)) dy`` on grid ``n``.

    Returns (TorusFunction, YAverage).  ``est_error`` bounds the sample-wise
    change under node doubling (grid) or the summed Weyl estimates (spectral).
    """
    N = float(N)
    method = choose_method(method, shifts, fs, N, cutoff, density, cap)
    if method == "grid":
        vals, est, nodes, n_w = _grid(shifts, fs, N, None, cutoff, density, workers, cap)
        coeffs_w = np.fft.fft(vals) / n_w
        out = np.zeros(n, dtype=complex)
        fw = signed_freqs(n_w)
        half = n_w // 2
        keep = np.abs(fw) < half
        out[fw[keep] % n] = coeffs_w[keep]
        F = _from_coeff_array(out)
        return F, YAverage(None, float(est), int(nodes), "grid")
    coeffs, est, panels = _spectral_coeffs(shifts, fs, N, cutoff, n)
    return _from_coeff_array(coeffs), YAverage(None, est, int(panels), "spectral")
