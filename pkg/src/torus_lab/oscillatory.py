"""Polynomial families, Weyl averages and the frequency-control linear algebra.

Weyl averages ``(1/N) int_0^N w(y) e(Q(y)) dy`` are computed two ways:

* ``composite``: equal Gauss-Legendre panels sized so that the fastest
  oscillation on [0, N] gets at least 8 nodes per period.  Cost grows like
  |xi| N^d and is subject to the node cap.
* ``panel`` (default): panels graded geometrically away from the critical
  points of Q.  Panels that carry less than two periods use Gauss-Legendre;
  the rest use Levin collocation, which solves ``p' + 2 pi i Q' p = w`` on
  Chebyshev points and is accurate independently of the frequency.  This
  handles many phases at once, which the spectral counting path relies on.

Both report ``est_error`` as the change under halving every panel.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import BudgetError, DegenerateFamily, InvalidFamily, ParameterError

# -- polynomial families -----------------------------------------------------


def poly_eval(coeffs, y):
    """Horner evaluation of an ascending coefficient vector."""
    out = np.zeros_like(np.asarray(y, dtype=float))
    for c in coeffs[::-1]:
        out = out * y + c
    return out


def poly_deriv(coeffs):
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size <= 1:
        return np.zeros(1)
    return coeffs[1:] * np.arange(1, coeffs.size)


def poly_degree(coeffs):
    nz = np.flatnonzero(np.asarray(coeffs))
    return int(nz[-1]) if nz.size else 0


def max_abs_derivative(coeffs, N):
    """Upper bound for max over [0, N] of |P'|: sum_j j |a_j| N^(j-1)."""
    d = poly_deriv(coeffs)
    return float(poly_eval(np.abs(d), float(N)))


@dataclass(frozen=True, eq=False)
class PolynomialFamily:
    """Validated polynomials ``P_1..P_k`` with zero constant terms and
    strictly increasing degrees.

    ``coeff_matrix[j-1, i]`` is the coefficient of ``y**j`` in ``P_i``.
    """

    polys: tuple
    degrees: tuple
    coeff_matrix: np.ndarray

    @property
    def k(self):
        return len(self.polys)

    @property
    def d(self):
        return self.coeff_matrix.shape[0]

    def __call__(self, y):
        """Values ``P_i(y)`` as an array of shape ``(k,) + y.shape``."""
        return np.stack([poly_eval(p, np.asarray(y, dtype=float)) for p in self.polys])

    def max_speed(self, N):
        return max(max_abs_derivative(p, N) for p in self.polys)

    def as_lists(self):
        return [list(map(float, p)) for p in self.polys]


def validate_family(polys):
    """Check raw ascending coefficient lists and build a :class:`PolynomialFamily`.

    >>> validate_family([[0, 1], [0, 0, 1]]).degrees
    (1, 2)
    """
    polys = [np.trim_zeros(np.asarray(p, dtype=float), "b") for p in polys]
    if not polys:
        raise InvalidFamily("empty", "a polynomial family needs at least one member")
    for p in polys:
        if p.size == 0 or p.size == 1 and p[0] == 0:
            raise InvalidFamily("degrees", "the zero polynomial has no degree")
        if p[0] != 0:
            raise InvalidFamily("constant", f"nonzero constant term {p[0]}")
    degrees = [p.size - 1 for p in polys]
    if len(set(degrees)) != len(degrees):
        raise InvalidFamily("degrees", f"degrees must be distinct, got {degrees}")
    order = np.argsort(degrees)
    polys = [polys[i] for i in order]
    degrees = tuple(degrees[i] for i in order)
    d = degrees[-1]
    A = np.zeros((d, len(polys)))
    for i, p in enumerate(polys):
        A[: p.size - 1, i] = p[1:]
    return PolynomialFamily(tuple(polys), degrees, A)


def family_from_matrix(A):
    A = np.asarray(A, dtype=float)
    return validate_family([np.concatenate([[0.0], A[:, i]]) for i in range(A.shape[1])])


# -- weights ----------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    """Integration window ``[lo, hi]`` with an optional smooth weight.

    ``func`` maps y-arrays to real weights.  ``soft_ends`` marks weights that
    vanish to infinite order at both ends (bump functions); panels are then
    graded toward the ends as well.
    """

    lo: float
    hi: float
    func: object = None
    soft_ends: bool = False

    def __call__(self, y):
        if self.func is None:
            return np.ones_like(y)
        return self.func(y)


# -- Levin / Gauss-Legendre panel engine --------------------------------------

_LEVIN_ORDER = 16
_GL_PANEL_ORDER = 16
_GL_MAX_CYCLES = 2.0
_ZONE_CYCLES = 0.25
_GRADING_STEPS = 48
_SOFT_END_FRACTION = 0.02
_PANEL_CHUNK = 16384


def _cheb_lobatto(m):
    j = np.arange(m)
    t = np.cos(np.pi * j / (m - 1))
    c = np.ones(m)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** j
    dt = t[:, None] - t[None, :]
    D = np.outer(c, 1.0 / c) / (dt + np.eye(m))
    D -= np.diag(D.sum(axis=1))
    return t, D


_CHEB = _cheb_lobatto(_LEVIN_ORDER)


def _horner_rows(Q, y):
    """Evaluate row-wise polynomials ``Q (P, D+1)`` at ``y (P, m)``."""
    out = np.zeros_like(y)
    for j in range(Q.shape[1] - 1, -1, -1):
        out = out * y + Q[:, j : j + 1]
    return out


def _taylor_rows(Q, c):
    """Coefficients of ``Q(c + u)`` in powers of ``u`` for each row."""
    D = Q.shape[1] - 1
    out = np.zeros_like(Q)
    for j in range(D + 1):
        for m in range(j, D + 1):
            out[:, j] += math.comb(m, j) * Q[:, m] * c ** (m - j)
    return out


def _zone(Q, c):
    """Half-width around ``c`` over which each Taylor term moves < 1/4 cycle."""
    tay = _taylor_rows(Q, c)
    with np.errstate(divide="ignore"):
        widths = [
            (_ZONE_CYCLES / np.abs(tay[:, j])) ** (1.0 / j) for j in range(1, Q.shape[1])
        ]
    if not widths:
        return np.full(Q.shape[0], np.inf)
    return np.min(np.stack(widths), axis=0)


def _derivative_roots(Q):
    """Complex roots of Q' per row, padded with NaN, shape (T, D-1)."""
    T, D1 = Q.shape
    D = D1 - 1
    R = max(D - 1, 0)
    roots = np.full((T, R), np.nan + 0j)
    if R == 0:
        return roots
    dq = Q[:, 1:] * np.arange(1, D1)  # ascending, degree D-1
    scale = np.max(np.abs(dq), axis=1, keepdims=True)
    scale[scale == 0] = 1.0
    rel = np.abs(dq) / scale
    eff = np.where(rel > 1e-14, np.arange(D)[None, :], -1).max(axis=1)
    for e in range(1, D):
        rows = np.flatnonzero(eff == e)
        if rows.size == 0:
            continue
        lead = dq[rows, e]
        mon = dq[rows, :e] / lead[:, None]
        if e == 1:
            roots[rows, 0] = -mon[:, 0]
            continue
        comp = np.zeros((rows.size, e, e), dtype=float)
        comp[:, 1:, :-1] = np.eye(e - 1)
        comp[:, :, -1] = -mon
        roots[rows, :e] = np.linalg.eigvals(comp)
    return roots


def _panels(Q, window):
    """Graded panel endpoints for every row: arrays (a, b, row)."""
    lo, hi = float(window.lo), float(window.hi)
    T = Q.shape[0]
    length = hi - lo
    tiny = length * 2.0**-44
    roots = _derivative_roots(Q)
    centers = [np.clip(roots.real, lo, hi)] if roots.shape[1] else []
    dist = [np.abs(roots - np.clip(roots.real, lo, hi))] if roots.shape[1] else []
    if window.soft_ends:
        centers += [np.full((T, 1), lo), np.full((T, 1), hi)]
        dist += [np.full((T, 1), _SOFT_END_FRACTION * length)] * 2
    if not centers:
        a = np.full(T, lo)
        return a, np.full(T, hi), np.arange(T)
    C = np.concatenate(centers, axis=1)  # (T, R)
    Dd = np.concatenate(dist, axis=1)
    valid = np.isfinite(C)
    zone = np.stack([_zone(Q, np.where(valid[:, r], C[:, r], lo)) for r in range(C.shape[1])], 1)
    delta = np.clip(np.maximum(zone, Dd), tiny, length)
    if window.soft_ends:
        delta[:, -2:] = np.minimum(delta[:, -2:], _SOFT_END_FRACTION * length)
    steps = 2.0 ** np.arange(_GRADING_STEPS)
    offs = np.concatenate([[0.0], steps, -steps])  # (S,)
    pts = C[:, :, None] + delta[:, :, None] * offs[None, None, :]  # (T, R, S)
    pts = np.where(valid[:, :, None], pts, np.nan)
    # keep graded points in their own center's Voronoi cell
    dist_own = np.abs(pts - C[:, :, None])
    for r2 in range(C.shape[1]):
        other = np.abs(pts - C[:, r2][:, None, None])
        closer = valid[:, r2][:, None, None] & (other < dist_own - tiny)
        pts = np.where(closer, np.nan, pts)
    pts = np.where((pts > lo) & (pts < hi), pts, np.nan).reshape(T, -1)
    extra = [np.full((T, 1), lo), np.full((T, 1), hi)]
    Cs = np.sort(np.where(valid, C, np.nan), axis=1)
    if C.shape[1] > 1:
        extra.append(0.5 * (Cs[:, 1:] + Cs[:, :-1]))
    allp = np.sort(np.concatenate([pts] + extra, axis=1), axis=1)
    a, b = allp[:, :-1], allp[:, 1:]
    ok = np.isfinite(a) & np.isfinite(b) & (b - a > tiny)
    rows = np.broadcast_to(np.arange(T)[:, None], a.shape)
    return a[ok], b[ok], rows[ok]


def _panel_integrals(Q, a, b, rows, window):
    """Integral of ``w e(Q_row)`` over each panel ``[a, b]``."""
    out = np.empty(a.size, dtype=complex)
    t_c, Dm = _CHEB
    t_g, w_g = quadrature.gauss_legendre(_GL_PANEL_ORDER)
    for s in range(0, a.size, _PANEL_CHUNK):
        sl = slice(s, s + _PANEL_CHUNK)
        aa, bb, qq = a[sl], b[sl], Q[rows[sl]]
        mid, half = 0.5 * (aa + bb), 0.5 * (bb - aa)
        dq = qq[:, 1:] * np.arange(1, qq.shape[1])
        xc = mid[:, None] + half[:, None] * t_c[None, :]
        qp = _horner_rows(dq, xc) if dq.shape[1] else np.zeros_like(xc)
        cycles = np.max(np.abs(qp), axis=1) * (bb - aa)
        levin = cycles > _GL_MAX_CYCLES
        res = np.empty(aa.size, dtype=complex)
        g = ~levin
        if g.any():
            xg = mid[g, None] + half[g, None] * t_g[None, :]
            ph = _horner_rows(qq[g], xg)
            vals = window(xg) * np.exp(2j * np.pi * (ph - np.floor(ph)))
            res[g] = half[g] * (vals @ w_g)
        if levin.any():
            xl = xc[levin]
            A = Dm[None, :, :] / half[levin, None, None] + np.eye(Dm.shape[0])[None] * (
                2j * np.pi * qp[levin][:, :, None]
            )
            p = np.linalg.solve(A, window(xl)[:, :, None].astype(complex))[:, :, 0]
            ph = _horner_rows(qq[levin], xl[:, [0, -1]])
            ph = ph - np.floor(ph)
            # xl[:, 0] is the right end (t = 1), xl[:, -1] the left end
            res[levin] = p[:, 0] * np.exp(2j * np.pi * ph[:, 0]) - p[:, -1] * np.exp(
                2j * np.pi * ph[:, 1]
            )
        out[sl] = res
    return out


def _accumulate(vals, rows, T):
    re = np.bincount(rows, weights=vals.real, minlength=T)
    im = np.bincount(rows, weights=vals.imag, minlength=T)
    return re + 1j * im


def oscillatory_integrals(Q, window):
    """``int_lo^hi w(y) e(Q_t(y)) dy`` for every row of ``Q``; returns
    (values, est_error, panel_count)."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    T = Q.shape[0]
    a, b, rows = _panels(Q, window)
    coarse = _accumulate(_panel_integrals(Q, a, b, rows, window), rows, T)
    m = 0.5 * (a + b)
    a2 = np.concatenate([a, m])
    b2 = np.concatenate([m, b])
    r2 = np.concatenate([rows, rows])
    order = np.argsort(r2, kind="stable")
    a2, b2, r2 = a2[order], b2[order], r2[order]
    fine = _accumulate(_panel_integrals(Q, a2, b2, r2, window), r2, T)
    return fine, np.abs(fine - coarse), a.size * 3


def canonical_phases(Q):
    """Fold ``Q`` and ``-Q`` together: returns (unique rows, inverse, sign)."""
    Q = np.asarray(Q, dtype=float)
    first = np.argmax(Q[:, 1:] != 0, axis=1) + 1
    lead = Q[np.arange(Q.shape[0]), first]
    sign = np.where(lead < 0, -1.0, 1.0)
    canon = Q * sign[:, None]
    canon[:, 0] = 0.0
    uniq, inv = np.unique(canon, axis=0, return_inverse=True)
    return uniq, inv.ravel(), sign


def weyl_batch(Q, N, window=None):
    """Weyl averages ``(1/N) int w e(Q_t)`` for many phases at once.

    Uses the conjugation symmetry ``W(-Q) = conj W(Q)`` (valid for real
    weights) to evaluate each phase pair once.  Returns (values, est_error,
    panel_count).
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if window is None:
        window = Window(0.0, float(N))
    uniq, inv, sign = canonical_phases(Q)
    vals, est, count = oscillatory_integrals(uniq, window)
    vals = vals[inv]
    vals = np.where(sign < 0, np.conj(vals), vals)
    return vals / N, est[inv] / N, count


# -- scalar Weyl averages ----------------------------------------------------


@dataclass(frozen=True)
class WeylResult:
    value: complex
    N: float
    xi: int
    node_count: int
    est_error: float


def _composite_weyl(P, xi, N, window, cap):
    rate = abs(xi) * max_abs_derivative(P, N)
    lo, hi = window.lo, window.hi
    panels = quadrature.panel_count(lo, hi, rate, min_panels=16 if window.soft_ends else 4)
    fn = lambda y: np.exp(2j * np.pi * np.mod(xi * poly_eval(P, y), 1.0))
    wfn = None if window.func is None else window.func
    val, est, nodes = quadrature.integrate_doubling(fn, lo, hi, panels, weight=wfn, cap=cap)
    return complex(val) / N, est / N, nodes


def weyl_average(P, xi, N, method="panel", window=None, cap=None):
    """``(1/N) int_0^N e(xi P(y)) dy`` (optionally weighted by ``window``).

    ``method`` is ``"panel"`` (graded Levin/Gauss-Legendre panels) or
    ``"composite"`` (equal panels at 8 nodes per period, capped).
    """
    P = np.asarray(P, dtype=float)
    if P.size and P[0] != 0:
        raise ParameterError("phase polynomial must have zero constant term")
    N = float(N)
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    if window is None:
        window = Window(0.0, N)
    xi = int(xi)
    if xi == 0 and window.func is None:
        return WeylResult(1.0 + 0j, N, 0, 0, 0.0)
    if method == "composite":
        val, est, nodes = _composite_weyl(P, xi, N, window, cap)
    elif method == "panel":
        vals, ests, nodes = weyl_batch(xi * P[None, :], N, window)
        val, est = complex(vals[0]), float(ests[0])
    else:
        raise ParameterError(f"unknown Weyl method {method!r}")
    return WeylResult(val, N, xi, int(nodes), float(est))


def vdc_check(P, xis, Ns, window=None):
    """Table of ``|W(xi P, N)| (N |xi|)^(1/d)`` over ``xis x Ns``.

    Returns (table with shape (len(xis), len(Ns)), max of table, est_error
    table).  ``window`` is a factory ``N -> Window`` for weighted variants.
    """
    P = np.asarray(P, dtype=float)
    d = poly_degree(P)
    xis = np.asarray(list(xis), dtype=float)
    Ns = [float(N) for N in Ns]
    if xis.size == 0 or not Ns:
        raise ParameterError("vdc_check needs nonempty ranges")
    table = np.zeros((xis.size, len(Ns)))
    ests = np.zeros_like(table)
    Q = xis[:, None] * P[None, :]
    for col, N in enumerate(Ns):
        win = None if window is None else window(N)
        vals, est, _ = weyl_batch(Q, N, win)
        factor = (N * np.abs(xis)) ** (1.0 / d)
        table[:, col] = np.abs(vals) * factor
        ests[:, col] = est * factor
    return table, float(table.max()), ests


# -- frequency control -------------------------------------------------------


@dataclass(frozen=True)
class FrequencyControl:
    rows: tuple
    A_inv_inf: float
    bound_const: float


def frequency_control(family):
    """Pick the k rows of the coefficient matrix with the largest |det|.

    Returns the rows (1-based powers of y), the max-abs entry of the inverse
    of that k x k block, and ``k**2`` times it, so that
    ``|sum xi_i| <= bound_const * max_j |sum_i a_ji xi_i|``.
    """
    A = family.coeff_matrix
    d, k = A.shape
    if d > 8 or k > 8:
        raise ParameterError("frequency_control supports d, k <= 8")
    best, best_rows = 0.0, None
    for rows in itertools.combinations(range(d), k):
        det = abs(np.linalg.det(A[list(rows), :]))
        if det > best * (1 + 1e-12):
            best, best_rows = det, rows
    if best_rows is None or best <= 1e-12 * max(1.0, np.abs(A).max()) ** k:
        raise DegenerateFamily("coefficient matrix has rank < k")
    inv = np.linalg.inv(A[list(best_rows), :])
    a_inv = float(np.abs(inv).max())
    return FrequencyControl(tuple(r + 1 for r in best_rows), a_inv, k * k * a_inv)


def check_frequency_control(family, box=20):
    """Exhaustively test the frequency-control inequality on an integer box.

    Returns the worst ratio ``|sum xi| / (bound_const * max_j |A xi|_j)``
    over nonzero vectors (<= 1 means the inequality holds).
    """
    fc = frequency_control(family)
    A = family.coeff_matrix
    k = family.k
    if (2 * box + 1) ** k > 5_000_000:
        raise BudgetError((2 * box + 1) ** k, 5_000_000, "lattice points")
    grid = np.stack(np.meshgrid(*[np.arange(-box, box + 1)] * k, indexing="ij"), -1).reshape(-1, k)
    grid = grid[np.any(grid != 0, axis=1)]
    lhs = np.abs(grid.sum(axis=1))
    rhs = fc.bound_const * np.abs(grid @ A.T).max(axis=1)
    return float(np.max(lhs / rhs))
