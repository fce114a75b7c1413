"""Digit-restricted Cantor measures and the computations built on them.

A measure here is the self-similar level-L measure with base ``b`` and
digit set ``D``: mass ``|D|^-L`` spread uniformly over each surviving
interval ``[p/b^L, (p+1)/b^L]``.  Its Fourier coefficients have the product
form

    mu^(xi) = prod_{l=1..L} (1/|D|) sum_{d in D} e(-xi d / b^l)
              * (1 - e(-xi/b^L)) / (2 pi i xi / b^L),

which every spectral computation below uses directly, so nothing is
aliased by the grid.  The grid density stores exact cell masses.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import counting, multilinear
from .errors import BandLimitError, ParameterError, ResolutionError, ShapeError
from .kernels import KernelSpec, annulus_mask
from .torus_fn import _from_coeff_array, e, signed_freqs

# -- measures ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FrostmanMeasure:
    base: int
    digits: tuple
    level: int
    n: int
    density: np.ndarray = field(repr=False)
    s: float
    frostman_const: float = float("nan")

    def __post_init__(self):
        self.density.setflags(write=False)

    @property
    def cell_masses(self):
        return self.density / self.n

    def left_endpoints(self):
        """Integer numerators p of the surviving intervals [p, p+1] / b^L, sorted."""
        b, L = self.base, self.level
        lefts = [0]
        for _ in range(L):
            lefts = [b * p + d for p in lefts for d in self.digits]
        return np.array(sorted(lefts), dtype=np.int64)

    def fourier(self, xi):
        """Exact Fourier coefficients ``mu^(xi)`` (vectorised over ``xi``)."""
        xi = np.asarray(xi, dtype=float)
        out = np.ones(xi.shape, dtype=complex)
        digits = np.asarray(self.digits, dtype=float)
        for l in range(1, self.level + 1):
            scale = float(self.base) ** -l
            out *= e(-np.multiply.outer(xi, digits) * scale).mean(axis=-1)
        h = float(self.base) ** -self.level
        u = xi * h
        nz = u != 0
        tail = np.ones(xi.shape, dtype=complex)
        tail[nz] = (1.0 - e(-u[nz])) / (2j * np.pi * u[nz])
        return out * tail

    def cdf(self, u):
        """``mu([0, u])`` for u in [0, 1] (piecewise linear, exact up to rounding)."""
        xp, fp = _cdf_knots(self)
        return np.interp(u, xp, fp)

    def ball(self, x, r):
        """``mu([x - r, x + r])`` on the torus, for 0 < r <= 1/2."""

        def G(u):
            k = np.floor(u)
            return k + self.cdf(u - k)

        x = np.asarray(x, dtype=float)
        return G(x + r) - G(x - r)

    def as_function(self):
        """Exact coefficients on the grid, band n/2 - 1 (the Nyquist term dropped)."""
        xi = signed_freqs(self.n)
        c = self.fourier(xi)
        c[self.n // 2] = 0.0
        return _from_coeff_array(c)


def _cdf_knots(mu):
    key = (mu.base, mu.digits, mu.level)
    if key not in _CDF_CACHE:
        scale = float(mu.base) ** mu.level
        lefts = mu.left_endpoints()
        mass = 1.0 / len(lefts)
        # merge touching intervals so the knot abscissae increase strictly
        starts = np.r_[True, lefts[1:] != lefts[:-1] + 1]
        ends = np.r_[lefts[1:] != lefts[:-1] + 1, True]
        lo = lefts[starts]
        hi = lefts[ends] + 1
        sizes = hi - lo
        before = np.r_[0, np.cumsum(sizes)[:-1]] * mass
        xp = np.empty(2 * lo.size)
        fp = np.empty(2 * lo.size)
        xp[0::2], xp[1::2] = lo / scale, hi / scale
        fp[0::2], fp[1::2] = before, before + sizes * mass
        fp[-1] = 1.0
        _CDF_CACHE[key] = (np.r_[0.0, xp, 1.0], np.r_[0.0, fp, 1.0])
    return _CDF_CACHE[key]


_CDF_CACHE = {}


def _cell_density(b, digits, L, n):
    """Density ``n * mu(cell)`` of the level-L measure on the n cells, exactly.

    In units of 1/(n b^L) the interval [p, p+1]/b^L is [p n, (p+1) n] and
    cell j is [j b^L, (j+1) b^L]; overlaps are integers, and the cell
    density is overlap / |D|^L.
    """
    scale = b**L
    total = len(digits) ** L
    overlap = np.zeros(n, dtype=np.int64)
    lefts = [0]
    for _ in range(L):
        lefts = [b * p + d for p in lefts for d in digits]
    for p in lefts:
        lo, hi = p * n, (p + 1) * n
        j0, j1 = lo // scale, -(-hi // scale)
        for j in range(j0, j1):
            overlap[j] += min(hi, (j + 1) * scale) - max(lo, j * scale)
    dens = np.array([float(Fraction(int(v), total)) for v in overlap])
    return dens


def cantor_measure(b, D, L, n, radii=None):
    """The level-L self-similar measure with base ``b`` and digits ``D`` on grid ``n``.

    >>> mu = cantor_measure(2, {0, 1}, 3, 64)
    >>> mu.s, float(mu.density.min())
    (1.0, 1.0)
    """
    b, L, n = int(b), int(L), int(n)
    digits = tuple(sorted({int(d) for d in D}))
    if b < 2:
        raise ParameterError(f"base must be >= 2, got {b}")
    if not digits or digits[0] < 0 or digits[-1] >= b:
        raise ParameterError(f"digits must be a nonempty subset of 0..{b - 1}")
    if len(digits) < 2:
        raise ParameterError("a single digit gives exponent s = 0; need s in (0, 1]")
    if L < 0:
        raise ParameterError("level must be >= 0")
    if b**L > n:
        raise ResolutionError(f"b^L = {b**L} exceeds the grid size n = {n}")
    s = math.log(len(digits)) / math.log(b)
    mu = FrostmanMeasure(b, digits, L, n, _cell_density(b, digits, L, n), s)
    C = frostman_verify(mu, radii)
    object.__setattr__(mu, "frostman_const", C)
    return mu


def lebesgue(n):
    return cantor_measure(2, (0, 1), 0, n)


def default_level(b, n):
    """Largest L with b^L <= n."""
    L = 0
    while b ** (L + 1) <= n:
        L += 1
    return L


def dyadic_radii(n):
    """Radii 2^-1, 2^-2, ..., down to the first one >= 1/n."""
    out = []
    r = 0.5
    while r >= 1.0 / n:
        out.append(r)
        r /= 2
    return out


def frostman_profile(mu, radii=None, s=None):
    """Per radius, ``max_x mu(B(x, r)) / r^s`` over the grid centres x = j/n."""
    radii = dyadic_radii(mu.n) if radii is None else list(radii)
    s = mu.s if s is None else float(s)
    x = np.arange(mu.n) / mu.n
    out = []
    for r in radii:
        if not 0 < r <= 0.5:
            raise ParameterError(f"radius {r} outside (0, 1/2]")
        out.append(float(np.max(mu.ball(x, r))) / r**s)
    return np.array(out)


def frostman_verify(mu, radii=None, s=None):
    """Smallest C with ``mu(B(x, r)) <= C r^s`` over grid centres and the given radii.

    Dividing the measure by C gives the constant-1 normalisation.
    """
    return float(np.max(frostman_profile(mu, radii, s)))


# -- energies --------------------------------------------------------------------


@functools.lru_cache(maxsize=32)
def _riesz_multipliers(t, K):
    """``k^(xi) = int_T |u|^-t e(-xi u) du`` for xi = 0..K (a 1F2 closed form)."""
    t = mpmath.mpf(t)
    out = np.empty(K + 1)
    pref = 2 * mpmath.mpf(0.5) ** (1 - t) / (1 - t)
    for xi in range(K + 1):
        z = -((mpmath.pi * xi / 2) ** 2)
        out[xi] = float(pref * mpmath.hyp1f2((1 - t) / 2, 0.5, (3 - t) / 2, z))
    out.setflags(write=False)
    return out


def riesz_kernel_coeffs(t, xi):
    xi = np.abs(np.asarray(xi, dtype=int))
    return _riesz_multipliers(float(t), int(xi.max(initial=0)))[xi]


def riesz_energy(mu, t, method="direct"):
    """Riesz energy ``int int |x - y|^-t dmu dmu`` on the torus.

    ``direct``   sum over pairs of grid cells at centre distance (diagonal
                 excluded); FFT autocorrelation, n <= 2048.
    ``fourier``  ``sum_xi k^_t(xi) |mu^(xi)|^2`` with exact kernel
                 coefficients, truncated at |xi| < n/2.
    ``sobolev``  the comparison sum ``sum_{xi != 0} |mu^(xi)|^2 (1 + xi^2)^((t-1)/2)``;
                 comparable to the energy up to constants, not equal to it.
    """
    t = float(t)
    if not 0 < t < mu.s:
        raise ParameterError(f"need 0 < t < s = {mu.s:.6g}, got t = {t}")
    if method == "direct":
        if mu.n > 2048:
            raise ParameterError("direct Riesz energy is limited to n <= 2048")
        m = mu.cell_masses
        d = np.arange(mu.n)
        dist = np.minimum(d, mu.n - d) / mu.n
        k = np.zeros(mu.n)
        k[1:] = dist[1:] ** -t
        conv = np.fft.ifft(np.fft.fft(m) * np.fft.fft(k)).real
        return float(np.dot(m, conv))
    xi = np.arange(-(mu.n // 2) + 1, mu.n // 2)
    power = np.abs(mu.fourier(xi)) ** 2
    if method == "fourier":
        return float(np.sum(riesz_kernel_coeffs(t, xi) * power))
    if method == "sobolev":
        nz = xi != 0
        return float(np.sum(power[nz] * (1.0 + xi[nz] ** 2.0) ** ((t - 1) / 2)))
    raise ParameterError(f"unknown Riesz method {method!r}")


def mollify(mu, M):
    """Fejer mollification ``K_M * mu`` on the measure's grid."""
    M = int(M)
    if 2 * M >= mu.n:
        raise BandLimitError(f"need 2M < n, got M = {M}, n = {mu.n}")
    xi = signed_freqs(mu.n)
    mult = KernelSpec("fejer", M).multiplier(xi)
    c = np.where(mult != 0, mu.fourier(xi), 0.0) * mult
    return _from_coeff_array(c)


# -- Littlewood-Paley growth -----------------------------------------------------


@dataclass(frozen=True)
class LPGrowthTable:
    j: tuple
    sup: tuple
    ratio: tuple
    tau: float

    @property
    def max_ratio(self):
        return max(self.ratio)


def lp_sup_bound_check(mu, j_range, tau, oversample=4):
    """Table of ``||Pi_j mu||_inf / 2^(j(1 - s + tau))``.

    Each piece is built from exact coefficients and its sup is taken on a
    grid ``oversample`` times finer than the measure's.
    """
    js = [int(j) for j in j_range]
    if max(js) >= 0 and 2 ** max(js) > mu.n // 2:
        raise BandLimitError(f"2^j must stay <= n/2 = {mu.n // 2}")
    m = oversample * mu.n
    freqs = signed_freqs(m)
    sups, ratios = [], []
    for j in js:
        mask = annulus_mask(freqs, j)
        c = np.zeros(m, dtype=complex)
        c[mask] = mu.fourier(freqs[mask])
        sup = float(np.abs(np.fft.ifft(c) * m).max())
        sups.append(sup)
        ratios.append(sup / 2.0 ** (j * (1.0 - mu.s + tau)))
    return LPGrowthTable(tuple(js), tuple(sups), tuple(ratios), float(tau))


# -- counting with measures --------------------------------------------------------


def _shifts(family):
    return [np.asarray(p, dtype=float) for p in family.polys]


def frostman_sweep(family, N, mus, M_list, cutoff=None):
    """Counting form of ``K_M * mu_i`` for every M in ``M_list`` (spectral path).

    One Weyl table per N serves the whole sweep.  Returns a list of
    :class:`counting.CountingResult`.
    """
    if len(mus) != family.k + 1:
        raise ParameterError(f"need k+1 = {family.k + 1} measures, got {len(mus)}")
    n = mus[0].n
    if any(m.n != n for m in mus):
        raise ShapeError("all measures must share one grid")
    members = []
    for M in M_list:
        fs = [mollify(m, M) for m in mus]
        multilinear.check_bands(fs)
        members.append((fs[0], fs[1:]))
    res = multilinear.spectral_sweep(_shifts(family), members, N, cutoff)
    mt = counting.main_term([members[0][0], *members[0][1]], cutoff)
    out = []
    for r in res:
        out.append(counting.CountingResult(r.value, mt, r.value - mt, float(N), r.node_count, r.est_error, "spectral"))
    return out


def frostman_counting(family, N, mus, M, cutoff=None):
    """Counting form of the mollified measures ``K_M * mu_i``; main term ``prod mu_i(T) = 1``."""
    return frostman_sweep(family, N, mus, [M], cutoff)[0]


@dataclass(frozen=True)
class NuValue:
    M: int
    value: complex
    est_error: float


def nu_pairing(mu, family, N, chi, g=None, M_list=(64, 128, 256)):
    """``<nu_M, g>`` for each M: the cutoff counting integral with weight g(x, y).

    ``g`` is None (g = 1), a TorusFunction ``g_x`` (constant in y) or a pair
    ``(g_x, l)`` meaning ``g(x, y) = g_x(x) e(l y / N)``.  The y-profile is
    absorbed into an extra slot ``e(x + l y / N)`` paired with ``e(-x)`` in
    the x-slot, so every term is again a counting form.
    """
    M_list = [int(M) for M in M_list]
    if any(b <= a for a, b in zip(M_list, M_list[1:])):
        raise ParameterError("M_list must be increasing")
    gx, l = (g, 0) if not isinstance(g, tuple) else g
    l = int(l)
    shifts = _shifts(family)
    n = mu.n
    if l:
        shifts = shifts + [np.array([0.0, l / float(N)])]
    members = []
    for M in M_list:
        f = mollify(mu, M)
        f0 = f
        if gx is not None:
            if gx.n != n:
                raise ShapeError("g must live on the measure's grid")
            if 2 * (gx.band() + M + (1 if l else 0)) >= n:
                raise BandLimitError("g times the mollified measure would alias")
            f0 = gx * f
        fs = [f] * family.k
        if l:
            f0 = f0 * _from_coeff_array(_unit(n, -1))
            fs = fs + [_from_coeff_array(_unit(n, 1))]
        multilinear.check_bands([f0] + fs)
        members.append((f0, fs))
    res = multilinear.spectral_sweep(shifts, members, N, chi)
    return [NuValue(M, r.value, r.est_error) for M, r in zip(M_list, res)]


def _unit(n, xi):
    c = np.zeros(n, dtype=complex)
    c[xi % n] = 1.0
    return c


# -- exact interval sets and the progression search --------------------------------


def _frac(v):
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class IntervalSet:
    """Sorted closed intervals of [0, 1] with exact rational endpoints.

    Touching or overlapping intervals are merged on construction.
    """

    intervals: tuple

    def __post_init__(self):
        ivs = sorted((_frac(a), _frac(b)) for a, b in self.intervals)
        merged = []
        for a, b in ivs:
            if not 0 <= a <= b <= 1:
                raise ParameterError(f"interval [{a}, {b}] not inside [0, 1]")
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(b, merged[-1][1]))
            else:
                merged.append((a, b))
        object.__setattr__(self, "intervals", tuple(merged))

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    @property
    def measure(self):
        return sum((b - a for a, b in self.intervals), Fraction(0))

    @classmethod
    def full(cls):
        return cls(((Fraction(0), Fraction(1)),))

    @classmethod
    def cantor(cls, b, D, L):
        lefts = [0]
        for _ in range(int(L)):
            lefts = [b * p + d for p in lefts for d in sorted(D)]
        q = b**L
        return cls(tuple((Fraction(p, q), Fraction(p + 1, q)) for p in lefts))

    def to_text(self):
        """One interval per line as ``p/q r/q``."""
        lines = []
        for a, b in self.intervals:
            q = math.lcm(a.denominator, b.denominator)
            lines.append(f"{a.numerator * (q // a.denominator)}/{q} {b.numerator * (q // b.denominator)}/{q}")
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text):
        ivs = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParameterError(f"expected 'p/q r/q', got {raw!r}")
            ivs.append((Fraction(parts[0]), Fraction(parts[1])))
        return cls(tuple(ivs))

    def torus_cover(self):
        """Merged intervals of ``E`` union ``E + 1`` on [0, 2] (handles wrap-around)."""
        both = list(self.intervals) + [(a + 1, b + 1) for a, b in self.intervals]
        merged = []
        for a, b in both:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(b, merged[-1][1]))
            else:
                merged.append((a, b))
        return merged

    def contains_exact(self, lo, hi):
        """Exact test that [lo, hi] mod 1 lies inside E (needs hi - lo < 1)."""
        k = math.floor(lo)
        lo, hi = lo - k, hi - k
        return any(a <= lo and hi <= b for a, b in self.torus_cover())


@dataclass(frozen=True)
class Witness:
    """A certified x-interval at the candidate ``y_mid``.

    ``y`` is the y-grid cell around ``y_mid``, kept for reporting; the
    certificate covers every x in ``x`` at ``y = y_mid`` only.
    """

    x: tuple
    y: tuple
    y_mid: float
    certified: bool


_SLACK = 1e-12


def _down(v):
    v = np.asarray(v, dtype=float)
    return np.nextafter(v - (_SLACK + 4 * np.finfo(float).eps * np.abs(v)), -np.inf)


def _up(v):
    v = np.asarray(v, dtype=float)
    return np.nextafter(v + (_SLACK + 4 * np.finfo(float).eps * np.abs(v)), np.inf)


def _poly_enclosure(coeffs, y):
    """Outward-rounded enclosure of ``P(y)`` for positive float ``y`` (vectorised)."""
    c = np.asarray(coeffs, dtype=float)
    lo = np.full(y.shape, c[-1])
    hi = lo.copy()
    for a in c[-2::-1]:
        lo, hi = _down(lo * y), _up(hi * y)
        lo, hi = _down(lo + a), _up(hi + a)
    return lo, hi


def _inward(a, b):
    fa, fb = float(a), float(b)
    if Fraction(fa) < a:
        fa = float(np.nextafter(fa, np.inf))
    if Fraction(fb) > b:
        fb = float(np.nextafter(fb, -np.inf))
    return fa, fb


def _x_pieces(E, pieces):
    out = []
    for a, b in E:
        for m in range(pieces):
            lo = a + (b - a) * Fraction(m, pieces)
            hi = a + (b - a) * Fraction(m + 1, pieces)
            flo, fhi = _inward(lo, hi)
            if flo <= fhi:
                out.append((flo, fhi))
    return np.array(out, dtype=float).reshape(-1, 2)


def _certify(E_lo, E_hi, lo, hi):
    """Vectorised: does [lo, hi] (after mod-1 reduction) sit inside one cover interval?"""
    k = np.floor(lo)
    lo, hi = _down(lo - k), _up(hi - k)
    idx = np.searchsorted(E_lo, lo, side="right") - 1
    ok = idx >= 0
    safe = np.where(ok, idx, 0)
    return ok & (hi <= E_hi[safe]) & (hi - lo < 1.0)


def progression_search(E, family, y_range, y_step, pieces=8, limit=None):
    """Certified progressions ``{x, x + P_1(y), ..., x + P_k(y)}`` inside E.

    Candidates y run over ``y_min + j * y_step`` up to ``y_max``; every
    interval of E is split into ``pieces`` x-intervals.  A witness is
    recorded when outward-rounded interval arithmetic shows that
    ``x + P_i(y) mod 1`` stays inside E for every x in the x-interval and
    every i.  Returns the witnesses in (y, x) order, at most ``limit``.
    """
    y_min, y_max = float(y_range[0]), float(y_range[1])
    if y_min <= 0:
        raise ParameterError("y_min must be positive")
    if y_step <= 0 or y_max < y_min:
        raise ParameterError("need y_step > 0 and y_max >= y_min")
    X = _x_pieces(E, int(pieces))
    if X.size == 0:
        return []
    cover = [_inward(a, b) for a, b in E.torus_cover()]
    E_lo = np.array([c[0] for c in cover])
    E_hi = np.array([c[1] for c in cover])
    count = int(math.floor((y_max - y_min) / y_step * (1 + 1e-12))) + 1
    out = []
    chunk = max(1, 2**18 // max(1, X.shape[0]))
    for start in range(0, count, chunk):
        ys = y_min + y_step * np.arange(start, min(count, start + chunk), dtype=float)
        ok = np.ones((ys.size, X.shape[0]), dtype=bool)
        for p in family.polys:
            plo, phi = _poly_enclosure(p, ys)
            lo = _down(X[None, :, 0] + plo[:, None])
            hi = _up(X[None, :, 1] + phi[:, None])
            ok &= _certify(E_lo, E_hi, lo, hi)
        for iy, ix in zip(*np.nonzero(ok)):
            y = float(ys[iy])
            out.append(Witness((float(X[ix, 0]), float(X[ix, 1])), (y - y_step / 2, y + y_step / 2), y, True))
            if limit is not None and len(out) >= limit:
                return out
    return out


def reverify(witness, E, family):
    """Exact rational re-check of a witness on the two halves of its x-interval."""
    y = Fraction(witness.y_mid)
    a, b = Fraction(witness.x[0]), Fraction(witness.x[1])
    mid = (a + b) / 2
    for lo, hi in ((a, mid), (mid, b)):
        if not E.contains_exact(lo, hi):
            return False
        for p in family.polys:
            shift = sum((Fraction(float(c)) * y**j for j, c in enumerate(p)), Fraction(0))
            if not E.contains_exact(lo + shift, hi + shift):
                return False
    return True


def scenario_battery():
    """Standard search scenarios: (name, E, expect_nonempty)."""
    return [
        ("full_torus", IntervalSet.full(), True),
        ("cantor_level1", IntervalSet.cantor(3, (0, 2), 1), True),
        ("cantor_level2", IntervalSet.cantor(3, (0, 2), 2), True),
        ("empty_control", IntervalSet(((Fraction(1, 3), Fraction(1, 3) + Fraction(1, 3**8)),)), False),
    ]
