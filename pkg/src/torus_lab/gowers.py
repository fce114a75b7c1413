"""Gowers uniformity norms, box norms and dual functions.

Three routes to ``||f||_{U^s}`` are offered:

* ``direct``: the full average over x and the cube parameters h_1..h_s of
  ``prod_w C^{|w|} f(x + w.h)`` with all variables on the grid;
* ``recursive``: ``||f||^{2^s}_{U^s} = avg_h ||Delta_h f||^{2^{s-1}}_{U^{s-1}}``
  with grid h, bottoming out at ``|int f|^2`` for s = 2 and at the Fourier
  formula for s >= 3;
* ``fourier`` (s = 2 only): the l^4 norm of the Fourier coefficients.

On a grid of size n all three compute the norm of the sample vector on
Z/nZ, which coincides with the continuous norm when the band of f is small
enough that no product aliases.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import multilinear, quadrature
from .errors import BandLimitError, BudgetError, ParameterError
from .torus_fn import NormKind, _from_coeff_array, from_samples, norm, signed_freqs, translate

DIRECT_TERM_CAP = 2**26
DIRECT_MAX_N = 256


@dataclass(frozen=True)
class GowersMethod:
    tag: str

    def __post_init__(self):
        if self.tag not in ("direct", "recursive", "fourier"):
            raise ParameterError(f"unknown Gowers method {self.tag!r}")


DIRECT = GowersMethod("direct")
RECURSIVE = GowersMethod("recursive")
FOURIER = GowersMethod("fourier")


def _method(method, s):
    if method is None:
        return FOURIER if s == 2 else RECURSIVE
    if isinstance(method, str):
        return GowersMethod(method)
    return method


def mult_derivative(f, h):
    """``Delta_h f = f * conj(f(. + h))``, formed on the samples."""
    h = float(h)
    j = h * f.n
    if abs(j - round(j)) < 1e-12:
        shifted = np.roll(f.samples, -int(round(j)))
    else:
        shifted = translate(f, h).samples
    return from_samples(f.samples * np.conj(shifted))


def _direct_power(f, s):
    """Grid average of the cube product, i.e. ||f||^{2^s}."""
    n = f.n
    if n > DIRECT_MAX_N or s > 3:
        raise BudgetError(n ** (s + 1), DIRECT_TERM_CAP, "direct Gowers terms")
    terms = n ** (s + 1)
    if terms > DIRECT_TERM_CAP:
        raise BudgetError(terms, DIRECT_TERM_CAP, "direct Gowers terms")
    v = f.samples
    x = np.arange(n)
    corners = list(itertools.product((0, 1), repeat=s))
    total = 0.0 + 0.0j
    # loop over h_1..h_{s-1}; h_s and x are vectorised
    for hs in itertools.product(range(n), repeat=s - 1):
        acc = np.ones((n, n), dtype=complex)  # (h_s, x)
        for w in corners:
            off = sum(wi * hi for wi, hi in zip(w[:-1], hs))
            idx = (x[None, :] + off + w[-1] * x[:, None]) % n
            val = v[idx]
            acc *= np.conj(val) if sum(w) % 2 else val
        total += acc.sum()
    return total / n ** (s + 1)


def _recursive_power(v, s):
    """||v||^{2^s} on Z/nZ for the sample vector ``v`` by the h-recursion."""
    n = v.size
    if s == 1:
        return abs(v.mean()) ** 2
    if s == 2:
        # avg_h |mean_x v(x) conj v(x+h)|^2 with an explicit shift matrix
        idx = (np.arange(n)[None, :] + np.arange(n)[:, None]) % n
        means = (v[None, :] * np.conj(v[idx])).mean(axis=1)
        return float(np.mean(np.abs(means) ** 2))
    if s == 3:
        acc = 0.0
        for h in range(n):
            d = v * np.conj(np.roll(v, -h))
            acc += np.sum(np.abs(np.fft.fft(d) / n) ** 4)
        return acc / n
    acc = 0.0
    for h in range(n):
        acc += _recursive_power(v * np.conj(np.roll(v, -h)), s - 1)
    return acc / n


def gowers_power(f, s, method=None):
    """``||f||_{U^s}^{2^s}`` (useful when the root would lose precision)."""
    s = int(s)
    if s < 1:
        raise ParameterError(f"s must be >= 1, got {s}")
    method = _method(method, s)
    if method.tag == "fourier":
        if s != 2:
            raise ParameterError("the Fourier formula only covers s = 2")
        return float(np.sum(np.abs(f.coeffs) ** 4))
    if method.tag == "direct":
        return max(float(_direct_power(f, s).real), 0.0)
    if s >= 4 and f.n ** (s - 1) > DIRECT_TERM_CAP:
        raise BudgetError(f.n ** (s - 1), DIRECT_TERM_CAP, "recursive Gowers terms")
    return max(float(_recursive_power(f.samples, s)), 0.0)


def gowers_norm(f, s, method=None):
    """``||f||_{U^s}``; ``method`` defaults to Fourier for s = 2, else recursive."""
    return gowers_power(f, s, method) ** (1.0 / 2 ** int(s))


# -- box norms ---------------------------------------------------------------


@dataclass(frozen=True)
class BoxWeights:
    """Weights ``kappa_H(h) = (1/H)(1 - |h|/H)_+`` per coordinate.

    ``kappa_H`` is the normalised autocorrelation of the indicator of an
    interval of length H; its Fourier transform is ``sinc(xi H)^2``.
    """

    H: tuple

    def __post_init__(self):
        object.__setattr__(self, "H", tuple(float(h) for h in self.H))
        if any(h <= 0 for h in self.H):
            raise ParameterError("box widths must be positive")

    @property
    def s(self):
        return len(self.H)

    def multiplier(self, i, xi):
        return np.sinc(np.asarray(xi, dtype=float) * self.H[i]) ** 2

    def nodes(self, i, per_unit=64):
        """Gauss-Legendre nodes for kappa on [-H, 0] and [0, H]; weights sum to 1.

        The triangle is linear on each half, so splitting at its kink keeps
        the rule spectrally accurate for smooth integrands.
        """
        H = self.H[i]
        m = max(16, int(np.ceil(H * per_unit)))
        t, w = np.polynomial.legendre.leggauss(m)
        h = 0.5 * H * (t + 1.0)  # [0, H]
        wt = 0.5 * H * w * (1.0 - h / H) / H
        return np.concatenate([-h[::-1], h]), np.concatenate([wt[::-1], wt])


def _cube_table(f):
    """``A[j1, j2] = mean_x f(x) conj f(x+j1/n) conj f(x+j2/n) f(x+(j1+j2)/n)``."""
    n = f.n
    v = f.samples
    x = np.arange(n)
    A = np.empty((n, n), dtype=complex)
    for j1 in range(n):
        d = v * np.conj(np.roll(v, -j1))
        idx = (x[None, :] + x[:, None]) % n
        A[j1] = (d[None, :] * np.conj(d[idx])).mean(axis=1)
    return A


def box_norm(f, weights, s=2):
    """Box norm with weights ``kappa_{H_1} x kappa_{H_2}`` on the h-parameters.

    The h-integrand is a trigonometric polynomial in (h_1, h_2); we sample it
    on the grid, take its 2-D Fourier coefficients and pair them with the
    multipliers ``sinc^2``, which is exact for f with band below n/4.
    """
    if s != 2 or weights.s != 2:
        raise BudgetError(2 ** s, 4, "box norm order (only s = 2 supported)")
    if f.n > DIRECT_MAX_N:
        raise BudgetError(f.n**3, DIRECT_MAX_N**3, "box norm terms")
    if 4 * f.band() >= f.n:
        raise BandLimitError("box norm needs band < n/4 so the h-integrand does not alias")
    A = _cube_table(f)
    Ahat = np.fft.fft2(A) / f.n**2
    xi = signed_freqs(f.n)
    m1 = weights.multiplier(0, xi)
    m2 = weights.multiplier(1, xi)
    # sum over (xi1, xi2) of Ahat(xi1, xi2) m1(-xi1) m2(-xi2); multipliers are even
    val = float(np.real(np.einsum("ij,i,j->", Ahat, m1, m2)))
    return max(val, 0.0) ** 0.25


def box_norm_quadrature(f, weights, per_unit=64):
    """Reference box norm by Gauss-Legendre quadrature over real (h_1, h_2)."""
    h1, w1 = weights.nodes(0, per_unit)
    h2, w2 = weights.nodes(1, per_unit)
    T1 = np.stack([translate(f, t).samples for t in h1])
    T2 = np.stack([translate(f, t).samples for t in h2])
    v = f.samples
    total = 0.0
    for a, (t1, wa) in enumerate(zip(h1, w1)):
        T12 = np.stack([translate(f, t1 + t).samples for t in h2])
        vals = (v[None, :] * np.conj(T1[a])[None, :] * np.conj(T2) * T12).mean(axis=1)
        total += wa * np.dot(w2, vals.real)
    return max(total, 0.0) ** 0.25


def box_bound_factor(weights, M):
    """The factor (2M)^s / prod H_i relating box and Gowers norms (H_i < M)."""
    if any(h >= M for h in weights.H):
        raise ParameterError("the comparison needs every H_i < M")
    return (2.0 * M) ** weights.s / float(np.prod(weights.H))


# -- dual functions -----------------------------------------------------------


def dual_shifts(family, i):
    """Shift polynomials ``P_j - P_i`` (j != i, with P_0 = 0) for the i-th dual."""
    polys = [np.zeros(1)] + [np.asarray(p, dtype=float) for p in family.polys]
    D = max(p.size for p in polys)
    pad = [np.pad(p, (0, D - p.size)) for p in polys]
    return [pad[j] - pad[i] for j in range(len(pad)) if j != i]


def dual_function(family, N, i, fs, cutoff=None, method="grid", density=1.0, workers=None, cap=None):
    """The i-th dual function ``F^i(x) = (1/N) int prod_{j != i} f_j(x + P_j(y) - P_i(y)) dy``.

    With a cutoff the y-measure is ``chi(y/N) dy / N``.  Returns
    (TorusFunction on the grid of ``fs``, est_error), so that the counting
    form equals ``int f_i F^i``.
    """
    if not 0 <= i <= family.k:
        raise ParameterError(f"slot index {i} outside 0..{family.k}")
    if len(fs) != family.k + 1:
        raise ParameterError(f"need k+1 = {family.k + 1} functions, got {len(fs)}")
    multilinear.check_bands(fs)
    others = [f for j, f in enumerate(fs) if j != i]
    F, info = multilinear.shift_average(
        dual_shifts(family, i), others, N, fs[0].n, cutoff, method, density, workers, cap
    )
    return F, info.est_error


# -- Gowers-Cauchy-Schwarz ---------------------------------------------------


def gcs_check(fw, s=2):
    """Cube inner product of four functions versus the product of their U^2 norms.

    ``fw`` lists the functions at corners (0,0), (1,0), (0,1), (1,1).
    Returns (lhs, rhs) with lhs computed by a direct triple sum.
    """
    if s != 2 or len(fw) != 4:
        raise ParameterError("gcs_check handles s = 2 with four functions")
    n = fw[0].n
    if n > 128:
        raise BudgetError(n**3, 128**3, "Gowers-Cauchy-Schwarz terms")
    f00, f10, f01, f11 = (g.samples for g in fw)
    x = np.arange(n)
    idx = (x[None, :] + x[:, None]) % n  # (h2, x) -> x + h2
    total = 0j
    for h1 in range(n):
        a = f00 * np.conj(np.roll(f10, -h1))  # x -> f00(x) conj f10(x + h1)
        b = np.conj(f01[idx]) * np.roll(f11, -h1)[idx]
        total += (a[None, :] * b).sum()
    lhs = abs(total) / n**3
    rhs = float(np.prod([gowers_norm(g, 2, FOURIER) for g in fw]))
    return lhs, rhs


# -- dual-difference interchange and the Sobolev-difference estimate ---------


def dual_difference_sides(shifts, fs, N, n_grid=None):
    """Both sides of the interchange inequality at s = 3.

    ``F_y(x) = prod_j f_j(x + S_j(y))`` and ``F = (1/N) int_0^N F_y dy``.
    Returns (``||F||^16_{U^3}``, ``avg_h ||(1/N) int Delta_h F_y dy||^4_{U^2}``).
    The working grid is large enough that every grid average is exact.
    """
    band = sum(f.band() for f in fs)
    n_w = n_grid or multilinear.working_grid(8 * band)
    F, _ = multilinear.shift_average(shifts, fs, N, n_w, method="grid")
    lhs = gowers_power(F, 3, RECURSIVE) ** 2
    slots = [multilinear._slot(f, n_w) for f in fs]
    rate = multilinear._rate(shifts, fs, N)
    panels = quadrature.panel_count(0.0, N, rate)
    x = np.arange(n_w)
    idx = (x[None, :] + x[:, None]) % n_w  # (h, x)

    def fn(y):
        Fy = np.ones((y.size, n_w), dtype=complex)
        for S, sl in zip(shifts, slots):
            Fy = Fy * multilinear._shifted_samples(y, S, sl, n_w)
        return (Fy[:, None, :] * np.conj(Fy[:, idx])).reshape(y.size, -1)

    G = quadrature.integrate_panels(fn, 0.0, N, 2 * panels, width=n_w * n_w) / N
    G = G.reshape(n_w, n_w)  # row h: x -> (1/N) int Delta_h F_y(x) dy
    coeffs = np.fft.fft(G, axis=1) / n_w
    rhs = float(np.mean(np.sum(np.abs(coeffs) ** 4, axis=1)))
    return lhs, rhs


def sobolev_difference_sides(f, s, sigma):
    """Both sides of the Sobolev-difference estimate.

    Returns (``int ||Delta_{h_1..h_s} f||^2_{H^-sigma} dh``, ``||f||_{U^{s+1}}``,
    effective exponent ``c`` with lhs = rhs^c).  The h-integral runs over the
    grid.
    """
    if s < 1 or s > 2:
        raise ParameterError("sobolev_difference_sides supports s = 1, 2")
    n = f.n
    kind = NormKind.SobolevNeg(sigma)
    v = f.samples
    total = 0.0
    for hs in itertools.product(range(n), repeat=s):
        d = v
        for h in hs:
            d = d * np.conj(np.roll(d, -h))
        total += norm(_from_coeff_array(np.fft.fft(d) / n), kind) ** 2
    lhs = total / n**s
    rhs = gowers_norm(f, s + 1)
    c = np.log(lhs) / np.log(rhs) if 0 < rhs < 1 and lhs > 0 else float("nan")
    return lhs, rhs, float(c)
