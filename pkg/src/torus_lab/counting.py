"""The polynomial counting form, its smooth-cutoff variant and related checks.

For a family ``P = (P_1..P_k)`` and functions ``f_0..f_k`` on the torus,

    Lambda_N(f_0..f_k) = (1/N) int_0^N int_T f_0(x) prod_i f_i(x + P_i(y)) dx dy.

With a cutoff ``chi`` supported in [a, b] the y-measure ``dy/N`` on [0, N]
is replaced by ``chi(y/N) dy/N``; the main term then picks up the factor
``int_0^1 chi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import multilinear
from .errors import DegenerateFit, ParameterError
from .gowers import dual_function
from .oscillatory import Window, weyl_batch
from .torus_fn import mean


@dataclass(frozen=True, eq=False)
class SmoothCutoff:
    """Bump ``exp(-1/((u-a)(b-u)))`` on (a, b), scaled to peak value 1."""

    a: float = 0.1
    b: float = 1.0
    mass: float = field(init=False)
    samples: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.a < self.b <= 1.0:
            raise ParameterError(f"cutoff support must satisfy 0 <= a < b <= 1, got ({self.a}, {self.b})")
        mass, _ = integrate.quad(self, self.a, self.b, epsabs=1e-15, epsrel=1e-13, limit=200)
        object.__setattr__(self, "mass", float(mass))
        object.__setattr__(self, "samples", self(np.linspace(0.0, 1.0, 257)))

    @property
    def peak(self):
        return np.exp(-4.0 / (self.b - self.a) ** 2)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        inside = (u > self.a) & (u < self.b)
        v = u[inside]
        out[inside] = np.exp(-1.0 / ((v - self.a) * (self.b - v))) / self.peak
        return out if out.ndim else float(out)

    def window(self, N):
        """Integration window in y for ``chi(y/N)``."""
        return Window(self.a * N, self.b * N, lambda y: self(y / N), soft_ends=True)


@dataclass(frozen=True)
class CountingResult:
    value: complex
    main_term: complex
    error: complex
    N: float
    node_count: int
    est_error: float
    method: str = "grid"


def _shifts(family):
    return [np.asarray(p, dtype=float) for p in family.polys]


def _check_slots(family, fs):
    if len(fs) != family.k + 1:
        raise ParameterError(f"need k+1 = {family.k + 1} functions, got {len(fs)}")
    multilinear.check_bands(fs)


def main_term(fs, cutoff=None):
    prod = complex(np.prod([mean(f) for f in fs]))
    return prod * (cutoff.mass if cutoff is not None else 1.0)


def counting_form(family, N, fs, cutoff=None, method="grid", density=1.0, workers=None, cap=None):
    """Evaluate the counting form; see the module docstring.

    ``method`` chooses the evaluation path ("grid", "spectral" or "auto");
    ``density`` scales the number of y-nodes per oscillation period on the
    grid path.
    """
    _check_slots(family, fs)
    N = float(N)
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    res = multilinear.product_mean(
        _shifts(family), list(fs[1:]), N, fs[0], cutoff, method, density, workers, cap
    )
    mt = main_term(fs, cutoff)
    return CountingResult(res.value, mt, res.value - mt, N, res.node_count, res.est_error, res.method)


def two_term_oracle(P1, f0, f1, N):
    """k = 1 counting form via Parseval: sum_xi f0^(xi) f1^(-xi) W(-xi P1, N)."""
    P1 = np.asarray(P1, dtype=float)
    b = max(f0.band(), f1.band())
    xi = np.arange(-b, b + 1)
    c = f0.coeffs[xi % f0.n] * f1.coeffs[(-xi) % f1.n]
    keep = c != 0
    if not keep.any():
        return 0j
    Q = -xi[keep, None].astype(float) * P1[None, :]
    vals, _, _ = weyl_batch(Q, float(N))
    return complex(np.sum(c[keep] * vals))


def dual_pairing_check(family, N, fs, i, cutoff=None, method="grid"):
    """(Lambda, int f_i F^i, combined error estimate)."""
    lhs = counting_form(family, N, fs, cutoff, method)
    F, est = dual_function(family, N, i, fs, cutoff, method)
    rhs = mean(fs[i] * F)
    bound = lhs.est_error + float(np.abs(fs[i].samples).max()) * est
    return lhs.value, rhs, bound


def dualization_check(family, N, fs, i, method="grid"):
    """(|Lambda|^2, Re Lambda with slot i replaced by conj(F^i), error estimate)."""
    lam = counting_form(family, N, fs, method=method)
    F, est_F = dual_function(family, N, i, fs, method=method)
    swapped = list(fs)
    swapped[i] = F.conj()
    rhs = counting_form(family, N, swapped, method=method)
    est = 2 * abs(lam.value) * lam.est_error + rhs.est_error + est_F
    return abs(lam.value) ** 2, float(rhs.value.real), est


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r2: float
    N_list: tuple
    errors: tuple
    est_errors: tuple = ()

    def predict(self, N):
        return 10 ** (self.intercept + self.slope * np.log10(N))


def fit_loglog(N_list, errors, est_errors=(), floor=1e-13):
    """Least-squares fit of log10|error| against log10 N."""
    N_arr = np.asarray(N_list, dtype=float)
    err = np.abs(np.asarray(errors))
    if N_arr.size < 4:
        raise ParameterError("a decay fit needs at least 4 values of N")
    if np.any(np.diff(N_arr) <= 0):
        raise ParameterError("N values must be strictly increasing")
    if np.all(err <= floor):
        raise DegenerateFit("errors vanish identically; nothing to fit")
    x = np.log10(N_arr)
    y = np.log10(np.maximum(err, floor))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(slope), float(intercept), float(r2), tuple(N_arr), tuple(err), tuple(est_errors))


def decay_fit(family, fs, N_list, cutoff=None, method="auto", density=1.0, workers=None, cap=None):
    """Fit the decay of ``|Lambda_N - main term|`` over ``N_list``.

    A budget error at any N propagates with the already computed results
    attached as ``partial``.
    """
    results = []
    for N in N_list:
        try:
            results.append(counting_form(family, N, fs, cutoff, method, density, workers, cap))
        except Exception as exc:
            if hasattr(exc, "partial"):
                exc.partial = results
            raise
    fit = fit_loglog(
        [r.N for r in results], [r.error for r in results], [r.est_error for r in results]
    )
    return fit, results
