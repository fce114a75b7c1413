"""Band-limited functions on the torus R/Z.

A :class:`TorusFunction` stores ``n`` uniform samples ``f(j/n)`` together with
the discrete Fourier coefficients

    f^(xi) = (1/n) * sum_j f(j/n) e(-xi j / n),      e(x) = exp(2 pi i x),

for ``xi`` in ``(-n/2, n/2]``.  The function it stands for is the unique
trigonometric polynomial with those coefficients, so translation by a real
amount is exact: it is a phase multiplication in frequency space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BandLimitError, ParameterError, ShapeError

BOUNDED_TOL = 1e-9
_NYQUIST_TOL = 1e-12


def e(x):
    """The additive character ``exp(2 pi i x)``."""
    return np.exp(2j * np.pi * np.asarray(x, dtype=float))


def signed_freqs(n):
    """Integer frequencies in FFT storage order, with index n/2 mapped to +n/2."""
    k = np.arange(n)
    return np.where(k <= n // 2, k, k - n)


def _check_grid(n):
    n = int(n)
    if n < 2 or n & (n - 1):
        raise ParameterError(f"grid size must be a power of two >= 2, got {n}")
    return n


@dataclass(frozen=True, eq=False)
class TorusFunction:
    """Samples and Fourier coefficients of a band-limited function.

    Both arrays are stored read-only; build instances with
    :func:`from_fourier`, :func:`from_samples` or :func:`random_trig`.
    """

    samples: np.ndarray
    coeffs: np.ndarray
    one_bounded: bool = field(default=False)

    def __post_init__(self):
        self.samples.setflags(write=False)
        self.coeffs.setflags(write=False)

    @property
    def n(self):
        return self.samples.shape[0]

    @property
    def freqs(self):
        return signed_freqs(self.n)

    def coeff(self, xi):
        """Fourier coefficient at integer frequency ``xi`` (|xi| <= n/2)."""
        xi = int(xi)
        if abs(xi) > self.n // 2:
            raise BandLimitError(f"frequency {xi} outside band of grid n={self.n}")
        return complex(self.coeffs[xi % self.n])

    def band(self, rel_tol=1e-13):
        """Largest |xi| whose coefficient is not negligible (0 for constants)."""
        mag = np.abs(self.coeffs)
        scale = mag.max()
        if scale == 0.0:
            return 0
        active = np.abs(self.freqs[mag > rel_tol * scale])
        return int(active.max())

    def coeff_map(self, rel_tol=0.0):
        """Dictionary ``{xi: f^(xi)}`` of the nonzero coefficients."""
        mag = np.abs(self.coeffs)
        keep = mag > rel_tol * mag.max() if mag.max() > 0 else mag > 0
        return {int(k): complex(c) for k, c in zip(self.freqs[keep], self.coeffs[keep])}

    def __call__(self, x):
        """Evaluate the trigonometric polynomial at arbitrary real points."""
        x = np.asarray(x, dtype=float)
        active = np.flatnonzero(self.coeffs)
        xi = self.freqs[active]
        phases = e(np.multiply.outer(x, xi))
        return phases @ self.coeffs[active]

    # arithmetic happens on samples; callers keep bands small enough that
    # products do not alias (see the multilinear pipelines)
    def _binary(self, other, op):
        if isinstance(other, TorusFunction):
            if other.n != self.n:
                raise ShapeError(f"grid mismatch: {self.n} vs {other.n}")
            return from_samples(op(self.samples, other.samples))
        return from_samples(op(self.samples, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return from_samples(-self.samples)

    def conj(self):
        return from_samples(np.conj(self.samples), one_bounded=self.one_bounded)

    def resample(self, n):
        """The same trigonometric polynomial on a grid of size ``n``."""
        n = _check_grid(n)
        if n == self.n:
            return self
        b = self.band()
        if 2 * b >= n:
            raise BandLimitError(f"band {b} does not fit on grid n={n}")
        out = np.zeros(n, dtype=complex)
        xi = np.arange(-b, b + 1)
        out[xi % n] = self.coeffs[xi % self.n]
        return _from_coeff_array(out, one_bounded=False)


def _from_coeff_array(coeffs, one_bounded=False):
    coeffs = np.asarray(coeffs, dtype=complex).copy()
    samples = np.fft.ifft(coeffs) * coeffs.shape[0]
    return TorusFunction(samples, coeffs, _bounded(samples) if one_bounded else False)


def _bounded(samples):
    return bool(np.max(np.abs(samples), initial=0.0) <= 1.0 + BOUNDED_TOL)


def from_fourier(coeffs, n=4096):
    """Build a function from a ``{frequency: coefficient}`` map.

    >>> f = from_fourier({1: 0.5, -1: 0.5}, 64)
    >>> round(f.samples[0].real, 12)
    1.0
    """
    n = _check_grid(n)
    arr = np.zeros(n, dtype=complex)
    for xi, c in dict(coeffs).items():
        xi = int(xi)
        if abs(xi) > n // 2:
            raise BandLimitError(f"frequency {xi} outside band (-{n // 2}, {n // 2}]")
        if abs(xi) == n // 2 and c != 0:
            raise BandLimitError("the Nyquist coefficient xi = n/2 must vanish")
        arr[xi % n] += c
    return _from_coeff_array(arr, one_bounded=True)


def from_samples(samples, one_bounded=None):
    """Build a function from grid samples (interpreted as their interpolant)."""
    samples = np.asarray(samples, dtype=complex).copy()
    _check_grid(samples.shape[0])
    coeffs = np.fft.fft(samples) / samples.shape[0]
    flag = _bounded(samples) if one_bounded is None else bool(one_bounded)
    return TorusFunction(samples, coeffs, flag)


def constant(c, n=4096):
    return from_fourier({0: c}, n)


def fourier_coeff(f, xi):
    """``f^(xi)``; raises :class:`BandLimitError` when |xi| > n/2."""
    return f.coeff(xi)


def mean(f):
    """Integral of ``f`` over the torus, i.e. ``f^(0)``."""
    return complex(f.coeffs[0])


def translate(f, t):
    """``x -> f(x + t)``, exact for band-limited ``f``."""
    n = f.n
    if abs(f.coeffs[n // 2]) > _NYQUIST_TOL * max(1.0, np.abs(f.coeffs).max()):
        raise BandLimitError("cannot translate a function with a Nyquist component")
    t = float(t) % 1.0
    coeffs = f.coeffs * e(f.freqs * t)
    coeffs[n // 2] = 0.0
    samples = np.fft.ifft(coeffs) * n
    return TorusFunction(samples, coeffs, f.one_bounded)


def random_trig(rng, n, band, one_bounded=True, real=False):
    """Random trigonometric polynomial of degree ``band`` on a grid of size ``n``.

    Coefficients are standard complex Gaussians.  With ``one_bounded`` the
    result is rescaled so that its largest grid sample has modulus one.
    """
    n = _check_grid(n)
    if not 0 <= band < n // 2:
        raise BandLimitError(f"band {band} must lie in [0, {n // 2})")
    xi = np.arange(-band, band + 1)
    c = rng.standard_normal(xi.size) + 1j * rng.standard_normal(xi.size)
    arr = np.zeros(n, dtype=complex)
    arr[xi % n] = c
    if real:
        arr = 0.5 * (arr + np.conj(np.roll(arr[::-1], 1)))
    f = _from_coeff_array(arr)
    if one_bounded:
        peak = np.abs(f.samples).max()
        if peak > 0:
            f = _from_coeff_array(arr / peak)
        f = TorusFunction(f.samples.copy(), f.coeffs.copy(), True)
    return f


@dataclass(frozen=True)
class NormKind:
    """Which norm :func:`norm` computes: ``lp``, ``linf``, ``sobolev_neg`` or ``u2_fourier``."""

    tag: str
    param: float | None = None

    def __post_init__(self):
        if self.tag not in ("lp", "linf", "sobolev_neg", "u2_fourier"):
            raise ParameterError(f"unknown norm tag {self.tag!r}")
        if self.tag == "lp" and not (self.param is not None and self.param >= 1):
            raise ParameterError(f"L^p needs p >= 1, got {self.param}")
        if self.tag == "sobolev_neg" and not (self.param is not None and self.param > 0):
            raise ParameterError(f"H^-sigma needs sigma > 0, got {self.param}")

    @classmethod
    def Lp(cls, p):
        if p == np.inf:
            return cls("linf")
        return cls("lp", float(p))

    @classmethod
    def Linf(cls):
        return cls("linf")

    @classmethod
    def SobolevNeg(cls, sigma):
        return cls("sobolev_neg", float(sigma))

    @classmethod
    def U2Fourier(cls):
        return cls("u2_fourier")


def norm(f, kind):
    """Evaluate ``kind`` on ``f``.

    L^p uses the grid mean of |f|^p; H^-sigma is
    ``sqrt(sum |f^(xi)|^2 (1 + xi^2)^(-sigma/2))``; U2Fourier is the
    l^4 norm of the coefficient sequence.
    """
    if kind.tag == "lp":
        p = kind.param
        return float(np.mean(np.abs(f.samples) ** p) ** (1.0 / p))
    if kind.tag == "linf":
        return float(np.abs(f.samples).max())
    if kind.tag == "sobolev_neg":
        w = (1.0 + f.freqs.astype(float) ** 2) ** (-kind.param / 2.0)
        return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2 * w)))
    return float(np.sum(np.abs(f.coeffs) ** 4) ** 0.25)
