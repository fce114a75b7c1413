"""Dirichlet and Fejer kernels, convolution and Littlewood-Paley pieces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandLimitError, ParameterError, ShapeError
from .torus_fn import _from_coeff_array, signed_freqs


@dataclass(frozen=True)
class KernelSpec:
    kind: str  # "dirichlet" or "fejer"
    M: int

    def __post_init__(self):
        if self.kind not in ("dirichlet", "fejer"):
            raise ParameterError(f"unknown kernel kind {self.kind!r}")
        if int(self.M) != self.M or self.M < 1:
            raise ParameterError(f"kernel order must be a positive integer, got {self.M}")

    def multiplier(self, xi):
        """Fourier multiplier of the kernel at integer frequencies ``xi``."""
        a = np.abs(np.asarray(xi))
        inside = a <= self.M
        if self.kind == "dirichlet":
            return inside.astype(float)
        return np.where(inside, 1.0 - a / (self.M + 1.0), 0.0)


def kernel(spec, n):
    """The kernel on a grid of size ``n``, built from its coefficients."""
    if 2 * spec.M >= n:
        raise BandLimitError(f"kernel order {spec.M} needs 2M < n = {n}")
    return _from_coeff_array(spec.multiplier(signed_freqs(n)).astype(complex))


def dirichlet_closed_form(M, x):
    """sin((2M+1) pi x) / sin(pi x), with value 2M+1 at integers."""
    x = np.asarray(x, dtype=float)
    s = np.sin(np.pi * x)
    near = np.abs(s) < 1e-12
    safe = np.where(near, 1.0, s)
    return np.where(near, 2 * M + 1.0, np.sin((2 * M + 1) * np.pi * x) / safe)


def fejer_closed_form(M, x):
    """(1/(M+1)) (sin((M+1) pi x) / sin(pi x))^2, with value M+1 at integers."""
    x = np.asarray(x, dtype=float)
    s = np.sin(np.pi * x)
    near = np.abs(s) < 1e-12
    safe = np.where(near, 1.0, s)
    return np.where(near, M + 1.0, (np.sin((M + 1) * np.pi * x) / safe) ** 2 / (M + 1))


def convolve(f, g):
    """Convolution on the torus: coefficients multiply."""
    if f.n != g.n:
        raise ShapeError(f"grid mismatch: {f.n} vs {g.n}")
    return _from_coeff_array(f.coeffs * g.coeffs)


def apply_multiplier(f, spec):
    """``K * f`` for the kernel described by ``spec`` without building the kernel."""
    return _from_coeff_array(f.coeffs * spec.multiplier(f.freqs))


def annulus_mask(freqs, j):
    a = np.abs(freqs)
    if j == 0:
        return a == 0
    return (a >= 2 ** (j - 1)) & (a < 2**j)


def lp_project(f, j):
    """Littlewood-Paley piece: the mean for j = 0, else |xi| in [2^(j-1), 2^j).

    ``j`` may go up to log2(n), whose annulus [n/2, n) only meets the
    (vanishing) Nyquist coefficient; this makes the pieces j = 0..log2(n)
    an exact partition of every grid function.
    """
    j = int(j)
    if j < 0:
        raise ParameterError(f"annulus index must be nonnegative, got {j}")
    if j >= 1 and 2 ** (j - 1) > f.n // 2:
        raise BandLimitError(f"annulus {j} lies beyond the band of grid n={f.n}")
    return _from_coeff_array(np.where(annulus_mask(f.freqs, j), f.coeffs, 0.0))


def max_annulus(n):
    return int(np.log2(n))
