"""Dyadic trapezoidal kernels, circle L^p quadrature, Besov-type profiles,
and hard-block coefficient bounds.

Space membership is never reported as a boolean: sequences here are finite
truncations, so callers get a profile plus fitted trends and decide from
those.  Profiles whose top block cannot cover the polynomial's degree are
flagged as truncated and the associated norms are lower bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CoeffSeq
from .errors import InvalidExponent, InvalidParameter, TooShort

DEFAULT_OVERSAMPLE = 8


def dyadic_kernel(n: int) -> CoeffSeq:
    """Coefficients of the n-th trapezoidal dyadic kernel.

    For n >= 1 the multiplier peaks at 1 on 2^n, vanishes outside the open
    interval (2^(n-1), 2^(n+1)), and ramps linearly on [2^(n-1), 2^n] and
    [2^n, 2^(n+1)].  The n = 0 kernel is 1 + z.  Adjacent kernels overlap but
    their coefficients sum to 1 at every index, exactly in float arithmetic
    because all ramp values are dyadic rationals.
    """
    if n < 0:
        raise InvalidParameter("kernel index must be nonnegative")
    if n == 0:
        return CoeffSeq(np.array([1.0, 1.0]))
    lo, mid, hi = 1 << (n - 1), 1 << n, 1 << (n + 1)
    c = np.zeros(hi)
    c[lo + 1 : mid + 1] = (np.arange(lo + 1, mid + 1) - lo) / (mid - lo)
    c[mid:hi] = (hi - np.arange(mid, hi)) / (hi - mid)
    return CoeffSeq(c)


def _validate_exponent(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise InvalidExponent("exponent must lie in [1, inf]")
    return p


def grid_size(length: int, oversample: int) -> int:
    """Smallest power of two that is >= oversample * length."""
    if oversample < 2:
        raise InvalidParameter("oversample must be at least 2")
    return 1 << max(1, (oversample * length - 1).bit_length())


def grid_values(f: CoeffSeq, oversample: int = DEFAULT_OVERSAMPLE) -> np.ndarray:
    """Values of f on the uniform circle grid, via one inverse FFT."""
    G = grid_size(len(f), oversample)
    return np.fft.ifft(f.coeffs, n=G) * G


def lp_norm_detail(
    f: CoeffSeq, p: float, oversample: int = DEFAULT_OVERSAMPLE
) -> tuple[float, float, int]:
    """Grid L^p norm of f on the unit circle plus an a-priori error bound.

    The norm is the normalized p-mean of |f| over G equispaced points, G the
    smallest power of two >= oversample * (deg + 1); p = inf takes the grid
    maximum (a lower estimate of the true sup).  The bound pi * D * max|f| / G
    comes from the derivative estimate for degree-D polynomials and is added
    to tolerance accounting by callers, never silently absorbed.
    """
    p = _validate_exponent(p)
    mags = np.abs(grid_values(f, oversample))
    G = mags.size
    peak = float(mags.max())
    if math.isinf(p):
        value = peak
    else:
        value = float(np.mean(mags**p) ** (1.0 / p))
    bound = math.pi * f.degree * peak / G
    return value, bound, G


def lp_norm_circle(f: CoeffSeq, p: float, oversample: int = DEFAULT_OVERSAMPLE) -> float:
    """Grid L^p norm of f on the unit circle (see lp_norm_detail)."""
    return lp_norm_detail(f, p, oversample)[0]


@dataclass(frozen=True)
class DyadicProfile:
    """The weighted block-norm sequence 2^(n*s) * ||f * W_n||_p, n = 0..nmax."""

    s: float
    p: float
    nmax: int
    values: np.ndarray
    error_bounds: np.ndarray
    grid: int
    degree: int
    truncated: bool


def dyadic_profile(
    f: CoeffSeq,
    s: float,
    p: float,
    nmax: int,
    oversample: int = DEFAULT_OVERSAMPLE,
) -> DyadicProfile:
    """Dyadic block profile of f.

    Block n is the coefficient-wise product of f with the n-th kernel,
    evaluated on a grid of at least oversample * 2^(n+1) points.  If
    2^(nmax+1) cannot cover f's nonzero degree the profile is marked
    truncated and downstream norms are lower bounds.
    """
    if nmax < 0:
        raise InvalidParameter("nmax must be nonnegative")
    _validate_exponent(p)
    values = np.zeros(nmax + 1)
    bounds = np.zeros(nmax + 1)
    top_grid = 0
    for n in range(nmax + 1):
        w = dyadic_kernel(n).coeffs
        block = f.padded(w.size) * w
        v, e, g = lp_norm_detail(CoeffSeq(block), p, oversample)
        weight = 2.0 ** (n * s)
        values[n] = weight * v
        bounds[n] = weight * e
        top_grid = max(top_grid, g)
    degree = f.last_nonzero()
    return DyadicProfile(
        s=float(s),
        p=float(p),
        nmax=nmax,
        values=values,
        error_bounds=bounds,
        grid=top_grid,
        degree=degree,
        truncated=(1 << (nmax + 1)) < degree,
    )


def _lq_aggregate(values: np.ndarray, q: float) -> float:
    if math.isinf(q):
        return float(values.max()) if values.size else 0.0
    return float(np.sum(values**q) ** (1.0 / q))


def besov_detail(
    f: CoeffSeq,
    s: float,
    p: float,
    q: float,
    nmax: int,
    oversample: int = DEFAULT_OVERSAMPLE,
) -> tuple[float, float, DyadicProfile]:
    """Besov norm with its aggregated quadrature error bound and profile.

    The norm is the l^q aggregation of the profile values (max for q = inf,
    which is a lower bound for the true sup under truncation).  The error
    bound aggregates the per-block bounds the same way, which dominates the
    norm perturbation by the triangle inequality.
    """
    q = _validate_exponent(q)
    prof = dyadic_profile(f, s, p, nmax, oversample)
    return _lq_aggregate(prof.values, q), _lq_aggregate(prof.error_bounds, q), prof


def besov_norm(
    f: CoeffSeq,
    s: float,
    p: float,
    q: float,
    nmax: int,
    oversample: int = DEFAULT_OVERSAMPLE,
) -> float:
    """l^q norm of the dyadic profile of f (see besov_detail)."""
    return besov_detail(f, s, p, q, nmax, oversample)[0]


def hard_block_bound(gamma: CoeffSeq, nmax: int) -> float:
    """|gamma_0| plus the weighted sum of hard-block l2 norms.

    Returns |g_0| + sum over n <= nmax of 2^n * (sum_{k in block n} |g_k|^2)^(1/2).
    The index-0 modulus is carried as a separate term so the bound covers
    every index; the block sum proper starts at k = 1.
    """
    if nmax < 0:
        raise InvalidParameter("nmax must be nonnegative")
    c = gamma.coeffs
    total = float(abs(c[0]))
    for n in range(nmax + 1):
        blk = c[1 << n : 1 << (n + 1)]
        if blk.size:
            total += (2.0**n) * float(np.sqrt(np.sum(np.abs(blk) ** 2)))
    return total


def paley_diagnostic(f: CoeffSeq, nmax: int) -> np.ndarray:
    """The sums D_n = sum_{k=0..n} |f_hat(2^n + 2^k)|^2 for n = 0..nmax.

    Diagnostic data only: nothing in this package asserts boundedness of
    these sums for any function class.
    """
    if nmax < 0:
        raise InvalidParameter("nmax must be nonnegative")
    if f.degree < (1 << (nmax + 1)):
        raise TooShort("need degree >= 2^(nmax+1) to form the diagnostic")
    c = f.coeffs
    out = np.zeros(nmax + 1)
    for n in range(nmax + 1):
        idx = (1 << n) + (1 << np.arange(n + 1))
        out[n] = float(np.sum(np.abs(c[idx]) ** 2))
    return out
