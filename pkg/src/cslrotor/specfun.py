"""Special functions used by the closed-form decoherence expressions.

All functions accept scalars or numpy arrays and return the matching type.
Modified Bessel functions are only exposed in the exponentially scaled form
e^{-|x|} I_n(x): the closed-form diffusion coefficients evaluate them at
arguments up to ~1e12 where the raw I_n overflows, so every downstream
formula is arranged to consume the scaled variant.
"""

from __future__ import annotations

import numpy as np
from scipy import special

# Above this argument the cephes ive implementation returns NaN; switch to
# the large-argument expansion, which is at machine precision there for the
# small orders used in this package.
_IVE_ASYMPTOTIC_SWITCH = 1e8

# Below this argument the closed identity for J_{3/2} loses digits to the
# sin/cos cancellation; the power series is exact to machine precision here.
_J32_SERIES_SWITCH = 0.5


def _check_finite(x, name):
    if np.any(np.isnan(x)):
        raise ValueError(f"{name} received NaN input")


def bessel_j0(x):
    """Cylindrical Bessel function J0(x)."""
    x = np.asarray(x, dtype=float)
    _check_finite(x, "bessel_j0")
    out = special.j0(x)
    return out if out.ndim else float(out)


def bessel_j1(x):
    """Cylindrical Bessel function J1(x)."""
    x = np.asarray(x, dtype=float)
    _check_finite(x, "bessel_j1")
    out = special.j1(x)
    return out if out.ndim else float(out)


def _j_3half_series(x):
    # J_{3/2}(x) = sum_k (-1)^k (x/2)^{2k+3/2} / (k! Gamma(k+5/2))
    x = np.asarray(x, dtype=float)
    half = 0.5 * x
    term = half ** 1.5 * half / special.gamma(2.5)
    out = term.copy()
    for k in range(1, 16):
        term = term * (-(half * half)) / (k * (k + 1.5))
        out += term
    return out


def bessel_j_3half(x):
    """Bessel function J_{3/2}(x) for x >= 0.

    Uses the identity sqrt(2/(pi x)) (sin x / x - cos x) with a power-series
    branch at small argument to avoid cancellation.
    """
    x = np.asarray(x, dtype=float)
    _check_finite(x, "bessel_j_3half")
    if np.any(x < 0):
        raise ValueError("bessel_j_3half requires x >= 0")
    small = x < _J32_SERIES_SWITCH
    xs = np.where(small, 1.0, x)  # placeholder avoids 0-division warnings
    closed = np.sqrt(2.0 / (np.pi * xs)) * (np.sin(xs) / xs - np.cos(xs))
    out = np.where(small, _j_3half_series(x), closed)
    return out if out.ndim else float(out)


def _ive_asymptotic(n, x):
    # e^{-x} I_n(x) ~ (2 pi x)^{-1/2} [1 - (mu-1)/8x + ...], mu = 4 n^2
    mu = 4.0 * n * n
    s = np.ones_like(x)
    t = np.ones_like(x)
    for k in range(1, 6):
        t = t * (-(mu - (2 * k - 1) ** 2) / (8.0 * x * k))
        s = s + t
    return s / np.sqrt(2.0 * np.pi * x)


def bessel_i_scaled(n: int, x):
    """Exponentially scaled modified Bessel function e^{-|x|} I_n(x).

    Valid for any finite x with the integer-order parity
    I_n(-x) = (-1)^n I_n(x); accurate to ~1e-14 relative up to |x| ~ 1e12
    for the small orders used here.
    """
    if n < 0 or int(n) != n:
        raise ValueError("order n must be a nonnegative integer")
    x = np.asarray(x, dtype=float)
    _check_finite(x, "bessel_i_scaled")
    ax = np.abs(x)
    big = ax > _IVE_ASYMPTOTIC_SWITCH
    out = special.ive(n, np.where(big, 1.0, x))
    if np.any(big):
        sign = np.where((x < 0) & (n % 2 == 1), -1.0, 1.0)
        out = np.where(big, sign * _ive_asymptotic(n, np.where(big, ax, 1.0)),
                       out)
    return out if out.ndim else float(out)


def erf(x):
    """Error function."""
    x = np.asarray(x, dtype=float)
    _check_finite(x, "erf")
    out = special.erf(x)
    return out if out.ndim else float(out)


def sinc(x):
    """Unnormalized sinc, sin(x)/x with sinc(0) = 1."""
    x = np.asarray(x, dtype=float)
    _check_finite(x, "sinc")
    out = np.sinc(x / np.pi)
    return out if out.ndim else float(out)
