"""Collapse-parameter bounds from measured heating rates.

Every diffusion coefficient is linear in the collapse rate, so a measured
temperature heating rate Gamma maps each localization length r_c to the
unique collapse rate that would produce it: a lower-bound curve
lambda_c(r_c).  The translational and rotational channels scale differently
with r_c (slopes +2 and +4 in the small-particle regime), so the two curves
from a simultaneous measurement cross once and the crossing point recovers
both parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import BodySpec, Cylinder, Spheroid, body_mass_and_inertia
from .diffusion import DiffusionSet, diffusion_coefficients, heating_rates
from .params import AMU, K_B, CslParams
from .quadrature import QuadratureSpec

CHANNELS = ("cm", "rot")


class ChannelInsensitiveError(ValueError):
    """The body produces no diffusion in the requested channel."""


class IntersectionError(RuntimeError):
    """No unique crossing of the two bound curves on the search interval."""

    def __init__(self, message, roots=()):
        super().__init__(message)
        self.roots = tuple(roots)


@dataclass(frozen=True)
class HeatingMeasurement:
    """Hypothetical measured heating rates of one body (K/s)."""

    gamma_cm: float
    gamma_rot: float
    rel_error: float
    body: BodySpec

    def __post_init__(self):
        if self.gamma_cm <= 0 or self.gamma_rot <= 0:
            raise ValueError("heating rates must be positive")
        if not (0.0 <= self.rel_error < 1.0):
            raise ValueError("rel_error must be in [0, 1)")


@dataclass(frozen=True)
class ExclusionCurve:
    r_c: np.ndarray
    lambda_bound: np.ndarray
    channel: str
    band_low: np.ndarray
    band_high: np.ndarray


@dataclass(frozen=True)
class IntersectionResult:
    r_c: float
    lambda_c: float
    r_c_interval: tuple
    lambda_interval: tuple


def _is_sphere(body: BodySpec) -> bool:
    return isinstance(body, Spheroid) and body.length == 2.0 * body.radius


def _reduced_diffusion(body: BodySpec, r_c: float, m0: float,
                       spec: QuadratureSpec = None) -> DiffusionSet:
    """Diffusion coefficients per unit collapse rate at this r_c."""
    return diffusion_coefficients(body, CslParams(lambda_c=1.0, r_c=r_c,
                                                  m0=m0), spec)


def lambda_bound(r_c: float, meas: HeatingMeasurement, channel: str,
                 m0: float = AMU, spec: QuadratureSpec = None) -> float:
    """Collapse rate implied by the measured heating at this r_c (1/s).

    channel "cm" uses Gamma_cm = 2 D_perp / (M k_B), channel "rot"
    Gamma_rot = 2 D_rot / (I_perp k_B); linearity of D in lambda_c inverts
    either relation exactly.
    """
    if channel not in CHANNELS:
        raise ValueError(f"channel must be one of {CHANNELS}")
    if channel == "rot" and _is_sphere(meas.body):
        raise ChannelInsensitiveError(
            "a sphere produces no rotational diffusion; the rot channel "
            "carries no information")
    mass, moments = body_mass_and_inertia(meas.body)
    d = _reduced_diffusion(meas.body, r_c, m0, spec)
    if channel == "cm":
        reduced = d.d_perp
        gamma, scale = meas.gamma_cm, mass
    else:
        reduced = d.d_rot
        gamma, scale = meas.gamma_rot, moments[0]
    if reduced <= 0.0:
        raise ChannelInsensitiveError(
            f"reduced {channel} diffusion vanishes at r_c={r_c:g}")
    return gamma * scale * K_B / (2.0 * reduced)


def exclusion_curve(meas: HeatingMeasurement, r_c_values, channel: str,
                    m0: float = AMU,
                    spec: QuadratureSpec = None) -> ExclusionCurve:
    """Lower-bound curve lambda_c(r_c) with the measurement-error band."""
    r_c_values = np.asarray(r_c_values, dtype=float)
    bound = np.array([lambda_bound(float(r), meas, channel, m0, spec)
                      for r in r_c_values])
    return ExclusionCurve(r_c=r_c_values, lambda_bound=bound, channel=channel,
                          band_low=bound * (1.0 - meas.rel_error),
                          band_high=bound * (1.0 + meas.rel_error))


def default_r_c_grid(n: int = 200) -> np.ndarray:
    """Log-spaced localization lengths from 1 nm to 100 um."""
    return np.logspace(-9, -4, n)


def _intersect_scaled(meas, m0, spec, lo, hi, n_scan, scale_cm, scale_rot,
                      rtol=1e-8):
    """Root of log lambda_cm - log lambda_rot for scaled measurements."""

    def logdiff(ln_r):
        r = math.exp(ln_r)
        return (math.log(scale_cm * lambda_bound(r, meas, "cm", m0, spec))
                - math.log(scale_rot * lambda_bound(r, meas, "rot", m0, spec)))

    grid = np.linspace(math.log(lo), math.log(hi), n_scan)
    vals = [logdiff(x) for x in grid]
    brackets = [(grid[i], grid[i + 1]) for i in range(n_scan - 1)
                if vals[i] == 0.0 or (vals[i] < 0) != (vals[i + 1] < 0)]
    if not brackets:
        raise IntersectionError(
            "no unique intersection: the bound curves do not cross on "
            f"[{lo:g}, {hi:g}]")
    if len(brackets) > 1:
        roots = [math.exp(0.5 * (a + b)) for a, b in brackets]
        raise IntersectionError(
            f"ambiguous intersection: {len(brackets)} sign changes",
            roots=roots)
    a, b = brackets[0]
    fa = logdiff(a)
    while b - a > rtol:
        mid = 0.5 * (a + b)
        fm = logdiff(mid)
        if fm == 0.0:
            a = b = mid
            break
        if (fa < 0) != (fm < 0):
            b = mid
        else:
            a, fa = mid, fm
    r_star = math.exp(0.5 * (a + b))
    lam = math.sqrt(scale_cm * lambda_bound(r_star, meas, "cm", m0, spec)
                    * scale_rot * lambda_bound(r_star, meas, "rot", m0, spec))
    return r_star, lam


def intersect(meas: HeatingMeasurement, r_c_range=(1e-9, 1e-4),
              m0: float = AMU, spec: QuadratureSpec = None,
              n_scan: int = 48) -> IntersectionResult:
    """Extract (r_c, lambda_c) from the crossing of the two bound curves.

    Bracket scan over log r_c followed by bisection to relative tolerance
    1e-8; the error region is the rectangle spanned by the crossings of the
    +/- rel_error band edges (a conservative stand-in for the exact error
    set).  Raises IntersectionError when there is no crossing or more than
    one.
    """
    lo, hi = r_c_range
    r_star, lam = _intersect_scaled(meas, m0, spec, lo, hi, n_scan, 1.0, 1.0)
    if meas.rel_error == 0.0:
        return IntersectionResult(r_c=r_star, lambda_c=lam,
                                  r_c_interval=(r_star, r_star),
                                  lambda_interval=(lam, lam))
    rs, lams = [r_star], [lam]
    for s_cm in (1.0 - meas.rel_error, 1.0 + meas.rel_error):
        for s_rot in (1.0 - meas.rel_error, 1.0 + meas.rel_error):
            r_b, lam_b = _intersect_scaled(meas, m0, spec, lo, hi, n_scan,
                                           s_cm, s_rot)
            rs.append(r_b)
            lams.append(lam_b)
    return IntersectionResult(
        r_c=r_star, lambda_c=lam,
        r_c_interval=(min(rs), max(rs)),
        lambda_interval=(min(lams), max(lams)))


def forward_heating(body: BodySpec, csl: CslParams, rel_error: float = 0.0,
                    spec: QuadratureSpec = None) -> HeatingMeasurement:
    """Heating rates a body would show at the given collapse parameters.

    The forward map for round-trip consistency: intersect() applied to the
    result recovers (r_c, lambda_c).
    """
    rates = heating_rates(diffusion_coefficients(body, csl, spec), body)
    return HeatingMeasurement(gamma_cm=rates.gamma_cm,
                              gamma_rot=rates.gamma_rot,
                              rel_error=rel_error, body=body)
