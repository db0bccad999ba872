"""Momentum diffusion coefficients and heating rates.

D_par and D_perp (kg^2 m^2 / s^3) are the linear-momentum diffusion
coefficients along/transverse to the symmetry axis, D_rot ((J s)^2 / s) the
angular-momentum one.  For cylinders they have closed forms in the reduced
variables R_C = R / (sqrt(2) r_c) and L_C = L / (2 r_c); spheroids are
handled by the geometry-tensor quadrature with a memo per reduced geometry.

The closed forms group every e^{-x} I_n(x) product into the scaled Bessel
form so no intermediate exceeds magnitude ~1.  Small reduced arguments make
the groupings subtractively cancel down to the tenth-power small-particle
law, so that regime is evaluated in extended precision; the branch switch
is continuous to well below 1e-10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from .bodies import Atoms, BodySpec, Cylinder, Spheroid, body_mass_and_inertia
from .localization import GeometryTensors, geometry_tensors
from .params import HBAR, K_B, CslParams
from .quadrature import QuadratureSpec
from .specfun import bessel_i_scaled, erf

# Below this reduced argument (s = R_C^2 or q = L_C^2) the float grouping
# of the closed form starts losing digits to cancellation.
_MP_SWITCH = 0.25
_MP_DPS = 50


@dataclass(frozen=True)
class DiffusionSet:
    """Diffusion coefficients of one body at one parameter point.

    All three scale linearly in lambda_c at fixed geometry.
    """

    d_par: float
    d_perp: float
    d_rot: float
    body: BodySpec = None
    csl: CslParams = None


@dataclass(frozen=True)
class HeatingRates:
    """Second-moment growth rates and the derived temperature rates (K/s)."""

    dp2_dt: float
    dj2_dt: float
    gamma_cm: float
    gamma_rot: float


def _reduced_closed_float(s: float, q: float):
    """Reduced coefficients (f_par, f_perp, f_rot) of the cylinder.

    D_par,perp = (lambda hbar^2 M^2 / 2 m0^2 r_c^2) * f_par,perp and
    D_rot = (lambda hbar^2 M^2 / 2 m0^2) * f_rot with s = R_C^2, q = L_C^2.
    """
    lc = math.sqrt(q)
    h1 = -math.expm1(-q)
    h2 = math.sqrt(math.pi) * lc * float(erf(lc)) - h1
    i0 = float(bessel_i_scaled(0, s))
    i1 = float(bessel_i_scaled(1, s))
    c1 = 1.0 - i0 - i1
    c3 = 1.0 - i0 - 2.0 * i1
    bracket = (0.5 * s * h1 * (1.0 - 2.0 * (i0 + (1.0 - 5.0 / (3.0 * s)) * i1))
               + (q / 3.0) * i1 * (h2 - 2.0)
               + c3 * (h1 - h2))
    sq = s * q
    return h1 * c1 / sq, h2 * i1 / sq, bracket / sq


def _reduced_closed_mp(s: float, q: float):
    with mp.workdps(_MP_DPS):
        s = mp.mpf(s)
        q = mp.mpf(q)
        lc = mp.sqrt(q)
        h1 = 1 - mp.exp(-q)
        h2 = mp.sqrt(mp.pi) * lc * mp.erf(lc) - h1
        e = mp.exp(-s)
        i0 = mp.besseli(0, s) * e
        i1 = mp.besseli(1, s) * e
        c1 = 1 - i0 - i1
        c3 = 1 - i0 - 2 * i1
        bracket = (s / 2 * h1 * (1 - 2 * (i0 + (1 - 5 / (3 * s)) * i1))
                   + q / 3 * i1 * (h2 - 2)
                   + c3 * (h1 - h2))
        sq = s * q
        return (float(h1 * c1 / sq), float(h2 * i1 / sq), float(bracket / sq))


@lru_cache(maxsize=65536)
def _reduced_closed(s: float, q: float):
    if min(s, q) < _MP_SWITCH:
        return _reduced_closed_mp(s, q)
    return _reduced_closed_float(s, q)


def cylinder_diffusion_closed(csl: CslParams, mass: float, radius: float,
                              length: float) -> DiffusionSet:
    """Closed-form diffusion coefficients of a uniform cylinder.

    Numerically stable over reduced geometries R_C, L_C in [1e-6, 1e6].
    """
    if radius <= 0 or length <= 0 or mass <= 0:
        raise ValueError("cylinder parameters must be positive")
    s = (radius / (math.sqrt(2.0) * csl.r_c)) ** 2
    q = (length / (2.0 * csl.r_c)) ** 2
    f_par, f_perp, f_rot = _reduced_closed(s, q)
    pref = csl.lambda_c * HBAR ** 2 * mass ** 2 / (2.0 * csl.m0 ** 2)
    return DiffusionSet(d_par=pref * f_par / csl.r_c ** 2,
                        d_perp=pref * f_perp / csl.r_c ** 2,
                        d_rot=pref * f_rot,
                        body=Cylinder(length=length, radius=radius,
                                      mass_total=mass),
                        csl=csl)


def diffusion_from_tensors(tensors: GeometryTensors, csl: CslParams,
                           body: BodySpec = None,
                           tol: float = 1e-6) -> DiffusionSet:
    """Diffusion coefficients read off the geometry tensors.

    Requires azimuthal symmetry: the two transverse a_cm eigenvalues must
    agree and the axial a_rot component must vanish within tol.
    """
    a_cm = tensors.a_cm
    a_rot = tensors.a_rot
    cm_scale = float(np.max(np.abs(a_cm)))
    if (abs(a_cm[0, 0] - a_cm[1, 1]) > tol * cm_scale
            or np.max(np.abs(a_cm - np.diag(np.diag(a_cm)))) > tol * cm_scale):
        raise ValueError("a_cm is not azimuthally symmetric within tolerance")
    rot_scale = float(np.max(np.abs(a_rot)))
    if rot_scale > 0 and (abs(a_rot[0, 0] - a_rot[1, 1]) > tol * rot_scale
                          or abs(a_rot[2, 2]) > tol * rot_scale):
        raise ValueError("a_rot is not azimuthally symmetric within tolerance")
    coef = csl.lambda_c * HBAR ** 2 / (2.0 * csl.r_c ** 2)
    a_perp = 0.5 * (a_cm[0, 0] + a_cm[1, 1])
    return DiffusionSet(d_par=coef * a_cm[2, 2],
                        d_perp=coef * a_perp,
                        d_rot=0.25 * csl.lambda_c * HBAR ** 2
                        * (a_rot[0, 0] + a_rot[1, 1]),
                        body=body, csl=csl)


@lru_cache(maxsize=65536)
def _reduced_tensor_coeffs(kind: str, r_red: float, l_red: float,
                           rel_tol: float):
    """Memoized reduced coefficients from the quadrature path.

    r_red = R / r_c and l_red = L / r_c fix the geometry; the cache is safe
    under concurrent readers and always stores the same deterministic value
    for a key.
    """
    from .formfactor import form_factor

    csl = CslParams(lambda_c=1.0, r_c=1.0, m0=1.0)
    cls = {"cylinder": Cylinder, "spheroid": Spheroid}[kind]
    body = cls(length=l_red, radius=r_red, mass_total=1.0)
    spec = QuadratureSpec(rel_tol=rel_tol)
    d = diffusion_from_tensors(geometry_tensors(form_factor(body), csl, spec),
                               csl, body)
    # strip the lambda hbar^2 M^2 / 2 m0^2 r_c^2 prefactor (all ones here)
    return (2.0 * d.d_par / HBAR ** 2, 2.0 * d.d_perp / HBAR ** 2,
            2.0 * d.d_rot / HBAR ** 2)


def diffusion_coefficients(body: BodySpec, csl: CslParams,
                           spec: QuadratureSpec = None,
                           method: str = "auto") -> DiffusionSet:
    """Diffusion coefficients for any supported azimuthal body.

    method="closed" uses the cylinder closed form, "tensors" the quadrature
    path, "auto" the closed form for cylinders and memoized quadrature for
    spheroids.
    """
    if isinstance(body, Atoms):
        raise ValueError("diffusion coefficients require an azimuthally "
                         "symmetric body")
    if method == "closed" or (method == "auto" and isinstance(body, Cylinder)):
        if not isinstance(body, Cylinder):
            raise ValueError("closed form exists only for cylinders")
        return cylinder_diffusion_closed(csl, body.mass, body.radius,
                                         body.length)
    if method == "tensors":
        from .formfactor import form_factor
        d = diffusion_from_tensors(
            geometry_tensors(form_factor(body), csl, spec), csl, body)
        return DiffusionSet(d_par=d.d_par, d_perp=d.d_perp, d_rot=d.d_rot,
                            body=body, csl=csl)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    rel_tol = (spec.rel_tol if spec is not None else 1e-8)
    f_par, f_perp, f_rot = _reduced_tensor_coeffs(
        "spheroid", body.radius / csl.r_c, body.length / csl.r_c, rel_tol)
    pref = csl.lambda_c * HBAR ** 2 * body.mass ** 2 / (2.0 * csl.m0 ** 2)
    return DiffusionSet(d_par=pref * f_par / csl.r_c ** 2,
                        d_perp=pref * f_perp / csl.r_c ** 2,
                        d_rot=pref * f_rot,
                        body=body, csl=csl)


def heating_rates(d: DiffusionSet, body: BodySpec = None) -> HeatingRates:
    """Moment growth and temperature heating rates of a diffusing body.

    dP^2/dt = 2 D_par + 4 D_perp and dJ^2/dt = 4 D_rot; the temperature
    rates divide out the mass and the transverse moment of inertia with one
    k_B, Gamma_cm = 2 D_perp / (M k_B) and Gamma_rot = 2 D_rot / (I_perp k_B).
    """
    body = body if body is not None else d.body
    if body is None:
        raise ValueError("heating rates need a body for mass and inertia")
    mass, moments = body_mass_and_inertia(body)
    i_perp = moments[0]
    return HeatingRates(
        dp2_dt=2.0 * d.d_par + 4.0 * d.d_perp,
        dj2_dt=4.0 * d.d_rot,
        gamma_cm=2.0 * d.d_perp / (mass * K_B),
        gamma_rot=2.0 * d.d_rot / (i_perp * K_B) if i_perp > 0 else math.inf,
    )


def diffusion_curve(body: BodySpec, csl: CslParams, r_c_values,
                    spec: QuadratureSpec = None,
                    method: str = "auto") -> np.ndarray:
    """Sweep of (r_c, D_par, D_perp, D_rot) rows over localization lengths."""
    rows = []
    for r_c in np.asarray(r_c_values, dtype=float):
        d = diffusion_coefficients(body, csl.with_r_c(float(r_c)), spec,
                                   method)
        rows.append((r_c, d.d_par, d.d_perp, d.d_rot))
    return np.asarray(rows)
