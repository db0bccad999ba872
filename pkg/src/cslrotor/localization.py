"""Orientational and spatio-orientational localization rates.

The central quantity is the decay rate of coherence between two
orientations of a rigid body,

    F(O, O') = (r_c^3 lambda_c / 2 pi^{3/2} m0^2)
               * int d^3k e^{-r_c^2 k^2} |rho~(R^T(O)k) - rho~(R^T(O')k)|^2,

which is real and nonnegative and depends only on the relative orientation.
Small-displacement/small-angle expansions of the same integral produce the
geometry tensors a_cm and a_rot whose eigenvalues carry the translational
and rotational momentum-diffusion coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .orientation import Orientation, axis_angle_between, relative_orientation
from .params import HBAR, CslParams
from .quadrature import (QuadratureSpec, integrate_axisymmetric,
                         integrate_radial_angular)

SMALL_PARTICLE_CONSTANTS = {
    # (a, b) in the small-body rate (R^2/a - L^2/b)^2; the null geometries
    # are the sphere L = 2R and the inertially isotropic cylinder L = sqrt(3) R.
    "cylinder": (4.0, 12.0),
    "spheroid": (5.0, 20.0),
}


@dataclass(frozen=True)
class GeometryTensors:
    """Second-moment shape tensors of the form factor (dimensionless).

    a_cm weights center-of-mass localization, a_rot orientational
    localization; both are symmetric positive semidefinite and expressed in
    the body principal frame (symmetry axis along e3 where applicable).
    """

    a_cm: np.ndarray
    a_rot: np.ndarray
    frame: str = "body"

    def __post_init__(self):
        for name in ("a_cm", "a_rot"):
            t = np.asarray(getattr(self, name), dtype=float)
            t.flags.writeable = False
            object.__setattr__(self, name, t)


def _axes_in_plane(alpha: float):
    """Two unit axes separated by alpha, spanning the x-z plane."""
    m1 = np.array([0.0, 0.0, 1.0])
    m2 = np.array([math.sin(alpha), 0.0, math.cos(alpha)])
    return m1, m2


def _rate_prefactor(csl: CslParams) -> float:
    return csl.r_c ** 3 * csl.lambda_c / (2.0 * math.pi ** 1.5 * csl.m0 ** 2)


def _spherical_kvec(k, theta, phi):
    st = np.sin(theta)
    return np.stack(np.broadcast_arrays(k * st * np.cos(phi),
                                        k * st * np.sin(phi),
                                        k * np.cos(theta)), axis=-1)


def loc_rate_axis_angle(ff, csl: CslParams, alpha: float,
                        spec: QuadratureSpec = None) -> float:
    """Localization rate of an azimuthally symmetric body at axis angle alpha."""
    if not ff.azimuthal:
        raise ValueError("axis-angle rate requires an azimuthally symmetric "
                         "body")
    # exact degenerate angles short-circuit; the integrand vanishes
    # identically there and would only accumulate cancellation noise
    if alpha == 0.0 or (ff.inversion_symmetric and abs(alpha - math.pi) < 1e-15):
        return 0.0
    m1, m2 = _axes_in_plane(alpha)

    def integrand(k, theta, phi):
        st = np.sin(theta)
        ct = np.cos(theta)
        kp1 = k * ct  # axis m1 = e3
        kp2 = k * (st * np.cos(phi) * m2[0] + ct * m2[2])
        k2 = k * k
        kperp1 = k * st
        kperp2 = np.sqrt(np.maximum(k2 - kp2 ** 2, 0.0))
        delta = (ff.value_axial(kperp1, kp1) - ff.value_axial(kperp2, kp2))
        return delta ** 2

    value, _ = integrate_radial_angular(integrand, csl.r_c, spec,
                                        phi_symmetry="mirror")
    return _rate_prefactor(csl) * value


def loc_rate_full(ff, csl: CslParams, omega: Orientation,
                  omega_prime: Orientation,
                  spec: QuadratureSpec = None) -> float:
    """Exact localization rate F(omega, omega') from the defining integral."""
    if omega.angle_to(omega_prime) == 0.0:
        return 0.0
    if ff.azimuthal:
        alpha = axis_angle_between(omega, omega_prime)
        return loc_rate_axis_angle(ff, csl, alpha, spec)

    rot1 = omega.matrix()
    rot2 = omega_prime.matrix()

    def integrand(k, theta, phi):
        kvec = _spherical_kvec(k, theta, phi)
        delta = (ff.value_vector(np.tensordot(kvec, rot1, axes=([-1], [0])))
                 - ff.value_vector(np.tensordot(kvec, rot2, axes=([-1], [0]))))
        return np.abs(delta) ** 2

    value, _ = integrate_radial_angular(integrand, csl.r_c, spec,
                                        phi_symmetry="none")
    return _rate_prefactor(csl) * value


def loc_rate_small(kind: str, csl: CslParams, mass: float, radius: float,
                   length: float, alpha: float) -> float:
    """Small-particle closed form of the localization rate.

    Valid when the body extension is well below r_c (documented, not
    enforced): (lambda_c M^2 / 8 m0^2 r_c^4) (R^2/a - L^2/b)^2 sin^2(alpha).
    """
    try:
        a, b = SMALL_PARTICLE_CONSTANTS[kind]
    except KeyError:
        raise ValueError(f"unknown body kind {kind!r}") from None
    shape = radius ** 2 / a - length ** 2 / b
    return (csl.lambda_c * mass ** 2 / (8.0 * csl.m0 ** 2 * csl.r_c ** 4)
            * shape ** 2 * math.sin(alpha) ** 2)


def _golden_max(f, lo: float, hi: float, tol: float = 1e-10):
    """Golden-section maximum of a unimodal f on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
    x = 0.5 * (a + b)
    return x, f(x)


def loc_rate_curve(ff, csl: CslParams, alphas, spec: QuadratureSpec = None,
                   normalized: bool = False):
    """Localization rate over a grid of axis angles.

    Returns (rates, rate_max) where rate_max is the maximum over
    alpha in [0, pi/2] located by golden-section search (used for the
    normalization of rate plots); rates are divided by it when
    normalized=True.
    """
    alphas = np.asarray(alphas, dtype=float)
    rates = np.array([loc_rate_axis_angle(ff, csl, float(a), spec)
                      for a in alphas])
    _, rate_max = _golden_max(
        lambda a: loc_rate_axis_angle(ff, csl, a, spec), 0.0, math.pi / 2.0)
    if normalized:
        return rates / rate_max, rate_max
    return rates, rate_max


def geometry_tensors(ff, csl: CslParams,
                     spec: QuadratureSpec = None) -> GeometryTensors:
    """Geometry tensors from the Gaussian-weighted form-factor moments.

    a_cm = (r_c^5 / pi^{3/2} m0^2) int d^3k e^{-k^2 r_c^2} |rho~|^2 k (x) k
    a_rot = (r_c^3 / pi^{3/2} m0^2) int d^3k e^{-k^2 r_c^2}
            [k x grad rho~] (x) [k x grad rho~]*   (real part)

    Both are evaluated in the body frame; the transverse gradient enters in
    the k_perp-scaled form so the axis k_perp = 0 is regular.
    """
    pref_cm = csl.r_c ** 5 / (math.pi ** 1.5 * csl.m0 ** 2)
    pref_rot = csl.r_c ** 3 / (math.pi ** 1.5 * csl.m0 ** 2)

    if ff.azimuthal:
        def integrand(k, theta):
            st = np.sin(theta)
            ct = np.cos(theta)
            k_perp = k * st
            k_par = k * ct
            rho2 = ff.value_axial(k_perp, k_par) ** 2
            a, b = ff.gradient_axial_scaled(k_perp, k_par)
            g = a * k_par - b
            kp2avg = 0.5 * k_perp ** 2  # azimuthal average of k1^2 (= k2^2)
            return np.stack([rho2 * kp2avg, rho2 * k_par ** 2, g * g * kp2avg])

        (cm_perp, cm_par, rot_perp), _ = integrate_axisymmetric(
            integrand, csl.r_c, spec)
        a_cm = pref_cm * np.diag([cm_perp, cm_perp, cm_par])
        a_rot = pref_rot * np.diag([rot_perp, rot_perp, 0.0])
        return GeometryTensors(a_cm=a_cm, a_rot=a_rot)

    idx = np.triu_indices(3)

    def integrand(k, theta, phi):
        kvec = _spherical_kvec(k, theta, phi)
        rho = ff.value_vector(kvec)
        grad = ff.gradient_vector(kvec)
        w = np.cross(kvec, grad)
        rho2 = np.abs(rho) ** 2
        cm = kvec[..., :, None] * kvec[..., None, :] * rho2[..., None, None]
        rot = (w[..., :, None] * np.conj(w[..., None, :])).real
        comps = [cm[..., i, j] for i, j in zip(*idx)]
        comps += [rot[..., i, j] for i, j in zip(*idx)]
        return np.stack(comps)

    vals, _ = integrate_radial_angular(integrand, csl.r_c, spec,
                                       phi_symmetry="none")
    a_cm = np.zeros((3, 3))
    a_rot = np.zeros((3, 3))
    a_cm[idx] = vals[:6]
    a_rot[idx] = vals[6:]
    a_cm = pref_cm * (a_cm + np.triu(a_cm, 1).T)
    a_rot = pref_rot * (a_rot + np.triu(a_rot, 1).T)
    return GeometryTensors(a_cm=a_cm, a_rot=a_rot)


def cm_loc_rate(tensors: GeometryTensors, csl: CslParams, delta_r,
                omega0: Orientation) -> float:
    """Center-of-mass localization rate for a small displacement delta_r.

    (lambda_c / 2 r_c^2) * dR . R(omega0) a_cm R^T(omega0) dR; valid in the
    small-displacement regime |dR| << r_c (documented, not enforced).
    """
    delta_r = np.asarray(delta_r, dtype=float)
    rot = omega0.matrix()
    a_space = rot @ tensors.a_cm @ rot.T
    return (csl.lambda_c / (2.0 * csl.r_c ** 2)
            * float(delta_r @ a_space @ delta_r))


def _require_axisymmetric(tensors: GeometryTensors, tol: float = 1e-6):
    ar = tensors.a_rot
    scale = max(abs(ar[0, 0]), abs(ar[1, 1]))
    if scale > 0 and (abs(ar[0, 0] - ar[1, 1]) > tol * scale
                      or abs(ar[2, 2]) > tol * scale):
        raise ValueError("geometry tensors are not azimuthally symmetric")
    return 0.5 * (ar[0, 0] + ar[1, 1])


def rot_loc_rate(tensors: GeometryTensors, csl: CslParams,
                 omega: Orientation, omega_prime: Orientation) -> float:
    """Orientational localization rate D_rot |m x m'|^2 / hbar^2.

    Uses the transverse a_rot eigenvalue of an azimuthally symmetric body;
    small relative angles are the validity regime (documented).
    """
    a_perp = _require_axisymmetric(tensors)
    d_rot = 0.5 * csl.lambda_c * HBAR ** 2 * a_perp
    cross = np.cross(omega.symmetry_axis(), omega_prime.symmetry_axis())
    return d_rot * float(cross @ cross) / HBAR ** 2


def rot_loc_rate_small_angle(tensors: GeometryTensors, csl: CslParams,
                             omega: Orientation,
                             omega_prime: Orientation) -> float:
    """Quadratic-form orientational rate (lambda_c/2) dW . a_rot dW.

    dW is the axis-angle vector of the relative rotation; agrees with
    rot_loc_rate to leading order in the relative angle.
    """
    dw = relative_orientation(omega, omega_prime).rotation_vector()
    return 0.5 * csl.lambda_c * float(dw @ tensors.a_rot @ dw)
