"""Mass-density Fourier transforms (form factors) of the supported bodies.

The form factor rho~(k) is normalized to the total mass, rho~(0) = M, and
obeys the Hermitian symmetry rho~(k) = rho~*(-k); for the inversion
symmetric continuous shapes it is real.  The Fourier sign convention is
e^{-i k.r}; no observable depends on it because every downstream rate
involves |rho~|^2 or conjugate-symmetric products.

Analytic radial/axial gradients are provided in the scaled form needed by
the angular-momentum geometry integral, where d(rho~)/dk_perp appears
divided by k_perp.
"""

from __future__ import annotations

import math

import numpy as np

from .bodies import Atoms, BodySpec, Cylinder, Spheroid
from .orientation import Orientation
from .specfun import bessel_j0, bessel_j1, sinc

_SMALL_U = 1e-3


def _two_j1_over_u(u):
    """2 J1(u)/u with the analytic u -> 0 limit (value 1)."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _SMALL_U
    us = np.where(small, 1.0, u)
    u2 = u * u
    series = 1.0 - u2 / 8.0 * (1.0 - u2 / 24.0)
    return np.where(small, series, 2.0 * bessel_j1(us) / us)


def _two_j1_over_u_prime_over_u(u):
    """d/du[2 J1(u)/u] / u = -2 J2(u)/u^2, stable at u = 0 (value -1/4)."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _SMALL_U
    us = np.where(small, 1.0, u)
    u2 = u * u
    series = -0.25 * (1.0 - u2 / 12.0 * (1.0 - u2 / 32.0))
    j2 = 2.0 * bessel_j1(us) / us - bessel_j0(us)
    return np.where(small, series, -2.0 * j2 / (us * us))


def _sphere_profile(u):
    """3 (sin u - u cos u)/u^3 with the u -> 0 limit (value 1)."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 0.05
    us = np.where(small, 1.0, u)
    u2 = u * u
    series = 1.0 - u2 / 10.0 * (1.0 - u2 / 28.0 * (1.0 - u2 / 54.0))
    direct = 3.0 * (np.sin(us) - us * np.cos(us)) / us ** 3
    return np.where(small, series, direct)


def _sphere_profile_prime_over_u(u):
    """d/du[3 j1(u)/u] / u = -3 j2(u)/u^2, stable at u = 0 (value -1/5)."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 0.05
    us = np.where(small, 1.0, u)
    u2 = u * u
    series = -0.2 * (1.0 - u2 / 14.0 * (1.0 - u2 / 36.0))
    direct = 3.0 * (us * us * np.sin(us) - 3.0 * np.sin(us)
                    + 3.0 * us * np.cos(us)) / us ** 5
    return np.where(small, series, direct)


def cylinder_ff(k_perp, k_par, mass: float, radius: float, length: float):
    """Form factor of a uniform cylinder (kg), real valued.

    k_perp, k_par: wavevector components (1/m) transverse/parallel to the
    symmetry axis; the k_perp -> 0 limit is taken analytically.
    """
    u = radius * np.asarray(k_perp, dtype=float)
    v = 0.5 * length * np.asarray(k_par, dtype=float)
    return mass * _two_j1_over_u(u) * sinc(v)


def spheroid_ff(k_perp, k_par, mass: float, radius: float, length: float):
    """Form factor of a uniform spheroid (kg), real valued."""
    k_perp = np.asarray(k_perp, dtype=float)
    k_par = np.asarray(k_par, dtype=float)
    u = np.sqrt((radius * k_perp) ** 2 + (0.5 * length * k_par) ** 2)
    return mass * _sphere_profile(u)


def sphere_ff(k, mass: float, radius: float):
    """Form factor of a uniform sphere at radial wavenumber k (kg)."""
    return mass * _sphere_profile(radius * np.asarray(k, dtype=float))


def atoms_ff(k, masses, positions):
    """Form factor of a point-mass configuration, sum_n m_n e^{-i k.r_n}.

    k: wavevector(s), shape (..., 3) in 1/m.  Returns a complex mass
    amplitude of shape (...).
    """
    k = np.asarray(k, dtype=float)
    m = np.asarray(masses, dtype=float)
    r = np.asarray(positions, dtype=float)
    phase = np.tensordot(k, r, axes=([-1], [-1]))  # (..., n_atoms)
    return (m * np.exp(-1j * phase)).sum(axis=-1)


class AxialFormFactor:
    """Form factor of an azimuthally symmetric, inversion symmetric body."""

    azimuthal = True
    inversion_symmetric = True

    def __init__(self, body):
        self.body = body
        self.mass = body.mass

    def value_axial(self, k_perp, k_par):
        raise NotImplementedError

    def gradient_axial_scaled(self, k_perp, k_par):
        """(A, B) with d/dk_perp = A * k_perp and d/dk_par = B.

        The scaled transverse component A is finite at k_perp = 0, which is
        what the k x grad(rho~) integrand needs.
        """
        raise NotImplementedError

    def value_vector(self, kvec):
        kvec = np.asarray(kvec, dtype=float)
        k_perp = np.hypot(kvec[..., 0], kvec[..., 1])
        return self.value_axial(k_perp, kvec[..., 2])

    def evaluate_rotated(self, kvec, orientation: Orientation):
        """rho~ evaluated at R^T(orientation) k, via the symmetry axis."""
        kvec = np.asarray(kvec, dtype=float)
        axis = orientation.symmetry_axis()
        k_par = np.tensordot(kvec, axis, axes=([-1], [0]))
        k2 = (kvec ** 2).sum(axis=-1)
        k_perp = np.sqrt(np.maximum(k2 - k_par ** 2, 0.0))
        return self.value_axial(k_perp, k_par)


class CylinderFormFactor(AxialFormFactor):

    def __init__(self, body: Cylinder):
        super().__init__(body)
        self.radius = body.radius
        self.length = body.length

    def value_axial(self, k_perp, k_par):
        return cylinder_ff(k_perp, k_par, self.mass, self.radius, self.length)

    def gradient_axial_scaled(self, k_perp, k_par):
        u = self.radius * np.asarray(k_perp, dtype=float)
        v = 0.5 * self.length * np.asarray(k_par, dtype=float)
        radial = _two_j1_over_u(u)
        # d/dv sinc(v) = (v cos v - sin v)/v^2, stable via series near 0
        small = np.abs(v) < _SMALL_U
        vs = np.where(small, 1.0, v)
        v2 = v * v
        dsinc = np.where(small, -v / 3.0 * (1.0 - v2 / 10.0),
                         (vs * np.cos(vs) - np.sin(vs)) / (vs * vs))
        a = (self.mass * self.radius ** 2
             * _two_j1_over_u_prime_over_u(u) * sinc(v))
        b = self.mass * 0.5 * self.length * radial * dsinc
        return a, b


class SpheroidFormFactor(AxialFormFactor):

    def __init__(self, body: Spheroid):
        super().__init__(body)
        self.radius = body.radius
        self.length = body.length

    def value_axial(self, k_perp, k_par):
        return spheroid_ff(k_perp, k_par, self.mass, self.radius, self.length)

    def gradient_axial_scaled(self, k_perp, k_par):
        k_perp = np.asarray(k_perp, dtype=float)
        k_par = np.asarray(k_par, dtype=float)
        c = 0.5 * self.length
        u = np.sqrt((self.radius * k_perp) ** 2 + (c * k_par) ** 2)
        sp = self.mass * _sphere_profile_prime_over_u(u)
        return sp * self.radius ** 2, sp * c ** 2 * k_par


class AtomsFormFactor:
    """Complex form factor of a rigid point-mass configuration."""

    azimuthal = False
    inversion_symmetric = False

    def __init__(self, body: Atoms):
        self.body = body
        self.mass = body.mass
        self._m = body.masses_array()
        self._r = body.positions_array()

    def value_vector(self, kvec):
        return atoms_ff(kvec, self._m, self._r)

    def gradient_vector(self, kvec):
        """grad_k rho~ as a complex (..., 3) array (kg m)."""
        kvec = np.asarray(kvec, dtype=float)
        phase = np.tensordot(kvec, self._r, axes=([-1], [-1]))
        weights = self._m * np.exp(-1j * phase)  # (..., n)
        return -1j * np.tensordot(weights, self._r, axes=([-1], [0]))

    def evaluate_rotated(self, kvec, orientation: Orientation):
        kvec = np.asarray(kvec, dtype=float)
        return self.value_vector(np.tensordot(kvec, orientation.matrix(),
                                              axes=([-1], [0])))


def form_factor(body: BodySpec):
    """Form-factor evaluator for a body specification."""
    if isinstance(body, Cylinder):
        return CylinderFormFactor(body)
    if isinstance(body, Spheroid):
        return SpheroidFormFactor(body)
    if isinstance(body, Atoms):
        return AtomsFormFactor(body)
    raise TypeError(f"unsupported body type {type(body).__name__}")
