"""Rigid-body specifications: geometry, mass and inertia.

Supported shapes are homogeneous cylinders, spheroids and spheres (all
azimuthally symmetric about the body-fixed e3 axis and inversion symmetric)
plus arbitrary point-mass configurations.  A body is specified either by its
uniform mass density or by its total mass; the two conversions are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def _resolve_mass(volume: float, density, mass) -> float:
    if (density is None) == (mass is None):
        raise ValueError("specify exactly one of density or mass")
    m = mass if mass is not None else density * volume
    if m <= 0:
        raise ValueError(f"total mass must be > 0, got {m}")
    return float(m)


@dataclass(frozen=True)
class Cylinder:
    """Uniform cylinder of length L and radius R, symmetry axis e3."""

    length: float
    radius: float
    density: float | None = None
    mass_total: float | None = None

    def __post_init__(self):
        if self.length <= 0 or self.radius <= 0:
            raise ValueError("cylinder dimensions must be positive")
        object.__setattr__(
            self, "mass_total",
            _resolve_mass(self.volume, self.density, self.mass_total))

    @property
    def volume(self) -> float:
        return math.pi * self.radius ** 2 * self.length

    @property
    def mass(self) -> float:
        return self.mass_total

    @property
    def mass_density(self) -> float:
        return self.mass / self.volume

    @property
    def azimuthally_symmetric(self) -> bool:
        return True

    @property
    def max_extent(self) -> float:
        """Largest distance between two points of the body (m)."""
        return 2.0 * math.hypot(self.length / 2.0, self.radius)

    def inertia_principal(self) -> tuple[float, float]:
        """Principal moments (I_perp, I_par) about the center of mass."""
        m = self.mass
        i_perp = m * (self.length ** 2 / 12.0 + self.radius ** 2 / 4.0)
        i_par = m * self.radius ** 2 / 2.0
        return i_perp, i_par

    def scaled(self, s: float) -> "Cylinder":
        """Uniformly scaled copy at fixed density (mass scales as s^3)."""
        return Cylinder(length=s * self.length, radius=s * self.radius,
                        density=self.mass_density)


@dataclass(frozen=True)
class Spheroid:
    """Uniform spheroid with polar extent L (full length) and radius R."""

    length: float
    radius: float
    density: float | None = None
    mass_total: float | None = None

    def __post_init__(self):
        if self.length <= 0 or self.radius <= 0:
            raise ValueError("spheroid dimensions must be positive")
        object.__setattr__(
            self, "mass_total",
            _resolve_mass(self.volume, self.density, self.mass_total))

    @property
    def volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius ** 2 * (self.length / 2.0)

    @property
    def mass(self) -> float:
        return self.mass_total

    @property
    def mass_density(self) -> float:
        return self.mass / self.volume

    @property
    def azimuthally_symmetric(self) -> bool:
        return True

    @property
    def max_extent(self) -> float:
        return max(self.length, 2.0 * self.radius)

    def inertia_principal(self) -> tuple[float, float]:
        m = self.mass
        i_perp = m * (self.radius ** 2 + self.length ** 2 / 4.0) / 5.0
        i_par = 2.0 * m * self.radius ** 2 / 5.0
        return i_perp, i_par

    def scaled(self, s: float) -> "Spheroid":
        return Spheroid(length=s * self.length, radius=s * self.radius,
                        density=self.mass_density)


def Sphere(radius: float, density: float | None = None,
           mass_total: float | None = None) -> Spheroid:
    """Uniform sphere, represented as the degenerate spheroid L = 2R."""
    return Spheroid(length=2.0 * radius, radius=radius,
                    density=density, mass_total=mass_total)


@dataclass(frozen=True)
class Atoms:
    """Point-mass configuration: masses (kg) at body-frame positions (m)."""

    masses: tuple = field(default_factory=tuple)
    positions: tuple = field(default_factory=tuple)

    def __post_init__(self):
        masses = tuple(float(m) for m in self.masses)
        positions = tuple(tuple(float(x) for x in p) for p in self.positions)
        if len(masses) == 0:
            raise ValueError("atom list must be nonempty")
        if len(masses) != len(positions):
            raise ValueError("masses and positions must have equal length")
        if any(m <= 0 for m in masses):
            raise ValueError("atom masses must be positive")
        if any(len(p) != 3 for p in positions):
            raise ValueError("positions must be 3-vectors")
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "positions", positions)

    @property
    def mass(self) -> float:
        return float(sum(self.masses))

    @property
    def azimuthally_symmetric(self) -> bool:
        return False

    @property
    def max_extent(self) -> float:
        pos = np.asarray(self.positions)
        if len(pos) == 1:
            return 0.0
        diff = pos[:, None, :] - pos[None, :, :]
        return float(np.sqrt((diff ** 2).sum(axis=-1)).max())

    def masses_array(self) -> np.ndarray:
        return np.asarray(self.masses)

    def positions_array(self) -> np.ndarray:
        return np.asarray(self.positions)

    def inertia_tensor(self) -> np.ndarray:
        """Inertia tensor about the body-frame origin (kg m^2)."""
        m = self.masses_array()
        r = self.positions_array()
        r2 = (r ** 2).sum(axis=1)
        return (m[:, None, None]
                * (r2[:, None, None] * np.eye(3) - r[:, None, :] * r[:, :, None])
                ).sum(axis=0)

    def inertia_principal(self) -> np.ndarray:
        """Principal moments, ascending (kg m^2)."""
        return np.linalg.eigvalsh(self.inertia_tensor())


BodySpec = Cylinder | Spheroid | Atoms


def body_mass_and_inertia(body: BodySpec):
    """Total mass M and principal moments of inertia of a body.

    Returns (M, (I1, I2, I3)) with moments in the body principal frame; for
    azimuthally symmetric bodies the order is (I_perp, I_perp, I_par).
    """
    if isinstance(body, Atoms):
        return body.mass, tuple(body.inertia_principal())
    i_perp, i_par = body.inertia_principal()
    return body.mass, (i_perp, i_perp, i_par)
