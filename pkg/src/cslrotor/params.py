"""Physical constants, CSL model parameters and the unit discipline.

Everything in this package is SI internally: lengths in meters, masses in
kilograms, rates in 1/s, momentum diffusion in kg^2 m^2 / s^3, angular
momentum diffusion in (J s)^2 / s.  Dimensionless reduced variables are
formed only inside formulas, never stored.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fixed CODATA values, compiled in and never mutated at runtime.

    hbar : reduced Planck constant (J s)
    k_B  : Boltzmann constant (J/K)
    amu  : atomic mass unit (kg)
    """

    hbar: float = 1.054571817e-34
    k_B: float = 1.380649e-23
    amu: float = 1.66053906660e-27

    def __post_init__(self):
        if not (self.hbar > 0 and self.k_B > 0 and self.amu > 0):
            raise ValueError("physical constants must be strictly positive")


CONSTANTS = PhysicalConstants()

HBAR = CONSTANTS.hbar
K_B = CONSTANTS.k_B
AMU = CONSTANTS.amu

# Mass densities (kg/m^3) for bodies specified by material name.  Silicon is
# the default material for the nanoparticle heating scenarios; the value is a
# config default, not a measured input.
MATERIAL_DENSITIES = {
    "silicon": 2329.0,
    "silica": 2200.0,
    "gold": 19300.0,
}


@dataclass(frozen=True)
class CslParams:
    """Parameters of the continuous spontaneous localization model.

    lambda_c : collapse rate (1/s), >= 0
    r_c      : localization length (m), > 0
    m0       : reference mass (kg), > 0; defaults to 1 amu, the standard
               convention in the collapse-model literature.
    """

    lambda_c: float
    r_c: float
    m0: float = AMU

    def __post_init__(self):
        if self.lambda_c < 0:
            raise ValueError(f"lambda_c must be >= 0, got {self.lambda_c}")
        if self.r_c <= 0:
            raise ValueError(f"r_c must be > 0, got {self.r_c}")
        if self.m0 <= 0:
            raise ValueError(f"m0 must be > 0, got {self.m0}")

    def with_r_c(self, r_c: float) -> "CslParams":
        """Copy with a different localization length (for r_c sweeps)."""
        return CslParams(lambda_c=self.lambda_c, r_c=r_c, m0=self.m0)

    def with_lambda_c(self, lambda_c: float) -> "CslParams":
        """Copy with a different collapse rate."""
        return CslParams(lambda_c=lambda_c, r_c=self.r_c, m0=self.m0)
