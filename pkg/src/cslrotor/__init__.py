"""Decoherence observables of rigid anisotropic bodies under continuous
spontaneous localization: orientational localization rates, momentum
diffusion coefficients, exact planar-rotor phase-space evolution, and
collapse-parameter exclusion curves.
"""

from .bodies import (Atoms, BodySpec, Cylinder, Sphere, Spheroid,
                     body_mass_and_inertia)
from .diffusion import (DiffusionSet, HeatingRates, cylinder_diffusion_closed,
                        diffusion_coefficients, diffusion_curve,
                        diffusion_from_tensors, heating_rates)
from .exclusion import (ChannelInsensitiveError, ExclusionCurve,
                        HeatingMeasurement, IntersectionError,
                        IntersectionResult, default_r_c_grid, exclusion_curve,
                        forward_heating, intersect, lambda_bound)
from .formfactor import (atoms_ff, cylinder_ff, form_factor, sphere_ff,
                         spheroid_ff)
from .localization import (GeometryTensors, cm_loc_rate, geometry_tensors,
                           loc_rate_axis_angle, loc_rate_curve, loc_rate_full,
                           loc_rate_small, rot_loc_rate,
                           rot_loc_rate_small_angle)
from .orientation import Orientation, axis_angle_between, relative_orientation
from .params import (AMU, CONSTANTS, HBAR, K_B, MATERIAL_DENSITIES, CslParams,
                     PhysicalConstants)
from .planar import (PlanarParams, PlanarWignerState, TruncationError,
                     evolve_exact, evolve_ode, initial_cos_squeezed, kernel,
                     marginals, mean_orientation, product_state, snapshot_csv,
                     suppression_factor, variance_csl, variance_free,
                     variance_of_state)
from .quadrature import (QuadratureConvergenceError, QuadratureScheme,
                         QuadratureSpec, integrate_1d, integrate_axisymmetric,
                         integrate_box, integrate_radial_angular)

__version__ = "0.1.0"
