"""Scaling study and design optimiser for electromagnetic vibration generators."""
from .coils import MICRO, WIREWOUND, coil_family, max_turns_microcoil, max_turns_wirewound
from .dynamics import ElectricalLink, OperatingPoint, average_power, max_power
from .exceptions import (ConfigError, InfeasibleDesignError, IntegrationDivergedError,
                         QuadratureError, SingularPointError)
from .geometry import (DeviceGeometry, GeometryRatios, MaterialProps, derive_geometry,
                       kinetic_energy, moving_mass)
from .magnetics import CuboidMagnet, bz_cuboid, flux_linkage_curve, magnet_array
from .optimizer import (DISPLACEMENT_RULE, FIXED_Q, DesignResult, design_problem,
                        optimize_design, sweep_dimensions)
from .transient import SimulationConfig, harmonic_distortion, simulate

__version__ = "0.1.0"
