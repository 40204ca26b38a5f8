"""Generator geometry, materials, mass and kinetic energy.

The device is a cube of side ``d``. Two pairs of oppositely polarised
magnets sit above and below a stationary coil and move together along x.
Every internal dimension is a fixed fraction of ``d``.
"""
from dataclasses import dataclass, fields
import math

import numpy as np

from ._validation import check_fraction, check_positive

_CLOSURE_TOL = 1e-12


@dataclass(frozen=True)
class GeometryRatios:
    """Internal dimensions as fractions of the outer dimension.

    ``magnet_x_fraction`` is per magnet (the moving mass holds two side by
    side), ``magnet_z_fraction`` is the height of one magnet and
    ``gap_fraction`` the air gap holding the coil.
    """

    magnet_x_fraction: float = 1.0 / 6.0
    magnet_z_fraction: float = 0.4
    gap_fraction: float = 0.2
    coil_thickness_fraction_of_gap: float = 0.5

    def __post_init__(self):
        for f in fields(self):
            check_fraction(getattr(self, f.name), f.name,
                           closed_upper=f.name == "coil_thickness_fraction_of_gap")
        if 2 * self.magnet_x_fraction >= 1:
            raise ValueError("two magnets must leave room to move: magnet_x_fraction < 0.5")
        closure = 2 * self.magnet_z_fraction + self.gap_fraction
        if abs(closure - 1.0) > _CLOSURE_TOL:
            raise ValueError(
                f"2*magnet_z_fraction + gap_fraction must equal 1, got {closure!r}")


@dataclass(frozen=True)
class MaterialProps:
    """Magnet and conductor properties (sintered NdFeB, copper)."""

    magnet_density: float = 7600.0
    remanence: float = 1.2
    conductor_resistivity: float = 1.72e-8
    copper_fill_factor: float = 0.55

    def __post_init__(self):
        check_positive(self.magnet_density, "magnet_density")
        check_positive(self.remanence, "remanence")
        check_positive(self.conductor_resistivity, "conductor_resistivity")
        check_fraction(self.copper_fill_factor, "copper_fill_factor", closed_upper=True)


@dataclass(frozen=True)
class DeviceGeometry:
    """All derived lengths of a cubic generator, in metres."""

    d: float
    magnet_x: float
    x_mass: float
    magnet_y: float
    magnet_z: float
    gap: float
    coil_thickness: float
    x_m: float

    def scaled(self, factor):
        """Copy with every length multiplied by ``factor``."""
        check_positive(factor, "factor")
        return DeviceGeometry(**{f.name: getattr(self, f.name) * factor for f in fields(self)})

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def derive_geometry(d, ratios=None):
    """Derive the internal dimensions of a cube of side ``d``.

    >>> g = derive_geometry(10e-3)
    >>> round(g.magnet_z * 1e3, 9), round(g.gap * 1e3, 9)
    (4.0, 2.0)
    """
    check_positive(d, "d")
    ratios = GeometryRatios() if ratios is None else ratios
    magnet_x = ratios.magnet_x_fraction * d
    x_mass = 2.0 * magnet_x
    magnet_z = ratios.magnet_z_fraction * d
    # closing the z-stack from the magnet height keeps 2*magnet_z + gap == d
    gap = d - 2.0 * magnet_z
    return DeviceGeometry(
        d=d,
        magnet_x=magnet_x,
        x_mass=x_mass,
        magnet_y=d,
        magnet_z=magnet_z,
        gap=gap,
        coil_thickness=ratios.coil_thickness_fraction_of_gap * gap,
        x_m=(d - x_mass) / 2.0,
    )


def moving_mass(geom, mat=None):
    """Mass of the four magnets in kg (keeper and coil excluded)."""
    mat = MaterialProps() if mat is None else mat
    return mat.magnet_density * geom.x_mass * geom.magnet_y * 2.0 * geom.magnet_z


def kinetic_energy(x_mass, x, y, z_mass, density, omega):
    """Peak kinetic energy of a mass oscillating sinusoidally inside extent ``x``.

    The peak displacement is ``(x - x_mass) / 2``, so the energy is
    ``density*y*z_mass*x_mass*omega**2*(x - x_mass)**2/8``.
    Accepts numpy arrays for ``x_mass``.
    """
    x_mass = np.asarray(x_mass, dtype=float)
    if np.any(x_mass < 0) or np.any(x_mass > x):
        raise ValueError("x_mass must lie in [0, x]")
    if omega < 0:
        raise ValueError("omega must be >= 0")
    ke = density * y * z_mass * x_mass * omega**2 * (x - x_mass) ** 2 / 8.0
    return float(ke) if ke.ndim == 0 else ke


def device_kinetic_energy(geom, mat, omega):
    """Kinetic energy of the moving magnets of ``geom`` at angular frequency ``omega``."""
    return kinetic_energy(geom.x_mass, geom.d, geom.magnet_y, 2.0 * geom.magnet_z,
                          mat.magnet_density, omega)


def optimal_mass_extent(x):
    """Mass x-extent maximising kinetic energy: one third of ``x``.

    Setting d(KE)/d(x_mass) = 0 gives (x - x_mass)(x - 3 x_mass) = 0.
    """
    check_positive(x, "x")
    return x / 3.0


def angular_frequency(frequency_hz):
    return 2.0 * math.pi * frequency_hz
