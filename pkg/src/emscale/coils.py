"""Wire-wound and single-layer micro-fabricated coil models.

Wire-wound (multilayer, circular):

    R_c = rho * N**2 * pi * (r_o + r_i) / (k_cu * (r_o - r_i) * t)

Micro-fabricated (single layer, track width = spacing = thickness):

    R_c = 8 rho (d_o + d_i) / (d_o - d_i)**2 * (4 N**3 - 4 N**2 + N)

Inductance is neglected throughout.
"""
from dataclasses import dataclass
import math

import numpy as np

from ._validation import check_count, check_fraction, check_positive
from .geometry import MaterialProps
from .magnetics import MICROCOIL_HALF_SIDE_FRACTIONS, WIREWOUND_RADII_FRACTIONS

WIREWOUND = "wirewound"
MICRO = "micro"
TECHNOLOGIES = (WIREWOUND, MICRO)


@dataclass(frozen=True)
class TechnologyLimits:
    min_wire_diameter: float = 12e-6
    min_feature: float = 1e-6

    def __post_init__(self):
        check_positive(self.min_wire_diameter, "min_wire_diameter")
        check_positive(self.min_feature, "min_feature")


@dataclass(frozen=True)
class WireWoundCoil:
    r_inner: float
    r_outer: float
    thickness: float
    turns: int
    fill_factor: float = 0.55
    resistivity: float = 1.72e-8

    def __post_init__(self):
        check_positive(self.r_inner, "r_inner")
        check_positive(self.thickness, "thickness")
        if self.r_outer <= self.r_inner:
            raise ValueError("r_outer must exceed r_inner")
        check_count(self.turns, "turns")
        check_fraction(self.fill_factor, "fill_factor", closed_upper=True)
        check_positive(self.resistivity, "resistivity")

    @property
    def cross_section(self):
        return (self.r_outer - self.r_inner) * self.thickness

    @property
    def wire_diameter(self):
        return 2.0 * math.sqrt(self.fill_factor * self.cross_section / (math.pi * self.turns))


@dataclass(frozen=True)
class MicroCoil:
    d_outer: float
    d_inner: float
    turns: int
    resistivity: float = 1.72e-8

    def __post_init__(self):
        check_positive(self.d_inner, "d_inner")
        if self.d_outer <= self.d_inner:
            raise ValueError("d_outer must exceed d_inner")
        check_count(self.turns, "turns")
        check_positive(self.resistivity, "resistivity")

    @property
    def track_width(self):
        return (self.d_outer - self.d_inner) / (2.0 * (2 * self.turns - 1))


@dataclass(frozen=True)
class CoilElectrical:
    resistance: float
    turns: int
    inductance: float = 0.0


def wirewound_alpha(r_inner, r_outer, thickness, fill_factor, resistivity):
    """Resistance per turn squared, R_c / N**2, of a wire-wound coil."""
    return resistivity * math.pi * (r_outer + r_inner) / (
        fill_factor * (r_outer - r_inner) * thickness)


def microcoil_beta(d_outer, d_inner, resistivity):
    """R_c / (4N^3 - 4N^2 + N) of a single-layer micro coil."""
    return 8.0 * resistivity * (d_outer + d_inner) / (d_outer - d_inner) ** 2


def microcoil_turn_polynomial(n):
    n = np.asarray(n, dtype=float)
    return 4.0 * n**3 - 4.0 * n**2 + n


def wirewound_resistance(coil, limits=None):
    """Coil resistance (ohm); raises if the implied wire is thinner than allowed."""
    if limits is not None and coil.wire_diameter < limits.min_wire_diameter * (1 - 1e-12):
        raise ValueError(
            f"{coil.turns} turns need {coil.wire_diameter:.3e} m wire, below the "
            f"{limits.min_wire_diameter:.3e} m minimum")
    alpha = wirewound_alpha(coil.r_inner, coil.r_outer, coil.thickness,
                            coil.fill_factor, coil.resistivity)
    return alpha * coil.turns**2


def microcoil_resistance(coil, limits=None):
    """Coil resistance (ohm); raises if the track is narrower than the minimum feature."""
    if limits is not None and coil.track_width < limits.min_feature * (1 - 1e-12):
        raise ValueError(
            f"{coil.turns} turns need {coil.track_width:.3e} m tracks, below the "
            f"{limits.min_feature:.3e} m minimum feature")
    beta = microcoil_beta(coil.d_outer, coil.d_inner, coil.resistivity)
    return beta * float(microcoil_turn_polynomial(coil.turns))


def microcoil_resistance_geometric(coil):
    """Same resistance from track length over track cross-section (w = t)."""
    w = coil.track_width
    mean_turn_length = 2.0 * (coil.d_outer + coil.d_inner)
    return coil.resistivity * coil.turns * mean_turn_length / (w * w)


def max_turns_wirewound(coil_area, fill_factor, limits=None):
    """Most turns of minimum-diameter wire that fit ``coil_area`` at ``fill_factor``."""
    limits = TechnologyLimits() if limits is None else limits
    check_positive(coil_area, "coil_area")
    wire_area = math.pi * (limits.min_wire_diameter / 2.0) ** 2
    n = math.floor(fill_factor * coil_area / wire_area * (1 + 1e-12))
    if n < 1:
        raise ValueError("coil cross-section cannot hold a single minimum-diameter wire")
    return n


def max_turns_microcoil(d_outer, d_inner, limits=None):
    """Largest N whose track width (d_o - d_i)/(2(2N-1)) is at least the minimum feature."""
    limits = TechnologyLimits() if limits is None else limits
    if d_outer <= d_inner:
        raise ValueError("d_outer must exceed d_inner")
    ratio = (d_outer - d_inner) / (2.0 * limits.min_feature)
    n = math.floor((ratio * (1 + 1e-12) + 1.0) / 2.0)
    if n < 1:
        raise ValueError("coil annulus is narrower than one minimum feature")
    return n


@dataclass(frozen=True)
class CoilFamily:
    """All coils of one technology that fit a device, parametrised by turn count.

    ``resistance(N)`` is vectorised over N.
    """

    technology: str
    constant: float
    max_turns: int
    turn_extent: tuple

    def resistance(self, turns):
        turns = np.asarray(turns, dtype=float)
        if self.technology == WIREWOUND:
            r = self.constant * turns**2
        else:
            r = self.constant * microcoil_turn_polynomial(turns)
        return float(r) if r.ndim == 0 else r


def coil_family(geom, technology, mat=None, limits=None, extent_fractions=None):
    """Coil family for ``geom`` using the default lateral extents of each technology."""
    mat = MaterialProps() if mat is None else mat
    limits = TechnologyLimits() if limits is None else limits
    if technology == WIREWOUND:
        lo, hi = WIREWOUND_RADII_FRACTIONS if extent_fractions is None else extent_fractions
        r_i, r_o = lo * geom.d, hi * geom.d
        t = geom.coil_thickness
        alpha = wirewound_alpha(r_i, r_o, t, mat.copper_fill_factor, mat.conductor_resistivity)
        n_max = max_turns_wirewound((r_o - r_i) * t, mat.copper_fill_factor, limits)
        return CoilFamily(WIREWOUND, alpha, n_max, (r_i, r_o))
    if technology == MICRO:
        lo, hi = MICROCOIL_HALF_SIDE_FRACTIONS if extent_fractions is None else extent_fractions
        d_i, d_o = 2 * lo * geom.d, 2 * hi * geom.d
        beta = microcoil_beta(d_o, d_i, mat.conductor_resistivity)
        n_max = max_turns_microcoil(d_o, d_i, limits)
        return CoilFamily(MICRO, beta, n_max, (d_i, d_o))
    raise ValueError(f"unknown coil technology {technology!r}; expected one of {TECHNOLOGIES}")
