"""Analytic magnetostatics of the four-magnet array and coil flux linkage.

Each magnet is a uniformly z-magnetised cuboid with unit relative
permeability, represented by surface charge +/- Br/mu0 on its top and
bottom faces. The flux density outside the magnet is then

    Bz = Br/(4 pi) * sum_faces s * sum_corners (-1)^(i+j) atan(u v / (Z R))

with (u, v) the corner offsets, Z the height above the face and R the
corner distance. Flux through a coil turn is a quadrature of Bz over the
turn area on the coil mid-plane.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from ._validation import check_count, check_positive
from .exceptions import QuadratureError, SingularPointError
from .geometry import MaterialProps

WIREWOUND_RADII_FRACTIONS = (0.05, 0.15)
# half-side of square micro-coil turns: d_i = 0.10 d, d_o = 0.30 d
MICROCOIL_HALF_SIDE_FRACTIONS = (0.05, 0.15)


@dataclass(frozen=True)
class CuboidMagnet:
    center: tuple
    half_extents: tuple
    magnetization_sign: int = 1
    remanence: float = 1.2

    def __post_init__(self):
        if len(self.center) != 3 or len(self.half_extents) != 3:
            raise ValueError("center and half_extents need three components")
        if any(h <= 0 for h in self.half_extents):
            raise ValueError("half_extents must be strictly positive")
        if self.magnetization_sign not in (-1, 1):
            raise ValueError("magnetization_sign must be +1 or -1")
        check_positive(self.remanence, "remanence")


@dataclass(frozen=True)
class MagnetArray:
    """Upper and lower magnet pairs; each pair side by side in x with opposite signs."""

    magnets: tuple

    def __post_init__(self):
        if len(self.magnets) != 4:
            raise ValueError("a MagnetArray holds exactly four magnets")

    def bz(self, points):
        return sum(bz_cuboid(m, points) for m in self.magnets)


@dataclass
class FluxLinkageCurve:
    displacements: np.ndarray
    flux_per_turn: np.ndarray
    fitted_gradient: float = float("nan")
    fit_rms_residual: float = float("nan")
    fit_fraction: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.displacements = np.asarray(self.displacements, dtype=float)
        self.flux_per_turn = np.asarray(self.flux_per_turn, dtype=float)
        if self.displacements.shape != self.flux_per_turn.shape:
            raise ValueError("displacements and flux_per_turn must have equal length")


def _face_sum(du, dv, hx, hy, Z):
    """Signed corner sum of atan(uv/(Z R)) for a rectangle of half sides hx, hy."""
    total = 0.0
    for su in (1.0, -1.0):
        u = du + su * hx
        for sv in (1.0, -1.0):
            v = dv + sv * hy
            R = np.sqrt(u * u + v * v + Z * Z)
            with np.errstate(divide="ignore", invalid="ignore"):
                term = np.arctan(u * v / (Z * R))
            total = total + su * sv * term
    return total


def bz_cuboid(magnet, point):
    """z flux density (T) of a z-magnetised cuboid at ``point``.

    ``point`` is a length-3 sequence or an array of shape (..., 3). Points
    exactly on a charged (top or bottom) face, including its edges, raise
    SingularPointError.
    """
    p = np.asarray(point, dtype=float)
    if p.shape[-1] != 3:
        raise ValueError("point must have a trailing dimension of 3")
    cx, cy, cz = magnet.center
    hx, hy, hz = magnet.half_extents
    # sign convention: (x' - x) for the source offset
    du = cx - p[..., 0]
    dv = cy - p[..., 1]
    result = np.zeros(p.shape[:-1])
    for face_sign in (1.0, -1.0):
        Z = p[..., 2] - (cz + face_sign * hz)
        on_plane = Z == 0
        if np.any(on_plane):
            on_face = on_plane & (np.abs(du) <= hx) & (np.abs(dv) <= hy)
            if np.any(on_face):
                raise SingularPointError("field requested on a charged magnet surface or edge")
        contrib = _face_sum(du, dv, hx, hy, Z)
        # the charge integrand vanishes identically in the face plane off the face
        contrib = np.where(on_plane, 0.0, contrib)
        result = result + face_sign * contrib
    bz = magnet.magnetization_sign * magnet.remanence / (4.0 * math.pi) * result
    inside = ((np.abs(du) < hx) & (np.abs(dv) < hy)
              & (np.abs(p[..., 2] - cz) < hz))
    bz = bz + np.where(inside, magnet.magnetization_sign * magnet.remanence, 0.0)
    return float(bz) if bz.ndim == 0 else bz


def magnet_array(geom, mat=None, displacement=0.0):
    """Four-magnet array of ``geom`` shifted by ``displacement`` along x.

    The coil mid-plane is z = 0 and the polarity boundary sits at
    x = displacement. Vertically aligned magnets share a sign so the gap
    field is along z.
    """
    mat = MaterialProps() if mat is None else mat
    hx = geom.magnet_x / 2.0
    hy = geom.magnet_y / 2.0
    hz = geom.magnet_z / 2.0
    zc = geom.gap / 2.0 + hz
    magnets = []
    for zsign in (1.0, -1.0):
        for xsign, msign in ((-1.0, 1), (1.0, -1)):
            magnets.append(CuboidMagnet(
                center=(displacement + xsign * hx, 0.0, zsign * zc),
                half_extents=(hx, hy, hz),
                magnetization_sign=msign,
                remanence=mat.remanence,
            ))
    return MagnetArray(tuple(magnets))


def _disc_nodes(radius, n):
    r, wr = np.polynomial.legendre.leggauss(n)
    r = 0.5 * radius * (r + 1.0)
    wr = 0.5 * radius * wr
    n_theta = 2 * n
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    weights = np.outer(wr * r, np.full(n_theta, 2.0 * math.pi / n_theta))
    return rr * np.cos(tt), rr * np.sin(tt), weights


def _square_nodes(half_side, n):
    s, w = np.polynomial.legendre.leggauss(n)
    s = half_side * s
    w = half_side * w
    xx, yy = np.meshgrid(s, s, indexing="ij")
    return xx, yy, np.outer(w, w)


def flux_through_turn(array, turn_radius, turn_center=(0.0, 0.0, 0.0), shape="circle",
                      rtol=1e-3, n_start=8, max_refinements=6):
    """Magnetic flux (Wb) through one planar turn parallel to the xy-plane.

    ``shape`` is "circle" (``turn_radius`` is the radius) or "square"
    (``turn_radius`` is the half side). Gauss-Legendre nodes are doubled
    until two successive estimates agree to ``rtol`` of the absolute-flux
    scale.
    """
    check_positive(turn_radius, "turn_radius", allow_zero=True)
    if turn_radius == 0:
        return 0.0
    if shape == "circle":
        nodes = _disc_nodes
    elif shape == "square":
        nodes = _square_nodes
    else:
        raise ValueError(f"unknown turn shape {shape!r}")
    x0, y0, z0 = turn_center
    previous = None
    n = n_start
    for _ in range(max_refinements + 1):
        xx, yy, ww = nodes(turn_radius, n)
        pts = np.stack([xx + x0, yy + y0, np.full_like(xx, z0)], axis=-1)
        bz = array.bz(pts)
        flux = float(np.sum(ww * bz))
        scale = float(np.sum(ww * np.abs(bz)))
        if previous is not None and abs(flux - previous) <= rtol * scale:
            return flux
        previous = flux
        n *= 2
    raise QuadratureError(
        f"flux quadrature did not converge to rtol={rtol} after {max_refinements} refinements")


def default_turn_extent(geom, shape="circle"):
    fractions = WIREWOUND_RADII_FRACTIONS if shape == "circle" else MICROCOIL_HALF_SIDE_FRACTIONS
    return fractions[0] * geom.d, fractions[1] * geom.d


def flux_linkage_curve(geom, mat=None, coil_r_inner=None, coil_r_outer=None, n_samples=21,
                       n_turns_avg=5, shape="circle", rtol=1e-3, fit_fraction=1.0):
    """Average flux per turn against magnet displacement over [-x_m, x_m].

    Turn sizes are ``n_turns_avg`` values spaced uniformly between the
    inner and outer radius (or half side for square turns). The returned
    curve carries its least-squares gradient over ``|x| <= fit_fraction*x_m``.
    """
    mat = MaterialProps() if mat is None else mat
    n_samples = check_count(n_samples, "n_samples", minimum=5)
    if n_samples % 2 == 0:
        raise ValueError("n_samples must be odd so that zero displacement is sampled")
    n_turns_avg = check_count(n_turns_avg, "n_turns_avg")
    r_in_default, r_out_default = default_turn_extent(geom, shape)
    r_in = r_in_default if coil_r_inner is None else coil_r_inner
    r_out = r_out_default if coil_r_outer is None else coil_r_outer
    check_positive(r_in, "coil_r_inner")
    if r_out <= r_in:
        raise ValueError("coil_r_outer must exceed coil_r_inner")
    if r_out > geom.d / 2.0:
        raise ValueError("coil extends beyond the device's lateral footprint")

    radii = np.linspace(r_in, r_out, n_turns_avg)
    # the array is antisymmetric under x -> -x, so only x > 0 is evaluated
    half = np.linspace(0.0, geom.x_m, (n_samples + 1) // 2)
    half_flux = np.zeros(half.size)
    for i, s in enumerate(half[1:], start=1):
        array = magnet_array(geom, mat, displacement=s)
        half_flux[i] = np.mean([flux_through_turn(array, r, shape=shape, rtol=rtol)
                                for r in radii])
    displacements = np.concatenate([-half[:0:-1], half])
    flux = np.concatenate([-half_flux[:0:-1], half_flux])
    curve = FluxLinkageCurve(displacements, flux, meta={
        "d": geom.d, "shape": shape, "r_inner": r_in, "r_outer": r_out,
        "remanence": mat.remanence})
    fit_gradient(curve, fit_fraction=fit_fraction)
    return curve


def _line_fit(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.ptp(x) == 0:
        raise ValueError("line fit needs at least two distinct displacements")
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    return float(slope), float(intercept), residual


def fit_gradient(curve, fit_fraction=1.0):
    """Least-squares slope (Wb/m) of flux against displacement.

    Only samples with ``|x| <= fit_fraction * max|x|`` enter the fit; the
    default uses the whole curve. Stores the slope and the rms residual on
    ``curve`` and returns the slope.
    """
    if not 0 < fit_fraction <= 1:
        raise ValueError("fit_fraction must lie in (0, 1]")
    x = curve.displacements
    half_range = np.max(np.abs(x)) if x.size else 0.0
    # tolerance keeps grid points that land on the window edge by rounding
    mask = np.abs(x) <= fit_fraction * half_range * (1 + 1e-9)
    if mask.sum() < 5:
        raise ValueError("fit_gradient needs at least 5 samples inside the fit window")
    slope, _, residual = _line_fit(x[mask], curve.flux_per_turn[mask])
    curve.fit_fraction = fit_fraction
    curve.fitted_gradient = slope
    curve.fit_rms_residual = float(np.sqrt(np.mean(residual**2)))
    return slope


def line_fit_r2(x, y):
    """Coefficient of determination of a straight-line fit."""
    _, _, residual = _line_fit(x, y)
    y = np.asarray(y, dtype=float)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        return 1.0
    return 1.0 - float(np.sum(residual**2)) / ss_tot


def gradient_from_scaling_law(d, k_phi):
    """Flux-linkage gradient from the linear law ``k_phi * d``."""
    check_positive(k_phi, "k_phi")
    check_positive(d, "d", allow_zero=True)
    return k_phi * d


def calibrate_scaling_constant(geom, mat=None, shape="circle", **curve_kwargs):
    """``k_phi`` such that ``gradient_from_scaling_law`` reproduces ``geom``'s gradient."""
    curve = flux_linkage_curve(geom, mat, shape=shape, **curve_kwargs)
    return curve.fitted_gradient / geom.d
