import doctest
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from emscale import geometry
from emscale.geometry import (GeometryRatios, MaterialProps, angular_frequency,
                              derive_geometry, device_kinetic_energy, kinetic_energy,
                              moving_mass, optimal_mass_extent)

dims = st.floats(min_value=1e-4, max_value=0.1)


def test_doctests():
    assert doctest.testmod(geometry).failed == 0


def test_reference_device_10mm():
    g = derive_geometry(10e-3)
    assert g.magnet_x == pytest.approx(10e-3 / 6)
    assert g.x_mass == pytest.approx(10e-3 / 3)
    assert g.magnet_y == 10e-3
    assert g.magnet_z == pytest.approx(4e-3)
    assert g.gap == pytest.approx(2e-3)
    assert g.coil_thickness == pytest.approx(1e-3)
    assert g.x_m == pytest.approx(10e-3 / 3)


def test_reference_mass_and_energy():
    g = derive_geometry(10e-3)
    mat = MaterialProps()
    # 7600 kg/m^3 * (10/3 mm) * 10 mm * 8 mm
    assert moving_mass(g, mat) == pytest.approx(7600 * (1e-2 / 3) * 1e-2 * 8e-3, rel=1e-12)
    assert moving_mass(g, mat) * 1e3 == pytest.approx(2.0267, abs=1e-4)
    ke = device_kinetic_energy(g, mat, angular_frequency(1000.0))
    assert ke == pytest.approx(0.4445, abs=1e-4)


def test_kinetic_energy_matches_half_m_v_squared():
    # independent route: mass times peak velocity of a sine with amplitude (x - x_mass)/2
    x, y, z, rho, w = 0.01, 0.01, 0.008, 7600.0, 2 * math.pi * 50
    for xm in (0.001, 0.0033, 0.007):
        m = rho * xm * y * z
        v = w * (x - xm) / 2
        assert kinetic_energy(xm, x, y, z, rho, w) == pytest.approx(0.5 * m * v * v, rel=1e-12)


def test_optimum_partition_grid():
    x = 0.01
    grid = np.linspace(0, x, 10_001)
    ke = kinetic_energy(grid, x, 0.01, 0.008, 7600.0, 6283.0)
    assert abs(grid[np.argmax(ke)] - optimal_mass_extent(x)) <= x / 10_000
    assert ke[0] == 0 and ke[-1] == 0


def test_kinetic_energy_rejects_mass_outside_extent():
    with pytest.raises(ValueError):
        kinetic_energy(0.02, 0.01, 0.01, 0.01, 7600, 1.0)
    with pytest.raises(ValueError):
        kinetic_energy(-1e-3, 0.01, 0.01, 0.01, 7600, 1.0)


@pytest.mark.parametrize("kwargs", [
    {"magnet_z_fraction": 0.3},  # breaks closure with the default gap
    {"magnet_x_fraction": 0.5},
    {"gap_fraction": 0.0, "magnet_z_fraction": 0.5},
    {"coil_thickness_fraction_of_gap": 1.2},
])
def test_bad_ratios_rejected(kwargs):
    with pytest.raises(ValueError):
        GeometryRatios(**kwargs)


@pytest.mark.parametrize("d", [0.0, -1e-3, float("nan"), float("inf")])
def test_bad_dimension_rejected(d):
    with pytest.raises(ValueError):
        derive_geometry(d)


def test_material_validation():
    with pytest.raises(ValueError):
        MaterialProps(copper_fill_factor=1.5)
    with pytest.raises(ValueError):
        MaterialProps(remanence=0.0)


@given(dims)
def test_z_stack_closes(d):
    g = derive_geometry(d)
    assert 2 * g.magnet_z + g.gap == pytest.approx(d, rel=1e-12)
    assert g.x_mass + 2 * g.x_m == pytest.approx(d, rel=1e-12)


@given(dims, st.floats(min_value=0.1, max_value=10))
def test_geometry_scales_linearly(d, k):
    a = derive_geometry(d).scaled(k).as_dict()
    b = derive_geometry(d * k).as_dict()
    for key in a:
        assert a[key] == pytest.approx(b[key], rel=1e-12)


@given(dims, st.floats(min_value=0.1, max_value=10))
def test_kinetic_energy_is_fifth_power(d, k):
    mat = MaterialProps()
    w = angular_frequency(1000.0)
    ratio = (device_kinetic_energy(derive_geometry(d * k), mat, w)
             / device_kinetic_energy(derive_geometry(d), mat, w))
    assert ratio == pytest.approx(k**5, rel=1e-9)


@given(st.floats(min_value=1e-3, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
def test_third_is_global_maximum(x, frac):
    best = kinetic_energy(x / 3, x, 1.0, 1.0, 1.0, 1.0)
    assert kinetic_energy(frac * x, x, 1.0, 1.0, 1.0, 1.0) <= best * (1 + 1e-12)
