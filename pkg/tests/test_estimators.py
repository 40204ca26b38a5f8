import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from emscale.coils import MICRO, WIREWOUND
from emscale.estimators import (DESIGN_FEATURES, FluxGradientRegressor, HarvesterDesigner,
                                check_dimensions)
from emscale.geometry import derive_geometry
from emscale.magnetics import fit_gradient, flux_linkage_curve
from emscale.optimizer import FIXED_Q, design_problem, optimize_design

D = np.array([[2e-3], [4e-3], [6e-3]])


def test_params_round_trip():
    est = HarvesterDesigner(technology=MICRO, q=500.0)
    params = est.get_params()
    assert params["technology"] == MICRO and params["q"] == 500.0
    assert clone(est).get_params() == params
    est.set_params(q_mode=FIXED_Q)
    assert est.q_mode == FIXED_Q


def test_analytic_source_matches_optimizer():
    est = HarvesterDesigner(gradient_source="analytic").fit(D)
    p = est.predict(D)
    for d, value in zip(D[:, 0], p):
        assert value == optimize_design(design_problem(float(d), WIREWOUND)).p_load


def test_scaling_source_close_to_analytic():
    a = HarvesterDesigner(gradient_source="analytic").fit(D).predict(D)
    s = HarvesterDesigner().fit(D).predict(D)
    assert np.allclose(s, a, rtol=0.02)


def test_transform_shape_and_nan_rows():
    est = HarvesterDesigner(limits=None).fit(D)
    out = est.transform(D)
    assert out.shape == (3, len(DESIGN_FEATURES))
    assert np.all(np.isfinite(out))
    from emscale.coils import TechnologyLimits
    est = HarvesterDesigner(limits=TechnologyLimits(min_wire_diameter=1e-3)).fit(D)
    assert np.all(np.isnan(est.transform(D)[:, DESIGN_FEATURES.index("p_load")]))


def test_unfitted_and_bad_inputs():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        HarvesterDesigner().predict(D)
    with pytest.raises(ValueError):
        HarvesterDesigner(gradient_source="fea").fit(D)
    with pytest.raises(ValueError):
        check_dimensions([[1e-3, 2e-3]])
    with pytest.raises(ValueError):
        check_dimensions([-1e-3])
    assert check_dimensions([1e-3, 2e-3]).shape == (2,)


def test_usable_in_pipeline():
    pipe = make_pipeline(HarvesterDesigner(gradient_source="analytic"))
    assert pipe.fit_transform(D).shape == (3, len(DESIGN_FEATURES))


def test_flux_regressor_matches_fit_gradient():
    curve = flux_linkage_curve(derive_geometry(6e-3), n_samples=21)
    reg = FluxGradientRegressor(fit_fraction=0.25).fit(curve.displacements[:, None],
                                                        curve.flux_per_turn)
    assert reg.gradient_ == pytest.approx(fit_gradient(curve, 0.25), rel=1e-12)
    assert reg.predict([[0.0]])[0] == pytest.approx(reg.intercept_)
    with pytest.raises(ValueError):
        FluxGradientRegressor(fit_fraction=0).fit([[0.0], [1.0]], [0, 1])
