"""scikit-learn compatible wrappers around the design pipeline.

``HarvesterDesigner`` treats each row of ``X`` as one device dimension (m).
``fit`` calibrates the flux-gradient scaling constant, ``transform`` returns
the optimised design quantities and ``predict`` the load power, so the
optimiser can be dropped into pipelines, grid searches and cross-validation
helpers that expect the estimator API.
"""
import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .coils import WIREWOUND
from .exceptions import InfeasibleDesignError
from .geometry import GeometryRatios, MaterialProps, derive_geometry
from .magnetics import _line_fit, gradient_from_scaling_law
from .optimizer import (DISPLACEMENT_RULE, _infeasible_row, design_problem, optimize_design,
                        technology_flux_gradient)

DESIGN_FEATURES = ("q_oc", "turns", "coil_resistance", "load_resistance", "parasitic_damping",
                   "em_damping", "displacement", "p_max", "p_extracted", "p_load", "v_load_rms")


def check_dimensions(X):
    """Validate a column of device dimensions and return it as a 1-d array."""
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column of dimensions, got {X.shape[1]} columns")
        X = X[:, 0]
    if np.any(X <= 0):
        raise ValueError("device dimensions must be strictly positive")
    return X


class FluxGradientRegressor(RegressorMixin, BaseEstimator):
    """Straight-line model of flux per turn against displacement.

    Parameters
    ----------
    fit_fraction : float, default=1.0
        Only samples with ``|x| <= fit_fraction * max|x|`` are fitted.
    """

    def __init__(self, fit_fraction=1.0):
        self.fit_fraction = fit_fraction

    def fit(self, X, y):
        x = check_array(X, dtype=float)[:, 0]
        y = np.asarray(y, dtype=float)
        if not 0 < self.fit_fraction <= 1:
            raise ValueError("fit_fraction must lie in (0, 1]")
        mask = np.abs(x) <= self.fit_fraction * np.max(np.abs(x)) * (1 + 1e-9)
        slope, intercept, residual = _line_fit(x[mask], y[mask])
        self.gradient_ = slope
        self.intercept_ = intercept
        self.rms_residual_ = float(np.sqrt(np.mean(residual**2)))
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self)
        x = check_array(X, dtype=float)[:, 0]
        return self.gradient_ * x + self.intercept_


class HarvesterDesigner(TransformerMixin, BaseEstimator):
    """Optimal coil and load design for a column of device dimensions.

    With ``gradient_source="scaling"`` the flux gradient at each dimension
    is ``k_phi_ * d``, where ``k_phi_`` is calibrated once by the analytic
    field model at the median fitted dimension. ``"analytic"`` evaluates
    the field model at every dimension.
    """

    def __init__(self, technology=WIREWOUND, q_mode=DISPLACEMENT_RULE, q=300.0,
                 frequency=1000.0, acceleration=9.81, materials=None, ratios=None,
                 limits=None, r_load_min=0.1, gradient_source="scaling"):
        self.technology = technology
        self.q_mode = q_mode
        self.q = q
        self.frequency = frequency
        self.acceleration = acceleration
        self.materials = materials
        self.ratios = ratios
        self.limits = limits
        self.r_load_min = r_load_min
        self.gradient_source = gradient_source

    def _materials(self):
        return MaterialProps() if self.materials is None else self.materials

    def _ratios(self):
        return GeometryRatios() if self.ratios is None else self.ratios

    def fit(self, X, y=None):
        d = check_dimensions(X)
        if self.gradient_source not in ("scaling", "analytic"):
            raise ValueError("gradient_source must be 'scaling' or 'analytic'")
        self.reference_dimension_ = float(np.median(d))
        geom = derive_geometry(self.reference_dimension_, self._ratios())
        gradient = technology_flux_gradient(geom, self._materials(), self.technology)
        self.k_phi_ = gradient / self.reference_dimension_
        self.n_features_in_ = 1
        return self

    def _gradient(self, d):
        if self.gradient_source == "scaling":
            return gradient_from_scaling_law(d, self.k_phi_)
        return technology_flux_gradient(derive_geometry(d, self._ratios()), self._materials(),
                                        self.technology)

    def design(self, X):
        """Full DesignResult for each dimension; unbuildable points are flagged rows."""
        check_is_fitted(self)
        results = []
        for d in check_dimensions(X):
            d = float(d)
            problem = design_problem(
                d, self.technology, q_mode=self.q_mode, q=self.q, frequency=self.frequency,
                acceleration=self.acceleration, materials=self._materials(),
                ratios=self._ratios(), limits=self.limits, r_load_min=self.r_load_min,
                flux_gradient=self._gradient(d))
            try:
                results.append(optimize_design(problem))
            except InfeasibleDesignError as exc:
                results.append(_infeasible_row(d, self.technology, self.q_mode, str(exc)))
        return results

    def transform(self, X):
        """Array of shape (n, len(DESIGN_FEATURES)); NaN rows for infeasible points."""
        rows = self.design(X)
        return np.array([[float(getattr(r, f)) for f in DESIGN_FEATURES] for r in rows])

    def predict(self, X):
        """Power delivered to the load (W) for each dimension."""
        return self.transform(X)[:, DESIGN_FEATURES.index("p_load")]
