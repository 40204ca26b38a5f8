"""Choice of coil turns and load resistance that maximise load power.

Two candidate loads are evaluated for every admissible turn count N:

* matched damping, R_l = N^2 g^2 / D_p - R_c, which makes D_e = D_p and
  extracts the theoretical maximum (ma)^2 / (8 D_p);
* impedance matching, R_l = R_c, the classical maximum-power-transfer load
  used when parasitic damping dominates.

A candidate that lets the magnets travel further than x_m has its load
lowered until the amplitude equals x_m, or is dropped if that needs a load
below ``r_load_min``. If no turn count can respect the travel limit, the
best impedance-matched candidate is returned with ``displacement_ok`` false.
"""
from dataclasses import asdict, dataclass, field
from functools import lru_cache
import math

import numpy as np
from joblib import Parallel, delayed

from ._validation import check_positive
from .coils import MICRO, TECHNOLOGIES, WIREWOUND, TechnologyLimits, coil_family
from .dynamics import max_power, parasitic_damping_from_q, required_q_for_displacement
from .exceptions import InfeasibleDesignError
from .geometry import GeometryRatios, MaterialProps, angular_frequency, derive_geometry, moving_mass
from .magnetics import flux_linkage_curve

MATCHED = "matched-damping"
IMPEDANCE = "impedance-matched"
DISPLACEMENT_LIMITED = "displacement-limited"

DISPLACEMENT_RULE = "displacement-rule"
FIXED_Q = "fixed"
Q_MODES = (DISPLACEMENT_RULE, FIXED_Q)

EXHAUSTIVE_TURN_LIMIT = 100_000
_REL_TOL = 1e-9


@dataclass(frozen=True)
class DesignProblem:
    geometry: object
    technology: str
    flux_gradient: float
    q_oc: float
    omega: float
    acceleration: float = 9.81
    materials: MaterialProps = field(default_factory=MaterialProps)
    limits: TechnologyLimits = field(default_factory=TechnologyLimits)
    r_load_min: float = 0.1
    q_mode: str = FIXED_Q

    def __post_init__(self):
        if self.technology not in TECHNOLOGIES:
            raise ValueError(f"unknown coil technology {self.technology!r}")
        check_positive(self.q_oc, "q_oc")
        check_positive(self.omega, "omega")
        check_positive(self.acceleration, "acceleration")
        check_positive(self.r_load_min, "r_load_min", allow_zero=True)
        if not math.isfinite(self.flux_gradient) or self.flux_gradient == 0:
            raise ValueError("flux_gradient must be finite and non-zero")


@dataclass(frozen=True)
class DesignResult:
    d: float
    technology: str
    q_mode: str
    q_oc: float
    strategy: str
    turns: int
    coil_resistance: float
    load_resistance: float
    parasitic_damping: float
    em_damping: float
    displacement: float
    x_m: float
    p_max: float
    p_extracted: float
    p_load: float
    v_load_rms: float
    flux_gradient: float
    feasible: bool = True
    displacement_ok: bool = True
    message: str = ""

    @property
    def v_load_amplitude(self):
        return self.v_load_rms * math.sqrt(2.0)

    def as_dict(self):
        return asdict(self)


# The magnets leave the coil towards full travel, so the flux curve turns
# over beyond about x_m/2. Designs use the slope of the central linear part.
DESIGN_FIT_FRACTION = 0.25


@lru_cache(maxsize=512)
def technology_flux_gradient(geom, mat, technology, n_samples=21, n_turns_avg=5,
                             fit_fraction=DESIGN_FIT_FRACTION):
    """Line-fit flux gradient for the coil shape used by ``technology``."""
    shape = "circle" if technology == WIREWOUND else "square"
    curve = flux_linkage_curve(geom, mat, n_samples=n_samples, n_turns_avg=n_turns_avg,
                               shape=shape, fit_fraction=fit_fraction)
    return curve.fitted_gradient


def design_problem(d, technology, q_mode=DISPLACEMENT_RULE, q=300.0, frequency=1000.0,
                   acceleration=9.81, materials=None, ratios=None, limits=None,
                   r_load_min=0.1, flux_gradient=None):
    """Build a DesignProblem for a cube of side ``d``.

    With ``q_mode="displacement-rule"`` the open-circuit Q is the one that
    lets the unloaded magnets travel 2 x_m; otherwise ``q`` is used.
    """
    materials = MaterialProps() if materials is None else materials
    limits = TechnologyLimits() if limits is None else limits
    geom = derive_geometry(d, ratios if ratios is not None else GeometryRatios())
    omega = angular_frequency(check_positive(frequency, "frequency"))
    if q_mode == DISPLACEMENT_RULE:
        q_oc = required_q_for_displacement(geom.x_m, omega, acceleration)
    elif q_mode == FIXED_Q:
        q_oc = check_positive(q, "q")
    else:
        raise ValueError(f"unknown q_mode {q_mode!r}; expected one of {Q_MODES}")
    if flux_gradient is None:
        flux_gradient = technology_flux_gradient(geom, materials, technology)
    return DesignProblem(geom, technology, flux_gradient, q_oc, omega, acceleration,
                         materials, limits, r_load_min, q_mode)


def _candidate_turns(n_max):
    if n_max <= EXHAUSTIVE_TURN_LIMIT:
        return np.arange(1, n_max + 1)
    # beyond the limit only the boundary matters: wire-wound load share is N-independent
    head = np.arange(1, EXHAUSTIVE_TURN_LIMIT + 1)
    tail = np.unique(np.round(np.geomspace(EXHAUSTIVE_TURN_LIMIT, n_max, 512)).astype(np.int64))
    return np.unique(np.concatenate([head, tail, [n_max]]))


def _evaluate(turns, r_coil, r_load, g, d_p, force, omega):
    with np.errstate(divide="ignore", invalid="ignore"):
        d_e = turns**2 * g**2 / (r_coil + r_load)
        total = d_p + d_e
        x = force / (total * omega)
        p_ext = d_e * force**2 / (2.0 * total**2)
        share = r_load / (r_coil + r_load)
        p_load = p_ext * share
        v_rms = turns * abs(g) * omega * x / math.sqrt(2.0) * share
    return {"turns": turns, "r_coil": r_coil, "r_load": r_load, "d_e": d_e,
            "x": x, "p_ext": p_ext, "p_load": p_load, "v_rms": v_rms}


def _select(cands):
    """Index of the best candidate: max P_load, then max V_load, then min N."""
    p = cands["p_load"]
    best = np.max(p)
    tied = p >= best * (1 - _REL_TOL)
    v = np.where(tied, cands["v_rms"], -np.inf)
    tied &= v >= np.max(v) * (1 - _REL_TOL)
    n = np.where(tied, cands["turns"], np.inf)
    return int(np.argmin(n))


def _concat(parts):
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


def optimize_design(problem, max_turns=None):
    """Search turns and load resistance for maximum load power.

    ``max_turns`` optionally caps the technology limit on N.
    Raises InfeasibleDesignError when no coil can be built or loaded.
    """
    geom = problem.geometry
    mat = problem.materials
    try:
        family = coil_family(geom, problem.technology, mat, problem.limits)
    except ValueError as exc:
        raise InfeasibleDesignError(str(exc)) from exc
    n_max = family.max_turns if max_turns is None else min(max_turns, family.max_turns)
    if n_max < 1:
        raise InfeasibleDesignError("no admissible turn count")

    mass = moving_mass(geom, mat)
    omega = problem.omega
    force = mass * problem.acceleration
    d_p = parasitic_damping_from_q(mass, omega, problem.q_oc)
    p_max = max_power(mass, problem.acceleration, d_p)
    g = problem.flux_gradient
    x_limit = geom.x_m * (1 + _REL_TOL)
    r_min = problem.r_load_min

    turns = _candidate_turns(n_max).astype(float)
    r_coil = family.resistance(turns)
    r_coil = np.atleast_1d(r_coil)

    matched = _evaluate(turns, r_coil, turns**2 * g**2 / d_p - r_coil, g, d_p, force, omega)
    impedance = _evaluate(turns, r_coil, r_coil.copy(), g, d_p, force, omega)
    labels = np.array([MATCHED] * turns.size + [IMPEDANCE] * turns.size, dtype=object)
    cands = _concat([matched, impedance])

    # lower the load of any under-damped candidate until travel equals x_m
    over = cands["x"] > x_limit
    d_e_needed = force / (omega * geom.x_m) - d_p
    with np.errstate(divide="ignore"):
        r_repair = cands["turns"] ** 2 * g**2 / d_e_needed - cands["r_coil"]
    repaired = _evaluate(cands["turns"], cands["r_coil"], r_repair, g, d_p, force, omega)
    for key in cands:
        cands[key] = np.where(over, repaired[key], cands[key])
    repaired_label = MATCHED if abs(d_e_needed - d_p) <= _REL_TOL * d_p else DISPLACEMENT_LIMITED
    labels = np.where(over, repaired_label, labels)

    valid = (cands["r_load"] >= r_min) & np.isfinite(cands["p_load"]) & (cands["x"] <= x_limit)
    displacement_ok = True
    if np.any(valid):
        pool = {k: v[valid] for k, v in cands.items()}
        pool_labels = labels[valid]
    else:
        # travel limit cannot be met at any N: fall back to unconstrained impedance matching
        displacement_ok = False
        ok = (impedance["r_load"] >= r_min) & np.isfinite(impedance["p_load"])
        if not np.any(ok):
            raise InfeasibleDesignError(
                f"{problem.technology} coil at d={geom.d:.4g} m cannot drive a load "
                f">= {r_min} ohm")
        pool = {k: v[ok] for k, v in impedance.items()}
        pool_labels = np.array([IMPEDANCE] * int(ok.sum()), dtype=object)

    i = _select(pool)
    return DesignResult(
        d=geom.d,
        technology=problem.technology,
        q_mode=problem.q_mode,
        q_oc=problem.q_oc,
        strategy=str(pool_labels[i]),
        turns=int(pool["turns"][i]),
        coil_resistance=float(pool["r_coil"][i]),
        load_resistance=float(pool["r_load"][i]),
        parasitic_damping=d_p,
        em_damping=float(pool["d_e"][i]),
        displacement=float(pool["x"][i]),
        x_m=geom.x_m,
        p_max=p_max,
        p_extracted=float(pool["p_ext"][i]),
        p_load=float(pool["p_load"][i]),
        v_load_rms=float(pool["v_rms"][i]),
        flux_gradient=g,
        displacement_ok=displacement_ok,
    )


def solve_matched_load(turns, flux_gradient, parasitic_damping, coil_resistance, r_load_min=0.1):
    """Load making D_e equal D_p, or None when it would fall below ``r_load_min``."""
    check_positive(parasitic_damping, "parasitic_damping")
    r_load = turns**2 * flux_gradient**2 / parasitic_damping - coil_resistance
    if r_load < r_load_min:
        return None
    return r_load


def _infeasible_row(d, technology, q_mode, message):
    nan = float("nan")
    return DesignResult(d=d, technology=technology, q_mode=q_mode, q_oc=nan, strategy="",
                        turns=0, coil_resistance=nan, load_resistance=nan,
                        parasitic_damping=nan, em_damping=nan, displacement=nan, x_m=nan,
                        p_max=nan, p_extracted=nan, p_load=nan, v_load_rms=nan,
                        flux_gradient=nan, feasible=False, displacement_ok=False,
                        message=message)


def _sweep_point(d, technology, q_mode, kwargs):
    problem = design_problem(d, technology, q_mode=q_mode, **kwargs)
    try:
        return optimize_design(problem)
    except InfeasibleDesignError as exc:
        row = _infeasible_row(d, technology, q_mode, str(exc))
        return DesignResult(**{**row.as_dict(), "q_oc": problem.q_oc, "x_m": problem.geometry.x_m,
                               "flux_gradient": problem.flux_gradient})


def sweep_dimensions(d_values, technologies=TECHNOLOGIES, q_modes=(DISPLACEMENT_RULE,),
                     n_jobs=1, **problem_kwargs):
    """Optimise every (d, technology, q_mode) combination.

    Rows come back in input order, d-major. Points that cannot be built are
    returned as rows with ``feasible=False`` rather than raising.
    """
    d_values = [float(d) for d in d_values]
    if not d_values:
        raise ValueError("d_values must not be empty")
    for d in d_values:
        check_positive(d, "d")
    for tech in technologies:
        if tech not in TECHNOLOGIES:
            raise ValueError(f"unknown coil technology {tech!r}")
    for mode in q_modes:
        if mode not in Q_MODES:
            raise ValueError(f"unknown q_mode {mode!r}")
    jobs = [(d, tech, mode) for d in d_values for tech in technologies for mode in q_modes]
    if n_jobs == 1:
        return [_sweep_point(d, t, m, problem_kwargs) for d, t, m in jobs]
    return Parallel(n_jobs=n_jobs)(
        delayed(_sweep_point)(d, t, m, problem_kwargs) for d, t, m in jobs)


def crossover_dimension(rows, low=MICRO, high=WIREWOUND):
    """Smallest swept d at which ``high`` stops losing to ``low`` on load power.

    Returns ``(d_star, low_wins_below)``; ``d_star`` is None when ``low``
    wins everywhere, and ``low_wins_below`` tells whether ``low`` beats
    ``high`` at every swept d below ``d_star``.
    """
    by_d = {}
    for r in rows:
        by_d.setdefault(r.d, {})[r.technology] = r.p_load if r.feasible else 0.0
    ds = sorted(d for d, v in by_d.items() if low in v and high in v)
    wins = [by_d[d][low] > by_d[d][high] for d in ds]
    for i, win in enumerate(wins):
        if not win:
            return ds[i], all(wins[:i]) and i > 0
    return None, bool(wins)
