"""Command-line front end: ``emscale {design,sweep,flux,transient}``.

Exit status is 0 on success, 1 when the requested design cannot be built
and 2 for invalid input (bad flags, config errors, unwritable output).
"""
import argparse
from dataclasses import dataclass, fields
import math
import sys

import numpy as np

from ._csvio import format_float, write_table
from .coils import MICRO, TECHNOLOGIES, WIREWOUND, TechnologyLimits, coil_family
from .dynamics import ElectricalLink, OperatingPoint, em_damping, parasitic_damping_from_q
from .exceptions import ConfigError, InfeasibleDesignError
from .geometry import GeometryRatios, MaterialProps, angular_frequency, derive_geometry, moving_mass
from .magnetics import flux_linkage_curve
from .optimizer import (DISPLACEMENT_RULE, FIXED_Q, Q_MODES, design_problem, optimize_design,
                        sweep_dimensions)
from .transient import SimulationConfig, harmonic_distortion, simulate

SWEEP_COLUMNS = ("d_m", "tech", "q_mode", "Q", "N", "R_c_ohm", "R_l_ohm", "D_p", "D_e",
                 "strategy", "x_amp_m", "P_max_W", "P_extracted_W", "P_load_W",
                 "V_load_rms_V", "feasible")

D_RANGE = (1e-4, 0.1)


@dataclass
class RunConfig:
    frequency: float = 1000.0
    acceleration: float = 9.81
    q_mode: str = DISPLACEMENT_RULE
    q: float = 300.0
    tech: str = "both"
    magnet_density: float = 7600.0
    remanence: float = 1.2
    resistivity: float = 1.72e-8
    fill_factor: float = 0.55
    magnet_x_fraction: float = 1.0 / 6.0
    magnet_z_fraction: float = 0.4
    gap_fraction: float = 0.2
    coil_thickness_fraction_of_gap: float = 0.5
    min_wire_diameter: float = 12e-6
    min_feature: float = 1e-6
    r_load_min: float = 0.1
    d: float = 6e-3
    dmin: float = 1e-3
    dmax: float = 10e-3
    steps: int = 10
    samples: int = 21
    turns: int = 100
    load: str = "open"
    jobs: int = 1
    output: str = ""
    plot: str = ""

    def validate(self):
        positive = ("frequency", "acceleration", "q", "magnet_density", "remanence",
                    "resistivity", "min_wire_diameter", "min_feature")
        for key in positive:
            if not getattr(self, key) > 0:
                raise ConfigError(f"must be > 0, got {getattr(self, key)!r}", key=key)
        if not 0 < self.fill_factor <= 1:
            raise ConfigError(f"must lie in (0, 1], got {self.fill_factor!r}", key="fill_factor")
        if self.r_load_min < 0:
            raise ConfigError("must be >= 0", key="r_load_min")
        if self.q_mode not in Q_MODES + ("both",):
            raise ConfigError(f"must be one of {Q_MODES + ('both',)}", key="q_mode")
        if self.tech not in TECHNOLOGIES + ("both",):
            raise ConfigError(f"must be one of {TECHNOLOGIES + ('both',)}", key="tech")
        for key in ("d", "dmin", "dmax"):
            value = getattr(self, key)
            if not D_RANGE[0] <= value <= D_RANGE[1]:
                raise ConfigError(f"must lie in [{D_RANGE[0]}, {D_RANGE[1]}] m, got {value!r}",
                                  key=key)
        if self.dmax < self.dmin:
            raise ConfigError("must not be below dmin", key="dmax")
        for key, minimum in (("steps", 1), ("samples", 5), ("turns", 1), ("jobs", -1)):
            if getattr(self, key) < minimum:
                raise ConfigError(f"must be >= {minimum}", key=key)
        if self.jobs == 0:
            raise ConfigError("must be non-zero", key="jobs")
        if self.load != "open":
            try:
                load = float(self.load)
            except ValueError:
                raise ConfigError("must be 'open' or a resistance in ohm", key="load") from None
            if not load >= 0:
                raise ConfigError("must be >= 0", key="load")
        try:
            self.ratios()
            self.materials()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    def materials(self):
        return MaterialProps(self.magnet_density, self.remanence, self.resistivity,
                             self.fill_factor)

    def ratios(self):
        return GeometryRatios(self.magnet_x_fraction, self.magnet_z_fraction, self.gap_fraction,
                              self.coil_thickness_fraction_of_gap)

    def limits(self):
        return TechnologyLimits(self.min_wire_diameter, self.min_feature)

    def technologies(self):
        return TECHNOLOGIES if self.tech == "both" else (self.tech,)

    def q_modes(self):
        return Q_MODES if self.q_mode == "both" else (self.q_mode,)

    def problem_kwargs(self):
        return {"q": self.q, "frequency": self.frequency, "acceleration": self.acceleration,
                "materials": self.materials(), "ratios": self.ratios(),
                "limits": self.limits(), "r_load_min": self.r_load_min}


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key, raw, line=None):
    kind = _FIELD_TYPES[key]
    try:
        if kind in (float, "float"):
            return float(raw)
        if kind in (int, "int"):
            return int(raw)
    except ValueError:
        raise ConfigError(f"cannot parse {raw!r} as {getattr(kind, '__name__', kind)}",
                          key=key, line=line) from None
    return raw


def parse_config(text):
    """Parse ``key = value`` lines into a dict; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError("unknown key", key=key, line=lineno)
        if not raw:
            raise ConfigError("missing value", key=key, line=lineno)
        values[key] = _coerce(key, raw, line=lineno)
    return values


def load_config(path, overrides=None):
    """RunConfig from a config file, with ``overrides`` (e.g. CLI flags) taking precedence."""
    values = {}
    if path is not None:
        try:
            with open(path) as fh:
                values = parse_config(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    values.update(overrides or {})
    return RunConfig(**values).validate()


def _add_common(parser):
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--freq", dest="frequency", type=float, help="drive frequency in Hz")
    parser.add_argument("--accel", dest="acceleration", type=float,
                        help="acceleration amplitude in m/s^2")
    parser.add_argument("--q-mode", dest="q_mode", choices=Q_MODES + ("both",))
    parser.add_argument("--q", type=float, help="fixed open-circuit Q (implies --q-mode fixed)")
    parser.add_argument("--tech", choices=TECHNOLOGIES + ("both",))
    parser.add_argument("--remanence", type=float)
    parser.add_argument("--density", dest="magnet_density", type=float)
    parser.add_argument("--resistivity", type=float)
    parser.add_argument("--fill-factor", dest="fill_factor", type=float)
    parser.add_argument("--r-load-min", dest="r_load_min", type=float)
    parser.add_argument("--min-wire", dest="min_wire_diameter", type=float)
    parser.add_argument("--min-feature", dest="min_feature", type=float)
    parser.add_argument("--out", dest="output", help="CSV output path (stdout if omitted)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="emscale",
        description="Scaling and design study of electromagnetic vibration energy harvesters.",
        argument_default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="optimise one device", argument_default=argparse.SUPPRESS)
    _add_common(p)
    p.add_argument("--d", type=float, help="outer dimension in m")

    p = sub.add_parser("sweep", help="optimise over a range of dimensions",
                       argument_default=argparse.SUPPRESS)
    _add_common(p)
    p.add_argument("--dmin", type=float)
    p.add_argument("--dmax", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--plot", help="SVG path for the load-power plot")

    p = sub.add_parser("flux", help="flux linkage against displacement",
                       argument_default=argparse.SUPPRESS)
    _add_common(p)
    p.add_argument("--d", type=float)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("transient", help="time-domain waveform simulation",
                       argument_default=argparse.SUPPRESS)
    _add_common(p)
    p.add_argument("--d", type=float)
    p.add_argument("--turns", type=int)
    p.add_argument("--load", help="load resistance in ohm, or 'open'")
    p.add_argument("--flux-model", dest="flux_model", choices=("curve", "line"),
                   default="curve")
    return parser


def _config_from_args(args):
    overrides = {k: v for k, v in vars(args).items()
                 if k in _FIELD_TYPES}
    if "q" in overrides and "q_mode" not in overrides:
        overrides["q_mode"] = FIXED_Q
    return load_config(getattr(args, "config", None), overrides)


def _open_output(path):
    if not path:
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as exc:
        raise ConfigError(f"cannot write output: {exc}", key="output") from None


def _sweep_row(r):
    return (r.d, r.technology, r.q_mode, r.q_oc, r.turns, r.coil_resistance, r.load_resistance,
            r.parasitic_damping, r.em_damping, r.strategy, r.displacement, r.p_max,
            r.p_extracted, r.p_load, r.v_load_rms, r.feasible)


def write_sweep_csv(rows, fh):
    write_table(fh, SWEEP_COLUMNS, (_sweep_row(r) for r in rows))


def _summary(r):
    travel = "" if r.displacement_ok else "  (exceeds x_m: no turn count reaches D_e = D_p)"
    return "\n".join([
        f"d = {format_float(r.d)} m   technology = {r.technology}   Q_oc = {r.q_oc:.4g} "
        f"({r.q_mode})",
        f"strategy        : {r.strategy}",
        f"turns N         : {r.turns}",
        f"R_c / R_l       : {r.coil_resistance:.4g} ohm / {r.load_resistance:.4g} ohm",
        f"D_p / D_e       : {r.parasitic_damping:.4g} / {r.em_damping:.4g} N s/m",
        f"displacement    : {r.displacement:.4g} m of x_m = {r.x_m:.4g} m{travel}",
        f"P_max           : {r.p_max:.4g} W",
        f"P_extracted     : {r.p_extracted:.4g} W",
        f"P_load          : {r.p_load:.4g} W",
        f"V_load          : {r.v_load_rms:.4g} V rms ({r.v_load_amplitude:.4g} V peak)",
    ])


def _cmd_design(cfg, args):
    tech = WIREWOUND if cfg.tech == "both" else cfg.tech
    q_mode = DISPLACEMENT_RULE if cfg.q_mode == "both" else cfg.q_mode
    problem = design_problem(cfg.d, tech, q_mode=q_mode, **cfg.problem_kwargs())
    try:
        result = optimize_design(problem)
    except InfeasibleDesignError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    if cfg.output:
        fh, close = _open_output(cfg.output)
        with fh:
            write_sweep_csv([result], fh)
    print(_summary(result))
    return 0


def _cmd_sweep(cfg, args):
    d_values = np.linspace(cfg.dmin, cfg.dmax, cfg.steps)
    rows = sweep_dimensions(d_values, technologies=cfg.technologies(), q_modes=cfg.q_modes(),
                            n_jobs=cfg.jobs, **cfg.problem_kwargs())
    fh, close = _open_output(cfg.output)
    try:
        write_sweep_csv(rows, fh)
    finally:
        if close:
            fh.close()
    if cfg.plot:
        from .plotting import plot_sweep
        try:
            plot_sweep(rows, cfg.plot)
        except OSError as exc:
            raise ConfigError(f"cannot write plot: {exc}", key="plot") from None
    if close:
        n_bad = sum(not r.feasible for r in rows)
        print(f"{len(rows)} designs written to {cfg.output} ({n_bad} infeasible)")
    return 0


def _cmd_flux(cfg, args):
    geom = derive_geometry(cfg.d, cfg.ratios())
    shape = "square" if cfg.tech == MICRO else "circle"
    curve = flux_linkage_curve(geom, cfg.materials(), n_samples=cfg.samples, shape=shape)
    fh, close = _open_output(cfg.output)
    try:
        write_table(fh, ("x_m", "flux_Wb"), zip(curve.displacements, curve.flux_per_turn))
    finally:
        if close:
            fh.close()
    if close:
        print(f"{curve.displacements.size} samples written to {cfg.output}; "
              f"line-fit gradient {curve.fitted_gradient:.4g} Wb/m")
    return 0


def _cmd_transient(cfg, args):
    geom = derive_geometry(cfg.d, cfg.ratios())
    mat = cfg.materials()
    tech = WIREWOUND if cfg.tech == "both" else cfg.tech
    shape = "square" if tech == MICRO else "circle"
    curve = flux_linkage_curve(geom, mat, shape=shape)
    omega = angular_frequency(cfg.frequency)
    mass = moving_mass(geom, mat)
    if cfg.q_mode == FIXED_Q:
        q = cfg.q
    else:
        # open-circuit amplitude equal to x_m, so the magnets sweep the full curve
        q = geom.x_m * omega**2 / cfg.acceleration
    family = coil_family(geom, tech, mat, cfg.limits())
    if cfg.turns > family.max_turns:
        print(f"infeasible: {cfg.turns} turns exceed the {family.max_turns} allowed",
              file=sys.stderr)
        return 1
    r_coil = family.resistance(cfg.turns)
    r_load = math.inf if cfg.load == "open" else float(cfg.load)
    link = ElectricalLink(cfg.turns, curve.fitted_gradient, r_coil, r_load)
    op = OperatingPoint.at_resonance(mass, omega, cfg.acceleration,
                                     parasitic_damping_from_q(mass, omega, q), em_damping(link))
    flux = curve if args.flux_model == "curve" else curve.fitted_gradient
    record = simulate(op, link, flux, SimulationConfig())
    fh, close = _open_output(cfg.output)
    try:
        record.to_csv(fh)
    finally:
        if close:
            fh.close()
    if close:
        thd = harmonic_distortion(record.load_voltage, record.periods)
        print(f"waveform written to {cfg.output}; amplitude {record.displacement_amplitude():.4g} m"
              f", voltage harmonic distortion {thd:.4g}")
    return 0


_COMMANDS = {"design": _cmd_design, "sweep": _cmd_sweep, "flux": _cmd_flux,
             "transient": _cmd_transient}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config_from_args(args)
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
