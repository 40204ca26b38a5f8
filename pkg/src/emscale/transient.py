"""Time-domain simulation of the generator with position-dependent flux gradient.

Integrates

    m x'' + D_p x' + k x = m a sin(w t) - N phi'(x) i,   i = N phi'(x) x' / (R_c + R_l)

with a fixed-step fourth-order Runge-Kutta scheme, then records the last
few drive periods.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.interpolate import PchipInterpolator

from ._csvio import write_table
from ._validation import check_count
from .exceptions import IntegrationDivergedError
from .magnetics import FluxLinkageCurve


@dataclass(frozen=True)
class SimulationConfig:
    steps_per_period: int = 200
    periods_total: int = 50
    periods_recorded: int = 5
    # "steady" starts on the linear steady-state orbit, "rest" at x = v = 0
    initial_state: str = "steady"

    def __post_init__(self):
        check_count(self.steps_per_period, "steps_per_period", minimum=50)
        check_count(self.periods_total, "periods_total")
        check_count(self.periods_recorded, "periods_recorded")
        if self.periods_recorded > self.periods_total:
            raise ValueError("periods_recorded cannot exceed periods_total")
        if self.initial_state not in ("steady", "rest"):
            raise ValueError("initial_state must be 'steady' or 'rest'")


@dataclass
class WaveformRecord:
    t: np.ndarray
    displacement: np.ndarray
    velocity: np.ndarray
    flux_linkage: np.ndarray
    load_voltage: np.ndarray
    emf: np.ndarray
    periods: int
    load_resistance: float

    def mean_load_power(self):
        if math.isinf(self.load_resistance) or self.load_resistance == 0:
            return 0.0
        return float(np.mean(self.load_voltage**2) / self.load_resistance)

    def period_mean_powers(self):
        if math.isinf(self.load_resistance) or self.load_resistance == 0:
            return np.zeros(self.periods)
        v = self.load_voltage.reshape(self.periods, -1)
        return np.mean(v**2, axis=1) / self.load_resistance

    def displacement_amplitude(self):
        return float(np.max(np.abs(self.displacement)))

    def to_csv(self, path_or_file):
        header = ["t_s", "x_m", "v_mps", "flux_Wbturns", "v_load_V"]

        def _write(fh):
            write_table(fh, header, zip(self.t, self.displacement, self.velocity,
                                        self.flux_linkage, self.load_voltage))

        if hasattr(path_or_file, "write"):
            _write(path_or_file)
        else:
            with open(path_or_file, "w", newline="") as fh:
                _write(fh)


class _FluxModel:
    """phi(x) and phi'(x) from a sampled curve, flat beyond its ends."""

    def __init__(self, source):
        if isinstance(source, FluxLinkageCurve):
            x = source.displacements
            self._interp = PchipInterpolator(x, source.flux_per_turn, extrapolate=False)
            self._deriv = self._interp.derivative()
            self._lo, self._hi = float(x[0]), float(x[-1])
            self._phi_lo = float(source.flux_per_turn[0])
            self._phi_hi = float(source.flux_per_turn[-1])
            self.constant = None
        else:
            self.constant = float(source)

    def phi(self, x):
        if self.constant is not None:
            return self.constant * x
        if x <= self._lo:
            return self._phi_lo
        if x >= self._hi:
            return self._phi_hi
        return float(self._interp(x))

    def gradient(self, x):
        if self.constant is not None:
            return self.constant
        if x <= self._lo or x >= self._hi:
            return 0.0
        return float(self._deriv(x))

    def small_signal_gradient(self):
        return self.constant if self.constant is not None else self.gradient(0.0)


def _steady_state(op, damping):
    m, k, w = op.mass, op.spring_constant, op.omega
    detune = k - m * w**2
    amp = op.drive_force / math.hypot(detune, damping * w)
    lag = math.atan2(damping * w, detune)
    return amp * math.sin(-lag), amp * w * math.cos(-lag)


def simulate(op, link, flux, cfg=None):
    """Simulate the coupled oscillator and record the final periods.

    ``flux`` is a FluxLinkageCurve (interpolated with a monotone cubic,
    zero gradient beyond its ends) or a constant gradient in Wb/m.
    ``link.load_resistance = inf`` gives the open-circuit case.
    """
    cfg = SimulationConfig() if cfg is None else cfg
    model = _FluxModel(flux)
    m, k, w = op.mass, op.spring_constant, op.omega
    d_p = op.parasitic_damping
    force = op.drive_force
    n_turns = link.turns
    if link.open_circuit:
        conductance = 0.0
    else:
        conductance = 1.0 / (link.coil_resistance + link.load_resistance)
    load_fraction = link.load_fraction

    def rhs(t, x, v):
        g = model.gradient(x)
        f_em = (n_turns * g) ** 2 * v * conductance
        return v, (force * math.sin(w * t) - d_p * v - k * x - f_em) / m

    if cfg.initial_state == "steady":
        g0 = model.small_signal_gradient()
        x, v = _steady_state(op, d_p + (n_turns * g0) ** 2 * conductance)
    else:
        x, v = 0.0, 0.0

    period = 2.0 * math.pi / w
    h = period / cfg.steps_per_period
    n_steps = cfg.steps_per_period * cfg.periods_total
    n_rec = cfg.steps_per_period * cfg.periods_recorded
    start = n_steps - n_rec
    ts = np.empty(n_rec)
    xs = np.empty(n_rec)
    vs = np.empty(n_rec)

    t = 0.0
    for i in range(n_steps):
        if i >= start:
            j = i - start
            ts[j], xs[j], vs[j] = t, x, v
        k1x, k1v = rhs(t, x, v)
        k2x, k2v = rhs(t + h / 2, x + h / 2 * k1x, v + h / 2 * k1v)
        k3x, k3v = rhs(t + h / 2, x + h / 2 * k2x, v + h / 2 * k2v)
        k4x, k4v = rhs(t + h, x + h * k3x, v + h * k3v)
        x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        # recompute from the index to avoid accumulating rounding in t
        t = (i + 1) * h
        if not (math.isfinite(x) and math.isfinite(v)):
            raise IntegrationDivergedError(f"state became non-finite at t={t:.6g} s")

    grads = np.array([model.gradient(xi) for xi in xs])
    emf = n_turns * grads * vs
    return WaveformRecord(
        t=ts,
        displacement=xs,
        velocity=vs,
        flux_linkage=n_turns * np.array([model.phi(xi) for xi in xs]),
        load_voltage=emf * load_fraction,
        emf=emf,
        periods=cfg.periods_recorded,
        load_resistance=link.load_resistance,
    )


def harmonic_distortion(waveform, periods):
    """Rms of harmonics 2, 3, ... relative to the fundamental.

    ``waveform`` must hold uniform samples spanning exactly ``periods``
    drive periods (end point excluded).
    """
    y = np.asarray(waveform, dtype=float)
    periods = check_count(periods, "periods")
    if y.size % periods:
        raise ValueError("waveform length must be a whole number of periods")
    spectrum = np.fft.rfft(y - y.mean())
    harmonics = np.abs(spectrum[periods::periods])
    if harmonics.size == 0 or harmonics[0] == 0:
        raise ValueError("waveform has no component at the drive frequency")
    # the Nyquist bin holds a single real coefficient; weight it like a one-sided line
    if y.size % 2 == 0 and (y.size // 2) % periods == 0:
        harmonics = harmonics.copy()
        harmonics[-1] /= 2.0
    return float(np.sqrt(np.sum(harmonics[1:] ** 2)) / harmonics[0])
