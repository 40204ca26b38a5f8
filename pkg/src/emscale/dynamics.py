"""Resonant mass-spring-damper model of the generator and its electrical load.

Steady-state response to a sinusoidal force F_o = m a:

    X     = F_o / sqrt((k - m w^2)^2 + (D_p + D_e)^2 w^2)
    P_avg = D_e F_o^2 w^2 / (2 [(k - m w^2)^2 + (D_p + D_e)^2 w^2])

with electromagnetic damping D_e = N^2 (dphi/dx)^2 / (R_c + R_l).
"""
from dataclasses import dataclass, replace
import math

from ._validation import check_positive


@dataclass(frozen=True)
class OperatingPoint:
    mass: float
    spring_constant: float
    omega: float
    acceleration: float
    parasitic_damping: float = 0.0
    em_damping: float = 0.0

    def __post_init__(self):
        for name in ("mass", "spring_constant", "omega", "acceleration",
                     "parasitic_damping", "em_damping"):
            check_positive(getattr(self, name), name, allow_zero=True)

    @classmethod
    def at_resonance(cls, mass, omega, acceleration, parasitic_damping=0.0, em_damping=0.0):
        """Operating point whose spring tunes the natural frequency to ``omega``."""
        return cls(mass, mass * omega**2, omega, acceleration, parasitic_damping, em_damping)

    @property
    def natural_frequency(self):
        return math.sqrt(self.spring_constant / self.mass)

    @property
    def drive_force(self):
        return self.mass * self.acceleration

    @property
    def total_damping(self):
        return self.parasitic_damping + self.em_damping

    def with_em_damping(self, em_damping):
        return replace(self, em_damping=em_damping)


@dataclass(frozen=True)
class ElectricalLink:
    turns: int
    flux_gradient: float
    coil_resistance: float
    load_resistance: float
    coil_inductance: float = 0.0

    def __post_init__(self):
        check_positive(self.coil_resistance, "coil_resistance")
        if not self.load_resistance >= 0:
            raise ValueError("load_resistance must be >= 0")
        if self.coil_inductance != 0:
            raise ValueError("coil inductance is not modelled; it must be 0")

    @property
    def open_circuit(self):
        return math.isinf(self.load_resistance)

    @property
    def load_fraction(self):
        """Share of the induced emf that appears across the load."""
        if self.open_circuit:
            return 1.0
        return self.load_resistance / (self.coil_resistance + self.load_resistance)


def parasitic_damping_from_q(mass, natural_frequency, q_oc):
    """D_p = m w_n / Q_oc (Q_oc = 1 / (2 zeta_p))."""
    check_positive(q_oc, "q_oc")
    return mass * natural_frequency / q_oc


def q_from_parasitic_damping(mass, natural_frequency, parasitic_damping):
    check_positive(parasitic_damping, "parasitic_damping")
    return mass * natural_frequency / parasitic_damping


def em_damping(link):
    """Electromagnetic damping coefficient (N s/m) of ``link``."""
    if link.open_circuit:
        return 0.0
    total = link.coil_resistance + link.load_resistance
    if total == 0:
        raise ZeroDivisionError("coil plus load resistance is zero")
    return link.turns**2 * link.flux_gradient**2 / total


def _response_denominator(op):
    detune = op.spring_constant - op.mass * op.omega**2
    denom_sq = detune**2 + (op.total_damping * op.omega) ** 2
    if denom_sq == 0:
        raise ZeroDivisionError("undamped system driven exactly at resonance has no steady state")
    return denom_sq


def displacement_amplitude(op):
    """Steady-state displacement amplitude (m)."""
    return op.drive_force / math.sqrt(_response_denominator(op))


def velocity_amplitude(op):
    return op.omega * displacement_amplitude(op)


def average_power(op):
    """Electrical power extracted through the EM damping (coil plus load), W."""
    return op.em_damping * op.drive_force**2 * op.omega**2 / (2.0 * _response_denominator(op))


def resonant_power(drive_force, parasitic_damping, em_damping):
    """Extracted power at resonance, D_e F^2 / (2 (D_p + D_e)^2)."""
    total = parasitic_damping + em_damping
    if total == 0:
        raise ZeroDivisionError("total damping is zero")
    return em_damping * drive_force**2 / (2.0 * total**2)


def max_power(mass, acceleration, parasitic_damping):
    """Maximum extractable power (ma)^2 / (8 D_p), reached when D_e = D_p."""
    if parasitic_damping <= 0:
        raise ValueError("parasitic damping must be > 0")
    return (mass * acceleration) ** 2 / (8.0 * parasitic_damping)


def max_power_from_q(mass, acceleration, natural_frequency, q_oc):
    """Maximum power in quality-factor form, m a^2 Q_oc / (8 w_n)."""
    check_positive(q_oc, "q_oc")
    return mass * acceleration**2 * q_oc / (8.0 * natural_frequency)


def load_power_and_voltage(extracted_power, link, velocity_amplitude):
    """Split extracted power between coil and load.

    Returns ``(P_load, V_load_rms)``. The load voltage is the emf
    N (dphi/dx) v scaled by the resistive divider, reported as rms.
    """
    if extracted_power < 0:
        raise ValueError("extracted_power must be >= 0")
    fraction = link.load_fraction
    emf_rms = link.turns * abs(link.flux_gradient) * velocity_amplitude / math.sqrt(2.0)
    v_load = emf_rms * fraction
    if link.open_circuit:
        return 0.0, v_load
    return extracted_power * fraction, v_load


def required_q_for_displacement(x_m, natural_frequency, acceleration):
    """Open-circuit Q giving an unloaded resonant amplitude of 2 x_m.

    The unloaded amplitude is a Q / w_n^2, so Q = 2 x_m w_n^2 / a.
    """
    check_positive(acceleration, "acceleration")
    return 2.0 * x_m * natural_frequency**2 / acceleration
