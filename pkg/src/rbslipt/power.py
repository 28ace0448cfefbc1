"""Transmitter power budget: electrical drive to delivered optical power.

The chain is pump diode -> stored upper-level power -> circulating beam
-> output coupling.  Above the lasing threshold the output is affine in
the stored power; the intra-cavity transmission factors of the solved
mode set both the threshold and the extraction efficiency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import photon_voltage
from .errors import ConfigError, ModelRangeError
from .modes import ModeSolution

__all__ = [
    "GainMediumParams",
    "PowerBudget",
    "pump_power",
    "available_power",
    "diffraction_loss",
    "threshold_power",
    "extraction_efficiency",
    "output_power",
    "output_power_direct",
    "channel_gain",
]


@dataclass(frozen=True)
class GainMediumParams:
    """Gain medium and pump-diode parameters.

    Defaults describe a diode-end-pumped Nd:YVO4 thin disc: 3 mm gain
    radius cross-section, 808 nm pump, and the tabulated efficiency
    stack (excitation = stored x pump efficiency).
    """

    cross_section_area: float = math.pi * 0.003**2   # A_g, m^2
    saturated_intensity: float = 1.26e7              # W/m^2
    medium_loss: float = 0.99                        # V_s, per-pass survival
    excitation_efficiency: float = 0.5148
    stored_efficiency: float = 0.72                  # eta_a
    injection_extraction_efficiency: float = 0.715   # eta_nu * eta_e
    pump_wavelength: float = 808e-9
    threshold_current: float = 0.5                   # A

    def __post_init__(self):
        if self.cross_section_area <= 0 or self.saturated_intensity <= 0:
            raise ConfigError("gain", "area and saturated intensity must be positive")
        for name in (
            "medium_loss",
            "excitation_efficiency",
            "stored_efficiency",
            "injection_extraction_efficiency",
        ):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ConfigError(name, f"must be in (0, 1], got {v}")
        if self.excitation_efficiency > self.stored_efficiency:
            raise ConfigError(
                "excitation_efficiency",
                "cannot exceed stored_efficiency (pump efficiency would exceed 1)",
            )
        if self.pump_wavelength <= 0:
            raise ConfigError("pump_wavelength", "must be positive")
        if self.threshold_current < 0:
            raise ConfigError("threshold_current", "must be non-negative")

    @property
    def pump_efficiency(self) -> float:
        """Electrical-to-pump-light efficiency eta_P = eta_excit / eta_a."""
        return self.excitation_efficiency / self.stored_efficiency


@dataclass(frozen=True)
class PowerBudget:
    """One operating point of the transmitter power chain (all in W)."""

    p_in: float
    p_pump: float
    p_avail: float
    eta_diff: float
    eta_extr: float
    threshold: float
    p_out: float
    below_threshold: bool


def pump_power(i_in: float, params: GainMediumParams) -> float:
    """Pump light power from drive current, clamped at the diode threshold."""
    if i_in < 0:
        raise ModelRangeError(f"drive current must be non-negative, got {i_in}")
    excess = max(i_in - params.threshold_current, 0.0)
    return (
        photon_voltage(params.pump_wavelength)
        * params.injection_extraction_efficiency
        * excess
    )


def available_power(
    params: GainMediumParams,
    p_pump: float | None = None,
    p_in: float | None = None,
) -> float:
    """Power stored in the upper laser level.

    Give either the pump light power (scaled by the stored efficiency) or
    the electrical input power (scaled by the excitation efficiency).
    """
    if (p_pump is None) == (p_in is None):
        raise ModelRangeError("provide exactly one of p_pump or p_in")
    if p_pump is not None:
        if p_pump < 0:
            raise ModelRangeError("pump power must be non-negative")
        return params.stored_efficiency * p_pump
    if p_in < 0:
        raise ModelRangeError("input power must be non-negative")
    return params.excitation_efficiency * p_in


def diffraction_loss(v1: float, v2: float) -> float:
    """Round-trip diffraction survival factor, sqrt(v1 * v2).

    Non-positive transmission factors signal a closed channel and map
    to 0.
    """
    if v1 <= 0.0 or v2 <= 0.0:
        return 0.0
    return math.sqrt(v1 * v2)


def threshold_power(
    v1: float, v2: float, params: GainMediumParams, reflectivity: float
) -> float:
    """Stored power needed before any laser output appears."""
    product = reflectivity * params.medium_loss**2 * v1 * v2
    if product <= 0.0:
        return math.inf
    return params.cross_section_area * params.saturated_intensity * abs(
        math.log(math.sqrt(product))
    )


def extraction_efficiency(
    mode: ModeSolution, reflectivity: float, medium_loss: float
) -> float:
    """Fraction of stored power above threshold that leaves as output.

    Combines output coupling, the mode's one-way transmission factors
    and the gain overlap efficiency of the solved mode.
    """
    if not 0 < reflectivity < 1:
        raise ModelRangeError(f"reflectivity must be in (0, 1), got {reflectivity}")
    if not 0 < medium_loss <= 1:
        raise ModelRangeError(f"medium loss factor must be in (0, 1], got {medium_loss}")
    v1, v2 = mode.v1, mode.v2
    if v1 <= 0.0 or v2 <= 0.0:
        return 0.0
    eta_d = diffraction_loss(v1, v2)
    denom = 1.0 - eta_d**2 * reflectivity + eta_d * math.sqrt(reflectivity) * (
        1.0 / (medium_loss * v1) - medium_loss
    )
    if denom <= 0.0:
        raise ModelRangeError("extraction model invalid: non-positive denominator")
    return mode.overlap_efficiency * (1.0 - reflectivity) * v1 / denom


def output_power(
    p_in: float,
    mode: ModeSolution,
    params: GainMediumParams,
    reflectivity: float,
    drive: str = "power",
) -> PowerBudget:
    """Full power budget of one operating point.

    ``drive`` selects the input parameterization: ``"power"`` treats
    ``p_in`` as the electrical input power, ``"current"`` as the drive
    current in amperes.  Below threshold the output clamps to zero.
    """
    if drive == "power":
        p_electrical = p_in
        p_pump = params.pump_efficiency * p_in
    elif drive == "current":
        p_pump = pump_power(p_in, params)
        p_electrical = (
            p_pump / params.pump_efficiency if p_pump > 0 else 0.0
        )
    else:
        raise ModelRangeError(f"unknown drive mode {drive!r}")
    p_avail = params.stored_efficiency * p_pump

    if not mode.channel_open:
        return PowerBudget(
            p_in=p_electrical,
            p_pump=p_pump,
            p_avail=p_avail,
            eta_diff=0.0,
            eta_extr=0.0,
            threshold=math.inf,
            p_out=0.0,
            below_threshold=True,
        )

    eta_d = diffraction_loss(mode.v1, mode.v2)
    eta_x = extraction_efficiency(mode, reflectivity, params.medium_loss)
    c1 = threshold_power(mode.v1, mode.v2, params, reflectivity)
    margin = p_avail - c1
    return PowerBudget(
        p_in=p_electrical,
        p_pump=p_pump,
        p_avail=p_avail,
        eta_diff=eta_d,
        eta_extr=eta_x,
        threshold=c1,
        p_out=max(eta_x * margin, 0.0),
        below_threshold=margin <= 0.0,
    )


def output_power_direct(
    p_in: float,
    mode: ModeSolution,
    params: GainMediumParams,
    reflectivity: float,
) -> float:
    """Output power from the unfactored gain-saturation expression.

    Evaluates the overlap-area-weighted saturated-gain form directly;
    kept as an independent cross-check of :func:`output_power` (the two
    agree to rounding).
    """
    v1, v2, vs = mode.v1, mode.v2, params.medium_loss
    if v1 <= 0.0 or v2 <= 0.0:
        return 0.0
    r = reflectivity
    a_b = mode.overlap_efficiency * params.cross_section_area
    a_g = params.cross_section_area
    i_s = params.saturated_intensity
    denom = 1.0 - r * v1 * v2 + math.sqrt(r * v1 * v2) * (1.0 / (vs * v1) - vs)
    bracket = params.excitation_efficiency * p_in / (a_g * i_s) - abs(
        math.log(math.sqrt(r * vs**2 * v1 * v2))
    )
    return max(a_b * i_s * (1.0 - r) * v1 / denom * bracket, 0.0)


def channel_gain(
    mode: ModeSolution,
    params: GainMediumParams,
    reflectivity: float,
    apd_responsivity: float,
) -> float:
    """Small-signal current gain of the link (output photocurrent per
    ampere of drive modulation).  Zero for a closed channel."""
    if not mode.channel_open:
        return 0.0
    eta_x = extraction_efficiency(mode, reflectivity, params.medium_loss)
    return (
        apd_responsivity
        * eta_x
        * params.stored_efficiency
        * params.injection_extraction_efficiency
        * photon_voltage(params.pump_wavelength)
    )
