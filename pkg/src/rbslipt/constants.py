"""Physical constants used across the package (exact SI values)."""

import scipy.constants as _const

PLANCK = _const.h                    # J s
LIGHT_SPEED = _const.c               # m/s
ELECTRON_CHARGE = _const.e           # C
BOLTZMANN = _const.k                 # J/K


def photon_voltage(wavelength: float) -> float:
    """Photon energy of ``wavelength`` expressed as a voltage, h*c/(q*lambda)."""
    return PLANCK * LIGHT_SPEED / (ELECTRON_CHARGE * wavelength)


def thermal_voltage(temperature: float) -> float:
    """Diode thermal voltage k*T/q at ``temperature`` in kelvin."""
    return BOLTZMANN * temperature / ELECTRON_CHARGE
