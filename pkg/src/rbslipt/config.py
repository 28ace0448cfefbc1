"""Plain key-value configuration files and the tabulated defaults.

A config file holds one ``key = value`` pair per line with ``#``
comments.  Keys mirror the system parameter tables; command-line
``--set key=value`` overrides beat file values, which beat the defaults.
"""

from __future__ import annotations

import math
from pathlib import Path

from .errors import ConfigError
from .geometry import CavityConfig
from .power import GainMediumParams
from .receiver import APDParams, PVParams

__all__ = ["DEFAULTS", "load_config_file", "apply_overrides", "build_components"]

DEFAULTS: dict[str, float | int | str] = {
    # cavity geometry
    "focal_length": 0.05,
    "lens_gap": 0.05,
    "cat_radius": 0.012,
    "gain_radius": 0.003,
    "distance": 3.0,
    "theta_deg": 0.0,
    "wavelength": 1.064e-6,
    "reflectivity": 0.7,
    # gain medium / pump
    "saturated_intensity": 1.26e7,
    "medium_loss": 0.99,
    "excitation_efficiency": 0.5148,
    "stored_efficiency": 0.72,
    "injection_extraction_efficiency": 0.715,
    "pump_wavelength": 808e-9,
    "threshold_current": 0.5,
    # photovoltaic harvester
    "pv_responsivity": 0.746,
    "saturation_current": 9.381e-9,
    "ideality": 1.318,
    "pv_cells": 1,
    "series_resistance": 0.025,
    "shunt_resistance": 5000.0,
    "temperature": 298.15,
    # APD data path
    "apd_responsivity": 0.6,
    "bandwidth": 200e6,
    "n_subcarriers": 64,
    "pd_load_resistance": 10e3,
    "dc_bias": 3.0,
    "signal_variance": 1.0,
    "background_power": 9.56e-6,
    # mode solver
    "grid_size": 2048,
    "window_factor": 2.0,
    "iterations": 300,
    "convergence_tol": 1e-6,
    "misalignment_formula": "rederived",
    # operating point
    "input_power": 200.0,
    "split_ratio": 0.99,
    "drive_mode": "power",
}

_INT_KEYS = {"pv_cells", "n_subcarriers", "grid_size", "iterations"}
_STR_KEYS = {"misalignment_formula", "drive_mode"}


def _coerce(key: str, raw: str):
    if key in _STR_KEYS:
        return raw
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {raw!r} as a number") from exc


def load_config_file(path) -> dict:
    """Parse a key-value config file on top of the defaults."""
    cfg = dict(DEFAULTS)
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(key, f"unknown configuration key (line {lineno})")
        cfg[key] = _coerce(key, raw.strip())
    return cfg


def apply_overrides(cfg: dict, assignments) -> dict:
    """Apply ``key=value`` strings (e.g. from ``--set``) onto ``cfg``."""
    out = dict(cfg)
    for item in assignments or ():
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        key, _, raw = item.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(key, "unknown configuration key")
        out[key] = _coerce(key, raw.strip())
    return out


def build_components(cfg: dict):
    """Instantiate the model parameter objects from a config mapping.

    Returns ``(cavity, gain, pv, apd, operating)`` where ``operating``
    keeps the drive settings (input power, split ratio, drive mode).
    """
    cavity = CavityConfig(
        focal_length=cfg["focal_length"],
        lens_gap=cfg["lens_gap"],
        cat_radius=cfg["cat_radius"],
        gain_radius=cfg["gain_radius"],
        separation=cfg["distance"],
        theta=math.radians(cfg["theta_deg"]),
        wavelength=cfg["wavelength"],
        reflectivity=cfg["reflectivity"],
        grid_size=cfg["grid_size"],
        window_factor=cfg["window_factor"],
        iterations=cfg["iterations"],
        convergence_tol=cfg["convergence_tol"],
        misalignment_formula=cfg["misalignment_formula"],
    )
    gain = GainMediumParams(
        cross_section_area=math.pi * cfg["gain_radius"] ** 2,
        saturated_intensity=cfg["saturated_intensity"],
        medium_loss=cfg["medium_loss"],
        excitation_efficiency=cfg["excitation_efficiency"],
        stored_efficiency=cfg["stored_efficiency"],
        injection_extraction_efficiency=cfg["injection_extraction_efficiency"],
        pump_wavelength=cfg["pump_wavelength"],
        threshold_current=cfg["threshold_current"],
    )
    pv = PVParams(
        responsivity=cfg["pv_responsivity"],
        saturation_current=cfg["saturation_current"],
        ideality=cfg["ideality"],
        cells=cfg["pv_cells"],
        series_resistance=cfg["series_resistance"],
        shunt_resistance=cfg["shunt_resistance"],
        temperature=cfg["temperature"],
    )
    apd = APDParams(
        responsivity=cfg["apd_responsivity"],
        bandwidth=cfg["bandwidth"],
        n_subcarriers=cfg["n_subcarriers"],
        load_resistance=cfg["pd_load_resistance"],
        dc_bias=cfg["dc_bias"],
        signal_variance=cfg["signal_variance"],
        background_power=cfg["background_power"],
        temperature=cfg["temperature"],
    )
    if cfg["drive_mode"] not in ("power", "current"):
        raise ConfigError("drive_mode", "must be 'power' or 'current'")
    operating = {
        "input_power": cfg["input_power"],
        "split_ratio": cfg["split_ratio"],
        "drive_mode": cfg["drive_mode"],
    }
    if not 0.0 <= operating["split_ratio"] <= 1.0:
        raise ConfigError("split_ratio", "must be in [0, 1]")
    return cavity, gain, pv, apd, operating
