"""Receiver: power split, photovoltaic harvesting, and data-path SNR/rate.

Received optical power is split between a single-diode PV harvester
(solved at its maximum power point) and an APD whose per-subcarrier SNR
feeds a Shannon achievable-rate estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .constants import BOLTZMANN, ELECTRON_CHARGE, thermal_voltage
from .errors import ConfigError, ModelRangeError
from .geometry import CavityConfig
from .modes import ModeSolution, fox_li_solve
from .power import GainMediumParams, channel_gain, output_power

__all__ = [
    "PVParams",
    "APDParams",
    "PVOperatingPoint",
    "NoisePSD",
    "LinkMetrics",
    "split_power",
    "pv_current",
    "solve_pv_operating_point",
    "noise_psd",
    "subcarrier_signal_power",
    "snr_and_rate",
    "link_metrics",
]


@dataclass(frozen=True)
class PVParams:
    """Single-diode photovoltaic cell parameters (defaults per the
    reference receiver design)."""

    responsivity: float = 0.746          # A/W
    saturation_current: float = 9.381e-9  # A
    ideality: float = 1.318
    cells: int = 1
    series_resistance: float = 0.025     # ohm
    shunt_resistance: float = 5000.0     # ohm
    temperature: float = 298.15          # K

    def __post_init__(self):
        if min(
            self.responsivity,
            self.saturation_current,
            self.ideality,
            self.series_resistance,
            self.shunt_resistance,
            self.temperature,
        ) <= 0:
            raise ConfigError("pv", "all PV parameters must be positive")
        if self.cells < 1 or self.cells != int(self.cells):
            raise ConfigError("pv_cells", "must be an integer >= 1")

    @property
    def thermal_volt(self) -> float:
        return thermal_voltage(self.temperature)

    @property
    def junction_scale(self) -> float:
        """Exponential voltage scale n_s * n * V_T of the diode stack."""
        return self.cells * self.ideality * self.thermal_volt

    @property
    def pv_factor(self) -> float:
        """Reciprocal diode scale 1 / (n_s * n * V_T)."""
        return 1.0 / self.junction_scale


@dataclass(frozen=True)
class APDParams:
    """APD data path and OFDM signalling parameters."""

    responsivity: float = 0.6          # A/W
    bandwidth: float = 200e6           # Hz
    n_subcarriers: int = 64
    load_resistance: float = 10e3      # ohm
    dc_bias: float = 3.0
    signal_variance: float = 1.0       # A^2
    background_power: float = 9.56e-6  # W
    temperature: float = 298.15        # K

    def __post_init__(self):
        if min(
            self.responsivity,
            self.bandwidth,
            self.load_resistance,
            self.dc_bias,
            self.signal_variance,
            self.temperature,
        ) <= 0:
            raise ConfigError("apd", "APD parameters must be positive")
        if self.background_power < 0:
            raise ConfigError("background_power", "must be non-negative")
        n = self.n_subcarriers
        if n < 4 or n % 2:
            raise ConfigError("n_subcarriers", f"must be even and >= 4, got {n}")


@dataclass(frozen=True)
class PVOperatingPoint:
    current: float   # A
    voltage: float   # V
    power: float     # W


@dataclass(frozen=True)
class NoisePSD:
    shot: float      # A^2/Hz
    thermal: float   # A^2/Hz

    @property
    def total(self) -> float:
        return self.shot + self.thermal


@dataclass(frozen=True)
class LinkMetrics:
    """End-to-end metrics for one operating point."""

    p_out: float
    gamma: float
    p_pv_o: float
    snr_per_subcarrier: np.ndarray
    rate: float
    mu: float
    below_threshold: bool
    v1: float = 0.0
    v2: float = 0.0
    overlap_efficiency: float = 0.0
    converged: bool = False

    @property
    def snr(self) -> float:
        """Common per-subcarrier SNR of the flat channel model."""
        return float(self.snr_per_subcarrier[0]) if self.snr_per_subcarrier.size else 0.0


def split_power(p_out: float, mu: float) -> tuple[float, float]:
    """Split received power: ``mu`` to the PV, the rest to the APD."""
    if not 0.0 <= mu <= 1.0:
        raise ModelRangeError(f"split ratio must be in [0, 1], got {mu}")
    if p_out < 0:
        raise ModelRangeError("received power must be non-negative")
    p_pv = mu * p_out
    return p_pv, p_out - p_pv


def pv_current(voltage: float, photocurrent: float, params: PVParams) -> float:
    """Terminal current at ``voltage`` by root-solving the implicit
    single-diode equation; inner residual below 1e-12 A."""

    def residual(i: float) -> float:
        v_d = voltage + i * params.series_resistance
        exponent = min(v_d * params.pv_factor, 600.0)  # keep expm1 finite
        return (
            photocurrent
            - params.saturation_current * math.expm1(exponent)
            - v_d / params.shunt_resistance
            - i
        )

    hi = photocurrent
    if residual(hi) >= 0:
        return hi
    lo = min(0.0, -voltage / params.shunt_resistance) - 1.0
    while residual(lo) <= 0:
        lo = 2.0 * lo - 1.0
    current = optimize.brentq(residual, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    if abs(residual(current)) > 1e-12:
        raise ModelRangeError(
            f"PV current solve residual {abs(residual(current)):.2e} A exceeds 1e-12 A"
        )
    return current


def open_circuit_voltage(photocurrent: float, params: PVParams) -> float:
    """Terminal voltage where the cell current crosses zero."""
    upper = params.junction_scale * math.log(
        photocurrent / params.saturation_current + 1.0
    ) + 10.0 * params.junction_scale
    return optimize.brentq(
        lambda v: pv_current(v, photocurrent, params), 0.0, upper, xtol=1e-12
    )


def solve_pv_operating_point(
    p_pv_i: float, params: PVParams, load_resistance: float | None = None
) -> PVOperatingPoint:
    """Operating point of the PV under ``p_pv_i`` watts of illumination.

    By default the maximum power point: a coarse voltage scan brackets
    the optimum, then golden-section refinement locates it.  With
    ``load_resistance`` the cell is instead solved against a fixed
    resistive load.
    """
    if p_pv_i < 0:
        raise ModelRangeError("PV input power must be non-negative")
    photocurrent = params.responsivity * p_pv_i
    if photocurrent <= 0.0:
        return PVOperatingPoint(0.0, 0.0, 0.0)

    v_oc = open_circuit_voltage(photocurrent, params)

    if load_resistance is not None:
        if load_resistance <= 0:
            raise ModelRangeError("load resistance must be positive")

        def mismatch(i: float) -> float:
            return pv_current(i * load_resistance, photocurrent, params) - i

        i_load = optimize.brentq(mismatch, 0.0, v_oc / load_resistance, xtol=1e-15)
        v_load = i_load * load_resistance
        return PVOperatingPoint(i_load, v_load, i_load * v_load)

    def neg_power(v: float) -> float:
        return -v * pv_current(v, photocurrent, params)

    grid = np.linspace(0.0, v_oc, 257)
    powers = np.array([-neg_power(v) for v in grid])
    best = int(np.argmax(powers))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid.size - 1)]
    res = optimize.minimize_scalar(
        neg_power, bracket=None, bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-12},
    )
    v_mp = float(res.x)
    i_mp = pv_current(v_mp, photocurrent, params)
    return PVOperatingPoint(i_mp, v_mp, i_mp * v_mp)


def noise_psd(p_pd: float, params: APDParams) -> NoisePSD:
    """One-sided shot and thermal current noise PSDs (A^2/Hz)."""
    if p_pd < 0:
        raise ModelRangeError("detector power must be non-negative")
    shot = 2.0 * ELECTRON_CHARGE * params.responsivity * (p_pd + params.background_power)
    thermal = 4.0 * BOLTZMANN * params.temperature / params.load_resistance
    return NoisePSD(shot=shot, thermal=thermal)


def subcarrier_signal_power(params: APDParams) -> float:
    """Transmitted signal power per data subcarrier.

    Hermitian-symmetric OFDM leaves ``N - 2`` data-bearing subcarriers;
    the drive variance is shared among them after DC biasing.
    """
    n = params.n_subcarriers
    if n <= 2:
        raise ModelRangeError("need more than 2 subcarriers")
    return 2.0 * params.signal_variance / (params.dc_bias**2 * (n - 2))


def snr_and_rate(
    gamma: float, mu: float, params: APDParams, p_pd: float
) -> tuple[np.ndarray, float]:
    """Per-subcarrier SNR vector and Shannon achievable rate (bit/s).

    The channel gain is frequency-flat, so all ``N/2 - 1`` data
    subcarriers share one SNR and the rate reduces to
    ``(N/2 - 1) (W/N) log2(1 + SNR)``.
    """
    if not 0.0 <= mu <= 1.0:
        raise ModelRangeError(f"split ratio must be in [0, 1], got {mu}")
    n = params.n_subcarriers
    e_k = subcarrier_signal_power(params)
    sigma2 = noise_psd(p_pd, params).total * params.bandwidth / n
    snr = (1.0 - mu) * gamma**2 * e_k / sigma2
    snr_vec = np.full(n // 2 - 1, snr)
    rate = float(np.sum(params.bandwidth / n * np.log2(1.0 + snr_vec)))
    return snr_vec, rate


def link_metrics(
    config: CavityConfig,
    p_in: float,
    mu: float,
    gain: GainMediumParams | None = None,
    pv: PVParams | None = None,
    apd: APDParams | None = None,
    mode: ModeSolution | None = None,
    drive: str = "power",
) -> LinkMetrics:
    """End-to-end evaluation of one operating point.

    Solves (or reuses) the cavity mode, runs the transmitter power
    budget, splits the received power, solves the PV at its maximum
    power point and evaluates the data path.  Below the lasing threshold
    the delivered power, harvest and rate are identically zero; the
    channel gain is reported as a property of the open channel.
    """
    gain = gain or GainMediumParams()
    pv = pv or PVParams()
    apd = apd or APDParams()
    if mode is None:
        mode = fox_li_solve(config)

    budget = output_power(p_in, mode, gain, config.reflectivity, drive=drive)
    gamma = channel_gain(mode, gain, config.reflectivity, apd.responsivity)
    p_pv_i, p_pd = split_power(budget.p_out, mu)
    operating = solve_pv_operating_point(p_pv_i, pv)
    snr_vec, rate = snr_and_rate(gamma, mu, apd, p_pd)
    if budget.p_out <= 0.0:
        snr_vec = np.zeros_like(snr_vec)
        rate = 0.0
    return LinkMetrics(
        p_out=budget.p_out,
        gamma=gamma,
        p_pv_o=operating.power,
        snr_per_subcarrier=snr_vec,
        rate=rate,
        mu=mu,
        below_threshold=budget.below_threshold,
        v1=mode.v1,
        v2=mode.v2,
        overlap_efficiency=mode.overlap_efficiency,
        converged=mode.converged,
    )
