"""Resonant-beam SLIPT link simulator.

Models an open-cavity resonant beam link end to end: misaligned
cat's-eye cavity geometry, diffraction eigenmode and loss factors,
transmitter power budget, photovoltaic energy harvesting and OFDM
achievable rate, plus batch parameter sweeps with deterministic tables.
"""

from .cache import ModeCache, default_cache_dir
from .config import DEFAULTS, apply_overrides, build_components, load_config_file
from .errors import (
    ConfigError,
    InvalidGeometryError,
    ModelRangeError,
    NoUniqueAxisError,
    RBSliptError,
    SamplingError,
    ZeroFieldError,
)
from .geometry import (
    AugmentedTransfer,
    CavityConfig,
    MisalignmentVector,
    RayState,
    TransferMatrix,
    cat_eye_matrix,
    cat_eye_misalignment,
    equivalent_fp,
    free_space,
    optic_axis,
    round_trip,
    solve_optic_axis,
    thin_lens,
)
from .mapping import EnergyMap, energy_distribution_map
from .modes import (
    ApertureMask,
    ModeSolution,
    fox_li_iterate,
    fox_li_solve,
    gain_aperture,
    retro_aperture,
    round_trip_field,
)
from .power import (
    GainMediumParams,
    PowerBudget,
    available_power,
    channel_gain,
    diffraction_loss,
    extraction_efficiency,
    output_power,
    output_power_direct,
    pump_power,
    threshold_power,
)
from .propagation import (
    FresnelPropagator,
    ScalarField2D,
    beam_radius,
    fresnel_propagate,
    gaussian_field,
    save_intensity_csv,
    uniform_field,
    validate_sampling,
)
from .receiver import (
    APDParams,
    LinkMetrics,
    NoisePSD,
    PVOperatingPoint,
    PVParams,
    link_metrics,
    noise_psd,
    pv_current,
    snr_and_rate,
    solve_pv_operating_point,
    split_power,
    subcarrier_signal_power,
)
from .sweep import (
    COLUMNS,
    PRESETS,
    ResultRow,
    SweepSpec,
    emit_csv,
    emit_json,
    parse_sweep,
    run_sweep,
)

__version__ = "0.1.0"
