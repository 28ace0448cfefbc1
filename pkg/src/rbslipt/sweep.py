"""Parameter sweeps over the link operating space with deterministic output.

A sweep varies up to two of ``L`` (distance, m), ``theta_deg``, ``P_in``
(W) and ``mu`` (split ratio) over a rectangular grid, evaluates the full
link at every point and emits one row per point in row-major axis order.
Rows where a point fails (for example a sampling violation) are flagged
in the ``status`` column and the run continues.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cache import ModeCache
from .config import DEFAULTS, build_components
from .errors import ConfigError, RBSliptError
from .modes import fox_li_solve
from .receiver import link_metrics

__all__ = [
    "SweepSpec",
    "ResultRow",
    "COLUMNS",
    "PRESETS",
    "parse_sweep",
    "run_sweep",
    "emit_csv",
    "emit_json",
]

AXIS_NAMES = ("L", "theta_deg", "P_in", "mu")

# Fixed column order of emitted tables (units in the header names).
COLUMNS = (
    "L_m",
    "theta_deg",
    "P_in_W",
    "mu",
    "P_out_W",
    "gamma",
    "P_pv_o_W",
    "R_a_bps",
    "SNR",
    "V1",
    "V2",
    "eta_b",
    "converged",
    "below_threshold",
    "status",
)


@dataclass
class SweepSpec:
    """Axes (name, values) evaluated as a row-major grid plus fixed values."""

    axes: list[tuple[str, np.ndarray]]
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for name, values in self.axes:
            if name not in AXIS_NAMES:
                raise ConfigError(name, f"unknown sweep axis; use one of {AXIS_NAMES}")
            if name in seen:
                raise ConfigError(name, "axis listed twice")
            seen.add(name)
            if len(values) < 1:
                raise ConfigError(name, "axis needs at least one value")
        swept = [name for name, values in self.axes if len(values) > 1]
        if len(swept) > 2:
            raise ConfigError(
                ",".join(swept), "at most 2 swept axes per run"
            )
        for name in self.fixed:
            if name not in AXIS_NAMES:
                raise ConfigError(name, f"unknown fixed parameter; use one of {AXIS_NAMES}")

    def grid(self) -> list[dict]:
        """All grid points in row-major order over the axes."""
        points = [dict(self.fixed)]
        for name, values in self.axes:
            points = [dict(p, **{name: float(v)}) for p in points for v in values]
        return points


@dataclass
class ResultRow:
    point: dict
    metrics: dict
    status: str = "ok"


def _axis_values(text: str) -> np.ndarray:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(text, "range axis must be start:stop:steps")
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if steps < 1:
            raise ConfigError(text, "steps must be >= 1")
        return np.linspace(start, stop, steps)
    return np.array([float(v) for v in text.split(",")])


def parse_sweep(text: str) -> SweepSpec:
    """Parse ``"theta_deg=0:15:16;L=3"`` style sweep definitions.

    Each ``;``-separated term is ``name=start:stop:steps`` (inclusive
    linspace) or ``name=v1,v2,...``; single-valued terms pin that
    parameter for the run.
    """
    axes = []
    for term in text.split(";"):
        term = term.strip()
        if not term:
            continue
        if "=" not in term:
            raise ConfigError(term, "sweep term must look like name=values")
        name, _, values = term.partition("=")
        axes.append((name.strip(), _axis_values(values.strip())))
    if not axes:
        raise ConfigError(text, "empty sweep definition")
    return SweepSpec(axes=axes)


# Reference sweeps behind the published evaluation figures.
PRESETS: dict[str, tuple[str, SweepSpec]] = {
    "fig6": (
        "channel gain vs deflection angle for several distances (P_in=200 W)",
        SweepSpec(
            axes=[("L", np.array([1.0, 2.0, 3.0, 5.0, 10.0])),
                  ("theta_deg", np.linspace(0.0, 15.0, 16))],
            fixed={"P_in": 200.0, "mu": 0.99},
        ),
    ),
    "fig7": (
        "charging power and rate vs deflection angle for several split ratios (L=3 m)",
        SweepSpec(
            axes=[("mu", np.array([0.0, 0.25, 0.5, 0.75, 0.99, 1.0])),
                  ("theta_deg", np.linspace(0.0, 15.0, 16))],
            fixed={"L": 3.0, "P_in": 200.0},
        ),
    ),
    "fig8": (
        "charging power and rate vs input power at L in {2,3} m "
        "(run again with --set theta_deg=10 for the deflected curves)",
        SweepSpec(
            axes=[("L", np.array([2.0, 3.0])),
                  ("P_in", np.linspace(25.0, 300.0, 12))],
            fixed={"theta_deg": 0.0, "mu": 0.99},
        ),
    ),
    "fig9": (
        "charging power and rate vs distance for theta in {0,10,15} deg (P_in=200 W)",
        SweepSpec(
            axes=[("theta_deg", np.array([0.0, 10.0, 15.0])),
                  ("L", np.linspace(1.0, 10.0, 10))],
            fixed={"P_in": 200.0, "mu": 0.99},
        ),
    ),
    "fig10": (
        "charging power and rate vs deflection angle for P_in in {200,250} W (L=3 m)",
        SweepSpec(
            axes=[("P_in", np.array([200.0, 250.0])),
                  ("theta_deg", np.linspace(0.0, 15.0, 16))],
            fixed={"L": 3.0, "mu": 0.99},
        ),
    ),
}


def _evaluate_point(point: dict, cfg: dict, cache: ModeCache | None) -> ResultRow:
    merged = dict(cfg)
    if "L" in point:
        merged["distance"] = point["L"]
    if "theta_deg" in point:
        merged["theta_deg"] = point["theta_deg"]
    if "P_in" in point:
        merged["input_power"] = point["P_in"]
    if "mu" in point:
        merged["split_ratio"] = point["mu"]
    cavity, gain, pv, apd, operating = build_components(merged)
    resolved = {
        "L": merged["distance"],
        "theta_deg": merged["theta_deg"],
        "P_in": operating["input_power"],
        "mu": operating["split_ratio"],
    }
    try:
        mode = cache.solve(cavity) if cache is not None else fox_li_solve(cavity)
        metrics = link_metrics(
            cavity,
            operating["input_power"],
            operating["split_ratio"],
            gain=gain,
            pv=pv,
            apd=apd,
            mode=mode,
            drive=operating["drive_mode"],
        )
        return ResultRow(
            point=resolved,
            metrics={
                "P_out_W": metrics.p_out,
                "gamma": metrics.gamma,
                "P_pv_o_W": metrics.p_pv_o,
                "R_a_bps": metrics.rate,
                "SNR": metrics.snr,
                "V1": metrics.v1,
                "V2": metrics.v2,
                "eta_b": metrics.overlap_efficiency,
                "converged": metrics.converged,
                "below_threshold": metrics.below_threshold,
            },
        )
    except RBSliptError as exc:
        empty = {
            key: math.nan
            for key in ("P_out_W", "gamma", "P_pv_o_W", "R_a_bps", "SNR", "V1", "V2", "eta_b")
        }
        empty.update({"converged": False, "below_threshold": False})
        return ResultRow(point=resolved, metrics=empty, status=f"error:{type(exc).__name__}")


def run_sweep(
    spec: SweepSpec,
    cfg: dict | None = None,
    jobs: int = 1,
    cache: ModeCache | None = None,
) -> list[ResultRow]:
    """Evaluate the sweep grid; row order is row-major over the axes and
    independent of ``jobs``."""
    cfg = dict(DEFAULTS) if cfg is None else dict(cfg)
    points = spec.grid()
    if jobs <= 1:
        return [_evaluate_point(p, cfg, cache) for p in points]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda p: _evaluate_point(p, cfg, cache), points))


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return f"{value:.9g}"


def _row_values(row: ResultRow) -> dict:
    out = {
        "L_m": row.point["L"],
        "theta_deg": row.point["theta_deg"],
        "P_in_W": row.point["P_in"],
        "mu": row.point["mu"],
    }
    out.update(row.metrics)
    out["status"] = row.status
    return out


def emit_csv(rows: list[ResultRow], path) -> None:
    """Write rows as CSV; numbers carry 9 significant digits."""
    if not rows:
        raise RBSliptError("nothing to emit: empty result set")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(COLUMNS) + "\n")
        for row in rows:
            values = _row_values(row)
            fh.write(",".join(_format(values[col]) for col in COLUMNS) + "\n")


def emit_json(rows: list[ResultRow], path) -> None:
    """Write rows as a JSON array of objects (numbers at 9 significant
    digits, exactly recoverable by a JSON parser)."""
    if not rows:
        raise RBSliptError("nothing to emit: empty result set")
    payload = []
    for row in rows:
        values = _row_values(row)
        obj = {}
        for col in COLUMNS:
            v = values[col]
            if isinstance(v, (bool, str)):
                obj[col] = v
            elif math.isnan(v):
                obj[col] = None
            else:
                obj[col] = float(f"{v:.9g}")
        payload.append(obj)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
