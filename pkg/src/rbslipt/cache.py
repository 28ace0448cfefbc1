"""Disk cache for solved cavity modes.

A mode is keyed by every cavity parameter that can change it (geometry,
wavelength, grid and iteration settings).  Scalars are stored at full
float64 precision, so a cache hit reproduces transmission factors
bit-for-bit; the mode fields themselves are stored as complex64 to keep
entries small.
"""

from __future__ import annotations

import hashlib
import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import CavityConfig
from .modes import ModeSolution, fox_li_solve
from .propagation import ScalarField2D

__all__ = ["ModeCache", "cache_key", "default_cache_dir"]

ENV_CACHE_DIR = "RBSLIPT_CACHE_DIR"

_KEY_FIELDS = (
    "focal_length",
    "lens_gap",
    "cat_radius",
    "gain_radius",
    "separation",
    "theta",
    "wavelength",
    "grid_size",
    "window_factor",
    "iterations",
    "convergence_tol",
)


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    return Path(env) if env else Path.cwd() / ".rbslipt_cache"


def cache_key(config: CavityConfig) -> str:
    parts = [f"{name}={getattr(config, name)!r}" for name in _KEY_FIELDS]
    digest = hashlib.sha256(";".join(parts).encode()).hexdigest()
    return digest


@dataclass
class ModeCache:
    """File-backed memo of :func:`fox_li_solve` results."""

    directory: Path

    def __post_init__(self):
        self.directory = Path(self.directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, config: CavityConfig) -> Path:
        return self.directory / f"{cache_key(config)}.npz"

    def get(self, config: CavityConfig) -> ModeSolution | None:
        path = self._path(config)
        if not path.exists():
            return None
        try:
            with np.load(path) as data:
                dx = float(data["dx"])
                wavelength = float(data["wavelength"])
                return ModeSolution(
                    field_left=ScalarField2D(
                        data["field_left"].astype(np.complex128), dx, wavelength
                    ),
                    field_right=ScalarField2D(
                        data["field_right"].astype(np.complex128), dx, wavelength
                    ),
                    v1=float(data["v1"]),
                    v2=float(data["v2"]),
                    beam_radius=float(data["beam_radius"]),
                    beam_area=float(data["beam_area"]),
                    overlap_efficiency=float(data["overlap_efficiency"]),
                    iterations_used=int(data["iterations_used"]),
                    converged=bool(data["converged"]),
                )
        except Exception as exc:  # corrupt entry: recompute and overwrite
            warnings.warn(f"discarding corrupt mode cache entry {path.name}: {exc}")
            path.unlink(missing_ok=True)
            return None

    def put(self, config: CavityConfig, mode: ModeSolution) -> None:
        path = self._path(config)
        tmp = path.with_suffix(".tmp.npz")
        np.savez_compressed(
            tmp,
            field_left=mode.field_left.values.astype(np.complex64),
            field_right=mode.field_right.values.astype(np.complex64),
            dx=mode.field_left.dx,
            wavelength=mode.field_left.wavelength,
            v1=mode.v1,
            v2=mode.v2,
            beam_radius=mode.beam_radius,
            beam_area=mode.beam_area,
            overlap_efficiency=mode.overlap_efficiency,
            iterations_used=mode.iterations_used,
            converged=mode.converged,
        )
        os.replace(tmp, path)

    def solve(self, config: CavityConfig) -> ModeSolution:
        """Cached :func:`fox_li_solve`."""
        mode = self.get(config)
        if mode is None:
            mode = fox_li_solve(config)
            self.put(config, mode)
        return mode
