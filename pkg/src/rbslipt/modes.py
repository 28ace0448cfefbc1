"""Self-reproducing transverse mode of the equivalent resonator.

The cavity reduces to two flat effective mirrors separated by the
equivalent length, each carrying a binary reflecting-area mask in the
frame of the deflected optic axis:

* the retro-reflector footprint: at deflection ``theta`` a double pass
  through a cat's eye walks the beam transversely by ``a = 2 f tan(theta)``,
  so only the intersection of two discs of the front-face radius, offset
  by ``a`` symmetrically about the axis, keeps reflecting;
* the gain disc: the transmitter-side mirror is additionally limited to
  the gain medium, a disc of radius ``r_g cos(theta)``.

Power iteration of the round-trip diffraction operator (Fox-Li method)
starting from a uniform field converges to the lowest-loss mode.  The
solver reports the one-way transmission factors of the converged mode,
its spot size at the receiver plane and the gain overlap efficiency.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ZeroFieldError
from .geometry import CavityConfig, equivalent_fp
from .propagation import (
    FresnelPropagator,
    ScalarField2D,
    beam_radius,
    uniform_field,
    validate_sampling,
)

__all__ = [
    "ApertureMask",
    "ModeSolution",
    "retro_aperture",
    "gain_aperture",
    "round_trip_field",
    "fox_li_iterate",
    "fox_li_solve",
]


@dataclass(frozen=True)
class ApertureMask:
    """Binary reflecting-area indicator on the field grid."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if not np.all((vals == 0) | (vals == 1)):
            raise ValueError("aperture mask must be binary")
        object.__setattr__(self, "values", vals.astype(float))

    @property
    def open_area_pixels(self) -> int:
        return int(self.values.sum())

    def area(self, dx: float) -> float:
        return self.values.sum() * dx * dx

    def is_closed(self) -> bool:
        return not self.values.any()

    def __mul__(self, other):
        if isinstance(other, ApertureMask):
            return ApertureMask(self.values * other.values)
        return NotImplemented

    def apply(self, field: ScalarField2D) -> ScalarField2D:
        return ScalarField2D(field.values * self.values, field.dx, field.wavelength)


def _grid_coords(grid: ScalarField2D) -> tuple[np.ndarray, np.ndarray]:
    return grid.coordinates()


def retro_aperture(
    grid: ScalarField2D, cat_radius: float, theta: float, focal_length: float
) -> ApertureMask:
    """Active reflecting area of a cat's eye at deflection ``theta``.

    Intersection of two discs of radius ``cat_radius`` offset by
    ``a = 2 f tan(theta)`` symmetrically about the optic axis.  Closes
    entirely once ``a >= 2 * cat_radius`` (a warning is emitted).
    """
    x, y = _grid_coords(grid)
    a = 2.0 * focal_length * math.tan(theta)
    if a >= 2.0 * cat_radius:
        # overlap degenerates to at most a point: nothing reflects
        mask = ApertureMask(np.zeros_like(x))
    else:
        r2 = cat_radius**2
        mask = ApertureMask(
            (x**2 + (y + a / 2) ** 2 <= r2) & (x**2 + (y - a / 2) ** 2 <= r2)
        )
    if mask.is_closed():
        warnings.warn(
            f"retro-reflector aperture fully vignetted at theta="
            f"{math.degrees(theta):.2f} deg",
            stacklevel=2,
        )
    return mask


def gain_aperture(grid: ScalarField2D, gain_radius: float, theta: float) -> ApertureMask:
    """Projected gain-medium disc, radius ``gain_radius * cos(theta)``."""
    x, y = _grid_coords(grid)
    radius = gain_radius * math.cos(theta)
    return ApertureMask(x**2 + y**2 <= radius**2)


def _mirror_phase(grid: ScalarField2D, roc: float) -> np.ndarray:
    x, y = grid.coordinates()
    k = 2.0 * np.pi / grid.wavelength
    return np.exp(-1j * k * (x**2 + y**2) / roc)


def round_trip_field(
    field: ScalarField2D,
    mask_left: ApertureMask,
    mask_right: ApertureMask,
    distance: float,
    propagator: FresnelPropagator | None = None,
    curvature_left: float | None = None,
    curvature_right: float | None = None,
) -> ScalarField2D:
    """One cavity round trip of a field stored at the right (receiver)
    mirror: clip right, propagate, clip left, propagate, clip right.

    Optional mirror radii of curvature apply the corresponding quadratic
    phase together with each mask (used to model curved-mirror
    resonators, e.g. for validation against Gaussian-mode theory).
    """
    if propagator is None:
        propagator = FresnelPropagator(field.n, field.dx, field.wavelength, distance)
    phase_l = _mirror_phase(field, curvature_left) if curvature_left else None
    phase_r = _mirror_phase(field, curvature_right) if curvature_right else None

    def reflect_right(f: ScalarField2D) -> ScalarField2D:
        out = mask_right.apply(f)
        if phase_r is not None:
            out.values *= phase_r
        return out

    def reflect_left(f: ScalarField2D) -> ScalarField2D:
        out = mask_left.apply(f)
        if phase_l is not None:
            out.values *= phase_l
        return out

    # the leading clip only re-asserts the stored field's support; the two
    # physical reflections (with any mirror curvature) happen once each
    state = mask_right.apply(field)
    return reflect_right(propagator(reflect_left(propagator(state))))


@dataclass
class ModeSolution:
    """Converged cavity mode and its scalar summaries.

    ``field_left`` / ``field_right`` are the fields incident on the
    transmitter-side and receiver-side effective mirrors.  ``v1`` is the
    fraction of mode power surviving the one-way pass toward the output
    coupler (including its mask), ``v2`` the return pass onto the gain
    disc.  ``beam_radius`` is the second-moment radius of the beam
    incident on the output coupler, ``beam_area`` its disc area, and
    ``overlap_efficiency`` min(beam_area / gain_area, 1).
    """

    field_left: ScalarField2D
    field_right: ScalarField2D
    v1: float
    v2: float
    beam_radius: float
    beam_area: float
    overlap_efficiency: float
    iterations_used: int
    converged: bool

    @property
    def channel_open(self) -> bool:
        return self.v1 > 0.0 and self.v2 > 0.0


def _shape_distance(u: np.ndarray, v: np.ndarray) -> float:
    """L2 distance between unit-power fields after optimal phase alignment."""
    ip = np.vdot(v, u)
    phase = ip / abs(ip) if abs(ip) > 0 else 1.0
    return float(np.linalg.norm(u - v * phase))


def fox_li_iterate(
    initial: ScalarField2D,
    mask_left: ApertureMask,
    mask_right: ApertureMask,
    distance: float,
    max_iterations: int = 300,
    tol: float = 1e-6,
    curvature_left: float | None = None,
    curvature_right: float | None = None,
    propagator: FresnelPropagator | None = None,
) -> tuple[ScalarField2D | None, int, bool]:
    """Power-iterate the round trip until the normalized mode shape is
    stationary.  Returns ``(mode_at_right_mirror, iterations, converged)``;
    the mode is ``None`` if the field power hits zero (closed cavity).
    """
    if propagator is None:
        propagator = FresnelPropagator(initial.n, initial.dx, initial.wavelength, distance)
    u = initial.values.astype(np.complex128)
    prev = None
    converged = False
    it = 0
    for it in range(1, max_iterations + 1):
        field = round_trip_field(
            ScalarField2D(u, initial.dx, initial.wavelength),
            mask_left,
            mask_right,
            distance,
            propagator=propagator,
            curvature_left=curvature_left,
            curvature_right=curvature_right,
        )
        u = field.values
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return None, it, False
        u = u / norm
        if prev is not None and _shape_distance(u, prev) < tol:
            converged = True
            break
        prev = u
    return ScalarField2D(u, initial.dx, initial.wavelength), it, converged


def fox_li_solve(config: CavityConfig, initial: ScalarField2D | None = None) -> ModeSolution:
    """Solve for the cavity mode of ``config`` and summarize its losses.

    The grid spans the configured computation window; propagation runs
    over the equivalent resonator length at the configured deflection.
    A fully vignetted aperture (or an iteration that loses all power)
    yields a closed-channel solution with ``v1 = v2 = 0``.
    """
    n = config.grid_size
    dx = config.window / n
    length, theta = equivalent_fp(config)
    if initial is None:
        initial = uniform_field(n, dx, config.wavelength)
    elif initial.n != n or not math.isclose(initial.dx, dx, rel_tol=1e-12):
        raise ValueError("custom initial field must live on the configured grid")
    grid = initial

    retro = retro_aperture(grid, config.cat_radius, theta, config.focal_length)
    gain = gain_aperture(grid, config.gain_radius, theta)
    mask_left = retro * gain
    mask_right = retro

    if mask_left.is_closed() or mask_right.is_closed():
        return _closed_solution(grid, iterations=0)

    validate_sampling(n, dx, config.wavelength, length, config.cat_radius)

    propagator = FresnelPropagator(n, dx, config.wavelength, length)
    mode_right, iterations, converged = fox_li_iterate(
        initial,
        mask_left,
        mask_right,
        length,
        max_iterations=config.iterations,
        tol=config.convergence_tol,
        propagator=propagator,
    )
    if mode_right is None:
        return _closed_solution(grid, iterations=iterations)

    incident_left = propagator(mode_right)
    at_gain = mask_left.apply(incident_left)
    p_right = mode_right.power()
    p_gain = at_gain.power()
    if p_gain <= 0.0:
        return _closed_solution(grid, iterations=iterations)
    v2 = p_gain / p_right
    incident_right = propagator(at_gain)
    p_back = mask_right.apply(incident_right).power()
    v1 = p_back / p_gain

    try:
        w = beam_radius(incident_right)
    except ZeroFieldError:
        w = 0.0
    beam_area = math.pi * w**2
    gain_area = math.pi * config.gain_radius**2
    eta_b = min(beam_area / gain_area, 1.0) if w > 0 else 0.0

    return ModeSolution(
        field_left=incident_left,
        field_right=incident_right,
        v1=min(v1, 1.0),
        v2=min(v2, 1.0),
        beam_radius=w,
        beam_area=beam_area,
        overlap_efficiency=eta_b,
        iterations_used=iterations,
        converged=converged,
    )


def _closed_solution(grid: ScalarField2D, iterations: int) -> ModeSolution:
    zero = ScalarField2D(np.zeros_like(grid.values), grid.dx, grid.wavelength)
    return ModeSolution(
        field_left=zero,
        field_right=zero,
        v1=0.0,
        v2=0.0,
        beam_radius=0.0,
        beam_area=0.0,
        overlap_efficiency=0.0,
        iterations_used=iterations,
        converged=False,
    )
