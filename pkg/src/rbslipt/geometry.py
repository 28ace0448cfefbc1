"""Paraxial ray algebra for the mobile resonant cavity.

The cavity is built from two cat's-eye retro-reflectors (lens plus mirror
near the lens focal plane) facing each other across free space.  Rays are
described by their transverse offset and slope about a reference optic
axis; optical elements act as 2x2 ray transfer matrices, and transversely
displaced elements contribute an affine offset term, giving the augmented
3x3 (ABCDEF) form.

The round-trip map of the cavity is composed here, its fixed ray (the
optic axis after the receiver has moved) is solved for, and the cavity is
reduced to an equivalent two-mirror resonator description consumed by the
diffraction mode solver.

Sign conventions: rays propagate left to right and reflections are
unfolded into the propagation direction, so a full round trip is a plain
product of element matrices.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidGeometryError, NoUniqueAxisError

__all__ = [
    "RayState",
    "TransferMatrix",
    "MisalignmentVector",
    "AugmentedTransfer",
    "CavityConfig",
    "free_space",
    "thin_lens",
    "cat_eye_matrix",
    "cat_eye_misalignment",
    "round_trip",
    "solve_optic_axis",
    "optic_axis",
    "equivalent_fp",
]

PARAXIAL_SLOPE_LIMIT = 0.5
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class RayState:
    """A paraxial ray: transverse offset (m) and slope (rad) about the axis."""

    r: float
    slope: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and math.isfinite(self.slope)):
            raise InvalidGeometryError("ray components must be finite")
        if abs(self.slope) >= PARAXIAL_SLOPE_LIMIT:
            warnings.warn(
                f"ray slope {self.slope:.3g} rad exceeds the paraxial range",
                stacklevel=2,
            )

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.slope], dtype=float)


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 ray transfer (ABCD) matrix; ``b`` is in metres, ``c`` in 1/m."""

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def identity(cls) -> "TransferMatrix":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def __matmul__(self, other):
        if isinstance(other, TransferMatrix):
            m = self.as_array() @ other.as_array()
            return TransferMatrix(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
        return NotImplemented

    def apply(self, ray: RayState) -> RayState:
        v = self.as_array() @ ray.as_array()
        return RayState(float(v[0]), float(v[1]))


@dataclass(frozen=True)
class MisalignmentVector:
    """Transverse offset (m) and tilt (rad) of an element axis."""

    delta: float
    delta_slope: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.delta) and math.isfinite(self.delta_slope)):
            raise InvalidGeometryError("misalignment components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.delta, self.delta_slope], dtype=float)


@dataclass(frozen=True)
class AugmentedTransfer:
    """Affine ray map ``r -> M r + (e, f_term)`` in homogeneous 3x3 form."""

    m: TransferMatrix
    e: float = 0.0
    f_term: float = 0.0

    @classmethod
    def identity(cls) -> "AugmentedTransfer":
        return cls(TransferMatrix.identity())

    @classmethod
    def from_matrix(cls, m: TransferMatrix) -> "AugmentedTransfer":
        return cls(m)

    def offset(self) -> np.ndarray:
        return np.array([self.e, self.f_term], dtype=float)

    def __matmul__(self, other):
        # self @ other applies ``other`` first, then ``self``
        if isinstance(other, AugmentedTransfer):
            m = self.m @ other.m
            off = self.m.as_array() @ other.offset() + self.offset()
            return AugmentedTransfer(m, float(off[0]), float(off[1]))
        return NotImplemented

    def apply(self, ray: RayState) -> RayState:
        v = self.m.as_array() @ ray.as_array() + self.offset()
        return RayState(float(v[0]), float(v[1]))


def free_space(d: float) -> TransferMatrix:
    """Drift over distance ``d`` >= 0 metres."""
    if d < 0:
        raise InvalidGeometryError(f"drift distance must be non-negative, got {d}")
    return TransferMatrix(1.0, d, 0.0, 1.0)


def thin_lens(f: float) -> TransferMatrix:
    """Thin lens of focal length ``f`` > 0 metres."""
    if f <= 0:
        raise InvalidGeometryError(f"focal length must be positive, got {f}")
    return TransferMatrix(1.0, 0.0, -1.0 / f, 1.0)


def cat_eye_matrix(f: float, l: float) -> TransferMatrix:
    """Unfolded transfer matrix of a cat's eye (lens, gap ``l`` to the
    mirror and back, lens again).

    For the ideal retro-reflector, ``l == f``, this reduces to
    ``[[-1, 2f], [0, -1]]``.
    """
    if f <= 0 or l <= 0:
        raise InvalidGeometryError(
            f"cat's eye needs positive focal length and gap, got f={f}, l={l}"
        )
    return thin_lens(f) @ free_space(l) @ free_space(l) @ thin_lens(f)


def cat_eye_misalignment(
    f: float,
    l: float,
    delta: MisalignmentVector,
    formula: str = "rederived",
) -> AugmentedTransfer:
    """Augmented transfer of a transversely displaced cat's eye.

    The offset term is ``(M_delta - M_cat) @ (delta, delta')`` where
    ``M_delta`` is the drift over the element's internal path ``2 l``.
    ``formula`` selects between that expression (``"rederived"``, the
    default) and the literal closed form ``[-2*delta*l/f,
    2*delta*(1-f)/f**2]`` (``"paper"``), which is retained for comparison
    although its second component mixes units; see the project notes.
    """
    m_cat = cat_eye_matrix(f, l)
    if formula == "rederived":
        m_delta = free_space(2 * l).as_array()
        off = (m_delta - m_cat.as_array()) @ delta.as_array()
        return AugmentedTransfer(m_cat, float(off[0]), float(off[1]))
    if formula == "paper":
        e = -2.0 * delta.delta * l / f
        f_term = 2.0 * delta.delta * (1.0 - f) / f**2
        return AugmentedTransfer(m_cat, e, f_term)
    raise InvalidGeometryError(
        f"unknown misalignment formula {formula!r}; use 'rederived' or 'paper'"
    )


@dataclass(frozen=True)
class CavityConfig:
    """Geometry and solver knobs for one cavity configuration.

    Geometry: ``focal_length`` and ``lens_gap`` describe each cat's eye,
    ``cat_radius`` the clear radius of its front face, ``gain_radius``
    the gain-medium disc at the transmitter focus, ``separation`` the
    lens-face distance between the two cat's eyes, and ``theta`` the
    receiver deflection angle (rad).  ``reflectivity`` is the output
    coupler power reflectivity.

    Solver knobs: square grid of ``grid_size`` samples (a power of two)
    spanning a window of ``2 * window_factor * cat_radius``, at most
    ``iterations`` power iterations, converged when successive normalized
    mode shapes differ by less than ``convergence_tol`` in L2.
    """

    focal_length: float = 0.05
    lens_gap: float = 0.05
    cat_radius: float = 0.012
    gain_radius: float = 0.003
    separation: float = 3.0
    theta: float = 0.0
    wavelength: float = 1.064e-6
    reflectivity: float = 0.7
    grid_size: int = 2048
    window_factor: float = 2.0
    iterations: int = 300
    convergence_tol: float = 1e-6
    misalignment_formula: str = "rederived"

    def __post_init__(self):
        f, l = self.focal_length, self.lens_gap
        if f <= 0 or l <= 0:
            raise InvalidGeometryError("focal_length and lens_gap must be positive")
        if self.cat_radius <= 0 or self.gain_radius <= 0:
            raise InvalidGeometryError("cat_radius and gain_radius must be positive")
        if self.separation <= 2 * f:
            raise InvalidGeometryError(
                f"separation must exceed 2*focal_length={2 * f}, got {self.separation}"
            )
        if self.wavelength <= 0:
            raise InvalidGeometryError("wavelength must be positive")
        if not 0 < self.reflectivity <= 1:
            raise InvalidGeometryError("reflectivity must be in (0, 1]")
        n = self.grid_size
        if n < 2 or (n & (n - 1)) != 0:
            raise InvalidGeometryError(f"grid_size must be a power of two, got {n}")
        if self.window_factor < 1:
            raise InvalidGeometryError("window_factor must be >= 1")
        if self.iterations < 1:
            raise InvalidGeometryError("iterations must be >= 1")
        if self.convergence_tol <= 0:
            raise InvalidGeometryError("convergence_tol must be positive")
        if self.misalignment_formula not in ("rederived", "paper"):
            raise InvalidGeometryError(
                "misalignment_formula must be 'rederived' or 'paper'"
            )

    @classmethod
    def from_offset(cls, delta: float, **kwargs) -> "CavityConfig":
        """Build a config from a transverse receiver offset instead of an
        angle, using ``tan(theta) = delta / (separation - 2 f)``."""
        kwargs.pop("theta", None)
        probe = cls(**kwargs)
        theta = math.atan2(delta, probe.separation - 2 * probe.focal_length)
        return replace(probe, theta=theta)

    @property
    def offset(self) -> float:
        """Transverse offset of the receiver axis from the origin axis."""
        return (self.separation - 2 * self.focal_length) * math.tan(self.theta)

    @property
    def window(self) -> float:
        """Physical side length of the computation window (m)."""
        return 2.0 * self.window_factor * self.cat_radius


def round_trip(config: CavityConfig, delta: MisalignmentVector) -> AugmentedTransfer:
    """Round-trip ray map starting at the front face of the transmitter
    lens: drift, displaced receiver cat's eye, drift, transmitter cat's eye.
    """
    f, l, d = config.focal_length, config.lens_gap, config.separation
    drift = AugmentedTransfer.from_matrix(free_space(d))
    cat_rx = cat_eye_misalignment(f, l, delta, config.misalignment_formula)
    cat_tx = AugmentedTransfer.from_matrix(cat_eye_matrix(f, l))
    return cat_tx @ drift @ cat_rx @ drift


def solve_optic_axis(
    rt: AugmentedTransfer,
    pin_distance: float | None = None,
    residual_tol: float = 1e-10,
) -> RayState:
    """Fixed ray of a round-trip map: the cavity optic axis.

    Solves ``M r + E = r``.  When ``2 - A - D`` is non-zero the fixed ray
    is unique.  A retro-reflective cavity is degenerate (``A = D = 1``,
    ``C = 0``): every ray of one particular slope is fixed, so a unique
    axis needs an anchor -- ``pin_distance`` selects the fixed ray that
    crosses the reference axis that far downstream (the transmitter focal
    plane, where the gain medium pins the beam, for the ideal cavity).

    Raises ``NoUniqueAxisError`` for a degenerate map without a pin, or
    when the degenerate system is inconsistent (no fixed ray at all).
    """
    m = rt.m
    denom = 2.0 - m.a - m.d
    if abs(denom) >= DEGENERACY_TOL:
        r0 = ((1.0 - m.d) * rt.e + m.b * rt.f_term) / denom
        s0 = (m.c * rt.e + (1.0 - m.a) * rt.f_term) / denom
        ray = RayState(r0, s0)
    else:
        # (M - I) r = -E is rank deficient: fixed rays form a line (or none)
        mm = m.as_array() - np.eye(2)
        rhs = -rt.offset()
        sol, *_ = np.linalg.lstsq(mm, rhs, rcond=None)
        scale = max(np.abs(rhs).max(), np.abs(sol).max(), 1.0)
        if np.abs(mm @ sol - rhs).max() > 1e-9 * scale:
            raise NoUniqueAxisError(
                "degenerate round trip admits no fixed ray (inconsistent offsets)"
            )
        if pin_distance is None:
            raise NoUniqueAxisError(
                "round trip is retro-reflective: fixed rays form a line; "
                "provide pin_distance to anchor the axis"
            )
        null = _null_vector(mm)
        # choose the family member crossing r = 0 at z = pin_distance
        denom_t = null[0] + pin_distance * null[1]
        if abs(denom_t) < 1e-15:
            raise NoUniqueAxisError("pin plane is parallel to the fixed-ray family")
        t = -(sol[0] + pin_distance * sol[1]) / denom_t
        v = sol + t * null
        ray = RayState(float(v[0]), float(v[1]))

    res = rt.m.as_array() @ ray.as_array() + rt.offset() - ray.as_array()
    scale = max(1.0, abs(ray.r), abs(ray.slope))
    if np.abs(res).max() > residual_tol * scale:
        raise NoUniqueAxisError(
            f"fixed-ray residual {np.abs(res).max():.3e} exceeds {residual_tol:.1e}"
        )
    return ray


def _null_vector(mm: np.ndarray) -> np.ndarray:
    _, _, vt = np.linalg.svd(mm)
    return vt[-1]


def optic_axis(config: CavityConfig, delta: MisalignmentVector | None = None) -> RayState:
    """Optic axis of the configured cavity at the transmitter lens face.

    ``delta`` defaults to the transverse offset implied by the configured
    deflection angle.  For the ideal cat's-eye cavity this reproduces the
    closed form ``r0 = -delta*f/(d - 2f)``, ``r0' = delta/(d - 2f)``.
    """
    if delta is None:
        delta = MisalignmentVector(config.offset)
    rt = round_trip(config, delta)
    return solve_optic_axis(rt, pin_distance=config.focal_length)


def equivalent_fp(config: CavityConfig) -> tuple[float, float]:
    """Equivalent two-mirror resonator of the cavity: ``(length, theta)``.

    The effective mirrors sit at the cat's-eye focal planes; the
    separation is measured along the deflected optic axis and includes
    the internal fold of each retro-reflector, so it equals the lens-face
    separation at zero deflection:
    ``L = (d - 2 f) / cos(theta) + 2 f``.
    """
    f, d = config.focal_length, config.separation
    if d < 10 * f:
        warnings.warn(
            "cavity separation is not large compared to the focal length; "
            "the equivalent-resonator reduction degrades",
            stacklevel=2,
        )
    length = (d - 2 * f) / math.cos(config.theta) + 2 * f
    return length, config.theta
