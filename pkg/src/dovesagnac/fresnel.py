"""Dove-prism polarization parameters from refraction and total internal reflection.

The prism is a truncated right-angle prism with base angle ``base_angle``.
A ray entering parallel to the base meets the input face at
``theta1 = pi/2 - base_angle``, refracts to ``theta2``, and strikes the base
at ``theta3 = base_angle + theta2`` where it is totally reflected.  The two
refracting faces set the intensity transmissions; the reflection sets the
relative phase between the s and p components.

Polarization parallel to the base normal is the p component (the normal lies
in the plane of incidence); the perpendicular component is s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .algebra import EPS
from .errors import InvalidArgumentError, NoTotalInternalReflectionError

BISECTION_TOL = 1e-9


@dataclass(frozen=True)
class DoveParams:
    """Polarization action of a Dove prism.

    Attributes
    ----------
    t_par : float
        Intensity transmission for light polarized parallel to the base normal.
    t_perp : float
        Intensity transmission for the perpendicular component.
    delta_phi : float
        Phase (radians) added to the perpendicular component, in [0, pi).
    """

    t_par: float
    t_perp: float
    delta_phi: float

    def __post_init__(self):
        for name in ("t_par", "t_perp", "delta_phi"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
        for name in ("t_par", "t_perp"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise InvalidArgumentError(f"{name} must lie in (0, 1], got {value!r}")
        if not 0.0 <= self.delta_phi < math.pi:
            raise InvalidArgumentError(
                f"delta_phi must lie in [0, pi), got {self.delta_phi!r}"
            )


# Values measured on the 45 degree, 63 mm prism used for the figures.
MEASURED_DOVE = DoveParams(t_par=0.9877, t_perp=0.9475, delta_phi=0.159 * math.pi)
LOSSLESS_DOVE = DoveParams(1.0, 1.0, 0.0)


@dataclass(frozen=True)
class PrismGeometry:
    base_angle: float = math.pi / 4
    refractive_index: float = 1.52
    length_mm: float = 63.0

    def __post_init__(self):
        if not (math.isfinite(self.base_angle) and 0.0 < self.base_angle < math.pi / 2):
            raise InvalidArgumentError(
                f"base_angle must lie in (0, pi/2), got {self.base_angle!r}"
            )
        if not (math.isfinite(self.refractive_index) and self.refractive_index > 1.0):
            raise InvalidArgumentError(
                f"refractive_index must exceed 1, got {self.refractive_index!r}"
            )
        if not (math.isfinite(self.length_mm) and self.length_mm > 0.0):
            raise InvalidArgumentError(f"length_mm must be positive, got {self.length_mm!r}")


@dataclass(frozen=True)
class RayAngles:
    theta1: float
    theta2: float
    theta3: float


def critical_angle(n: float) -> float:
    """Glass-to-air critical angle for index ``n``."""
    if not n > 1.0:
        raise InvalidArgumentError(f"refractive index must exceed 1, got {n!r}")
    return math.asin(1.0 / n)


def fresnel_coefficients(n1: float, n2: float, theta_i: float) -> Tuple[complex, complex, complex, complex]:
    """Amplitude coefficients ``(r_s, r_p, t_s, t_p)`` for a planar interface.

    Beyond the critical angle the transmitted cosine becomes imaginary,
    ``cos(theta_t) = i*sqrt(...)``, so the reflection coefficients acquire
    unit modulus and a phase.  The p coefficients use the convention
    ``r_p = (n2 cos_i - n1 cos_t) / (n2 cos_i + n1 cos_t)``.
    """
    cos_i = math.cos(theta_i)
    sin_t = n1 * math.sin(theta_i) / n2
    if abs(sin_t) <= 1.0:
        cos_t = complex(math.sqrt(1.0 - sin_t * sin_t))
    else:
        cos_t = 1j * math.sqrt(sin_t * sin_t - 1.0)
    r_s = (n1 * cos_i - n2 * cos_t) / (n1 * cos_i + n2 * cos_t)
    r_p = (n2 * cos_i - n1 * cos_t) / (n2 * cos_i + n1 * cos_t)
    t_s = 2 * n1 * cos_i / (n1 * cos_i + n2 * cos_t)
    t_p = 2 * n1 * cos_i / (n2 * cos_i + n1 * cos_t)
    return complex(r_s), complex(r_p), complex(t_s), complex(t_p)


def fresnel_power(n1: float, n2: float, theta_i: float) -> Tuple[float, float, float, float]:
    """Reflectances and transmittances ``(R_s, R_p, T_s, T_p)``."""
    r_s, r_p, t_s, t_p = fresnel_coefficients(n1, n2, theta_i)
    sin_t = n1 * math.sin(theta_i) / n2
    if abs(sin_t) >= 1.0:
        return abs(r_s) ** 2, abs(r_p) ** 2, 0.0, 0.0
    cos_t = math.sqrt(1.0 - sin_t * sin_t)
    flux = (n2 * cos_t) / (n1 * math.cos(theta_i))
    return abs(r_s) ** 2, abs(r_p) ** 2, flux * abs(t_s) ** 2, flux * abs(t_p) ** 2


def ray_angles(geom: PrismGeometry, theta1: Optional[float] = None) -> RayAngles:
    """Trace the axial ray to the base.

    ``theta1`` defaults to a ray travelling parallel to the base.  For that
    ray the base reflection is always total, whatever the index and base
    angle; an explicit ``theta1`` allows tilted rays that may escape.
    """
    n = geom.refractive_index
    if theta1 is None:
        theta1 = math.pi / 2 - geom.base_angle
    if not (math.isfinite(theta1) and abs(theta1) < math.pi / 2):
        raise InvalidArgumentError(f"theta1 must lie in (-pi/2, pi/2), got {theta1!r}")
    theta2 = math.asin(math.sin(theta1) / n)
    theta3 = geom.base_angle + theta2
    if not math.sin(theta3) > 1.0 / n:
        raise NoTotalInternalReflectionError(
            f"incidence {math.degrees(theta3):.4f} deg at the base is below the "
            f"critical angle {math.degrees(critical_angle(n)):.4f} deg"
        )
    return RayAngles(theta1, theta2, theta3)


def tir_relative_phase(n: float, theta3: float) -> float:
    """Phase lead of s over p after total internal reflection (glass index ``n``)."""
    if not n > 1.0:
        raise InvalidArgumentError(f"refractive index must exceed 1, got {n!r}")
    if not (math.isfinite(theta3) and 0.0 <= theta3 <= math.pi / 2):
        raise InvalidArgumentError(f"theta3 must lie in [0, pi/2], got {theta3!r}")
    s = math.sin(theta3)
    radicand = s * s - 1.0 / (n * n)
    if radicand < -EPS:
        raise NoTotalInternalReflectionError(
            f"theta3={theta3!r} is below the critical angle for n={n!r}"
        )
    radicand = max(radicand, 0.0)
    return 2.0 * math.atan(math.cos(theta3) * math.sqrt(radicand) / (s * s))


def max_tir_phase(n: float) -> float:
    """Largest TIR phase reachable at index ``n`` over all incidence angles."""
    if not (math.isfinite(n) and n > 1.0):
        raise InvalidArgumentError(f"refractive index must exceed 1, got {n!r}")
    return 2.0 * math.atan((1.0 - 1.0 / (n * n)) / (2.0 / n))


def min_index_for_phase(target: float, tol: float = BISECTION_TOL) -> float:
    """Smallest index whose maximal TIR phase reaches ``target`` (bisection)."""
    if not (math.isfinite(target) and 0.0 < target < math.pi):
        raise InvalidArgumentError(f"target phase must lie in (0, pi), got {target!r}")
    lo, hi = 1.0, 2.0
    while max_tir_phase(hi) < target:
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if max_tir_phase(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def face_transmittances(geom: PrismGeometry) -> Tuple[float, float]:
    """Uncoated two-face transmissions ``(t_par, t_perp)``.

    Entry is air to glass at ``theta1`` and exit glass to air at ``theta2``;
    the base reflection is lossless.  Real prisms are anti-reflection coated
    and transmit noticeably more, so this is an upper bound on the
    polarization contrast rather than a prediction for a coated part.
    """
    n = geom.refractive_index
    theta1 = math.pi / 2 - geom.base_angle
    theta2 = math.asin(math.sin(theta1) / n)
    _, _, ts_in, tp_in = fresnel_power(1.0, n, theta1)
    _, _, ts_out, tp_out = fresnel_power(n, 1.0, theta2)
    return tp_in * tp_out, ts_in * ts_out


def dove_params_from_physics(geom: PrismGeometry) -> DoveParams:
    rays = ray_angles(geom)
    t_par, t_perp = face_transmittances(geom)
    delta = tir_relative_phase(geom.refractive_index, rays.theta3)
    return DoveParams(min(t_par, 1.0), min(t_perp, 1.0), delta)


def geometry_phase(n: float, base_angle: float) -> float:
    """TIR phase of the axial ray in a prism of index ``n`` (parallel entry)."""
    return tir_relative_phase(n, ray_angles(PrismGeometry(base_angle, n)).theta3)


def tir_phase_complex(n: float, theta3: float) -> float:
    """``arg(r_s / r_p)`` at the base, straight from the complex coefficients."""
    r_s, r_p, _, _ = fresnel_coefficients(n, 1.0, theta3)
    return float(np.angle(r_s / r_p))
