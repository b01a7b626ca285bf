"""Measuring a Dove prism: transmissions from a waveplate scan, phase from a PBS split.

Two bench procedures are modelled and inverted:

* a half-wave plate before the prism (prism at rotation 0) turns |H> to
  ``(cos 2t, sin 2t)``; the total transmitted power is
  ``t_par cos^2(2t) + t_perp sin^2(2t)``;
* with the prism at ``pi/4`` and an |H> input, a PBS after the prism measures
  the renormalized H share, which fixes ``cos(delta_phi)``.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .elements import dove_jones, hwp
from .errors import (
    InconsistentMeasurementError,
    InvalidArgumentError,
    NoSolutionError,
    UnderdeterminedFitError,
)
from .fresnel import BISECTION_TOL, DoveParams, geometry_phase

CSV_HEADER = ("setting_rad", "intensity")


class SweepKind(enum.Enum):
    HWP_ROTATION = "hwp-rotation"
    PBS_SPLIT = "pbs-split"


@dataclass(frozen=True)
class IntensitySweep:
    settings: Tuple[float, ...]
    intensities: Tuple[float, ...]
    meta: SweepKind = SweepKind.HWP_ROTATION

    def __post_init__(self):
        settings = tuple(float(x) for x in self.settings)
        intensities = tuple(float(x) for x in self.intensities)
        if len(settings) != len(intensities):
            raise InvalidArgumentError("settings and intensities differ in length")
        if any(b <= a for a, b in zip(settings, settings[1:])):
            raise InvalidArgumentError("settings must be strictly increasing")
        if not all(math.isfinite(x) for x in settings + intensities):
            raise InvalidArgumentError("sweep contains non-finite values")
        if any(i < 0 for i in intensities):
            raise InvalidArgumentError("intensities must be non-negative")
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "intensities", intensities)

    def to_csv(self, path: Union[str, FsPath]) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for s, i in zip(self.settings, self.intensities):
                writer.writerow((repr(s), repr(i)))

    @classmethod
    def from_csv(cls, path: Union[str, FsPath], meta: SweepKind = SweepKind.HWP_ROTATION) -> "IntensitySweep":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
                raise InvalidArgumentError(
                    f"expected header {','.join(CSV_HEADER)!r}, got {header!r}"
                )
            settings, intensities = [], []
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != 2:
                    raise InvalidArgumentError(f"line {lineno}: expected 2 columns, got {len(row)}")
                try:
                    settings.append(float(row[0]))
                    intensities.append(float(row[1]))
                except ValueError as exc:
                    raise InvalidArgumentError(f"line {lineno}: {exc}") from None
        return cls(tuple(settings), tuple(intensities), meta)


@dataclass(frozen=True)
class FitResult:
    t_par: float
    t_perp: float
    residual_rms: float
    iterations: int
    delta_phi: Optional[float] = None

    def to_dove(self, delta_phi: Optional[float] = None) -> DoveParams:
        phase = self.delta_phi if delta_phi is None else delta_phi
        if phase is None:
            raise InvalidArgumentError("no delta_phi available for a full DoveParams")
        return DoveParams(self.t_par, self.t_perp, phase)


def hwp_sweep_intensity(dove: DoveParams, theta: float) -> float:
    """Total power after HWP(theta) and the unrotated prism, for unit |H> input."""
    out = dove_jones(dove, 0.0) @ hwp(theta) @ np.array([1.0, 0.0], dtype=complex)
    return float(np.vdot(out, out).real)


def simulate_hwp_sweep(
    dove: DoveParams,
    thetas: Sequence[float],
    noise_rms: float = 0.0,
    seed: int = 0,
) -> IntensitySweep:
    """Synthetic waveplate scan with additive Gaussian detector noise."""
    if not (math.isfinite(noise_rms) and noise_rms >= 0):
        raise InvalidArgumentError("noise_rms must be a finite value >= 0")
    thetas = np.asarray(thetas, dtype=float)
    clean = np.array([hwp_sweep_intensity(dove, t) for t in thetas])
    if noise_rms > 0:
        clean = clean + np.random.default_rng(seed).normal(0.0, noise_rms, size=clean.shape)
    return IntensitySweep(tuple(thetas), tuple(np.maximum(clean, 0.0)), SweepKind.HWP_ROTATION)


def fit_transmissions(sweep: IntensitySweep) -> FitResult:
    """Linear least squares for ``I = t_par cos^2(2t) + t_perp sin^2(2t)``."""
    theta = np.asarray(sweep.settings)
    y = np.asarray(sweep.intensities)
    if theta.size < 4:
        raise UnderdeterminedFitError(f"need at least 4 samples, got {theta.size}")
    design = np.column_stack([np.cos(2 * theta) ** 2, np.sin(2 * theta) ** 2])
    sv = np.linalg.svd(design, compute_uv=False)
    if sv[-1] <= 1e-8 * sv[0]:
        raise UnderdeterminedFitError(
            "waveplate settings do not separate the two transmissions "
            "(all angles congruent modulo pi/2 or mirror pairs)"
        )
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return FitResult(
        t_par=float(coef[0]),
        t_perp=float(coef[1]),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        iterations=1,
    )


def pbs_split_probability(dove: DoveParams) -> float:
    """Renormalized H share behind the PBS with the prism at ``pi/4``."""
    out = dove_jones(dove, math.pi / 4) @ np.array([1.0, 0.0], dtype=complex)
    return float(abs(out[0]) ** 2 / np.vdot(out, out).real)


def invert_delta_phi(p_out_h: float, t_par: float, t_perp: float) -> float:
    """TIR phase from the measured H share at ``alpha = pi/4``; result in [0, pi]."""
    if not 0.0 <= p_out_h <= 1.0:
        raise InvalidArgumentError(f"p_out_h must lie in [0, 1], got {p_out_h!r}")
    for name, t in (("t_par", t_par), ("t_perp", t_perp)):
        if not 0.0 < t <= 1.0:
            raise InvalidArgumentError(f"{name} must lie in (0, 1], got {t!r}")
    cos_phi = (2 * p_out_h - 1) * (t_par + t_perp) / (2 * math.sqrt(t_par * t_perp))
    if not -1.0 - 1e-12 <= cos_phi <= 1.0 + 1e-12:
        raise InconsistentMeasurementError(
            f"implied cos(delta_phi) = {cos_phi:.6g} lies outside [-1, 1]"
        )
    return math.acos(min(1.0, max(-1.0, cos_phi)))


def infer_index_from_phase(
    delta_phi: float,
    base_angle: float = math.pi / 4,
    n_max: float = 10.0,
    tol: float = BISECTION_TOL,
) -> float:
    """Glass index whose axial-ray TIR phase equals ``delta_phi`` (bisection on n)."""
    if not (math.isfinite(delta_phi) and 0.0 < delta_phi < math.pi / 2):
        raise InvalidArgumentError(f"delta_phi must lie in (0, pi/2), got {delta_phi!r}")
    lo, hi = 1.0 + 1e-12, float(n_max)
    if geometry_phase(hi, base_angle) < delta_phi:
        raise NoSolutionError(
            f"a {math.degrees(base_angle):.3g} deg prism reaches at most "
            f"{geometry_phase(hi, base_angle) / math.pi:.4f} pi for n <= {n_max:g}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if geometry_phase(mid, base_angle) >= delta_phi:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
