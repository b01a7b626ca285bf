"""Parameter sweeps and rotation-error studies for the three sorters."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .algebra import CompositeState, Path
from .elements import POLARIZATIONS, beam_splitter, beam_splitter_return
from .errors import InvalidArgumentError
from .fresnel import DoveParams
from .interferometers import (
    InterferometerConfig,
    Kind,
    expected_port,
    run,
    run_pbssi,
)
from .metrics import pbssi_fidelity, sorting_fidelity

DEFAULT_POLARIZATIONS = ("H", "V", "+", "-", "L", "R")


class SweepVariable(enum.Enum):
    ALPHA = "alpha"
    DELTA_PHI = "delta_phi"


@dataclass(frozen=True)
class SweepSpec:
    variable: SweepVariable
    grid: Tuple[float, ...]
    config: InterferometerConfig
    input_polarization: np.ndarray
    l: int = 0

    def __post_init__(self):
        grid = tuple(float(x) for x in self.grid)
        if not grid:
            raise InvalidArgumentError("sweep grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidArgumentError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(
            self, "input_polarization", np.asarray(self.input_polarization, dtype=complex)
        )


@dataclass(frozen=True)
class SweepSample:
    x: float
    fidelity: float
    p_c: float
    p_d: float
    polarization_c: Optional[np.ndarray] = None
    polarization_d: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SweepResult:
    variable: SweepVariable
    samples: Tuple[SweepSample, ...]

    @property
    def x(self) -> np.ndarray:
        return np.array([s.x for s in self.samples])

    @property
    def fidelity(self) -> np.ndarray:
        return np.array([s.fidelity for s in self.samples])

    @property
    def p_c(self) -> np.ndarray:
        return np.array([s.p_c for s in self.samples])

    @property
    def p_d(self) -> np.ndarray:
        return np.array([s.p_d for s in self.samples])

    def argmin(self) -> Tuple[float, float]:
        """``(x, fidelity)`` at the lowest fidelity sample."""
        i = int(np.argmin(self.fidelity))
        return self.samples[i].x, self.samples[i].fidelity


def _unit(vec: np.ndarray) -> Optional[np.ndarray]:
    n = np.linalg.norm(vec)
    return vec / n if n > 1e-12 else None


def _bssi_sample(cfg: InterferometerConfig, pol: np.ndarray, l: int, x: float) -> SweepSample:
    out = run(cfg, CompositeState.from_polarization(pol, l))
    return SweepSample(
        x=x,
        fidelity=sorting_fidelity(out, cfg.alpha, l, cfg.bs_transmissivity),
        p_c=out.p_c,
        p_d=out.p_d,
        polarization_c=_unit(out.state.polarization(Path.C, l)),
        polarization_d=_unit(out.state.polarization(Path.D, l)),
    )


def sweep_bssi_alpha(spec: SweepSpec) -> SweepResult:
    """Beam-splitter Sagnac fidelity against prism rotation (plain or modified).

    Order ``l = 0`` (the default) isolates the polarization effect: its OAM
    phase is trivially +1, so the fidelity is the return-port probability.
    """
    if spec.variable is not SweepVariable.ALPHA or spec.config.kind is Kind.PBSSI:
        raise InvalidArgumentError("sweep_bssi_alpha needs an alpha sweep of a beam-splitter Sagnac")
    samples = tuple(
        _bssi_sample(spec.config.with_alpha(a), spec.input_polarization, spec.l, a)
        for a in spec.grid
    )
    return SweepResult(spec.variable, samples)


def sweep_bssi_delta_phi(spec: SweepSpec) -> SweepResult:
    """BSSI fidelity at ``alpha = pi/4`` against the prism's TIR phase."""
    cfg = spec.config
    if spec.variable is not SweepVariable.DELTA_PHI or cfg.kind is not Kind.BSSI:
        raise InvalidArgumentError("sweep_bssi_delta_phi needs a delta_phi sweep of a BSSI")
    if not math.isclose(cfg.alpha, math.pi / 4, abs_tol=1e-12):
        raise InvalidArgumentError("the delta_phi sweep is defined at alpha = pi/4")
    samples = []
    for dphi in spec.grid:
        dove = DoveParams(cfg.dove.t_par, cfg.dove.t_perp, dphi)
        samples.append(_bssi_sample(replace(cfg, dove=dove), spec.input_polarization, spec.l, dphi))
    return SweepResult(spec.variable, tuple(samples))


def sweep_pbssi_alpha(spec: SweepSpec) -> SweepResult:
    """PBSSI sorting fidelity (polarization overlap) and port-c probability."""
    if spec.variable is not SweepVariable.ALPHA or spec.config.kind is not Kind.PBSSI:
        raise InvalidArgumentError("sweep_pbssi_alpha needs an alpha sweep of a PBSSI")
    samples = []
    for a in spec.grid:
        cfg = spec.config.with_alpha(a)
        out = run_pbssi(cfg, CompositeState.from_polarization(spec.input_polarization, spec.l))
        samples.append(
            SweepSample(
                x=a,
                fidelity=pbssi_fidelity(cfg.dove, a),
                p_c=out.p_c,
                p_d=out.p_d,
                polarization_c=_unit(out.state.polarization(Path.C, spec.l)),
                polarization_d=_unit(out.state.polarization(Path.D, spec.l)),
            )
        )
    return SweepResult(spec.variable, tuple(samples))


@dataclass(frozen=True)
class ImperfectionSpec:
    """Gaussian rotator-setting errors for the modified BSSI.

    Every trial draws one error for the prism rotation and one for each
    half-wave plate.  The same draws are shared by all OAM orders and input
    polarizations, as on a bench where one misaligned set-up serves every
    measurement.
    """

    rotation_error_rms: float
    l_range: Tuple[int, int] = (1, 10)
    polarizations: Tuple[str, ...] = DEFAULT_POLARIZATIONS
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.rotation_error_rms) and self.rotation_error_rms >= 0):
            raise InvalidArgumentError("rotation_error_rms must be a finite value >= 0")
        if self.trials < 1:
            raise InvalidArgumentError("trials must be at least 1")
        lo, hi = self.l_range
        if lo > hi:
            raise InvalidArgumentError(f"empty l range {self.l_range!r}")
        for name in self.polarizations:
            if name not in POLARIZATIONS:
                raise InvalidArgumentError(f"unknown polarization {name!r}")

    @property
    def l_values(self) -> List[int]:
        return list(range(self.l_range[0], self.l_range[1] + 1))


@dataclass(frozen=True)
class ImperfectionRow:
    l: int
    polarization: str
    mean_fidelity: float
    stderr: float


def draw_setting_errors(spec: ImperfectionSpec) -> np.ndarray:
    """``(trials, 3)`` array of (prism, plate 1, plate 2) errors; row i is trial i.

    Evaluating any slice of rows reproduces the serial result for those trials.
    """
    rng = np.random.default_rng(spec.seed)
    return rng.normal(0.0, spec.rotation_error_rms, size=(spec.trials, 3))


def _rot(theta: np.ndarray) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, s], -1), np.stack([-s, c], -1)], -2).astype(complex)


def _hwp(theta: np.ndarray) -> np.ndarray:
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return np.stack([np.stack([c, s], -1), np.stack([s, -c], -1)], -2).astype(complex)


def _dove(dove: DoveParams, alpha: np.ndarray) -> np.ndarray:
    core = np.diag([math.sqrt(dove.t_par), math.sqrt(dove.t_perp) * np.exp(1j * dove.delta_phi)])
    return _rot(-alpha) @ core @ _rot(alpha)


def modified_bssi_ports(
    config: InterferometerConfig,
    errors: np.ndarray,
    l: int,
    pol: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """Renormalized ``(p_c, p_d)`` per trial for a batch of setting errors.

    Array version of :func:`run_modified_bssi` for an input on port d.
    """
    e_dp, e1, e2 = errors[:, 0], errors[:, 1], errors[:, 2]
    alpha = config.alpha + e_dp
    half = config.alpha / 2
    u_a = _hwp(half + e2) @ _dove(config.dove, alpha) @ _hwp(half + e1)
    u_b = _hwp(math.pi - half - e1) @ _dove(config.dove, math.pi - alpha) @ _hwp(math.pi - half - e2)
    T = config.bs_transmissivity
    into = beam_splitter(T)[:, 1]
    back = beam_splitter_return(T)
    pol = np.asarray(pol, dtype=complex)
    a = (into[0] * np.exp(2j * l * alpha))[:, None] * (u_a @ pol)
    b = (into[1] * np.exp(-2j * l * alpha))[:, None] * (u_b @ pol)
    c = back[0, 0] * a + back[0, 1] * b
    d = back[1, 0] * a + back[1, 1] * b
    pc = np.sum(np.abs(c) ** 2, axis=1)
    pd = np.sum(np.abs(d) ** 2, axis=1)
    total = pc + pd
    return pc / total, pd / total


def imperfection_study(spec: ImperfectionSpec, config: InterferometerConfig) -> List[ImperfectionRow]:
    """Mean modified-BSSI fidelity per (l, polarization) under setting errors."""
    if config.kind is not Kind.MODIFIED_BSSI:
        raise InvalidArgumentError("imperfection_study needs a modified-BSSI config")
    errors = draw_setting_errors(spec)
    rows = []
    for l in spec.l_values:
        port = expected_port(config.alpha, l)
        if port is None:
            raise InvalidArgumentError(
                f"order l={l} has no designated port at alpha={config.alpha!r}"
            )
        for name in spec.polarizations:
            pc, pd = modified_bssi_ports(config, errors, l, POLARIZATIONS[name])
            fid = pd if port is Path.D else pc
            stderr = float(np.std(fid, ddof=1) / math.sqrt(fid.size)) if fid.size > 1 else 0.0
            rows.append(ImperfectionRow(l, name, float(np.mean(fid)), stderr))
    return rows


def polarization_grid(names: Sequence[str] = DEFAULT_POLARIZATIONS) -> List[np.ndarray]:
    return [POLARIZATIONS[n].copy() for n in names]
