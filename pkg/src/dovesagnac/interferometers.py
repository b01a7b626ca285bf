"""Single-path Sagnac sorters with a Dove prism in the loop.

Three variants are modelled:

* ``BSSI``: 50:50 (or ``T``) beam splitter closing the loop.  The two loop
  directions see the prism rotated by ``alpha`` and ``pi - alpha`` and pick up
  opposite image-rotation phases, so OAM orders with ``exp(-4 i l alpha) = +1``
  return to the input port d and those with ``-1`` leave through port c.
* ``PBSSI``: the splitter is polarizing; H runs one way round, V the other.
* ``MODIFIED_BSSI``: a BSSI with a half-wave plate on each side of the prism,
  fast axes at ``alpha/2``, which makes both directions see the same
  polarization operator.

Numerical propagation keeps unnormalized amplitudes, so ``raw_norm`` reports
the prism loss; port probabilities are renormalized.  Per-direction operators
act on the matching loop path only (a sum over the two branches).
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .algebra import (
    Basis,
    CompositeState,
    Path,
    Pol,
    apply_path_phase,
    apply_pol_operator,
)
from .elements import bs_transfer, dove_jones, hwp, pbs_route
from .errors import InvalidArgumentError, UnsupportedInputError
from .fresnel import DoveParams

DESIGN_PHASE_TOL = 1e-9


class Kind(enum.Enum):
    BSSI = "bssi"
    PBSSI = "pbssi"
    MODIFIED_BSSI = "modified-bssi"


@dataclass(frozen=True)
class InterferometerConfig:
    """Interferometer layout.

    ``dp_error`` and ``hwp_errors`` are setting errors (radians) added to the
    prism rotation and to the two half-wave plate fast axes; they only matter
    for imperfection studies.  ``hwp_errors[0]`` belongs to the plate that
    direction a meets first.
    """

    kind: Kind
    alpha: float
    dove: DoveParams
    bs_transmissivity: float = 0.5
    dp_error: float = 0.0
    hwp_errors: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise InvalidArgumentError(f"alpha must be finite, got {self.alpha!r}")
        T = self.bs_transmissivity
        if not (math.isfinite(T) and 0.0 <= T <= 1.0):
            raise InvalidArgumentError(f"bs_transmissivity must lie in [0, 1], got {T!r}")
        if not all(math.isfinite(e) for e in (self.dp_error, *self.hwp_errors)):
            raise InvalidArgumentError("setting errors must be finite")

    def with_alpha(self, alpha: float) -> "InterferometerConfig":
        return replace(self, alpha=alpha)


@dataclass(frozen=True)
class PortOutput:
    """State at the two external ports.

    ``p_c`` and ``p_d`` sum to one; ``raw_norm`` is the total output power
    relative to the input before that renormalization.
    """

    state: CompositeState
    p_c: float
    p_d: float
    raw_norm: float

    @property
    def raw_p_c(self) -> float:
        return self.state.probability(Path.C)

    @property
    def raw_p_d(self) -> float:
        return self.state.probability(Path.D)

    def probability(self, port: Path) -> float:
        if port is Path.C:
            return self.p_c
        if port is Path.D:
            return self.p_d
        raise InvalidArgumentError(f"{port!r} is not an output port")

    def normalized_state(self) -> CompositeState:
        if self.raw_norm == 0.0:
            return self.state
        return self.state.scaled(1.0 / math.sqrt(self.raw_norm))


def _port_output(state: CompositeState) -> PortOutput:
    raw_c = state.probability(Path.C)
    raw_d = state.probability(Path.D)
    total = raw_c + raw_d
    if total == 0.0:
        return PortOutput(state, 0.0, 0.0, 0.0)
    return PortOutput(state, raw_c / total, raw_d / total, total)


def direction_operators(cfg: InterferometerConfig, direction: Path) -> Tuple[np.ndarray, int]:
    """Polarization operator seen by one loop direction and its OAM phase sign.

    The OAM phase in that direction is ``exp(2 i l sign (alpha + dp_error))``.
    """
    alpha = cfg.alpha + cfg.dp_error
    if direction is Path.A:
        jones, sign = dove_jones(cfg.dove, alpha), 1
    elif direction is Path.B:
        jones, sign = dove_jones(cfg.dove, math.pi - alpha), -1
    else:
        raise InvalidArgumentError(f"{direction!r} is not a loop direction")
    if cfg.kind is Kind.MODIFIED_BSSI:
        e1, e2 = cfg.hwp_errors
        half = cfg.alpha / 2
        if direction is Path.A:
            jones = hwp(half + e2) @ jones @ hwp(half + e1)
        else:
            # same plates, met in reverse order and seen from behind
            jones = hwp(math.pi - half - e1) @ jones @ hwp(math.pi - half - e2)
    return jones, sign


def _traverse_loop(cfg: InterferometerConfig, state: CompositeState) -> CompositeState:
    alpha = cfg.alpha + cfg.dp_error
    for direction in (Path.A, Path.B):
        jones, sign = direction_operators(cfg, direction)
        state = apply_pol_operator(state, jones, direction)
        state = apply_path_phase(state, lambda l, s=sign: cmath.exp(2j * l * s * alpha), direction)
    return state


def _require_ports(input: CompositeState) -> None:
    if input.basis is not Basis.PORTS:
        raise InvalidArgumentError("input state must be given in the port basis")


def _run_bs_loop(cfg: InterferometerConfig, input: CompositeState) -> PortOutput:
    _require_ports(input)
    loop = bs_transfer(input, cfg.bs_transmissivity)
    loop = _traverse_loop(cfg, loop)
    return _port_output(bs_transfer(loop, cfg.bs_transmissivity))


def run_bssi(cfg: InterferometerConfig, input: CompositeState) -> PortOutput:
    if cfg.kind is not Kind.BSSI:
        raise InvalidArgumentError(f"run_bssi needs a BSSI config, got {cfg.kind.value}")
    return _run_bs_loop(cfg, input)


def run_modified_bssi(cfg: InterferometerConfig, input: CompositeState) -> PortOutput:
    if cfg.kind is not Kind.MODIFIED_BSSI:
        raise InvalidArgumentError(
            f"run_modified_bssi needs a modified-BSSI config, got {cfg.kind.value}"
        )
    return _run_bs_loop(cfg, input)


def _check_pbssi_family(input: CompositeState) -> None:
    for (path, _, _), _ in input.items():
        if path is not Path.D:
            raise UnsupportedInputError("the PBSSI model takes input on port d only")
    for l in input.l_values():
        h, v = input.polarization(Path.D, l)
        if not math.isclose(abs(h), abs(v), rel_tol=1e-9, abs_tol=1e-12):
            raise UnsupportedInputError(
                "PBSSI input must be of the form (|H> + exp(i phi)|V>)/sqrt(2) in "
                f"every OAM mode; got |h|={abs(h):.6g}, |v|={abs(v):.6g} for l={l}"
            )


def run_pbssi(cfg: InterferometerConfig, input: CompositeState) -> PortOutput:
    """Propagate an equal-weight H/V input through the polarizing Sagnac."""
    if cfg.kind is not Kind.PBSSI:
        raise InvalidArgumentError(f"run_pbssi needs a PBSSI config, got {cfg.kind.value}")
    _require_ports(input)
    _check_pbssi_family(input)
    loop = _traverse_loop(cfg, pbs_route(input))
    return _port_output(pbs_route(loop))


def run(cfg: InterferometerConfig, input: CompositeState) -> PortOutput:
    runner = {
        Kind.BSSI: run_bssi,
        Kind.PBSSI: run_pbssi,
        Kind.MODIFIED_BSSI: run_modified_bssi,
    }[cfg.kind]
    return runner(cfg, input)


def design_phase(alpha: float, l: int) -> complex:
    """Relative OAM phase exp(-4 i l alpha) between the two loop directions."""
    return cmath.exp(-4j * l * alpha)


def expected_port(alpha: float, l: int) -> Optional[Path]:
    """Port where a (B)SSI sends order ``l``: d for phase +1, c for -1, else None."""
    phase = design_phase(alpha, l)
    if abs(phase - 1) < DESIGN_PHASE_TOL:
        return Path.D
    if abs(phase + 1) < DESIGN_PHASE_TOL:
        return Path.C
    return None


def _dove_terms(dove: DoveParams, alpha: float):
    p = math.sqrt(dove.t_par)
    q = math.sqrt(dove.t_perp) * cmath.exp(1j * dove.delta_phi)
    c2, s2 = math.cos(alpha) ** 2, math.sin(alpha) ** 2
    return p, q, c2, s2


def closed_form_bssi(
    dove: DoveParams,
    alpha: float,
    alpha0: complex,
    beta0: complex,
    l: int,
) -> PortOutput:
    """Analytic BSSI output for T = 1/2 and ``exp(-4 i l alpha) = +-1``.

    Amplitudes carry the prefactor ``exp(2 i l alpha) / sqrt(2 (t_par + t_perp))``,
    which conserves probability exactly at ``alpha = pi/4`` and for a lossless
    prism.  For phase -1 the two ports are exchanged.
    """
    if not math.isclose(abs(alpha0) ** 2 + abs(beta0) ** 2, 1.0, abs_tol=1e-9):
        raise InvalidArgumentError("input polarization must be normalized")
    port = expected_port(alpha, l)
    if port is None:
        raise InvalidArgumentError(
            "closed form needs exp(-4 i l alpha) = +-1; got "
            f"{design_phase(alpha, l):.6g} for l={l}, alpha={alpha!r}"
        )
    p, q, c2, s2 = _dove_terms(dove, alpha)
    pre = cmath.exp(2j * l * alpha) / math.sqrt(2 * (dove.t_par + dove.t_perp))
    flip = pre * (p - q) * math.sin(2 * alpha)
    keep_h = pre * 2 * alpha0 * (p * c2 + q * s2)
    keep_v = pre * 2 * beta0 * (p * s2 + q * c2)
    bright, dark = (Path.D, Path.C) if port is Path.D else (Path.C, Path.D)
    amps = {
        (dark, Pol.H, l): flip * beta0,
        (dark, Pol.V, l): flip * alpha0,
        (bright, Pol.H, l): keep_h,
        (bright, Pol.V, l): keep_v,
    }
    return _port_output(CompositeState(Basis.PORTS, amps))


def closed_form_pbssi(dove: DoveParams, alpha: float, phi: float, l: int) -> PortOutput:
    """Analytic PBSSI output for input (|H> + exp(i phi)|V>)/sqrt(2).

    Uses the prefactor ``exp(2 i l alpha) / sqrt(2 (t_par + t_perp))`` on the
    bracketed port amplitudes; the sign is that of ``exp(-4 i l alpha + i phi)``,
    which must be +-1.  Only the renormalized probabilities are physical:
    this prefactor leaves the total at about one half.
    """
    sign_phase = design_phase(alpha, l) * cmath.exp(1j * phi)
    if abs(sign_phase - 1) < DESIGN_PHASE_TOL:
        sign = 1
    elif abs(sign_phase + 1) < DESIGN_PHASE_TOL:
        sign = -1
    else:
        raise InvalidArgumentError("closed form needs exp(-4 i l alpha) exp(i phi) = +-1")
    p, q, c2, s2 = _dove_terms(dove, alpha)
    pre = cmath.exp(2j * l * alpha) / math.sqrt(2 * (dove.t_par + dove.t_perp))
    leak = pre * (p - q) * math.sin(alpha) * math.cos(alpha)
    amps = {
        (Path.C, Pol.H, l): pre * (p * c2 + q * s2),
        (Path.C, Pol.V, l): sign * pre * (p * s2 + q * c2),
        (Path.D, Pol.H, l): -sign * leak,
        (Path.D, Pol.V, l): leak,
    }
    return _port_output(CompositeState(Basis.PORTS, amps))


def pbssi_overlap(dove: DoveParams, alpha: float) -> float:
    """Overlap of port-c polarizations for OAM orders sorted to opposite signs."""
    s2 = math.sin(2 * alpha) ** 2
    norm = (dove.t_par + dove.t_perp) * (1 - 0.5 * s2) + math.sqrt(
        dove.t_par * dove.t_perp
    ) * s2 * math.cos(dove.delta_phi)
    return (dove.t_par - dove.t_perp) ** 2 * math.cos(2 * alpha) ** 2 / norm**2


def modified_output_polarization(dove: DoveParams, pol: np.ndarray) -> np.ndarray:
    """Polarization leaving the ideal modified BSSI in either direction (unnormalized).

    Both directions reduce to ``diag(sqrt t_par, sqrt t_perp e^{i dphi})``.
    """
    pol = np.asarray(pol, dtype=complex)
    return np.array(
        [math.sqrt(dove.t_par) * pol[0],
         math.sqrt(dove.t_perp) * cmath.exp(1j * dove.delta_phi) * pol[1]]
    )
