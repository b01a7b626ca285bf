"""Sorting fidelities and polarization comparisons."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .algebra import Path
from .errors import InvalidArgumentError
from .fresnel import DoveParams
from .interferometers import PortOutput, pbssi_overlap

POLARIZATION_FLOOR = 1e-12


@dataclass(frozen=True)
class FidelityReport:
    fidelity: float
    constructive_port: Path
    p_c: float
    p_d: float
    destructive_polarization: Optional[np.ndarray]


def _port_polarization(output: PortOutput, port: Path) -> Optional[np.ndarray]:
    ls = output.state.l_values()
    if len(ls) != 1 or output.probability(port) <= POLARIZATION_FLOOR:
        return None
    vec = output.state.polarization(port, ls[0])
    return vec / np.linalg.norm(vec)


def bssi_fidelity(output: PortOutput, expected_port: Path) -> FidelityReport:
    """Probability at the port selected by the design phase.

    The destructive-port polarization is reported for single-mode states
    whose destructive probability exceeds ``POLARIZATION_FLOOR``.
    """
    if expected_port not in (Path.C, Path.D):
        raise InvalidArgumentError(f"{expected_port!r} is not an output port")
    dark = Path.C if expected_port is Path.D else Path.D
    return FidelityReport(
        fidelity=output.probability(expected_port),
        constructive_port=expected_port,
        p_c=output.p_c,
        p_d=output.p_d,
        destructive_polarization=_port_polarization(output, dark),
    )


def pbssi_fidelity(dove: DoveParams, alpha: float) -> float:
    return 1.0 - pbssi_overlap(dove, alpha)


def polarization_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|^2`` after normalizing both vectors."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise InvalidArgumentError("overlap is undefined for a zero vector")
    return min(1.0, abs(np.vdot(a, b)) ** 2 / (na * na * nb * nb))


def ideal_port_distribution(alpha: float, l: int, T: float = 0.5) -> Tuple[float, float]:
    """``(p_c, p_d)`` of a beam-splitter Sagnac whose prism leaves polarization alone."""
    fwd, back = cmath.exp(2j * l * alpha), cmath.exp(-2j * l * alpha)
    d = (1 - T) * fwd + T * back
    c = math.sqrt(T * (1 - T)) * (fwd - back)
    return abs(c) ** 2, abs(d) ** 2


def classical_fidelity(p: Tuple[float, float], q: Tuple[float, float]) -> float:
    """Bhattacharyya fidelity ``(sum sqrt(p_i q_i))^2`` of two port distributions."""
    return min(1.0, sum(math.sqrt(max(a, 0.0) * max(b, 0.0)) for a, b in zip(p, q)) ** 2)


def sorting_fidelity(output: PortOutput, alpha: float, l: int, T: float = 0.5) -> float:
    """Agreement of the port distribution with a polarization-free sorter.

    When the ideal sorter sends order ``l`` wholly to one port this is the
    probability at that port; it extends smoothly to rotation angles where the
    OAM phase is not +-1.
    """
    return classical_fidelity((output.p_c, output.p_d), ideal_port_distribution(alpha, l, T))
