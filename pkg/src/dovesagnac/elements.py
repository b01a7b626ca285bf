"""Operators for the optical elements of the Sagnac sorters.

Beam-splitter conventions
-------------------------
On the way into the loop the splitter acts on the port amplitudes (c, d) with
the real matrix ``U = ((sqrt T, -sqrt(1-T)), (sqrt(1-T), sqrt T))`` producing
loop amplitudes (a, b).  Light returning from the loop meets the splitter from
the other side and sees the reciprocal matrix ``U^T`` with the Stokes sign
-1 on port c, i.e. ``W = Z @ U.T`` with ``Z = diag(-1, 1)``.  For a loop that
does nothing, ``W @ U = diag(-1, 1)`` returns all light to the input port d.

Polarizing beam splitter
------------------------
H is transmitted and V reflected.  Entering from port d, H goes round the
loop as direction a and V as direction b.  Returning light exits port c if it
kept its launch polarization (H from a, V from b) and port d otherwise.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import (
    BASIS_PATHS,
    L_MAX,
    Basis,
    CompositeState,
    Path,
    Pol,
    normalize,
    rotation_matrix,
)
from .errors import InvalidArgumentError
from .fresnel import DoveParams


class ElementKind(enum.Enum):
    DOVE_PRISM = "dove"
    HWP = "hwp"
    QWP = "qwp"
    BS = "bs"
    PBS = "pbs"
    OAM_PHASE_ONLY = "oam"


@dataclass(frozen=True)
class ElementDescriptor:
    kind: ElementKind
    angle: float = 0.0
    dove: Optional[DoveParams] = None
    transmissivity: Optional[float] = None

    def __post_init__(self):
        if (self.dove is not None) != (self.kind is ElementKind.DOVE_PRISM):
            raise InvalidArgumentError("dove parameters are required for, and only for, a Dove prism")
        if (self.transmissivity is not None) != (self.kind is ElementKind.BS):
            raise InvalidArgumentError("transmissivity is required for, and only for, a beam splitter")

    def jones(self) -> np.ndarray:
        """Polarization matrix of this element (identity for BS/PBS/OAM-only)."""
        if self.kind is ElementKind.DOVE_PRISM:
            return dove_jones(self.dove, self.angle)
        if self.kind in (ElementKind.HWP, ElementKind.QWP):
            return waveplate(self.kind, self.angle)
        return np.eye(2, dtype=complex)


def dove_jones(params: DoveParams, alpha: float) -> np.ndarray:
    """Jones matrix of a Dove prism rotated by ``alpha`` about the beam axis."""
    core = np.diag(
        [math.sqrt(params.t_par), math.sqrt(params.t_perp) * cmath.exp(1j * params.delta_phi)]
    )
    return rotation_matrix(-alpha) @ core @ rotation_matrix(alpha)


def oam_phase(alpha: float, l: int, l_max: int = L_MAX) -> complex:
    """Image-rotation phase exp(2 i l alpha) picked up by OAM order ``l``."""
    if abs(l) > l_max:
        raise InvalidArgumentError(f"|l|={abs(l)} exceeds l_max={l_max}")
    return cmath.exp(2j * l * alpha)


def beam_splitter(T: float) -> np.ndarray:
    """Path-space matrix of a lossless splitter with transmissivity ``T``."""
    if not (math.isfinite(T) and 0.0 <= T <= 1.0):
        raise InvalidArgumentError(f"transmissivity must lie in [0, 1], got {T!r}")
    t, r = math.sqrt(T), math.sqrt(1.0 - T)
    return np.array([[t, -r], [r, t]])


def beam_splitter_return(T: float) -> np.ndarray:
    return np.diag([-1.0, 1.0]) @ beam_splitter(T).T


def bs_transfer(state: CompositeState, T: float) -> CompositeState:
    """Pass a state through the splitter, ports -> loop or loop -> ports."""
    if state.basis is Basis.PORTS:
        m, src, dst, basis = beam_splitter(T), BASIS_PATHS[Basis.PORTS], BASIS_PATHS[Basis.LOOP], Basis.LOOP
    else:
        m, src, dst, basis = beam_splitter_return(T), BASIS_PATHS[Basis.LOOP], BASIS_PATHS[Basis.PORTS], Basis.PORTS
    out = {}
    for (path, pol, l), amp in state.items():
        j = src.index(path)
        for i, target in enumerate(dst):
            if m[i, j] != 0:
                key = (target, pol, l)
                out[key] = out.get(key, 0j) + m[i, j] * amp
    return CompositeState(basis, out, state.l_max)


def waveplate(kind: ElementKind, theta: float) -> np.ndarray:
    """Half- or quarter-wave plate with its fast axis at ``theta`` from H.

    The half-wave plate is ``((cos 2t, sin 2t), (sin 2t, -cos 2t))``; the
    quarter-wave plate is ``R(-t) diag(1, i) R(t)``.
    """
    if kind is ElementKind.HWP:
        c, s = math.cos(2 * theta), math.sin(2 * theta)
        return np.array([[c, s], [s, -c]], dtype=complex)
    if kind is ElementKind.QWP:
        return rotation_matrix(-theta) @ np.diag([1.0, 1j]) @ rotation_matrix(theta)
    raise InvalidArgumentError(f"not a waveplate: {kind!r}")


def hwp(theta: float) -> np.ndarray:
    return waveplate(ElementKind.HWP, theta)


def qwp(theta: float) -> np.ndarray:
    return waveplate(ElementKind.QWP, theta)


_PBS_IN = {
    (Path.D, Pol.H): Path.A,
    (Path.D, Pol.V): Path.B,
    (Path.C, Pol.H): Path.B,
    (Path.C, Pol.V): Path.A,
}
_PBS_OUT = {
    (Path.A, Pol.H): Path.C,
    (Path.A, Pol.V): Path.D,
    (Path.B, Pol.V): Path.C,
    (Path.B, Pol.H): Path.D,
}


def pbs_route(state: CompositeState) -> CompositeState:
    """Route amplitudes through the polarizing splitter (see module notes)."""
    if state.basis is Basis.PORTS:
        table, basis = _PBS_IN, Basis.LOOP
    elif state.basis is Basis.LOOP:
        table, basis = _PBS_OUT, Basis.PORTS
    else:
        raise InvalidArgumentError(f"unknown basis {state.basis!r}")
    out = {(table[(path, pol)], pol, l): amp for (path, pol, l), amp in state.items()}
    return CompositeState(basis, out, state.l_max)


_S = 1 / math.sqrt(2)

POLARIZATIONS = {
    "H": np.array([1, 0], dtype=complex),
    "V": np.array([0, 1], dtype=complex),
    "+": np.array([_S, _S], dtype=complex),
    "-": np.array([_S, -_S], dtype=complex),
    "L": np.array([_S, -1j * _S], dtype=complex),
    "R": np.array([_S, 1j * _S], dtype=complex),
}

# (HWP fast axis, QWP fast axis) preparing each state from |H>, up to a global
# phase, with the QWP convention above.
PREPARATION_ANGLES = {
    "H": (0.0, 0.0),
    "V": (math.pi / 4, 0.0),
    "+": (math.pi / 8, math.pi / 4),
    "-": (-math.pi / 8, math.pi / 4),
    "L": (-math.pi / 8, 0.0),
    "R": (math.pi / 8, 0.0),
}


def polarization(name: str) -> np.ndarray:
    try:
        return POLARIZATIONS[name].copy()
    except KeyError:
        raise InvalidArgumentError(
            f"unknown polarization {name!r}; expected one of {', '.join(POLARIZATIONS)}"
        ) from None


def prepare_polarization(name: str) -> np.ndarray:
    """Jones vector produced from |H> by the HWP/QWP pair in PREPARATION_ANGLES."""
    if name not in PREPARATION_ANGLES:
        polarization(name)
    theta_h, theta_q = PREPARATION_ANGLES[name]
    return normalize(qwp(theta_q) @ hwp(theta_h) @ np.array([1, 0], dtype=complex))
