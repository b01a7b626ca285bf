"""Jones-calculus primitives and the path x polarization x OAM state container.

Polarization is expressed in the (H, V) basis with H along the lab X axis.
Jones vectors are complex numpy arrays of shape ``(2,)`` and Jones matrices
complex arrays of shape ``(2, 2)`` (row-major, H first).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Tuple

import numpy as np

from .errors import InvalidArgumentError

EPS = 1e-12
L_MAX = 100


class Pol(enum.Enum):
    H = 0
    V = 1


class Path(enum.Enum):
    A = "a"  # loop, counter-clockwise
    B = "b"  # loop, clockwise
    C = "c"  # output port
    D = "d"  # input port (also the return port of a balanced Sagnac)


class Basis(enum.Enum):
    LOOP = "loop"
    PORTS = "ports"


BASIS_PATHS = {
    Basis.LOOP: (Path.A, Path.B),
    Basis.PORTS: (Path.C, Path.D),
}

Key = Tuple[Path, Pol, int]


def _check_finite(*values) -> None:
    for v in values:
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError(f"non-finite value: {v!r}")


def jones_vector(h: complex, v: complex) -> np.ndarray:
    """Build a Jones vector from its H and V amplitudes."""
    _check_finite(h, v)
    return np.array([h, v], dtype=complex)


def normalize(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise InvalidArgumentError("cannot normalize a zero Jones vector")
    return vec / norm


_QUARTER_TURNS = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


def _cos_sin(alpha: float):
    # exact values at whole quarter turns, so that e.g. R(pi) is exactly -I
    k = round(alpha / (math.pi / 2))
    if alpha == k * (math.pi / 2):
        return _QUARTER_TURNS[k % 4]
    return math.cos(alpha), math.sin(alpha)


def rotation_matrix(alpha: float) -> np.ndarray:
    """Coordinate rotation R_s(alpha) = ((cos, sin), (-sin, cos))."""
    _check_finite(alpha)
    c, s = _cos_sin(alpha)
    return np.array([[c, s], [-s, c]], dtype=complex)


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return ``a @ b``, i.e. ``b`` acts first."""
    return np.asarray(a, dtype=complex) @ np.asarray(b, dtype=complex)


def is_unitary(m: np.ndarray, tol: float = EPS) -> bool:
    m = np.asarray(m, dtype=complex)
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=tol, rtol=0))


def _key_order(key: Key):
    path, pol, l = key
    return (path.value, pol.value, l)


@dataclass(frozen=True)
class CompositeState:
    """Sparse amplitudes over (path, polarization, OAM order).

    Absent keys have zero amplitude. ``basis`` records whether the path labels
    refer to the two loop directions (a, b) or the two external ports (c, d);
    only a beam splitter changes it.
    """

    basis: Basis
    amplitudes: Mapping[Key, complex] = field(default_factory=dict)
    l_max: int = L_MAX

    def __post_init__(self):
        allowed = BASIS_PATHS[self.basis]
        clean = {}
        for key in sorted(self.amplitudes, key=_key_order):
            path, pol, l = key
            if path not in allowed:
                raise InvalidArgumentError(
                    f"path {path.name} is not in the {self.basis.value} basis"
                )
            if not isinstance(pol, Pol):
                raise InvalidArgumentError(f"bad polarization label {pol!r}")
            if abs(int(l)) > self.l_max:
                raise InvalidArgumentError(f"|l|={abs(l)} exceeds l_max={self.l_max}")
            amp = complex(self.amplitudes[key])
            _check_finite(amp)
            if amp != 0:
                clean[(path, pol, int(l))] = amp
        object.__setattr__(self, "amplitudes", MappingProxyType(clean))

    @classmethod
    def from_polarization(
        cls,
        pol: np.ndarray,
        l: int = 0,
        path: Path = Path.D,
        l_max: int = L_MAX,
    ) -> "CompositeState":
        """Single-mode state ``|path>|pol>|l>`` in the port basis."""
        pol = np.asarray(pol, dtype=complex)
        basis = Basis.PORTS if path in BASIS_PATHS[Basis.PORTS] else Basis.LOOP
        return cls(basis, {(path, Pol.H, l): pol[0], (path, Pol.V, l): pol[1]}, l_max)

    def amplitude(self, path: Path, pol: Pol, l: int) -> complex:
        return self.amplitudes.get((path, pol, l), 0j)

    def l_values(self) -> list:
        return sorted({k[2] for k in self.amplitudes})

    def polarization(self, path: Path, l: int) -> np.ndarray:
        """Unnormalized Jones vector carried by ``path`` in OAM mode ``l``."""
        return np.array(
            [self.amplitude(path, Pol.H, l), self.amplitude(path, Pol.V, l)],
            dtype=complex,
        )

    def probability(self, path: Optional[Path] = None) -> float:
        return math.fsum(
            abs(a) ** 2 for k, a in self.amplitudes.items() if path is None or k[0] is path
        )

    def items(self) -> Iterable[Tuple[Key, complex]]:
        return self.amplitudes.items()

    def scaled(self, factor: complex) -> "CompositeState":
        return CompositeState(
            self.basis, {k: a * factor for k, a in self.amplitudes.items()}, self.l_max
        )

    def __add__(self, other: "CompositeState") -> "CompositeState":
        if other.basis is not self.basis:
            raise InvalidArgumentError("cannot add states in different path bases")
        out = dict(self.amplitudes)
        for k, a in other.amplitudes.items():
            out[k] = out.get(k, 0j) + a
        return CompositeState(self.basis, out, max(self.l_max, other.l_max))


def apply_pol_operator(
    state: CompositeState,
    matrix: np.ndarray,
    path_filter: Optional[Path] = None,
) -> CompositeState:
    """Apply a Jones matrix to every (path, l) polarization pair.

    With ``path_filter`` only that path is affected; it must belong to the
    state's active basis.
    """
    if path_filter is not None and path_filter not in BASIS_PATHS[state.basis]:
        raise InvalidArgumentError(
            f"path {path_filter.name} is not in the {state.basis.value} basis"
        )
    m = np.asarray(matrix, dtype=complex)
    out = {}
    pairs = {(k[0], k[2]) for k in state.amplitudes}
    for key, amp in state.items():
        if path_filter is not None and key[0] is not path_filter:
            out[key] = amp
    for path, l in sorted(pairs, key=lambda p: (p[0].value, p[1])):
        if path_filter is not None and path is not path_filter:
            continue
        h, v = m @ state.polarization(path, l)
        out[(path, Pol.H, l)] = h
        out[(path, Pol.V, l)] = v
    return CompositeState(state.basis, out, state.l_max)


def apply_path_phase(
    state: CompositeState,
    phase,
    path_filter: Optional[Path] = None,
) -> CompositeState:
    """Multiply amplitudes by ``phase(l)``, optionally on one path only."""
    out = {}
    for (path, pol, l), amp in state.items():
        if path_filter is None or path is path_filter:
            amp = amp * phase(l)
        out[(path, pol, l)] = amp
    return CompositeState(state.basis, out, state.l_max)


def total_probability(state: CompositeState) -> float:
    """Sum of squared magnitudes over all keys, in sorted key order."""
    return state.probability()
