"""Line-oriented bench description files.

Example::

    # measured prism in a 50:50 Sagnac
    dove t_par=0.9877 t_perp=0.9475 delta_phi=0.159pi
    interferometer kind=bssi alpha=45deg T=0.5 pol=H l=0
    sweep variable=alpha start=0deg stop=90deg points=361
    output path=fig3.csv format=csv

Each non-blank line names a section followed by ``key=value`` pairs.  A
section may appear once.  Angles must carry a unit: ``deg``, ``rad`` or
``pi`` (a multiple of pi).  Plain numbers may also use the ``pi`` suffix.
The ``dove`` section takes either measured parameters (``t_par``, ``t_perp``,
``delta_phi``) or a prism description (``n``, ``base``, optional ``length``).
Only ``dove`` is mandatory; a missing ``interferometer`` line means a 50:50
BSSI with the prism at 45 degrees.
"""
from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .elements import POLARIZATIONS
from .errors import DoveSagnacError
from .experiments import DEFAULT_POLARIZATIONS, ImperfectionSpec, SweepVariable
from .fresnel import DoveParams, PrismGeometry, dove_params_from_physics
from .interferometers import InterferometerConfig, Kind


class BenchError(DoveSagnacError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class BenchSyntaxError(BenchError):
    pass


class BenchSemanticError(BenchError):
    pass


class BenchUnitError(BenchError):
    pass


class BenchUnknownKeyWarning(UserWarning):
    pass


_NUMBER = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_ANGLE_RE = re.compile(rf"^(?P<num>{_NUMBER})?(?P<unit>deg|rad|pi)$")
_PLAIN_RE = re.compile(rf"^(?P<num>{_NUMBER})(?P<pi>pi)?$")
_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

DEFAULT_ALPHA = math.pi / 4

SECTIONS = ("dove", "interferometer", "sweep", "imperfection", "output")

ANGLE_KEYS = {
    "dove": {"delta_phi", "base"},
    "interferometer": {"alpha"},
    "sweep": {"start", "stop"},
    "imperfection": {"rms"},
    "output": set(),
}
KNOWN_KEYS = {
    "dove": {"t_par", "t_perp", "delta_phi", "n", "base", "length"},
    "interferometer": {"kind", "alpha", "T", "pol", "l"},
    "sweep": {"variable", "start", "stop", "points"},
    "imperfection": {"rms", "l_min", "l_max", "trials", "seed", "pols"},
    "output": {"path", "format"},
}


@dataclass(frozen=True)
class SweepFields:
    variable: SweepVariable
    start: float
    stop: float
    points: int

    def grid(self) -> Tuple[float, ...]:
        if self.points == 1:
            return (self.start,)
        step = (self.stop - self.start) / (self.points - 1)
        return tuple(self.start + i * step for i in range(self.points))


@dataclass(frozen=True)
class OutputFields:
    path: str
    format: str = "csv"


@dataclass(frozen=True)
class BenchDocument:
    kind: Kind = Kind.BSSI
    alpha: float = DEFAULT_ALPHA
    T: float = 0.5
    pol: str = "H"
    l: int = 0
    dove: Optional[DoveParams] = None
    geometry: Optional[PrismGeometry] = None
    sweep: Optional[SweepFields] = None
    imperfection: Optional[ImperfectionSpec] = None
    output: Optional[OutputFields] = None

    def __post_init__(self):
        if (self.dove is None) == (self.geometry is None):
            raise BenchSemanticError("give exactly one of measured dove parameters or a prism geometry")

    @property
    def dove_params(self) -> DoveParams:
        if self.dove is not None:
            return self.dove
        return dove_params_from_physics(self.geometry)

    def config(self) -> InterferometerConfig:
        return InterferometerConfig(self.kind, self.alpha, self.dove_params, self.T)


@dataclass
class _Token:
    key: str
    value: str
    line: int
    column: int


def _label(tok: _Token) -> str:
    return f"{tok.key}={tok.value}" if tok.key else repr(tok.value)


def _parse_angle(tok: _Token) -> float:
    m = _ANGLE_RE.match(tok.value)
    if not m:
        if _PLAIN_RE.match(tok.value) and not tok.value.endswith("pi"):
            raise BenchUnitError(
                f"angle {_label(tok)} needs a unit suffix (deg, rad or pi)",
                tok.line, tok.column,
            )
        raise BenchSyntaxError(f"cannot read angle {tok.value!r}", tok.line, tok.column)
    num = float(m.group("num")) if m.group("num") is not None else 1.0
    unit = m.group("unit")
    if unit == "deg":
        return math.radians(num)
    if unit == "pi":
        return num * math.pi
    return num


def parse_angle(text: str) -> float:
    """Angle in radians from ``"45deg"``, ``"0.159pi"`` or ``"0.5rad"``."""
    return _parse_angle(_Token("", text.strip(), None, None))


def parse_number(text: str) -> float:
    """Float from ``"0.5"`` or ``"0.25pi"``."""
    return _parse_number(_Token("", text.strip(), None, None))


def _parse_number(tok: _Token) -> float:
    m = _PLAIN_RE.match(tok.value)
    if not m:
        raise BenchSyntaxError(f"cannot read number {tok.value!r}", tok.line, tok.column)
    value = float(m.group("num"))
    return value * math.pi if m.group("pi") else value


def _parse_int(tok: _Token) -> int:
    try:
        return int(tok.value)
    except ValueError:
        raise BenchSyntaxError(f"{tok.key} must be an integer, got {tok.value!r}", tok.line, tok.column) from None


def _tokenize(text: str) -> List[Tuple[str, int, List[_Token]]]:
    sections = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        parts = [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", line)]
        name, col = parts[0]
        if name not in SECTIONS:
            raise BenchSyntaxError(
                f"unknown section {name!r}; expected one of {', '.join(SECTIONS)}", lineno, col
            )
        tokens = []
        for word, col in parts[1:]:
            key, sep, value = word.partition("=")
            if not sep or not value:
                raise BenchSyntaxError(f"expected key=value, got {word!r}", lineno, col)
            if not _KEY_RE.match(key):
                raise BenchSyntaxError(f"invalid key {key!r}", lineno, col)
            tokens.append(_Token(key, value, lineno, col + len(key) + 1))
        sections.append((name, lineno, tokens))
    return sections


def parse_bench(text: str, lenient: bool = False) -> BenchDocument:
    """Parse and validate a bench description.

    Unknown keys raise :class:`BenchSemanticError`, or only warn with
    ``lenient=True``.
    """
    parsed = _tokenize(text)
    if not parsed:
        raise BenchSyntaxError("empty document")
    table: Dict[str, Dict[str, _Token]] = {}
    for name, lineno, tokens in parsed:
        if name in table:
            raise BenchSemanticError(f"section {name!r} appears more than once", lineno, 1)
        entries: Dict[str, _Token] = {}
        for tok in tokens:
            if tok.key not in KNOWN_KEYS[name]:
                msg = f"unknown key {tok.key!r} in section {name!r}"
                if lenient:
                    warnings.warn(f"line {tok.line}: {msg}", BenchUnknownKeyWarning, stacklevel=2)
                    continue
                raise BenchSemanticError(msg, tok.line, tok.column)
            if tok.key in entries:
                raise BenchSemanticError(f"duplicate key {tok.key!r}", tok.line, tok.column)
            entries[tok.key] = tok
        table[name] = entries

    try:
        return _build(table)
    except BenchError:
        raise
    except DoveSagnacError as exc:
        raise BenchSemanticError(str(exc)) from exc


def _require(entries: Dict[str, _Token], section: str, *keys: str) -> None:
    missing = [k for k in keys if k not in entries]
    if missing:
        raise BenchSemanticError(f"section {section!r} is missing {', '.join(missing)}")


def _build(table: Dict[str, Dict[str, _Token]]) -> BenchDocument:
    if "dove" not in table:
        raise BenchSemanticError("missing section 'dove'")

    d = table["dove"]
    measured = {"t_par", "t_perp", "delta_phi"} & d.keys()
    physical = {"n", "base", "length"} & d.keys()
    dove = geometry = None
    if measured and physical:
        raise BenchSemanticError("dove takes measured parameters or a geometry, not both")
    if physical:
        _require(d, "dove", "n", "base")
        geometry = PrismGeometry(
            base_angle=_parse_angle(d["base"]),
            refractive_index=_parse_number(d["n"]),
            length_mm=_parse_number(d["length"]) if "length" in d else 63.0,
        )
    else:
        _require(d, "dove", "t_par", "t_perp", "delta_phi")
        dove = DoveParams(
            _parse_number(d["t_par"]), _parse_number(d["t_perp"]), _parse_angle(d["delta_phi"])
        )

    it = table.get("interferometer", {})
    try:
        kind = Kind(it["kind"].value) if "kind" in it else Kind.BSSI
    except ValueError:
        tok = it["kind"]
        raise BenchSemanticError(
            f"kind must be one of {', '.join(k.value for k in Kind)}, got {tok.value!r}",
            tok.line, tok.column,
        ) from None
    default_pol = "+" if kind is Kind.PBSSI else "H"
    pol = it["pol"].value if "pol" in it else default_pol
    if pol not in POLARIZATIONS:
        raise BenchSemanticError(f"unknown polarization {pol!r}", it["pol"].line, it["pol"].column)

    sweep = None
    if "sweep" in table:
        s = table["sweep"]
        _require(s, "sweep", "variable", "start", "stop", "points")
        try:
            variable = SweepVariable(s["variable"].value)
        except ValueError:
            tok = s["variable"]
            raise BenchSemanticError(f"unknown sweep variable {tok.value!r}", tok.line, tok.column) from None
        points = _parse_int(s["points"])
        if points < 1:
            raise BenchSemanticError("points must be at least 1", s["points"].line, s["points"].column)
        sweep = SweepFields(variable, _parse_angle(s["start"]), _parse_angle(s["stop"]), points)

    imperfection = None
    if "imperfection" in table:
        im = table["imperfection"]
        _require(im, "imperfection", "rms")
        pols = tuple(im["pols"].value.split(",")) if "pols" in im else DEFAULT_POLARIZATIONS
        imperfection = ImperfectionSpec(
            rotation_error_rms=_parse_angle(im["rms"]),
            l_range=(
                _parse_int(im["l_min"]) if "l_min" in im else 1,
                _parse_int(im["l_max"]) if "l_max" in im else 10,
            ),
            polarizations=pols,
            trials=_parse_int(im["trials"]) if "trials" in im else 10_000,
            seed=_parse_int(im["seed"]) if "seed" in im else 0,
        )

    output = None
    if "output" in table:
        o = table["output"]
        _require(o, "output", "path")
        fmt = o["format"].value if "format" in o else "csv"
        if fmt not in ("csv", "json"):
            raise BenchSemanticError(f"format must be csv or json, got {fmt!r}", o["format"].line, o["format"].column)
        output = OutputFields(o["path"].value, fmt)

    return BenchDocument(
        kind=kind,
        alpha=_parse_angle(it["alpha"]) if "alpha" in it else DEFAULT_ALPHA,
        T=_parse_number(it["T"]) if "T" in it else 0.5,
        pol=pol,
        l=_parse_int(it["l"]) if "l" in it else 0,
        dove=dove,
        geometry=geometry,
        sweep=sweep,
        imperfection=imperfection,
        output=output,
    )


def format_bench(doc: BenchDocument) -> str:
    """Render a document so that ``parse_bench(format_bench(doc)) == doc``."""
    lines = []
    if doc.dove is not None:
        d = doc.dove
        lines.append(f"dove t_par={d.t_par!r} t_perp={d.t_perp!r} delta_phi={d.delta_phi!r}rad")
    else:
        g = doc.geometry
        lines.append(f"dove n={g.refractive_index!r} base={g.base_angle!r}rad length={g.length_mm!r}")
    lines.append(
        f"interferometer kind={doc.kind.value} alpha={doc.alpha!r}rad T={doc.T!r} pol={doc.pol} l={doc.l}"
    )
    if doc.sweep is not None:
        s = doc.sweep
        lines.append(
            f"sweep variable={s.variable.value} start={s.start!r}rad stop={s.stop!r}rad points={s.points}"
        )
    if doc.imperfection is not None:
        im = doc.imperfection
        lines.append(
            f"imperfection rms={im.rotation_error_rms!r}rad l_min={im.l_range[0]} l_max={im.l_range[1]} "
            f"trials={im.trials} seed={im.seed} pols={','.join(im.polarizations)}"
        )
    if doc.output is not None:
        lines.append(f"output path={doc.output.path} format={doc.output.format}")
    return "\n".join(lines) + "\n"
