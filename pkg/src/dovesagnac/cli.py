"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data or physics error.  Results go to
files (CSV by default, JSON with ``--format json``); a one-line summary goes
to stdout and every diagnostic to stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings
from pathlib import Path as FsPath
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .algebra import CompositeState
from .bench import (
    BenchDocument,
    BenchError,
    BenchUnknownKeyWarning,
    parse_angle,
    parse_bench,
    parse_number,
)
from .characterization import IntensitySweep, fit_transmissions, invert_delta_phi
from .elements import POLARIZATIONS
from .errors import DoveSagnacError
from .experiments import (
    DEFAULT_POLARIZATIONS,
    ImperfectionSpec,
    SweepSpec,
    SweepVariable,
    imperfection_study,
    sweep_bssi_alpha,
    sweep_bssi_delta_phi,
    sweep_pbssi_alpha,
)
from .fresnel import (
    MEASURED_DOVE,
    DoveParams,
    PrismGeometry,
    dove_params_from_physics,
    max_tir_phase,
    min_index_for_phase,
    ray_angles,
)
from .interferometers import InterferometerConfig, Kind, expected_port, run
from .metrics import pbssi_fidelity, sorting_fidelity

FIG3_HEADER = ("alpha_rad", "fidelity", "p_c", "p_d")
FIG3_DASHED_HEADER = ("delta_phi_rad", "fidelity")
FIG4_HEADER = ("alpha_rad", "fidelity_prime", "p_c")
TABLE1_HEADER = ("l", "polarization", "mean_fidelity", "stderr")
FIT_HEADER = ("t_par", "t_perp", "residual_rms", "delta_phi_rad")

PBSSI_DEFAULT_POL = "+"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except BenchError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _number(text: str) -> float:
    try:
        return parse_number(text)
    except BenchError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _polarization(text: str) -> str:
    if text not in POLARIZATIONS:
        raise argparse.ArgumentTypeError(
            f"unknown polarization {text!r}; choose from {', '.join(POLARIZATIONS)}"
        )
    return text


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _atomic_write(path: FsPath, text: str) -> None:
    path = FsPath(path)
    directory = path.parent if str(path.parent) else FsPath(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(
    path: FsPath,
    header: Sequence[str],
    rows: Sequence[Sequence],
    fmt: str = "csv",
    spec: Optional[Dict] = None,
    seed: Optional[int] = None,
    summary: Optional[Dict] = None,
) -> None:
    """CSV with a header row, or a JSON object echoing the inputs."""
    if fmt == "csv":
        lines = [",".join(header)]
        lines += [",".join(_cell(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        doc = {
            "spec": spec or {},
            "seed": seed,
            "version": __version__,
            "results": [dict(zip(header, row)) for row in rows],
            "summary": summary or {},
        }
        text = json.dumps(doc, indent=2) + "\n"
    _atomic_write(path, text)


def _dove_spec(d: DoveParams) -> Dict:
    return {"t_par": d.t_par, "t_perp": d.t_perp, "delta_phi_rad": d.delta_phi}


def _uniform_grid(start: float, stop: float, points: int) -> List[float]:
    if points < 2:
        raise UsageError("--points must be at least 2")
    return [float(x) for x in np.linspace(start, stop, points)]


def _sidecar(path: FsPath, tag: str) -> FsPath:
    path = FsPath(path)
    return path.with_name(f"{path.stem}_{tag}{path.suffix}")


def _add_dove_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t-par", type=_number, default=MEASURED_DOVE.t_par, help="transmission parallel to the base normal")
    p.add_argument("--t-perp", type=_number, default=MEASURED_DOVE.t_perp, help="transmission perpendicular to it")
    p.add_argument(
        "--delta-phi", type=_angle, default=MEASURED_DOVE.delta_phi,
        help="TIR phase with unit, e.g. 0.159pi or 28.6deg",
    )


def _add_output_flags(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--out", type=FsPath, default=FsPath(default), help="output file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _dove_from(args) -> DoveParams:
    return DoveParams(args.t_par, args.t_perp, args.delta_phi)


def _fig3(args) -> str:
    dove = _dove_from(args)
    cfg = InterferometerConfig(Kind.BSSI, math.pi / 4, dove, args.T)
    pol = POLARIZATIONS[args.pol]
    alpha = _uniform_grid(0.0, math.pi / 2, args.points)
    solid = sweep_bssi_alpha(SweepSpec(SweepVariable.ALPHA, tuple(alpha), cfg, pol))
    dphi = [i * math.pi / args.dphi_points for i in range(args.dphi_points)]
    dashed = sweep_bssi_delta_phi(SweepSpec(SweepVariable.DELTA_PHI, tuple(dphi), cfg, pol))

    x_min, f_min = solid.argmin()
    xd_min, fd_min = dashed.argmin()
    spec = {"command": "fig3", "dove": _dove_spec(dove), "T": args.T, "pol": args.pol, "points": args.points}
    write_table(
        args.out, FIG3_HEADER,
        [(s.x, s.fidelity, s.p_c, s.p_d) for s in solid.samples],
        args.format, spec, None, {"min_fidelity": f_min, "alpha_at_min_rad": x_min},
    )
    dashed_path = args.out_dashed or _sidecar(args.out, "dashed")
    write_table(
        dashed_path, FIG3_DASHED_HEADER,
        [(s.x, s.fidelity) for s in dashed.samples],
        args.format, {**spec, "points": args.dphi_points}, None,
        {"min_fidelity": fd_min, "delta_phi_at_min_rad": xd_min},
    )
    return (
        f"fig3: min fidelity {f_min:.6f} at alpha={x_min / math.pi:.4f}pi; "
        f"delta_phi curve min {fd_min:.6f} at {xd_min / math.pi:.4f}pi -> {args.out}, {dashed_path}"
    )


def _fig4(args) -> str:
    dove = _dove_from(args)
    cfg = InterferometerConfig(Kind.PBSSI, math.pi / 4, dove)
    alpha = _uniform_grid(0.0, math.pi / 2, args.points)
    res = sweep_pbssi_alpha(SweepSpec(SweepVariable.ALPHA, tuple(alpha), cfg, POLARIZATIONS[args.pol]))
    _, f_min = res.argmin()
    p_c_min = float(np.min(res.p_c))
    spec = {"command": "fig4", "dove": _dove_spec(dove), "pol": args.pol, "points": args.points}
    write_table(
        args.out, FIG4_HEADER,
        [(s.x, s.fidelity, s.p_c) for s in res.samples],
        args.format, spec, None, {"min_fidelity_prime": f_min, "min_p_c": p_c_min},
    )
    return f"fig4: min fidelity' {f_min:.6f}; min p_c {p_c_min:.6f} (loss {1 - p_c_min:.4f}) -> {args.out}"


def _table1(args) -> str:
    dove = _dove_from(args)
    cfg = InterferometerConfig(Kind.MODIFIED_BSSI, args.alpha, dove, args.T)
    spec = ImperfectionSpec(
        rotation_error_rms=args.rms,
        l_range=(args.l_min, args.l_max),
        polarizations=tuple(args.pols.split(",")),
        trials=args.trials,
        seed=args.seed,
    )
    rows = imperfection_study(spec, cfg)
    return _write_table1(rows, spec, cfg, args.out, args.format)


def _write_table1(rows, spec: ImperfectionSpec, cfg: InterferometerConfig, out, fmt) -> str:
    by_l: Dict[int, List[float]] = {}
    for r in rows:
        by_l.setdefault(r.l, []).append(r.mean_fidelity)
    lo, hi = min(by_l), max(by_l)
    first, last = float(np.mean(by_l[lo])), float(np.mean(by_l[hi]))
    echo = {
        "command": "table1-trend",
        "dove": _dove_spec(cfg.dove),
        "alpha_rad": cfg.alpha,
        "rms_rad": spec.rotation_error_rms,
        "trials": spec.trials,
        "l_range": list(spec.l_range),
        "polarizations": list(spec.polarizations),
    }
    write_table(
        out, TABLE1_HEADER,
        [(r.l, r.polarization, r.mean_fidelity, r.stderr) for r in rows],
        fmt, echo, spec.seed, {f"mean_fidelity_l{lo}": first, f"mean_fidelity_l{hi}": last},
    )
    return f"table1-trend: mean fidelity {first:.4f} at l={lo} -> {last:.4f} at l={hi} -> {out}"


def _characterize(args) -> str:
    try:
        sweep = IntensitySweep.from_csv(args.sweep)
    except OSError as exc:
        raise DoveSagnacError(f"cannot read sweep file {str(args.sweep)!r}: {exc.strerror or exc}") from None
    fit = fit_transmissions(sweep)
    delta = None
    if args.p_out_h is not None:
        delta = invert_delta_phi(args.p_out_h, fit.t_par, fit.t_perp)
    line = (
        f"characterize: t_par={fit.t_par:.6f} t_perp={fit.t_perp:.6f} "
        f"residual_rms={fit.residual_rms:.3g}"
    )
    if delta is not None:
        line += f" delta_phi={delta / math.pi:.4f}pi"
    if args.out is not None:
        write_table(
            args.out, FIT_HEADER,
            [(fit.t_par, fit.t_perp, fit.residual_rms, "" if delta is None else delta)],
            args.format,
            {"command": "characterize", "sweep": str(args.sweep), "p_out_h": args.p_out_h},
            None,
            {"t_par": fit.t_par, "t_perp": fit.t_perp},
        )
        line += f" -> {args.out}"
    return line


def dp_physics_report(geom: PrismGeometry) -> Dict[str, float]:
    n = geom.refractive_index
    rays = ray_angles(geom)
    dove = dove_params_from_physics(geom)
    return {
        "refractive_index": n,
        "base_angle_rad": geom.base_angle,
        "theta1_rad": rays.theta1,
        "theta2_rad": rays.theta2,
        "theta3_rad": rays.theta3,
        "t_par": dove.t_par,
        "t_perp": dove.t_perp,
        "delta_phi_rad": dove.delta_phi,
        "max_delta_phi_rad": max_tir_phase(n),
        "min_index_for_half_pi": min_index_for_phase(math.pi / 2),
    }


def _dp_physics(args) -> str:
    geom = PrismGeometry(args.base, args.n, args.length)
    report = dp_physics_report(geom)
    for key, value in report.items():
        suffix = f"  ({value / math.pi:.6f} pi)" if key.endswith("_rad") else ""
        print(f"{key} = {value:.6f}{suffix}")
    if args.out is not None:
        write_table(
            args.out, tuple(report), [tuple(report.values())], args.format,
            {"command": "dp-physics", "n": args.n, "base_rad": args.base, "length_mm": args.length},
        )
    return (
        f"dp-physics: max delta_phi = {report['max_delta_phi_rad'] / math.pi:.6f}pi; "
        f"axial-ray delta_phi = {report['delta_phi_rad'] / math.pi:.6f}pi"
    )


def run_bench(doc: BenchDocument, out: Optional[FsPath] = None, fmt: Optional[str] = None) -> str:
    """Execute a parsed bench document; returns the summary line."""
    cfg = doc.config()
    if out is None and doc.output is not None:
        out = FsPath(doc.output.path)
    fmt = fmt or (doc.output.format if doc.output is not None else "csv")
    pol = POLARIZATIONS[doc.pol]
    echo = {"command": "run", "kind": doc.kind.value, "dove": _dove_spec(cfg.dove), "T": doc.T, "pol": doc.pol, "l": doc.l}

    if doc.imperfection is not None:
        rows = imperfection_study(doc.imperfection, cfg)
        if out is None:
            out = FsPath("table1.csv")
        return _write_table1(rows, doc.imperfection, cfg, out, fmt)

    if doc.sweep is not None:
        grid = doc.sweep.grid()
        spec = SweepSpec(doc.sweep.variable, grid, cfg, pol, doc.l)
        if doc.kind is Kind.PBSSI:
            res = sweep_pbssi_alpha(spec)
            header, rows = FIG4_HEADER, [(s.x, s.fidelity, s.p_c) for s in res.samples]
        elif doc.sweep.variable is SweepVariable.DELTA_PHI:
            res = sweep_bssi_delta_phi(spec)
            header, rows = FIG3_DASHED_HEADER, [(s.x, s.fidelity) for s in res.samples]
        else:
            res = sweep_bssi_alpha(spec)
            header, rows = FIG3_HEADER, [(s.x, s.fidelity, s.p_c, s.p_d) for s in res.samples]
        x_min, f_min = res.argmin()
        if out is not None:
            write_table(out, header, rows, fmt, echo, None, {"min_fidelity": f_min})
        return f"run: min fidelity {f_min:.6f} at {doc.sweep.variable.value}={x_min / math.pi:.4f}pi" + (
            f" -> {out}" if out is not None else ""
        )

    output = run(cfg, CompositeState.from_polarization(pol, doc.l))
    if doc.kind is Kind.PBSSI:
        fid = pbssi_fidelity(cfg.dove, cfg.alpha)
    else:
        fid = sorting_fidelity(output, cfg.alpha, doc.l, cfg.bs_transmissivity)
    if out is not None:
        write_table(out, FIG3_HEADER, [(cfg.alpha, fid, output.p_c, output.p_d)], fmt, echo, None, {"fidelity": fid})
    port = expected_port(cfg.alpha, doc.l)
    where = f", design port {port.value}" if port is not None else ""
    return f"run: fidelity {fid:.6f} (p_c={output.p_c:.6f}, p_d={output.p_d:.6f}{where})"


def _run(args) -> str:
    try:
        text = FsPath(args.bench).read_text(encoding="utf-8")
    except OSError as exc:
        raise DoveSagnacError(f"cannot read bench file {str(args.bench)!r}: {exc.strerror or exc}") from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BenchUnknownKeyWarning)
        doc = parse_bench(text, lenient=args.lenient)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return run_bench(doc, args.out, args.format)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dovesagnac", description="Dove-prism Sagnac OAM sorter models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("fig3", help="BSSI fidelity against prism rotation and TIR phase")
    _add_dove_flags(p)
    p.add_argument("--T", type=_number, default=0.5, help="beam-splitter transmissivity")
    p.add_argument("--pol", type=_polarization, default="H")
    p.add_argument("--points", type=int, default=361, help="alpha samples over [0, pi/2]")
    p.add_argument("--dphi-points", type=int, default=180, help="delta_phi samples over [0, pi)")
    _add_output_flags(p, "fig3.csv")
    p.add_argument("--out-dashed", type=FsPath, default=None, help="delta_phi curve (default: <out>_dashed)")
    p.set_defaults(handler=_fig3)

    p = sub.add_parser("fig4", help="PBSSI fidelity and port-c probability against rotation")
    _add_dove_flags(p)
    p.add_argument("--pol", type=_polarization, default=PBSSI_DEFAULT_POL)
    p.add_argument("--points", type=int, default=361)
    _add_output_flags(p, "fig4.csv")
    p.set_defaults(handler=_fig4)

    p = sub.add_parser("table1-trend", help="modified-BSSI fidelity under rotation errors")
    _add_dove_flags(p)
    p.add_argument("--alpha", type=_angle, default=math.pi / 4)
    p.add_argument("--T", type=_number, default=0.5)
    p.add_argument("--rms", type=_angle, default=math.radians(2.0), help="RMS setting error, e.g. 2deg")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--l-min", type=int, default=1)
    p.add_argument("--l-max", type=int, default=10)
    p.add_argument("--pols", default=",".join(DEFAULT_POLARIZATIONS))
    _add_output_flags(p, "table1.csv")
    p.set_defaults(handler=_table1)

    p = sub.add_parser("characterize", help="fit prism transmissions from a waveplate scan")
    p.add_argument("--sweep", type=FsPath, required=True, help="CSV with setting_rad,intensity")
    p.add_argument("--p-out-h", type=float, default=None, help="measured H share at alpha=pi/4")
    p.add_argument("--out", type=FsPath, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(handler=_characterize)

    p = sub.add_parser("dp-physics", help="prism parameters from glass index and base angle")
    p.add_argument("--n", type=_number, required=True, help="refractive index")
    p.add_argument("--base", type=_angle, default=math.pi / 4, help="base angle with unit")
    p.add_argument("--length", type=_number, default=63.0, help="prism length in mm")
    p.add_argument("--out", type=FsPath, default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(handler=_dp_physics)

    p = sub.add_parser("run", help="execute a bench description file")
    p.add_argument("bench", type=FsPath)
    p.add_argument("--lenient", action="store_true", help="warn on unknown keys instead of failing")
    p.add_argument("--out", type=FsPath, default=None, help="override the output path")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.set_defaults(handler=_run)
    return parser


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        summary = args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (DoveSagnacError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(summary)
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
