"""Command line front end: ``remad {info,capacity,compose,scan}``.

Exit codes: 0 success, 2 domain/usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import kernels
from .capacities import (
    DEFAULT_RESOLUTION,
    CapacityResult,
    Method,
    capacity_dispatch,
    entanglement_assisted_capacity,
)
from .channels import (
    QutritParams,
    TransitionMatrix,
    beamsplitter_transition,
    parse_transition_text,
    qutrit_params_to_transition,
)
from .composition import compose_superoperators, compose_transitions
from .config import Tolerances, get_tolerances
from .errors import OutOfDomainError, OutOfRangeError, RemadError
from .liouville import classify_qutrit, classify_transition, remad_superoperator

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3

CSV_HEADER = ["gamma10", "gamma21", "gamma20", "class", "Q", "Q_method", "Cp", "CE"]
QUANTITIES = ("class", "Q", "Cp", "CE")
OUT_OF_DOMAIN = "OutOfDomain"
PLANE_AXES = {"g10": ("g21", "g20"), "g21": ("g10", "g20"), "g20": ("g10", "g21")}


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def _default_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # not available on every platform
        return os.cpu_count() or 1


# -- argument handling ----------------------------------------------------------


def _tolerances(args) -> Tolerances:
    tol = get_tolerances()
    overrides = {}
    for item in args.tolerance or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise OutOfDomainError(f"--tolerance expects key=value, got {item!r}")
        try:
            overrides[key.strip()] = float(val)
        except ValueError:
            raise OutOfDomainError(f"--tolerance {item!r}: not a number") from None
    try:
        return tol.replace(**overrides) if overrides else tol
    except KeyError as exc:
        raise OutOfDomainError(str(exc)) from None


def _point_args(p: argparse.ArgumentParser, prefix: str = "", label: str = "") -> None:
    dash = f"--{prefix}"
    p.add_argument(f"{dash}gamma10", type=float, default=None, help=f"{label}γ10")
    p.add_argument(f"{dash}gamma21", type=float, default=None, help=f"{label}γ21")
    p.add_argument(f"{dash}gamma20", type=float, default=None, help=f"{label}γ20")
    p.add_argument(f"{dash}eta", type=float, default=None, help=f"{label}beamsplitter transmittance")
    p.add_argument(f"{dash}transition", type=Path, default=None,
                   help=f"{label}transition matrix file (one row per line)")


def _transition_from(args, prefix: str = "") -> TransitionMatrix:
    key = prefix.replace("-", "_")
    eta = getattr(args, f"{key}eta")
    path = getattr(args, f"{key}transition")
    gammas = [getattr(args, f"{key}gamma{s}") for s in ("10", "21", "20")]
    given = sum(x is not None for x in (eta, path)) + any(x is not None for x in gammas)
    if given > 1:
        raise OutOfDomainError("give only one of --gamma*, --eta, --transition")
    if path is not None:
        try:
            return parse_transition_text(Path(path).read_text())
        except OSError as exc:
            raise OutOfDomainError(f"cannot read {path}: {exc}") from None
    if eta is not None:
        return beamsplitter_transition(eta, 3)
    return qutrit_params_to_transition(QutritParams(*[x or 0.0 for x in gammas]))


def _params_from(args, prefix: str = "") -> QutritParams:
    t = _transition_from(args, prefix)
    if t.dim != 3:
        raise OutOfDomainError(f"this command needs a qutrit channel, got d = {t.dim}")
    return QutritParams.from_transition(t)


# -- reports ---------------------------------------------------------------------


def _capacity_json(r: CapacityResult | None) -> dict | None:
    if r is None:
        return None
    out = {"value": r.value, "method": r.method.value, "optimizer_evals": r.optimizer_evals}
    if r.bracket is not None:
        out["bracket"] = list(r.bracket)
    if r.argmax is not None:
        out["argmax"] = list(r.argmax.populations)
    return out


def capacity_report(g: QutritParams, resolution: int, tol: Tolerances) -> dict:
    q, cp = capacity_dispatch(g, resolution, tol)
    ea = entanglement_assisted_capacity(g, resolution)
    return {
        "Q": _capacity_json(q),
        "Cp": _capacity_json(cp),
        "CE": ea.ce,
        "QE": ea.qe,
        "CE_argmax": list(ea.argmax.populations),
    }


def info_report(t: TransitionMatrix, resolution: int, tol: Tolerances) -> dict:
    report: dict = {"dim": t.dim, "transition": t.rows(), "kernel_backend": kernels.BACKEND}
    if t.dim != 3:
        report["verdict"] = classify_transition(t, tol).value
        report["tolerances"] = tol.as_dict()
        return report
    g = QutritParams.from_transition(t)
    c = classify_qutrit(g, tol)
    report["params"] = dict(zip(("gamma10", "gamma21", "gamma20"), g.as_tuple()))
    report["verdict"] = c.verdict.value
    report["analytic_witness"] = list(c.analytic_witness.as_tuple()) if c.analytic_witness else None
    report["numeric_evidence"] = c.numeric_evidence
    report["kernel_witness"] = {
        "degradable": c.degradable.witness,
        "antidegradable": c.antidegradable.witness,
    }
    report.update(capacity_report(g, resolution, tol))
    report["tolerances"] = tol.as_dict()
    return report


def compose_report(g: QutritParams, gprime: QutritParams, tol: Tolerances) -> dict:
    out = compose_transitions(g, gprime, tol)
    product = compose_superoperators(
        remad_superoperator(gprime.to_transition()), remad_superoperator(g.to_transition())
    )
    composite = remad_superoperator(out.params.to_transition())
    return {
        "first": list(g.as_tuple()),
        "second": list(gprime.as_tuple()),
        "composite": list(out.params.as_tuple()),
        "closed": out.closed,
        "constraint_residual": out.constraint_residual,
        "superoperator_mismatch": float(np.max(np.abs(product.matrix - composite.matrix))),
    }


# -- scans -----------------------------------------------------------------------


def scan_points(plane: str, fixed: float, resolution: int) -> list[tuple[float, float, float]]:
    """Grid points in row-major order (first free axis outer)."""
    axis = np.linspace(0.0, 1.0, resolution)
    a_name, b_name = PLANE_AXES[plane]
    pts = []
    for a in axis:
        for b in axis:
            vals = {plane: fixed, a_name: float(a), b_name: float(b)}
            pts.append((vals["g10"], vals["g21"], vals["g20"]))
    return pts


def scan_cell(task) -> dict:
    """Evaluate one grid cell; top-level so worker processes can pickle it."""
    (g10, g21, g20), quantities, resolution, tol = task
    row = {"gamma10": g10, "gamma21": g21, "gamma20": g20,
           "class": "", "Q": None, "Q_method": "", "Cp": None, "CE": None}
    if g21 + g20 > 1.0 + tol.boundary:
        row["class"] = OUT_OF_DOMAIN
        return row
    g = QutritParams(g10, g21, min(g20, 1.0 - g21))
    if "class" in quantities:
        row["class"] = classify_qutrit(g, tol).verdict.value
    if "Q" in quantities or "Cp" in quantities:
        q, cp = capacity_dispatch(g, resolution, tol)
        if "Q" in quantities:
            row["Q"] = q.bracket if q.method is Method.UNKNOWN else q.value
            row["Q_method"] = q.method.value
        if "Cp" in quantities and cp is not None:
            row["Cp"] = cp.value
    if "CE" in quantities:
        row["CE"] = entanglement_assisted_capacity(g, resolution).ce
    return row


def run_scan(
    plane: str,
    fixed: float,
    resolution: int,
    quantities=QUANTITIES,
    opt_resolution: int = DEFAULT_RESOLUTION,
    jobs: int = 1,
    tol: Tolerances | None = None,
) -> list[dict]:
    if plane not in PLANE_AXES:
        raise OutOfDomainError(f"unknown plane {plane!r}")
    if not 2 <= resolution <= 2000:
        raise OutOfRangeError(f"resolution {resolution} outside [2, 2000]")
    if not 0.0 <= fixed <= 1.0:
        raise OutOfRangeError(f"fixed value {fixed} outside [0, 1]")
    bad = set(quantities) - set(QUANTITIES)
    if bad:
        raise OutOfDomainError(f"unknown quantities {sorted(bad)}")
    tol = tol or get_tolerances()
    tasks = [(p, tuple(quantities), opt_resolution, tol)
             for p in scan_points(plane, fixed, resolution)]
    if jobs <= 1:
        return [scan_cell(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves task order regardless of completion order
        return list(pool.map(scan_cell, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, tuple):
        return f"{fmt(v[0])}:{fmt(v[1])}"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_csv_value(r[k]) for k in CSV_HEADER])
    return buf.getvalue()


def rows_to_json(rows: list[dict]) -> str:
    out = []
    for r in rows:
        r = dict(r)
        if isinstance(r["Q"], tuple):
            r["Q"] = {"lower": r["Q"][0], "upper": r["Q"][1]}
        out.append(r)
    return json.dumps(out, indent=1) + "\n"


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="remad", description=__doc__.splitlines()[0])
    parser.add_argument("--tolerance", action="append", metavar="KEY=VALUE",
                        help="override one tolerance field (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
        p.add_argument("--opt-resolution", type=int, default=DEFAULT_RESOLUTION,
                       help="simplex grid resolution for the diagonal optimizer")

    p = sub.add_parser("info", help="classification and capacities at one point")
    _point_args(p)
    common(p)
    p = sub.add_parser("capacity", help="Q, Cp, C_E and Q_E at one point")
    _point_args(p)
    common(p)
    p = sub.add_parser("compose", help="compose two qutrit channels (first, then second)")
    _point_args(p)
    _point_args(p, "then-", "second channel ")
    common(p)
    p = sub.add_parser("scan", help="parameter-plane scan")
    p.add_argument("--plane", choices=sorted(PLANE_AXES), required=True,
                   help="parameter held fixed")
    p.add_argument("--fixed-value", type=float, required=True)
    p.add_argument("--resolution", type=int, default=51, help="grid points per axis [2, 2000]")
    p.add_argument("--quantities", default=",".join(QUANTITIES),
                   help="comma-separated subset of class,Q,Cp,CE")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    common(p)
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _tolerances(args)
        if args.command == "info":
            text = json.dumps(info_report(_transition_from(args), args.opt_resolution, tol), indent=2)
        elif args.command == "capacity":
            g = _params_from(args)
            text = json.dumps(capacity_report(g, args.opt_resolution, tol), indent=2)
        elif args.command == "compose":
            text = json.dumps(
                compose_report(_params_from(args), _params_from(args, "then_"), tol), indent=2
            )
        else:
            quantities = [q.strip() for q in args.quantities.split(",") if q.strip()]
            rows = run_scan(args.plane, args.fixed_value, args.resolution, quantities,
                            args.opt_resolution, args.jobs, tol)
            text = rows_to_csv(rows) if args.format == "csv" else rows_to_json(rows)
            _emit(text, args.out)
            return EXIT_OK
        _emit(text + "\n", args.out)
        return EXIT_OK
    except OSError as exc:
        print(f"remad: I/O error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (RemadError, ValueError) as exc:
        if isinstance(exc, ArithmeticError):
            print(f"remad: numeric failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"remad: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ArithmeticError as exc:
        print(f"remad: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
