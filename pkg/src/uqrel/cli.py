"""Command-line driver: ``uqrel verify | compare | demo | case``.

Exit codes: 0 all checks pass, 1 usage or parse error, 2 a relation was
violated, 3 numerical breakdown.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import scenario
from .processes import Instrument, Povm, TransferMap, compose_channels, induced_channel
from .sweeps import MODES, summarize, sweep, to_csv
from .systems import TOL_NUM, NumericalBreakdown, ValidationError, format_matrix
from .transport import pushforward_channel, pushforward_measurement
from .uncertainty import (
    check_relation_error_disturbance,
    check_relation_errors,
    decomposition_check,
    disturbance,
    no_free_measurement_demo,
    ozawa_chain_check,
    robertson_reduction,
)

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_BREAKDOWN = 0, 1, 2, 3

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
KET0 = np.diag([1.0, 0.0]).astype(complex)


class UsageError(Exception):
    pass


def _json(obj) -> str:
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer, np.bool_)):
            return o.item()
        raise TypeError(f"cannot serialise {type(o).__name__}")

    return json.dumps(obj, indent=2, sort_keys=True, default=default)


def _write(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _run_sweep(args, mode: str) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    dims = args.dim or [2]
    if any(d < 2 for d in dims):
        raise UsageError("--dim must be at least 2")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    start = time.perf_counter()
    results = sweep(mode, dims, args.trials, args.seed, args.tol, args.jobs)
    summary = summarize(mode, results, time.perf_counter() - start)
    summary.update(dims=dims, seed=args.seed, tol=args.tol)
    if args.format == "csv":
        _write(to_csv(mode, results), args.out)
        sys.stderr.write(_json(summary) + "\n")
    else:
        rows = [r.row for r in results]
        _write(_json({"summary": summary, "rows": rows}) + "\n", args.out)
    if summary["breakdowns"]:
        return EXIT_BREAKDOWN
    return EXIT_VIOLATION if summary["failures"] else EXIT_OK


def run_verify(args) -> int:
    return _run_sweep(args, args.mode)


def run_compare(args) -> int:
    return _run_sweep(args, "ozawa-chain")


# -- demos ------------------------------------------------------------------------


def _luders_xy() -> dict:
    ins = Instrument.luders(SX)
    T = induced_channel(ins)
    rel = check_relation_error_disturbance(SX, SY, ins, KET0)
    return {
        "setup": "A=sx, B=sy, rho=|0><0|, Luders instrument of sx",
        "pushforward_M_A": pushforward_measurement(Povm.projective(SX), KET0, SX).values,
        "pushforward_M_B": pushforward_measurement(Povm.projective(SX), KET0, SY).values,
        "pushforward_Theta_B": format_matrix(pushforward_channel(T, KET0, SY).representative),
        "relation": rel.to_dict(),
        "oracle": {"eps_A": 0.0, "eta_B": 1.0, "R": 0.0, "I": 0.0, "lhs": 0.0, "bound": 0.0},
    }


def _naive_violation() -> dict:
    out = {}
    for dim in (2, 3):
        rep = no_free_measurement_demo(dim)
        out[f"dim{dim}"] = rep.to_dict()
    out["oracle"] = {"dim2": {"product": 0.0, "naive_bound": 1.0, "relation_bound": 0.0}}
    return out


def _schrodinger_equality() -> dict:
    rep = robertson_reduction(SX, SY, KET0)
    return {
        "setup": "A=sx, B=sy, rho=|0><0|, non-informative M=N",
        "report": rep.to_dict(),
        "equality": abs(rep.eps_A * rep.eps_B - rep.bounds.full) <= 1e-10,
        "oracle": {"sigma_A": 1.0, "sigma_B": 1.0, "bound": 1.0},
    }


def _transpose_map() -> dict:
    T = TransferMap.transpose(2)
    luders = induced_channel(Instrument.luders(SX))
    composite = compose_channels(luders, T)
    rho = np.array([[0.75, 0.25 - 0.2j], [0.25 + 0.2j, 0.25]])
    dec = decomposition_check(SY, composite, Povm.projective(SZ), rho)
    return {
        "setup": "transpose map (positive, not completely positive) on a qubit",
        "transposed_state": format_matrix(T.apply(rho)),
        "disturbance_transpose_sy": disturbance(SY, T, rho),
        "pushforward_transpose_sy": format_matrix(pushforward_channel(T, rho, SY).representative),
        "disturbance_composite_sy": disturbance(SY, composite, rho),
        "decomposition_deviation": dec.deviation,
        "oracle": {"disturbance_transpose_sy": 0.0, "pushforward_transpose_sy": "-sy"},
    }


DEMOS = {
    "luders-xy": _luders_xy,
    "naive-violation": _naive_violation,
    "schrodinger-equality": _schrodinger_equality,
    "transpose-map": _transpose_map,
}


def run_demo(args) -> int:
    _write(_json(DEMOS[args.name]()) + "\n", args.out)
    return EXIT_OK


# -- scenario files ---------------------------------------------------------------


def evaluate_scenario(sc: "scenario.Scenario") -> dict:
    tol = sc.tol
    if sc.mode == "errors-joint":
        rep = check_relation_errors(sc.A, sc.B, sc.instrument, sc.secondary_povm, sc.rho, tol, post=sc.transfer_map)
        out = rep.to_dict()
        out["satisfied"] = rep.satisfied_full
    elif sc.mode == "error-disturbance":
        rep = check_relation_error_disturbance(sc.A, sc.B, sc.instrument, sc.rho, tol, post=sc.transfer_map)
        out = rep.to_dict()
        out["satisfied"] = rep.satisfied_simple
    elif sc.mode == "ozawa-chain":
        rep = ozawa_chain_check(sc.A, sc.B, sc.instrument, sc.rho, tol)
        out = rep.to_dict()
        out["satisfied"] = rep.ok
    else:
        rep = robertson_reduction(sc.A, sc.B, sc.rho)
        out = rep.to_dict()
        out["satisfied"] = rep.eps_sigma_deviation <= 1e-10 and rep.bound_deviation <= 1e-10
    out["scenario_mode"] = sc.mode
    return out


def run_case(args) -> int:
    sc = scenario.load(args.path)
    out = evaluate_scenario(sc)
    _write(_json(out) + "\n", args.out)
    return EXIT_OK if out["satisfied"] else EXIT_VIOLATION


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uqrel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def sweep_flags(p, with_mode: bool):
        if with_mode:
            p.add_argument("--mode", choices=MODES, required=True)
        p.add_argument("--dim", type=int, action="append", help="repeatable; default 2")
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=TOL_NUM)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("verify", help="sweep a relation over random instances")
    sweep_flags(p, True)
    p.set_defaults(func=run_verify)

    p = sub.add_parser("compare", help="Ozawa comparison chain over random instruments")
    sweep_flags(p, False)
    p.set_defaults(func=run_compare)

    p = sub.add_parser("demo", help="closed-form desk-scale cases")
    p.add_argument("name", choices=sorted(DEMOS))
    p.add_argument("--out", default=None)
    p.set_defaults(func=run_demo)

    p = sub.add_parser("case", help="evaluate a JSON scenario file")
    p.add_argument("path")
    p.add_argument("--out", default=None)
    p.set_defaults(func=run_case)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ValidationError, scenario.ScenarioError) as exc:
        sys.stderr.write(f"uqrel: error: {exc}\n")
        return EXIT_USAGE
    except NumericalBreakdown as exc:
        sys.stderr.write(f"uqrel: numerical breakdown: {exc}\n")
        return EXIT_BREAKDOWN


if __name__ == "__main__":
    sys.exit(main())
