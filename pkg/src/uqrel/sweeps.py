"""Seeded verification sweeps shared by the CLI and the acceptance suite.

A trial is a pure function of ``(mode, dim, SeedSpec, tol)``; results are
collected in trial order so output is independent of parallelism.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .processes import TransferMap, induced_channel, induced_povm
from .sampling import (
    SeedSpec,
    random_channel,
    random_density,
    random_instrument,
    random_observable,
    random_povm,
)
from .systems import TOL_NUM, NumericalBreakdown, seminorm_q
from .transport import compose_check, pullback_channel, pushforward_channel
from .uncertainty import (
    CSV_COLUMNS,
    CSV_HEADER,
    OZAWA_LINKS,
    check_relation_error_disturbance,
    check_relation_errors,
    decomposition_check,
    disturbanceless_conditions,
    errorless_conditions,
    ozawa_chain_check,
    robertson_reduction,
)

MODES = ("errors-joint", "error-disturbance", "ozawa-chain", "robertson", "properties")
ROBERTSON_TOL = 1e-10

CHAIN_COLUMNS = ("seed", "dim", *OZAWA_LINKS, "tightest", "satisfied")
PROPERTY_COLUMNS = (
    "seed", "dim", "decomposition_dev", "compose_dev", "contraction_slack",
    "predicates_agree", "satisfied",
)
HEADERS = {
    "ozawa-chain": ("# uqrel-chain v1", CHAIN_COLUMNS),
    "properties": ("# uqrel-properties v1", PROPERTY_COLUMNS),
}


@dataclass
class TrialResult:
    row: list
    ok: bool
    slack: float
    breakdown: bool = False
    extra: dict = field(default_factory=dict)


def _instance(dim: int, rng: np.random.Generator, labels: bool = False):
    n_out = int(rng.integers(2, dim + 2))
    n_kraus = int(rng.integers(1, 3))
    ins = random_instrument(dim, dim, n_out, n_kraus, rng, labels=labels)
    return ins, random_observable(dim, rng), random_observable(dim, rng), random_density(dim, rng)


def _trial_errors_joint(dim, rng, tol):
    ins, A, B, rho = _instance(dim, rng)
    L = random_povm(dim, int(rng.integers(2, dim + 2)), rng)
    rep = check_relation_errors(A, B, ins, L, rho, tol)
    return rep, rep.satisfied_full, rep.slack


def _trial_error_disturbance(dim, rng, tol):
    ins, A, B, rho = _instance(dim, rng)
    rep = check_relation_error_disturbance(A, B, ins, rho, tol)
    return rep, rep.satisfied_simple, rep.slack


def _trial_robertson(dim, rng, tol):
    A, B, rho = random_observable(dim, rng), random_observable(dim, rng), random_density(dim, rng)
    q = rng.dirichlet(np.ones(int(rng.integers(1, 5))))
    rep = robertson_reduction(A, B, rho, q)
    ok = (
        rep.eps_sigma_deviation <= ROBERTSON_TOL
        and rep.bound_deviation <= ROBERTSON_TOL
        and rep.slack >= -tol
    )
    return rep, ok, rep.slack


def _trial_properties(dim, rng, tol):
    ins, A, _, rho = _instance(dim, rng)
    T = induced_channel(ins)
    L = random_povm(dim, int(rng.integers(2, dim + 2)), rng)
    decomp = decomposition_check(A, T, L, rho, tol).deviation

    second = random_channel(dim, dim, int(rng.integers(1, 4)), rng)
    chain = [T, second] if rng.random() < 0.5 else [T, TransferMap.transpose(dim), second]
    comp = compose_check(chain, rho, A, tol=tol).max_deviation

    push = pushforward_channel(T, rho, A)
    pulled = pullback_channel(T, rho, push)
    contraction = min(seminorm_q(A, rho) - push.norm, push.norm - pulled.norm)

    conds_t = disturbanceless_conditions(A, T, rho, tol)
    conds_m = errorless_conditions(A, induced_povm(ins), rho, tol)
    agree = len(set(conds_t)) == 1 and len(set(conds_m)) == 1
    ok = decomp <= tol and comp <= tol and contraction >= -tol and agree
    return [decomp, comp, contraction, int(agree)], ok, min(tol - decomp, tol - comp, contraction)


def run_trial(mode: str, dim: int, seed: SeedSpec, tol: float = TOL_NUM) -> TrialResult:
    rng = seed.rng()
    try:
        if mode == "errors-joint":
            rep, ok, slack = _trial_errors_joint(dim, rng, tol)
        elif mode == "error-disturbance":
            rep, ok, slack = _trial_error_disturbance(dim, rng, tol)
        elif mode == "robertson":
            rep, ok, slack = _trial_robertson(dim, rng, tol)
            row = [str(seed), dim, mode, rep.eps_A, rep.eps_B, rep.eps_A * rep.eps_B,
                   rep.bounds.R, rep.bounds.I, rep.bounds.full, rep.bounds.simple, slack, int(ok)]
            return TrialResult(row, ok, slack, extra={"eps_sigma_dev": rep.eps_sigma_deviation,
                                                      "bound_dev": rep.bound_deviation})
        elif mode == "ozawa-chain":
            ins, A, B, rho = _instance(dim, rng, labels=True)
            rep = ozawa_chain_check(A, B, ins, rho, tol)
            slack = min(rep.slacks.values())
            row = [str(seed), dim, *(rep.slacks[k] for k in OZAWA_LINKS), rep.tightest, int(rep.ok)]
            return TrialResult(row, rep.ok, slack, extra={"tightest": rep.tightest})
        elif mode == "properties":
            values, ok, slack = _trial_properties(dim, rng, tol)
            return TrialResult([str(seed), dim, *values, int(ok)], ok, slack)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    except NumericalBreakdown:
        width = len(HEADERS.get(mode, (None, CSV_COLUMNS))[1])
        row = [str(seed), dim] + ["nan"] * (width - 3) + [0]
        if mode not in HEADERS:
            row[2] = mode
        return TrialResult(row, False, math.nan, breakdown=True)
    rep.metadata.update(seed=str(seed), dim=dim)
    return TrialResult(rep.csv_row(), ok, slack)


def _run_one(args):
    return run_trial(*args)


def sweep(mode: str, dims, trials: int, seed: int, tol: float = TOL_NUM, jobs: int = 1) -> list:
    """Run ``trials`` trials per dimension; trial indices count across all dims."""
    tasks = []
    for dim in dims:
        for _ in range(trials):
            tasks.append((mode, dim, SeedSpec(seed, len(tasks)), tol))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [_run_one(t) for t in tasks]


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def to_csv(mode: str, results) -> str:
    header, columns = HEADERS.get(mode, (CSV_HEADER, CSV_COLUMNS))
    buf = io.StringIO()
    buf.write(header + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in results:
        writer.writerow([_fmt(x) for x in r.row])
    return buf.getvalue()


def summarize(mode: str, results, runtime: float | None = None) -> dict:
    slacks = [r.slack for r in results if not math.isnan(r.slack)]
    failures = [r.row[0] for r in results if not r.ok]
    out = {
        "mode": mode,
        "trials": len(results),
        "failures": len(failures),
        "failed_seeds": failures[:20],
        "breakdowns": sum(r.breakdown for r in results),
        "min_slack": min(slacks) if slacks else None,
    }
    if mode == "robertson":
        out["max_eps_sigma_dev"] = max((r.extra["eps_sigma_dev"] for r in results if r.extra), default=None)
        out["max_bound_dev"] = max((r.extra["bound_dev"] for r in results if r.extra), default=None)
    if mode == "ozawa-chain":
        counts = {k: 0 for k in OZAWA_LINKS}
        for r in results:
            if r.extra:
                counts[r.extra["tightest"]] += 1
        out["tightest_counts"] = counts
        out["most_often_tight"] = max(counts, key=counts.get)
    if runtime is not None:
        out["runtime"] = runtime
    return out
