"""JSON scenario files.

Schema (complex entries as ``[re, im]`` pairs, matrices row-major)::

    {
      "dim": 2,
      "rho": [[...]],
      "observables": {"A": [[...]], "B": [[...]]},
      "instrument": [[K_00, K_01, ...], [K_10, ...], ...],
      "labels": [m_0, m_1, ...],                # optional, outcome values
      "secondary_povm": [F_0, F_1, ...],        # required for errors-joint
      "transfer_map": "transpose" | [[real]],   # optional, applied after the instrument
      "mode": "errors-joint" | "error-disturbance" | "ozawa-chain" | "robertson",
      "tolerances": {"num": 1e-8}
    }
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .processes import Instrument, Povm, TransferMap
from .systems import TOL_NUM, ValidationError, as_density, as_hermitian, format_matrix, parse_matrix

SCENARIO_MODES = ("errors-joint", "error-disturbance", "ozawa-chain", "robertson")


class ScenarioError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class Scenario:
    dim: int
    rho: np.ndarray
    A: np.ndarray
    B: np.ndarray
    instrument: Instrument | None
    secondary_povm: Povm | None
    transfer_map: TransferMap | None
    mode: str
    tol: float = TOL_NUM


def _field(doc: dict, key: str, path: str):
    if key not in doc:
        raise ScenarioError(f"{path}.{key}" if path else key, "missing field")
    return doc[key]


def _matrix(obj, path: str, dim: int | None = None) -> np.ndarray:
    try:
        X = parse_matrix(obj)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(path, f"not a matrix literal ({exc})") from None
    if dim is not None and X.shape[1] != dim:
        raise ScenarioError(path, f"expected {dim} columns, got {X.shape[1]}")
    return X


def _wrap(path: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ValidationError as exc:
        raise ScenarioError(path, str(exc)) from None


def parse(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("$", "scenario must be a JSON object")
    dim = _field(doc, "dim", "")
    if not isinstance(dim, int) or dim < 1:
        raise ScenarioError("dim", "must be a positive integer")
    rho = _wrap("rho", as_density, _matrix(_field(doc, "rho", ""), "rho", dim), dim)
    obs = _field(doc, "observables", "")
    A = _wrap("observables.A", as_hermitian, _matrix(_field(obs, "A", "observables"), "observables.A"), dim)
    B = _wrap("observables.B", as_hermitian, _matrix(_field(obs, "B", "observables"), "observables.B"), dim)

    tol = float(doc.get("tolerances", {}).get("num", TOL_NUM))
    mode = doc.get("mode", "errors-joint" if "secondary_povm" in doc else "error-disturbance")
    if mode not in SCENARIO_MODES:
        raise ScenarioError("mode", f"unknown mode {mode!r}; expected one of {SCENARIO_MODES}")

    instrument = None
    if "instrument" in doc:
        branches = []
        for i, branch in enumerate(doc["instrument"]):
            if not isinstance(branch, list) or not branch:
                raise ScenarioError(f"instrument[{i}]", "branch must be a nonempty list of Kraus matrices")
            branches.append(np.array([_matrix(K, f"instrument[{i}][{a}]", dim) for a, K in enumerate(branch)]))
        instrument = _wrap("instrument", Instrument, tuple(branches), doc.get("labels"))
    elif mode != "robertson":
        raise ScenarioError("instrument", "missing field")

    transfer = None
    if "transfer_map" in doc:
        tm = doc["transfer_map"]
        d_out = instrument.dim_out if instrument is not None else dim
        if tm == "transpose":
            transfer = TransferMap.transpose(d_out)
        else:
            try:
                M = np.asarray(tm, dtype=float)
            except (ValueError, TypeError):
                raise ScenarioError("transfer_map", "expected 'transpose' or a real matrix") from None
            transfer = _wrap("transfer_map", TransferMap, M, d_out, int(round(np.sqrt(M.shape[0]))))

    povm = None
    if "secondary_povm" in doc:
        effects = [_matrix(F, f"secondary_povm[{j}]") for j, F in enumerate(doc["secondary_povm"])]
        povm = _wrap("secondary_povm", Povm, np.array(effects))
    elif mode == "errors-joint":
        raise ScenarioError("secondary_povm", "required for errors-joint mode")

    return Scenario(dim, rho, A, B, instrument, povm, transfer, mode, tol)


def loads(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return parse(doc)


def load(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(path, exc.strerror or str(exc)) from None
    return loads(text)


def dumps(sc: Scenario) -> str:
    """Serialise back to the file format."""
    doc = {
        "dim": sc.dim,
        "rho": format_matrix(sc.rho),
        "observables": {"A": format_matrix(sc.A), "B": format_matrix(sc.B)},
        "mode": sc.mode,
        "tolerances": {"num": sc.tol},
    }
    if sc.instrument is not None:
        doc["instrument"] = [[format_matrix(K) for K in b] for b in sc.instrument.branches]
        if sc.instrument.labels is not None:
            doc["labels"] = sc.instrument.labels.tolist()
    if sc.secondary_povm is not None:
        doc["secondary_povm"] = [format_matrix(F) for F in sc.secondary_povm.effects]
    if sc.transfer_map is not None:
        doc["transfer_map"] = sc.transfer_map.matrix.tolist()
    return json.dumps(doc, indent=2)
