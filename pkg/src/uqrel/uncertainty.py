"""Error, disturbance and the uncertainty relations built from them.

All quantities are state dependent. The error of a measurement ``M`` for
``A`` is the norm lost by pushing ``A`` forward through ``M``; the
disturbance of a process is the same loss for a quantum-to-quantum map.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .processes import (
    TOL_SPEC,
    Channel,
    ClassicalChannel,
    Instrument,
    KrausChannel,
    Povm,
    compose_channels,
    compose_measurement_after_channel,
    induced_channel,
    induced_povm,
    joint_distribution,
)
from .sampling import non_informative_povm
from .systems import (
    TOL_NUM,
    NumericalBreakdown,
    ValidationError,
    as_density,
    as_hermitian,
    commutator_mean,
    expect,
    inner_c,
    inner_q,
    mean,
    seminorm_q,
    std,
)
from .transport import (
    pullback_channel,
    pullback_measurement,
    pushforward_channel,
    pushforward_classical,
    pushforward_measurement,
)

CSV_HEADER = "# uqrel-report v1"
CSV_COLUMNS = (
    "seed", "dim", "mode", "eps_A", "eta_or_eps_B", "lhs", "R", "I",
    "bound_full", "bound_simple", "slack", "satisfied",
)


# radicands below this (relative) size are cancellation noise, not signal
ROUNDOFF = 1e-13


def _loss(total_sq: float, kept_sq: float, tol: float, scale: float | None = None) -> float:
    """``sqrt(total_sq - kept_sq)`` with the radicand checked against ``tol``.

    The roundoff floor is relative to ``scale`` (default ``total_sq``) so the
    result stays homogeneous under rescaling of the observable.
    """
    radicand = total_sq - kept_sq
    scale = abs(total_sq) if scale is None else scale
    if radicand < -tol * max(1.0, scale):
        raise NumericalBreakdown(f"negative radicand {radicand:.3g}")
    if radicand <= ROUNDOFF * scale:
        return 0.0
    return float(np.sqrt(radicand))


def error(A, M: Povm, rho, tol: float = TOL_NUM) -> float:
    """Error of ``M`` as a measurement of ``A`` over ``rho``."""
    A = as_hermitian(A, M.dim)
    return _loss(inner_q(A, A, rho), pushforward_measurement(M, rho, A).norm ** 2, tol)


def disturbance(B, T: Channel, rho, tol: float = TOL_NUM) -> float:
    B = as_hermitian(B, T.dim_in)
    return _loss(inner_q(B, B, rho), pushforward_channel(T, rho, B).norm ** 2, tol)


def classical_loss(f, K: ClassicalChannel, p, tol: float = TOL_NUM) -> float:
    return _loss(inner_c(f, f, p), pushforward_classical(K, p, f).norm ** 2, tol)


def _pp_measurement(M: Povm, rho, A) -> np.ndarray:
    return pullback_measurement(M, rho, pushforward_measurement(M, rho, A).values).representative


def _pp_channel(T: Channel, rho, B) -> np.ndarray:
    return pullback_channel(T, rho, pushforward_channel(T, rho, B)).representative


# -- bounds -----------------------------------------------------------------------


@dataclass(frozen=True)
class BoundTerms:
    R: float
    I: float

    @property
    def full(self) -> float:
        return float(np.hypot(self.R, self.I))

    @property
    def simple(self) -> float:
        return abs(self.I)


def bound_terms_joint(A, B, M: Povm, N: Povm, J, rho, tol: float = TOL_NUM) -> BoundTerms:
    """Classical and quantum bound terms for a jointly described pair ``(M, N)``.

    ``J`` is the joint distribution at ``rho`` as an ``(M.outcomes, N.outcomes)``
    array (or its row-major flattening).
    """
    rho = as_density(rho, M.dim)
    A, B = as_hermitian(A, M.dim), as_hermitian(B, M.dim)
    J = np.asarray(J, dtype=float).reshape(M.outcomes, N.outcomes)
    p, q = M.apply(rho), N.apply(rho)
    if np.max(np.abs(J.sum(axis=1) - p)) > tol or np.max(np.abs(J.sum(axis=0) - q)) > tol:
        raise ValidationError("joint distribution marginals do not match the measurements")

    mA, mB = pushforward_measurement(M, rho, A), pushforward_measurement(M, rho, B)
    nA, nB = pushforward_measurement(N, rho, A), pushforward_measurement(N, rho, B)
    R = (
        inner_q(A, B, rho)
        - inner_c(mA.values, mB.values, p)
        - inner_c(nA.values, nB.values, q)
        + float(mA.values @ J @ nB.values)
    )
    I = (
        commutator_mean(A, B, rho)
        - commutator_mean(_pp_measurement(M, rho, A), B, rho)
        - commutator_mean(A, _pp_measurement(N, rho, B), rho)
    )
    return BoundTerms(float(R), float(I))


def bound_I_error_disturbance(A, B, M: Povm, T: Channel, rho) -> float:
    """Quantum bound with the secondary measurement eliminated through ``T``."""
    rho = as_density(rho, M.dim)
    A, B = as_hermitian(A, M.dim), as_hermitian(B, M.dim)
    return float(
        commutator_mean(A, B, rho)
        - commutator_mean(_pp_measurement(M, rho, A), B, rho)
        - commutator_mean(A, _pp_channel(T, rho, B), rho)
    )


def joint_semi_inner_product(A, B, M: Povm, N: Povm, joint: Povm, rho) -> complex:
    """Semi-inner product of the error pairs of ``A`` (via M) and ``B`` (via N).

    ``joint`` has row-major effects over ``M.outcomes x N.outcomes`` whose
    marginals are ``M`` and ``N``. Its modulus is the full bound and the
    seminorms of the pairs are the two errors.
    """
    rho = np.asarray(rho, dtype=complex)
    n1, n2 = M.outcomes, N.outcomes
    f = pushforward_measurement(M, rho, A).values
    g = pushforward_measurement(N, rho, B).values
    f_joint = np.repeat(f, n2)
    g_joint = np.tile(g, n1)
    XA = A - M.adjoint(f)
    YB = B - N.adjoint(g)
    Jp = joint.apply(rho)
    return complex(
        expect(XA.conj().T @ YB, rho)
        + np.sum(f_joint * g_joint * Jp)
        - expect(joint.adjoint(f_joint) @ joint.adjoint(g_joint), rho)
    )


# -- reports ----------------------------------------------------------------------


@dataclass
class RelationReport:
    eps_A: float
    eps_or_eta_B: float
    bounds: BoundTerms
    mode: str
    tol: float = TOL_NUM
    metadata: dict = field(default_factory=dict)

    @property
    def lhs(self) -> float:
        return self.eps_A * self.eps_or_eta_B

    @property
    def bound(self) -> float:
        return self.bounds.full if self.mode == "errors-joint" else self.bounds.simple

    @property
    def slack(self) -> float:
        return self.lhs - self.bound

    @property
    def satisfied_full(self) -> bool:
        return self.lhs - self.bounds.full >= -self.tol

    @property
    def satisfied_simple(self) -> bool:
        return self.lhs - self.bounds.simple >= -self.tol

    @property
    def satisfied(self) -> bool:
        return self.slack >= -self.tol

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "eps_A": self.eps_A,
            "eta_or_eps_B": self.eps_or_eta_B,
            "lhs": self.lhs,
            "R": self.bounds.R,
            "I": self.bounds.I,
            "bound_full": self.bounds.full,
            "bound_simple": self.bounds.simple,
            "slack": self.slack,
            "satisfied_full": self.satisfied_full,
            "satisfied_simple": self.satisfied_simple,
            "metadata": self.metadata,
        }

    def csv_row(self) -> list:
        md = self.metadata
        return [
            md.get("seed", ""), md.get("dim", ""), self.mode,
            self.eps_A, self.eps_or_eta_B, self.lhs, self.bounds.R, self.bounds.I,
            self.bounds.full, self.bounds.simple, self.slack, int(self.satisfied),
        ]


def check_relation_errors(A, B, ins: Instrument, L: Povm, rho, tol: float = TOL_NUM,
                          post: Channel | None = None) -> RelationReport:
    """Joint-errors relation for ``M`` and ``L o Theta`` from a sequential setup.

    ``post`` is an optional further process applied between the instrument
    and ``L``.
    """
    if post is not None:
        L = compose_measurement_after_channel(L, post)
    M = induced_povm(ins)
    N = compose_measurement_after_channel(L, induced_channel(ins))
    J = joint_distribution(ins, L, rho)
    bounds = bound_terms_joint(A, B, M, N, J, rho)
    return RelationReport(
        error(A, M, rho, tol), error(B, N, rho, tol), bounds, "errors-joint", tol,
        {"dim": M.dim},
    )


def check_relation_error_disturbance(A, B, ins: Instrument, rho, tol: float = TOL_NUM,
                                     post: Channel | None = None) -> RelationReport:
    """Error-disturbance relation; R is evaluated with the optimal secondary measurement.

    With ``post`` the observer effect is ``post`` after the instrument's channel.
    """
    M = induced_povm(ins)
    T = induced_channel(ins)
    if post is not None:
        T = compose_channels(T, post)
    L = optimal_secondary(T, B, rho)
    N = compose_measurement_after_channel(L, T)
    L_ins = L if post is None else compose_measurement_after_channel(L, post)
    R = bound_terms_joint(A, B, M, N, joint_distribution(ins, L_ins, rho), rho).R
    I = bound_I_error_disturbance(A, B, M, T, rho)
    return RelationReport(
        error(A, M, rho, tol), disturbance(B, T, rho, tol), BoundTerms(R, I),
        "error-disturbance", tol, {"dim": M.dim},
    )


# -- secondary measurements -------------------------------------------------------


def optimal_secondary(T: Channel, B, rho, tol_spec: float = TOL_SPEC) -> Povm:
    """Projective measurement of the pushforward of ``B``; errorless at ``T(rho)``.

    A vanishing pushforward has a single (zero) eigenvalue and yields the
    trivial one-outcome POVM.
    """
    rep = pushforward_channel(T, rho, B).representative
    return Povm.projective(rep, tol_spec)


@dataclass
class DecompositionReport:
    composite_sq: float
    disturbance_sq: float
    secondary_sq: float

    @property
    def deviation(self) -> float:
        return abs(self.composite_sq - self.disturbance_sq - self.secondary_sq)


def decomposition_check(A, T: Channel, L: Povm, rho, tol: float = TOL_NUM) -> DecompositionReport:
    """Both sides of the split of a composite error into disturbance and secondary error."""
    N = compose_measurement_after_channel(L, T)
    push = pushforward_channel(T, rho, A)
    return DecompositionReport(
        error(A, N, rho, tol) ** 2,
        disturbance(A, T, rho, tol) ** 2,
        error(push.representative, L, push.base, tol) ** 2,
    )


# -- errorless / disturbance-free predicates --------------------------------------


class InconsistentPredicates(AssertionError):
    """The three equivalent characterisations disagreed."""


def _conditions(A, rho, pushed_norm: float, pp, tol: float):
    norm_sq = inner_q(A, A, rho)
    scale = tol * max(1.0, norm_sq)
    loss_sq = norm_sq - pushed_norm**2
    a = loss_sq <= scale
    b = seminorm_q(A - pp, rho) ** 2 <= scale
    c = abs(loss_sq) <= scale and abs(pushed_norm**2 - seminorm_q(pp, rho) ** 2) <= scale
    return a, b, c


def _agree(conds) -> bool:
    if len(set(conds)) != 1:
        raise InconsistentPredicates(f"conditions (a), (b), (c) disagree: {conds}")
    return conds[0]


def errorless_conditions(A, M: Povm, rho, tol: float = TOL_NUM):
    A = as_hermitian(A, M.dim)
    push = pushforward_measurement(M, rho, A)
    return _conditions(A, rho, push.norm, _pp_measurement(M, rho, A), tol)


def disturbanceless_conditions(A, T: Channel, rho, tol: float = TOL_NUM):
    A = as_hermitian(A, T.dim_in)
    push = pushforward_channel(T, rho, A)
    pp = pullback_channel(T, rho, push).representative
    return _conditions(A, rho, push.norm, pp, tol)


def errorless_predicate(A, M: Povm, rho, tol: float = TOL_NUM) -> bool:
    return _agree(errorless_conditions(A, M, rho, tol))


def disturbanceless_predicate(A, T: Channel, rho, tol: float = TOL_NUM) -> bool:
    return _agree(disturbanceless_conditions(A, T, rho, tol))


# -- demonstrations ---------------------------------------------------------------


def spin_operators(dim: int):
    """Spin-(dim-1)/2 operators ``(Jx, Jy, Jz)`` with ``Jz`` diagonal, descending."""
    j = (dim - 1) / 2
    m = j - np.arange(dim)
    jp = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        jp[k - 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jx = (jp + jp.conj().T) / 2
    jy = (jp - jp.conj().T) / 2j
    return jx, jy, np.diag(m).astype(complex)


def no_free_measurement_demo(dim: int = 2, A=None, B=None, rho=None) -> RelationReport:
    """Errorless Luders measurement of ``A`` and the disturbance it leaves on ``B``.

    Defaults to ``A = 2 Jx``, ``B = 2 Jy`` (the Pauli pair for a qubit) in the
    top ``Jz`` eigenstate. The metadata carries the naive commutator bound
    and whether the product falls below it.
    """
    if dim < 2:
        raise ValidationError("dim must be at least 2")
    jx, jy, _ = spin_operators(dim)
    A = 2 * jx if A is None else as_hermitian(A, dim)
    B = 2 * jy if B is None else as_hermitian(B, dim)
    if rho is None:
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1
    report = check_relation_error_disturbance(A, B, Instrument.luders(A), rho)
    naive = abs(commutator_mean(A, B, rho))
    report.metadata.update(
        naive_bound=naive,
        violates_naive=bool(report.lhs < naive - TOL_NUM),
    )
    return report


# -- Ozawa comparison -------------------------------------------------------------


def ozawa_error(A, M: Povm, rho, tol: float = TOL_NUM) -> float:
    """Noise-operator error computed from the POVM and its outcome labels."""
    if M.labels is None:
        raise ValidationError("Ozawa error needs outcome labels")
    A = as_hermitian(A, M.dim)
    m = M.labels
    scale = mean(M.adjoint(m**2), rho) + mean(A @ A, rho)
    return _loss(scale, 2 * inner_q(M.adjoint(m), A, rho), tol, scale)


def ozawa_disturbance(B, T: KrausChannel, rho, tol: float = TOL_NUM) -> float:
    if not isinstance(T, KrausChannel):
        raise ValidationError("Ozawa disturbance needs a Kraus channel")
    if T.dim_in != T.dim_out:
        raise ValidationError("Ozawa disturbance needs equal input and output dimensions")
    B = as_hermitian(B, T.dim_in)
    scale = mean(T.adjoint(B @ B), rho) + mean(B @ B, rho)
    return _loss(scale, 2 * inner_q(T.adjoint(B), B, rho), tol, scale)


OZAWA_LINKS = (
    "ozawa_product>=product",
    "product>=full",
    "full>=simple",
    "simple>=ozawa_rhs",
    "ozawa_inequality",
)


@dataclass
class ChainReport:
    values: dict
    slacks: dict
    tol: float = TOL_NUM
    metadata: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(s >= -self.tol for s in self.slacks.values())

    @property
    def tightest(self) -> str:
        return min(self.slacks, key=self.slacks.get)

    def to_dict(self) -> dict:
        return {"values": self.values, "slacks": self.slacks, "ok": self.ok,
                "tightest": self.tightest, "metadata": self.metadata}


def ozawa_chain_check(A, B, ins: Instrument, rho, tol: float = TOL_NUM) -> ChainReport:
    """Evaluate every link from the Ozawa product down to his lower bound."""
    M = induced_povm(ins)
    T = induced_channel(ins)
    rel = check_relation_error_disturbance(A, B, ins, rho, tol)
    eo, no = ozawa_error(A, M, rho, tol), ozawa_disturbance(B, T, rho, tol)
    sA, sB = std(A, rho), std(B, rho)
    comm = abs(commutator_mean(A, B, rho))
    ozawa_rhs = comm - eo * sB - sA * no
    values = {
        "ozawa_product": eo * no,
        "product": rel.lhs,
        "full": rel.bounds.full,
        "simple": rel.bounds.simple,
        "ozawa_rhs": ozawa_rhs,
        "eps": rel.eps_A,
        "eta": rel.eps_or_eta_B,
        "eps_ozawa": eo,
        "eta_ozawa": no,
        "sigma_A": sA,
        "sigma_B": sB,
        "commutator_bound": comm,
        "R": rel.bounds.R,
        "I": rel.bounds.I,
    }
    slacks = dict(zip(OZAWA_LINKS, (
        eo * no - rel.lhs,
        rel.lhs - rel.bounds.full,
        rel.bounds.full - rel.bounds.simple,
        rel.bounds.simple - ozawa_rhs,
        eo * no + eo * sB + sA * no - comm,
    )))
    return ChainReport(values, slacks, tol, {"dim": M.dim})


# -- non-informative reduction ----------------------------------------------------


@dataclass
class RobertsonReport:
    eps_A: float
    eps_B: float
    sigma_A: float
    sigma_B: float
    bounds: BoundTerms
    schrodinger: float

    @property
    def eps_sigma_deviation(self) -> float:
        return max(abs(self.eps_A - self.sigma_A), abs(self.eps_B - self.sigma_B))

    @property
    def bound_deviation(self) -> float:
        return abs(self.bounds.full - self.schrodinger)

    @property
    def slack(self) -> float:
        return self.eps_A * self.eps_B - self.bounds.full

    def to_dict(self) -> dict:
        out = asdict(self)
        out["bounds"] = {"R": self.bounds.R, "I": self.bounds.I, "full": self.bounds.full}
        out.update(eps_sigma_deviation=self.eps_sigma_deviation,
                   bound_deviation=self.bound_deviation, slack=self.slack)
        return out


def robertson_reduction(A, B, rho, q=None) -> RobertsonReport:
    """Errors of a non-informative ``M = N`` against the Schrodinger bound."""
    rho = as_density(rho)
    d = rho.shape[0]
    A, B = as_hermitian(A, d), as_hermitian(B, d)
    q = np.full(2, 0.5) if q is None else np.asarray(q, dtype=float)
    M = non_informative_povm(d, q)
    J = np.diag(M.apply(rho))
    bounds = bound_terms_joint(A, B, M, M, J, rho)
    cov = inner_q(A, B, rho) - mean(A, rho) * mean(B, rho)
    schrodinger = float(np.hypot(cov, commutator_mean(A, B, rho)))
    return RobertsonReport(
        error(A, M, rho), error(B, M, rho), std(A, rho), std(B, rho), bounds, schrodinger
    )
