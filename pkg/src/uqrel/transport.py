"""Pullback and pushforward of observables through processes.

The pullback is the adjoint map passed to classes; the pushforward is its
adjoint with respect to the localized inner products. For a measurement the
pushforward has the closed form of a (real) weak value, for a quantum
process it is obtained from a Riesz solve against the Gram matrix of the
output state.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .processes import (
    Channel,
    ClassicalChannel,
    Povm,
    compose_channels,
    compose_measurement_after_channel,
)
from .systems import (
    PINV_CUTOFF,
    TOL_NUM,
    TangentC,
    TangentQ,
    as_probdist,
    as_realfn,
    canonical_rep,
    gram_q,
    hermitian_basis,
    inner_q,
    riesz_solve,
    seminorm_c,
)


def pullback_measurement(M: Povm, rho, f) -> TangentQ:
    return canonical_rep(M.adjoint(f), rho)


def pushforward_measurement(M: Povm, rho, A) -> TangentC:
    """Weak-value pushforward ``Re Tr[E_i A rho] / Tr[E_i rho]``; 0 where ``Tr[E_i rho] = 0``."""
    rho = np.asarray(rho, dtype=complex)
    p = M.apply(rho)
    num = np.real(np.einsum("iab,bc,ca->i", M.effects, np.asarray(A, dtype=complex), rho))
    safe = np.where(p > 0, p, 1.0)
    return TangentC(p, np.where(p > 0, num / safe, 0.0))


def pushforward_channel(T: Channel, rho, A, cutoff: float = PINV_CUTOFF) -> TangentQ:
    """Class at ``T(rho)`` representing ``C -> <A, T'C>_rho``."""
    rho = np.asarray(rho, dtype=complex)
    out = T.apply(rho)
    basis_out = hermitian_basis(T.dim_out)
    v = np.array([inner_q(A, T.adjoint(G), rho) for G in basis_out])
    c = riesz_solve(gram_q(out), v, tol=cutoff)
    return TangentQ(out, c)


def pullback_channel(T: Channel, rho, C) -> TangentQ:
    if isinstance(C, TangentQ):
        C = C.representative
    return canonical_rep(T.adjoint(C), rho)


def pushforward_classical(K: ClassicalChannel, p, f) -> TangentC:
    """Conditional expectation of ``f`` given the output of ``K``."""
    p = as_probdist(p, K.size_in)
    f = as_realfn(f, K.size_in)
    q = K.apply(p)
    num = K.matrix @ (f * p)
    return TangentC(q, np.where(q > 0, num / np.where(q > 0, q, 1.0), 0.0))


def pullback_classical(K: ClassicalChannel, p, g) -> TangentC:
    return TangentC(as_probdist(p, K.size_in), K.adjoint(g))


def pushforward(process, state, A):
    """Dispatch on the process kind; ``A`` may be a class or a plain operator/function."""
    if isinstance(A, TangentQ):
        A = A.representative
    elif isinstance(A, TangentC):
        A = A.values
    if isinstance(process, Povm):
        return pushforward_measurement(process, state, A)
    if isinstance(process, ClassicalChannel):
        return pushforward_classical(process, state, A)
    return pushforward_channel(process, state, A)


def pullback(process, state, C):
    if isinstance(C, TangentQ):
        C = C.representative
    elif isinstance(C, TangentC):
        C = C.values
    if isinstance(process, Povm):
        return pullback_measurement(process, state, C)
    if isinstance(process, ClassicalChannel):
        return pullback_classical(process, state, C)
    return pullback_channel(process, state, C)


def _distance(x, y) -> float:
    if isinstance(x, TangentC):
        return seminorm_c(x.values - y.values, x.base)
    return x.distance(y)


@dataclass
class ComposeReport:
    pushforward_deviation: float
    pullback_deviation: float
    links: int
    tol: float = TOL_NUM

    @property
    def max_deviation(self) -> float:
        return max(self.pushforward_deviation, self.pullback_deviation)

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tol


def compose_process(chain: Sequence):
    """Collapse a chain of channels, optionally ending in a POVM, into one process."""
    total = chain[0]
    for step in chain[1:]:
        if isinstance(step, Povm):
            total = compose_measurement_after_channel(step, total)
        else:
            total = compose_channels(total, step)
    return total


def compose_check(chain: Sequence, rho, A, C=None, tol: float = TOL_NUM) -> ComposeReport:
    """Compare transport through the composite process with step-by-step transport.

    ``chain`` lists the processes in the order they act; only the last may be
    a POVM. ``C`` lives on the final output; it defaults to the step-by-step
    pushforward of ``A``.
    """
    rho = np.asarray(rho, dtype=complex)
    states = [rho]
    for step in chain[:-1]:
        states.append(step.apply(states[-1]))

    stepwise = A
    for step, state in zip(chain, states):
        stepwise = pushforward(step, state, stepwise)
    composite = compose_process(chain)
    direct = pushforward(composite, rho, A)
    dev_push = _distance(direct, stepwise)

    if C is None:
        C = stepwise
    back = C
    for step, state in zip(reversed(chain), reversed(states)):
        back = pullback(step, state, back)
    direct_back = pullback(composite, rho, C)
    dev_pull = direct_back.distance(back)

    return ComposeReport(dev_push, dev_pull, len(chain), tol)
