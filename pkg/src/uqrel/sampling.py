"""Seeded random states, observables, measurements, channels and instruments.

Every generator takes ``seed``: an int, a :class:`SeedSpec`, or an existing
``numpy.random.Generator``. A ``SeedSpec`` maps ``(master_seed, trial_index)``
to an independent PCG64 stream, so sweeps are reproducible regardless of
the order trials run in.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .processes import ClassicalChannel, Instrument, KrausChannel, Povm
from .systems import ValidationError, as_probdist

MAX_RETRIES = 16


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    trial_index: int = 0

    def rng(self) -> np.random.Generator:
        seq = np.random.SeedSequence([self.master_seed & (2**64 - 1), self.trial_index])
        return np.random.Generator(np.random.PCG64(seq))

    def __str__(self) -> str:
        return f"{self.master_seed}:{self.trial_index}"


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, SeedSpec):
        return seed.rng()
    return SeedSpec(int(seed)).rng()


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_density(d: int, seed) -> np.ndarray:
    """Hilbert-Schmidt random state ``G G^dag / Tr[G G^dag]``."""
    G = ginibre(d, d, as_rng(seed))
    rho = G @ G.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_observable(d: int, seed) -> np.ndarray:
    G = ginibre(d, d, as_rng(seed))
    return (G + G.conj().T) / 2


def random_pure(d: int, seed) -> np.ndarray:
    v = ginibre(d, 1, as_rng(seed))
    v /= np.linalg.norm(v)
    return v @ v.conj().T


def haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random isometry ``C^cols -> C^rows`` (needs ``rows >= cols``)."""
    if rows < cols:
        raise ValidationError(f"no isometry from dimension {cols} into {rows}")
    Q, R = np.linalg.qr(ginibre(rows, cols, rng))
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases[None, :]


def random_unitary(d: int, seed) -> np.ndarray:
    return haar_isometry(d, d, as_rng(seed))


def random_channel(d_in: int, d_out: int, k: int, seed) -> KrausChannel:
    """Channel with ``k`` Kraus operators sliced from a Haar isometry."""
    V = haar_isometry(d_out * k, d_in, as_rng(seed))
    return KrausChannel(V.reshape(k, d_out, d_in))


def random_instrument(d_in: int, d_out: int, n_outcomes: int, n_kraus_per_outcome: int, seed,
                      labels: bool = False) -> Instrument:
    """Instrument whose Kraus operators are consecutive blocks of a Haar isometry.

    With ``labels=True`` the outcomes carry standard-normal real labels.
    """
    if min(d_in, d_out, n_outcomes, n_kraus_per_outcome) < 1:
        raise ValidationError("all sizes must be positive")
    rng = as_rng(seed)
    V = haar_isometry(d_out * n_outcomes * n_kraus_per_outcome, d_in, rng)
    K = V.reshape(n_outcomes, n_kraus_per_outcome, d_out, d_in)
    lab = rng.standard_normal(n_outcomes) if labels else None
    return Instrument(tuple(K), labels=lab)


def random_povm(d: int, n: int, seed) -> Povm:
    """POVM ``S^{-1/2} S_i S^{-1/2}`` from Gaussian ``S_i = A_i A_i^dag``."""
    rng = as_rng(seed)
    for _ in range(MAX_RETRIES):
        S = np.array([(lambda A: A @ A.conj().T)(ginibre(d, d, rng)) for _ in range(n)])
        w, U = np.linalg.eigh(S.sum(axis=0))
        if w[0] <= 1e-10 * w[-1]:
            continue
        inv_sqrt = (U / np.sqrt(w)) @ U.conj().T
        return Povm(np.einsum("ab,ibc,cd->iad", inv_sqrt, S, inv_sqrt))
    raise ValidationError("could not draw a well-conditioned POVM")


def random_classical_channel(n_in: int, n_out: int, seed) -> ClassicalChannel:
    """Columns drawn uniformly from the simplex."""
    K = as_rng(seed).dirichlet(np.ones(n_out), size=n_in).T
    return ClassicalChannel(K)


def non_informative_povm(d: int, q) -> Povm:
    """POVM with effects ``q_i I``; its statistics never depend on the state."""
    q = as_probdist(q)
    return Povm(q[:, None, None] * np.eye(d, dtype=complex)[None])
