"""Measurements, quantum processes, classical processes and instruments.

Every process exposes ``apply`` (Schrodinger picture) and ``adjoint``
(Heisenberg picture); the module-level functions are thin dispatchers so
that downstream code never cares which channel representation it holds.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .systems import (
    TOL_NUM,
    TOL_PSD,
    ValidationError,
    as_density,
    as_hermitian,
    as_probdist,
    as_realfn,
    coords,
    from_coords,
    hermitian_basis,
)

TOL_SPEC = 1e-9


class PositivityError(ValidationError):
    """A transfer map produced a non-positive output on this input."""


def _check_psd(X, tol, what):
    lo = np.linalg.eigvalsh((X + X.conj().T) / 2)[0]
    if lo < -tol:
        raise ValidationError(f"{what} is not positive semidefinite (eigenvalue {lo:.3g})")


def spectral_projectors(A, tol: float = TOL_SPEC):
    """Eigenvalues of ``A`` grouped within ``tol`` and their spectral projectors."""
    w, V = np.linalg.eigh(as_hermitian(A))
    groups = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[groups[-1][0]] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    values = np.array([w[g].mean() for g in groups])
    projs = np.array([V[:, g] @ V[:, g].conj().T for g in groups])
    return values, projs


# -- quantum measurement --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Povm:
    """Finite-outcome POVM; ``labels`` are optional real outcome values."""

    effects: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        E = np.asarray(self.effects, dtype=complex)
        if E.ndim != 3 or E.shape[1] != E.shape[2] or E.shape[0] < 1:
            raise ValidationError(f"effects must have shape (n, d, d), got {E.shape}")
        for i, Ei in enumerate(E):
            if np.max(np.abs(Ei - Ei.conj().T)) > TOL_NUM:
                raise ValidationError(f"effect {i} is not Hermitian")
            _check_psd(Ei, TOL_PSD, f"effect {i}")
        dev = np.max(np.abs(E.sum(axis=0) - np.eye(E.shape[1])))
        if dev > TOL_NUM:
            raise ValidationError(
                f"effects 0..{E.shape[0] - 1} do not sum to identity (deviation {dev:.3g})"
            )
        object.__setattr__(self, "effects", (E + E.conj().transpose(0, 2, 1)) / 2)
        if self.labels is not None:
            object.__setattr__(self, "labels", as_realfn(self.labels, E.shape[0]))

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    @property
    def outcomes(self) -> int:
        return self.effects.shape[0]

    @classmethod
    def projective(cls, A, tol: float = TOL_SPEC) -> "Povm":
        """Spectral measurement of ``A`` labelled by its (grouped) eigenvalues."""
        values, projs = spectral_projectors(A, tol)
        return cls(projs, labels=values)

    @classmethod
    def trivial(cls, d: int) -> "Povm":
        return cls(np.eye(d, dtype=complex)[None])

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.dim, self.dim):
            raise ValidationError(f"state dimension {rho.shape[0]} != POVM dimension {self.dim}")
        p = np.real(np.einsum("iab,ba->i", self.effects, rho))
        return as_probdist(p)

    def adjoint(self, f) -> np.ndarray:
        f = as_realfn(f, self.outcomes)
        return np.einsum("i,iab->ab", f, self.effects)


def apply_measurement(M: Povm, rho) -> np.ndarray:
    return M.apply(rho)


def adjoint_measurement(M: Povm, f) -> np.ndarray:
    return M.adjoint(f)


# -- quantum processes ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive trace-preserving map ``rho -> sum_a K_a rho K_a^dag``."""

    kraus: np.ndarray

    def __post_init__(self):
        K = np.asarray(self.kraus, dtype=complex)
        if K.ndim == 2:
            K = K[None]
        if K.ndim != 3 or K.shape[0] < 1:
            raise ValidationError(f"Kraus operators must have shape (k, d_out, d_in), got {K.shape}")
        dev = np.max(np.abs(np.einsum("kba,kbc->ac", K.conj(), K) - np.eye(K.shape[2])))
        if dev > TOL_NUM:
            raise ValidationError(f"Kraus operators are not trace preserving (deviation {dev:.3g})")
        object.__setattr__(self, "kraus", K)

    @property
    def dim_in(self) -> int:
        return self.kraus.shape[2]

    @property
    def dim_out(self) -> int:
        return self.kraus.shape[1]

    @classmethod
    def identity(cls, d: int) -> "KrausChannel":
        return cls(np.eye(d, dtype=complex)[None])

    @classmethod
    def unitary(cls, U) -> "KrausChannel":
        return cls(np.asarray(U, dtype=complex)[None])

    def apply(self, rho) -> np.ndarray:
        rho = as_hermitian(rho, self.dim_in)
        out = np.einsum("kab,bc,kdc->ad", self.kraus, rho, self.kraus.conj())
        return as_density(out)

    def adjoint(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        if X.shape != (self.dim_out, self.dim_out):
            raise ValidationError(f"operator dimension {X.shape[0]} != channel output {self.dim_out}")
        return np.einsum("kba,bc,kcd->ad", self.kraus.conj(), X, self.kraus)

    def to_transfer(self) -> "TransferMap":
        return TransferMap.from_function(
            lambda X: np.einsum("kab,bc,kdc->ad", self.kraus, X, self.kraus.conj()),
            self.dim_in,
            self.dim_out,
        )


@dataclass(frozen=True, eq=False)
class TransferMap:
    """Trace-preserving Hermiticity-preserving linear map in basis coordinates.

    ``matrix[k, l] = Tr[G_k Theta(G_l)]`` over the Hermitian bases of the
    output and input spaces. Positivity is not assumed globally; ``apply``
    checks the output on each input instead.
    """

    matrix: np.ndarray
    dim_in: int
    dim_out: int

    def __post_init__(self):
        T = np.asarray(self.matrix, dtype=float)
        if T.shape != (self.dim_out**2, self.dim_in**2):
            raise ValidationError(
                f"transfer matrix must be {self.dim_out**2}x{self.dim_in**2}, got {T.shape}"
            )
        # trace preservation <=> adjoint is unital
        unit_in = coords(np.eye(self.dim_in))
        dev = np.max(np.abs(T.T @ coords(np.eye(self.dim_out)) - unit_in))
        if dev > TOL_NUM:
            raise ValidationError(f"transfer map is not trace preserving (deviation {dev:.3g})")
        object.__setattr__(self, "matrix", T)

    @classmethod
    def from_function(cls, fn, dim_in: int, dim_out: int) -> "TransferMap":
        Gin = hermitian_basis(dim_in)
        T = np.array([coords(fn(G)) for G in Gin]).T
        return cls(T, dim_in, dim_out)

    @classmethod
    def transpose(cls, d: int) -> "TransferMap":
        return cls.from_function(lambda X: X.T, d, d)

    def apply(self, rho) -> np.ndarray:
        rho = as_hermitian(rho, self.dim_in)
        out = from_coords(self.matrix @ coords(rho))
        try:
            return as_density(out)
        except ValidationError as exc:
            raise PositivityError(f"map not positive on this input: {exc}") from exc

    def adjoint(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        if X.shape != (self.dim_out, self.dim_out):
            raise ValidationError(f"operator dimension {X.shape[0]} != map output {self.dim_out}")
        herm = (X + X.conj().T) / 2
        anti = (X - X.conj().T) / 2j
        out = from_coords(self.matrix.T @ coords(herm))
        if np.max(np.abs(anti), initial=0.0) > 0:
            out = out + 1j * from_coords(self.matrix.T @ coords(anti))
        return out

    def to_transfer(self) -> "TransferMap":
        return self


Channel = Union[KrausChannel, TransferMap]


def apply_channel(T: Channel, rho) -> np.ndarray:
    return T.apply(rho)


def adjoint_channel(T: Channel, X) -> np.ndarray:
    return T.adjoint(X)


def compose_channels(first: Channel, second: Channel) -> Channel:
    """The process ``second o first``."""
    if first.dim_out != second.dim_in:
        raise ValidationError(f"cannot compose: {first.dim_out} -> {second.dim_in}")
    if isinstance(first, KrausChannel) and isinstance(second, KrausChannel):
        K = np.einsum("jab,kbc->jkac", second.kraus, first.kraus)
        return KrausChannel(K.reshape(-1, second.dim_out, first.dim_in))
    T = second.to_transfer().matrix @ first.to_transfer().matrix
    return TransferMap(T, first.dim_in, second.dim_out)


def compose_measurement_after_channel(L: Povm, T: Channel) -> Povm:
    """The measurement ``L o T`` with effects ``T'(F_j)``."""
    if L.dim != T.dim_out:
        raise ValidationError(f"POVM dimension {L.dim} != channel output {T.dim_out}")
    return Povm(np.array([T.adjoint(F) for F in L.effects]), labels=L.labels)


# -- instruments ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Instrument:
    """Outcome-indexed family of CP maps, each given by its Kraus list."""

    branches: tuple
    labels: np.ndarray | None = None

    def __post_init__(self):
        branches = []
        for i, b in enumerate(self.branches):
            K = np.asarray(b, dtype=complex)
            if K.ndim == 2:
                K = K[None]
            if K.ndim != 3 or K.shape[0] < 1:
                raise ValidationError(f"branch {i} must have shape (k, d_out, d_in)")
            branches.append(K)
        if not branches:
            raise ValidationError("instrument needs at least one branch")
        shapes = {K.shape[1:] for K in branches}
        if len(shapes) != 1:
            raise ValidationError(f"branches have inconsistent shapes {sorted(shapes)}")
        total = sum(np.einsum("kba,kbc->ac", K.conj(), K) for K in branches)
        dev = np.max(np.abs(total - np.eye(branches[0].shape[2])))
        if dev > TOL_NUM:
            raise ValidationError(f"instrument is not trace preserving (deviation {dev:.3g})")
        object.__setattr__(self, "branches", tuple(branches))
        if self.labels is not None:
            object.__setattr__(self, "labels", as_realfn(self.labels, len(branches)))

    @property
    def dim_in(self) -> int:
        return self.branches[0].shape[2]

    @property
    def dim_out(self) -> int:
        return self.branches[0].shape[1]

    @property
    def outcomes(self) -> int:
        return len(self.branches)

    @classmethod
    def luders(cls, A, tol: float = TOL_SPEC) -> "Instrument":
        """Projection-postulate instrument of the observable ``A``."""
        values, projs = spectral_projectors(A, tol)
        return cls(tuple(P[None] for P in projs), labels=values)

    @classmethod
    def from_projectors(cls, projs: Sequence, labels=None) -> "Instrument":
        return cls(tuple(np.asarray(P)[None] for P in projs), labels=labels)

    def branch_apply(self, i: int, rho) -> np.ndarray:
        """Unnormalised post-measurement state of outcome ``i``."""
        K = self.branches[i]
        return np.einsum("kab,bc,kdc->ad", K, np.asarray(rho, dtype=complex), K.conj())

    def joint_povm(self, L: Povm) -> Povm:
        """Sequential POVM with effects ``sum_a K_ia^dag F_j K_ia``, row-major in (i, j)."""
        if L.dim != self.dim_out:
            raise ValidationError(f"secondary POVM dimension {L.dim} != instrument output {self.dim_out}")
        E = [
            np.einsum("kba,bc,kcd->ad", K.conj(), F, K)
            for K in self.branches
            for F in L.effects
        ]
        return Povm(np.array(E))


def induced_povm(ins: Instrument) -> Povm:
    E = np.array([np.einsum("kba,kbc->ac", K.conj(), K) for K in ins.branches])
    return Povm(E, labels=ins.labels)


def induced_channel(ins: Instrument) -> KrausChannel:
    return KrausChannel(np.concatenate(ins.branches, axis=0))


def joint_distribution(ins: Instrument, L: Povm, rho) -> np.ndarray:
    """Sequential joint distribution as an ``(outcomes, L.outcomes)`` array."""
    rho = as_density(rho, ins.dim_in)
    J = np.array(
        [np.real(np.einsum("jab,ba->j", L.effects, ins.branch_apply(i, rho))) for i in range(ins.outcomes)]
    )
    return as_probdist(J.ravel()).reshape(J.shape)


# -- classical processes ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ClassicalChannel:
    """Column-stochastic matrix ``matrix[j, i] = P(j | i)``."""

    matrix: np.ndarray

    def __post_init__(self):
        K = np.asarray(self.matrix, dtype=float)
        if K.ndim != 2:
            raise ValidationError("classical channel must be a matrix")
        if np.min(K) < -TOL_PSD:
            raise ValidationError("classical channel has negative entries")
        dev = np.max(np.abs(K.sum(axis=0) - 1))
        if dev > TOL_NUM:
            raise ValidationError(f"columns do not sum to 1 (deviation {dev:.3g})")
        object.__setattr__(self, "matrix", np.clip(K, 0.0, None))

    @property
    def size_in(self) -> int:
        return self.matrix.shape[1]

    @property
    def size_out(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n: int) -> "ClassicalChannel":
        return cls(np.eye(n))

    @classmethod
    def merge_all(cls, n: int) -> "ClassicalChannel":
        return cls(np.ones((1, n)))

    def apply(self, p) -> np.ndarray:
        return as_probdist(self.matrix @ as_probdist(p, self.size_in))

    def adjoint(self, f) -> np.ndarray:
        return self.matrix.T @ as_realfn(f, self.size_out)


def apply_classical(K: ClassicalChannel, p) -> np.ndarray:
    return K.apply(p)


def adjoint_classical(K: ClassicalChannel, f) -> np.ndarray:
    return K.adjoint(f)


def compose_classical_after_measurement(K: ClassicalChannel, M: Povm) -> Povm:
    """Post-processed measurement ``K o M``."""
    if K.size_in != M.outcomes:
        raise ValidationError(f"classical channel input {K.size_in} != POVM outcomes {M.outcomes}")
    return Povm(np.einsum("ji,iab->jab", K.matrix, M.effects))
