"""Finite-dimensional quantum and classical systems.

Observables and states are plain complex ``numpy`` arrays; probability
distributions and real functions are 1-D float arrays. The ``as_*`` helpers
validate and normalise inputs. Elements of the state-dependent quotient
spaces are carried as :class:`TangentQ` / :class:`TangentC`, with quantum
classes stored as coefficient vectors over the fixed Hermitian basis
returned by :func:`hermitian_basis`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_PSD = 1e-9
TOL_NUM = 1e-8
PINV_CUTOFF = 1e-10


class ValidationError(ValueError):
    """An input failed a type invariant."""


class NumericalBreakdown(ArithmeticError):
    """A quantity that is nonnegative analytically came out clearly negative."""


class RepresentabilityError(NumericalBreakdown):
    """A Riesz solve left a residual outside tolerance."""


# -- validation ---------------------------------------------------------------


def as_hermitian(X, dim: int | None = None, tol: float = TOL_HERM) -> np.ndarray:
    """Return ``X`` as a Hermitian complex matrix, symmetrised exactly."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {X.shape}")
    if dim is not None and X.shape[0] != dim:
        raise ValidationError(f"dimension mismatch: expected {dim}, got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        raise ValidationError("matrix has non-finite entries")
    dev = np.max(np.abs(X - X.conj().T), initial=0.0)
    if dev > tol:
        raise ValidationError(f"matrix is not Hermitian (deviation {dev:.3g})")
    return (X + X.conj().T) / 2


def as_density(rho, dim: int | None = None, tol: float = TOL_PSD) -> np.ndarray:
    rho = as_hermitian(rho, dim)
    tr = np.trace(rho).real
    if abs(tr - 1) > TOL_TRACE:
        raise ValidationError(f"state trace is {tr:.12g}, expected 1")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -tol:
        raise ValidationError(f"state has negative eigenvalue {lo:.3g}")
    return rho


def as_probdist(p, size: int | None = None, tol: float = TOL_PSD) -> np.ndarray:
    """Validate a probability vector; tiny negative weights are clamped to 0."""
    p = np.asarray(p, dtype=float).ravel()
    if size is not None and p.size != size:
        raise ValidationError(f"size mismatch: expected {size}, got {p.size}")
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise ValidationError("distribution must be a finite nonempty vector")
    if np.min(p) < -tol:
        raise ValidationError(f"negative weight {np.min(p):.3g}")
    if abs(p.sum() - 1) > TOL_TRACE:
        raise ValidationError(f"weights sum to {p.sum():.12g}, expected 1")
    return np.clip(p, 0.0, None)


def as_realfn(f, size: int | None = None) -> np.ndarray:
    f = np.asarray(f, dtype=float).ravel()
    if size is not None and f.size != size:
        raise ValidationError(f"size mismatch: expected {size}, got {f.size}")
    if not np.all(np.isfinite(f)):
        raise ValidationError("function has non-finite values")
    return f


def _same_dim(*mats):
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise ValidationError(f"dimension mismatch: {sorted(dims)}")


# -- localized inner products -------------------------------------------------


def expect(X, rho) -> complex:
    """``Tr[X rho]`` for an arbitrary (not necessarily Hermitian) operator."""
    return complex(np.einsum("ab,ba->", np.asarray(X), np.asarray(rho)))


def inner_q(A, B, rho) -> float:
    """Symmetrised quantum inner product ``Re Tr[A B rho]``."""
    A, B, rho = (np.asarray(x, dtype=complex) for x in (A, B, rho))
    _same_dim(A, B, rho)
    return float(np.real(np.einsum("ab,bc,ca->", A, B, rho)))


def seminorm_q(A, rho) -> float:
    return float(np.sqrt(max(inner_q(A, A, rho), 0.0)))


def inner_c(f, g, p) -> float:
    f, g, p = (np.asarray(x, dtype=float).ravel() for x in (f, g, p))
    if not f.size == g.size == p.size:
        raise ValidationError(f"size mismatch: {f.size}, {g.size}, {p.size}")
    return float(np.sum(f * g * p))


def seminorm_c(f, p) -> float:
    return float(np.sqrt(max(inner_c(f, f, p), 0.0)))


def mean(A, rho) -> float:
    return float(expect(A, rho).real)


def std(A, rho) -> float:
    """Standard deviation of ``A`` in ``rho``."""
    m = mean(A, rho)
    return float(np.sqrt(max(mean(A @ A, rho) - m * m, 0.0)))


def commutator_mean(A, B, rho) -> float:
    """``<[A, B] / 2i>_rho``, real for Hermitian A, B."""
    A, B = np.asarray(A), np.asarray(B)
    return float((expect(A @ B - B @ A, rho) / 2j).real)


# -- coordinates ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _basis(d: int) -> np.ndarray:
    mats = [np.eye(d, dtype=complex) / np.sqrt(d)]
    # off-diagonal pairs: symmetric then antisymmetric, for j < k in row-major order
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1 / np.sqrt(2)
            a = np.zeros((d, d), dtype=complex)
            a[j, k], a[k, j] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            mats.extend([s, a])
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        mats.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    out = np.array(mats)
    out.setflags(write=False)
    return out


def hermitian_basis(d: int) -> np.ndarray:
    """HS-orthonormal Hermitian basis of size ``d**2`` as an array ``(d*d, d, d)``.

    Element 0 is ``I/sqrt(d)``; then, for each pair ``j < k``, the symmetric
    and antisymmetric off-diagonal generators; then the diagonal generators.
    For ``d = 2`` this is ``(I, sx, sy, sz) / sqrt(2)``.
    """
    if d < 1:
        raise ValidationError("dimension must be positive")
    return _basis(int(d))


def coords(X) -> np.ndarray:
    """Real coordinates ``Tr[G_k X]`` of a Hermitian operator."""
    X = np.asarray(X, dtype=complex)
    return np.real(np.einsum("kab,ba->k", hermitian_basis(X.shape[0]), X))


def from_coords(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    d = int(round(np.sqrt(c.size)))
    if d * d != c.size:
        raise ValidationError(f"coordinate vector of length {c.size} is not a square")
    return np.einsum("k,kab->ab", c, hermitian_basis(d))


def gram_q(rho) -> np.ndarray:
    """Matrix of ``inner_q`` over the Hermitian basis at ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    G = hermitian_basis(rho.shape[0])
    gram = np.real(np.einsum("kab,lbc,ca->kl", G, G, rho))
    return (gram + gram.T) / 2


def _range_projector(gram: np.ndarray, cutoff: float = PINV_CUTOFF) -> np.ndarray:
    w, U = np.linalg.eigh(gram)
    keep = w > cutoff * max(w[-1], 0.0)
    Ur = U[:, keep]
    return Ur @ Ur.T


def riesz_solve(G, v, tol: float = PINV_CUTOFF, atol: float = TOL_NUM) -> np.ndarray:
    """Minimal-norm solution of ``G c = v`` for symmetric PSD ``G``.

    Eigenvalues below ``tol`` times the largest are discarded. Raises
    :class:`RepresentabilityError` when the residual exceeds
    ``atol * (1 + |v|)``, i.e. when ``v`` is not in the range of ``G``.
    """
    G = np.asarray(G, dtype=float)
    v = np.asarray(v, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or v.shape != (G.shape[0],):
        raise ValidationError(f"incompatible shapes {G.shape} and {v.shape}")
    w, U = np.linalg.eigh((G + G.T) / 2)
    keep = w > tol * max(w[-1], 0.0)
    Ur, wr = U[:, keep], w[keep]
    c = Ur @ ((Ur.T @ v) / wr)
    resid = np.linalg.norm(G @ c - v)
    if resid > atol * (1 + np.linalg.norm(v)):
        raise RepresentabilityError(f"functional not representable (residual {resid:.3g})")
    return c


# -- tangent elements -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TangentQ:
    """Class of an observable in the quotient space at ``base``."""

    base: np.ndarray
    coeffs: np.ndarray

    @property
    def representative(self) -> np.ndarray:
        return from_coords(self.coeffs)

    @property
    def norm(self) -> float:
        return float(np.sqrt(max(self.coeffs @ gram_q(self.base) @ self.coeffs, 0.0)))

    def distance(self, other) -> float:
        """Seminorm distance at ``base`` to another class or operator."""
        other = other.representative if isinstance(other, TangentQ) else other
        return seminorm_q(self.representative - other, self.base)


@dataclass(frozen=True, eq=False)
class TangentC:
    """Class of a real function in the quotient space at ``base``."""

    base: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        vals = np.where(self.base > 0, np.asarray(self.values, dtype=float), 0.0)
        object.__setattr__(self, "values", vals)

    @property
    def norm(self) -> float:
        return seminorm_c(self.values, self.base)


def canonical_rep(A, rho, cutoff: float = PINV_CUTOFF) -> TangentQ:
    """Minimal-norm representative of the class of ``A`` at ``rho``."""
    A = np.asarray(A, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    _same_dim(A, rho)
    c = _range_projector(gram_q(rho), cutoff) @ coords(A)
    return TangentQ(rho, c)


# -- matrix literals ------------------------------------------------------------


def parse_matrix(obj) -> np.ndarray:
    """Decode a row-major nested list whose entries are ``[re, im]`` pairs or reals."""
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2:
        return arr.astype(complex)
    raise ValidationError(f"cannot read a matrix from an array of shape {arr.shape}")


def format_matrix(X) -> list:
    X = np.asarray(X, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in X]
