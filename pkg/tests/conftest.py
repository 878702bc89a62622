import numpy as np
import pytest

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)
KET0 = np.diag([1.0, 0.0]).astype(complex)
MIXED = I2 / 2

ACCEPTANCE_LINES = []


def dense_inner(A, B, rho):
    """Independent oracle: <{A, B}/2>_rho by dense matrix products."""
    return float(np.trace(0.5 * (A @ B + B @ A) @ rho).real)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def unit_basis(d):
    """Non-normalised Hermitian basis built from matrix units; independent of the package basis."""
    out = []
    for j in range(d):
        for k in range(d):
            E = np.zeros((d, d), dtype=complex)
            if j == k:
                E[j, j] = 1
            elif j < k:
                E[j, k] = E[k, j] = 1
            else:
                E[j, k], E[k, j] = 1j, -1j
            out.append(E)
    return out


def oracle_channel_pushforward(kraus, rho, A):
    """Pushforward through a Kraus channel when the output state has full rank."""
    out = sum(K @ rho @ K.conj().T for K in kraus)
    basis = unit_basis(out.shape[0])

    def adj(X):
        return sum(K.conj().T @ X @ K for K in kraus)

    G = np.array([[dense_inner(a, b, out) for b in basis] for a in basis])
    v = np.array([dense_inner(A, adj(b), rho) for b in basis])
    c = np.linalg.solve(G, v)
    return sum(ci * b for ci, b in zip(c, basis)), out


def oracle_weak_values(effects, rho, A):
    vals = []
    for E in effects:
        p = np.trace(E @ rho).real
        vals.append(np.trace(E @ A @ rho).real / p if p > 0 else 0.0)
    return np.array(vals)


def comm_mean(A, B, rho):
    return float((np.trace((A @ B - B @ A) @ rho) / 2j).real)
