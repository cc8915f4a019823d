import numpy as np
import pytest

from qmixing.errors import CapExceededError, NumericalError, ShapeError
from qmixing.matcore import (
    DESK_SCALE_CAP,
    eig,
    ginibre,
    kron,
    mat_exp,
    operator_norm,
    trace_norm,
)


def series_exp(A, t, terms=60):
    """Truncated power-series oracle; exact for nilpotent inputs."""
    out = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ (t * A) / k
        out = out + term
    return out


def power_iteration_norm(A, iters=2000):
    """Largest singular value via power iteration on A^dag A."""
    M = A.conj().T @ A
    v = np.ones(M.shape[0], dtype=complex) / np.sqrt(M.shape[0])
    lam = 0.0
    for _ in range(iters):
        w = M @ v
        lam = np.linalg.norm(w)
        if lam == 0:
            return 0.0
        v = w / lam
    return float(np.sqrt(lam))


class TestMatExp:
    def test_zero_time_is_identity(self):
        A = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_allclose(mat_exp(A, 0.0), np.eye(2), atol=1e-14)

    def test_diagonal(self):
        A = np.diag([0.0, -1.0])
        np.testing.assert_allclose(mat_exp(A, 1.0), np.diag([1.0, np.exp(-1.0)]), atol=1e-14)

    def test_nilpotent_matches_series_oracle(self):
        A = np.array([[0.0, 1.0], [0.0, 0.0]])
        expected = series_exp(A, 3.0)  # series terminates: I + 3 E01
        np.testing.assert_allclose(mat_exp(A, 3.0), expected, atol=1e-14)
        assert expected[0, 1] == 3.0

    def test_semigroup_property(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            A = ginibre(4, 4, rng)
            A *= 10.0 / max(operator_norm(A), 1e-12) * rng.uniform(0.05, 1.0)
            s, t = rng.uniform(0, 5, size=2)
            lhs = mat_exp(A, s + t)
            rhs = mat_exp(A, s) @ mat_exp(A, t)
            assert np.abs(lhs - rhs).max() <= 1e-9 * max(1.0, np.abs(lhs).max())

    def test_rejects_non_square(self):
        with pytest.raises(ShapeError):
            mat_exp(np.ones((2, 3)), 1.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ShapeError):
            mat_exp(np.array([[np.inf, 0.0], [0.0, 1.0]]), 1.0)
        with pytest.raises(ShapeError):
            mat_exp(np.eye(2), np.nan)


class TestTraceNorm:
    def test_pauli_z(self):
        assert trace_norm(np.diag([1.0, -1.0])) == pytest.approx(2.0, abs=1e-14)

    def test_zero(self):
        assert trace_norm(np.zeros((3, 3))) == 0.0

    def test_matches_eigenvalue_oracle(self):
        rng = np.random.default_rng(11)
        A = ginibre(3, 3, rng)
        # independent route: singular values from eigenvalues of A^dag A
        expected = np.sqrt(np.linalg.eigvalsh(A.conj().T @ A).clip(0)).sum()
        assert trace_norm(A) == pytest.approx(expected, abs=1e-10)

    def test_dominates_operator_norm(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            A = ginibre(4, 4, rng)
            assert trace_norm(A) >= operator_norm(A) - 1e-12

    def test_rejects_non_square(self):
        with pytest.raises(ShapeError):
            trace_norm(np.ones((2, 3)))


class TestOperatorNorm:
    def test_identity(self):
        for d in (1, 2, 5):
            assert operator_norm(np.eye(d)) == pytest.approx(1.0, abs=1e-14)

    def test_scaled_rank_one(self):
        A = np.zeros((2, 2))
        A[0, 1] = 5.0
        assert operator_norm(A) == pytest.approx(5.0, abs=1e-14)

    def test_matches_power_iteration_oracle(self):
        rng = np.random.default_rng(13)
        A = ginibre(4, 4, rng)
        assert operator_norm(A) == pytest.approx(power_iteration_norm(A), abs=1e-10)


class TestKron:
    def test_identities(self):
        np.testing.assert_allclose(kron(np.eye(2), np.eye(2)), np.eye(4), atol=0)

    def test_diag_with_identity(self):
        a, b = 2.0, 3.0
        np.testing.assert_allclose(kron(np.diag([a, b]), np.eye(2)), np.diag([a, a, b, b]), atol=0)

    def test_matches_index_formula_oracle(self):
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sz = np.array([[1, 0], [0, -1]], dtype=complex)
        K = kron(sx, sz)
        for i in range(4):
            for j in range(4):
                expected = sx[i // 2, j // 2] * sz[i % 2, j % 2]
                assert K[i, j] == expected

    def test_trace_norm_multiplicative(self):
        rng = np.random.default_rng(14)
        A = ginibre(2, 2, rng)
        B = ginibre(3, 3, rng)
        assert trace_norm(kron(A, B)) == pytest.approx(trace_norm(A) * trace_norm(B), abs=1e-9)

    def test_cap(self):
        with pytest.raises(CapExceededError):
            kron(np.eye(DESK_SCALE_CAP // 2 + 1), np.eye(2))


class TestEig:
    def test_diagonal(self):
        es = eig(np.diag([1.0, 2.0, 3.0]))
        np.testing.assert_allclose(sorted(es.eigenvalues.real), [1.0, 2.0, 3.0], atol=1e-12)
        assert es.residual <= 1e-12

    def test_pauli_x(self):
        es = eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(sorted(es.eigenvalues.real), [-1.0, 1.0], atol=1e-12)

    def test_amplitude_damping_liouvillian_matrix(self):
        # 4x4 generator matrix of the qubit decay process at unit rate:
        # diagonal (0, -1/2, -1/2, -1) plus feeding entry (0,3).
        M = np.diag([0.0, -0.5, -0.5, -1.0]).astype(complex)
        M[0, 3] = 1.0
        es = eig(M)
        np.testing.assert_allclose(
            sorted(es.eigenvalues.real), [-1.0, -0.5, -0.5, 0.0], atol=1e-12
        )

    def test_conjugation_symmetry_for_real_matrices(self):
        rng = np.random.default_rng(15)
        A = rng.standard_normal((6, 6))
        w = eig(A).eigenvalues
        paired = sorted(np.round(w, 9).tolist(), key=lambda z: (z.real, z.imag))
        conj = sorted(np.round(w.conj(), 9).tolist(), key=lambda z: (z.real, z.imag))
        assert paired == conj

    def test_kron_sum_spectrum(self):
        rng = np.random.default_rng(16)
        A = ginibre(3, 3, rng)
        B = ginibre(2, 2, rng)
        wa = eig(A).eigenvalues
        wb = eig(B).eigenvalues
        ks = np.kron(A, np.eye(2)) + np.kron(np.eye(3), B)
        got = np.sort_complex(eig(ks).eigenvalues)
        expected = np.sort_complex(np.array([a + b for a in wa for b in wb]))
        np.testing.assert_allclose(got, expected, atol=1e-9)

    def test_residual_gate(self):
        rng = np.random.default_rng(17)
        A = ginibre(5, 5, rng)
        assert eig(A).residual > 0.0
        with pytest.raises(NumericalError):
            eig(A, tol=0.0)
