"""Tests for the dense complex linear-algebra core."""

import numpy as np
import pytest

from specratio.cmatrix import (
    EigenConvergenceError,
    SingularMatrixError,
    eigenvalues,
    hermitian_eigenvalues,
    lu_decompose,
    singular_values,
    smallest_singular_value,
    solve,
    spectrum_of_ratio,
)


def random_complex(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def assert_multisets_close(a, b, tol):
    a = np.sort_complex(np.asarray(a))
    b = np.sort_complex(np.asarray(b))
    assert a.shape == b.shape
    assert np.max(np.abs(a - b)) <= tol


class TestLU:
    def test_identity(self):
        f = lu_decompose(np.eye(4))
        assert np.allclose(f.l, np.eye(4))
        assert np.allclose(f.u, np.eye(4))
        assert f.log_abs_det == 0.0

    def test_diag_logdet(self):
        f = lu_decompose(np.diag([2.0, 3.0j]))
        assert f.log_abs_det == pytest.approx(np.log(6.0), abs=1e-14)

    def test_reconstruction_residual(self):
        rng = np.random.default_rng(7)
        a = random_complex(rng, 50)
        f = lu_decompose(a)
        resid = np.linalg.norm(f.permutation @ a - f.l @ f.u, ord=2)
        assert resid <= 50 * np.finfo(float).eps * np.linalg.norm(a, ord=2) * 10

    def test_logdet_matches_eigenvalue_moduli(self):
        # cross-check against the eigensolver route on the same matrix
        rng = np.random.default_rng(8)
        a = random_complex(rng, 50)
        f = lu_decompose(a)
        log_from_eigs = np.sum(np.log(np.abs(eigenvalues(a))))
        assert f.log_abs_det == pytest.approx(log_from_eigs, rel=1e-8)

    def test_exactly_singular(self):
        a = np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex)
        f = lu_decompose(a)
        assert f.is_singular
        assert f.log_abs_det == -np.inf
        # factors stay a valid decomposition
        assert np.allclose(f.permutation @ a, f.l @ f.u, atol=1e-14)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            lu_decompose(np.array([[np.nan, 0], [0, 1]]))


class TestSolve:
    def test_identity(self):
        rng = np.random.default_rng(0)
        b = random_complex(rng, 5)
        assert np.allclose(solve(np.eye(5), b), b)

    def test_diagonal(self):
        x = solve(np.diag([2.0, 4.0]), np.eye(2))
        assert np.allclose(x, np.diag([0.5, 0.25]))

    def test_residual_contract(self):
        rng = np.random.default_rng(1)
        m = random_complex(rng, 100)
        b = random_complex(rng, 100)
        x = solve(m, b)
        resid = np.linalg.norm(m @ x - b, ord=2)
        bound = 100 * np.finfo(float).eps * np.linalg.norm(m, 2) * np.linalg.norm(x, 2)
        assert resid <= 10 * bound

    def test_singular_reports_pivot(self):
        with pytest.raises(SingularMatrixError) as err:
            solve(np.zeros((3, 3)), np.eye(3))
        assert err.value.pivot_index == 0


class TestEigenvalues:
    def test_diagonal(self):
        assert_multisets_close(
            eigenvalues(np.diag([1.0, 2.0j, -3.0])), [1.0, 2.0j, -3.0], 1e-14
        )

    def test_nilpotent(self):
        eigs = eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert np.max(np.abs(eigs)) <= 1e-14

    def test_similarity_construction(self):
        # the construction is its own oracle: M = P diag(d) P^-1
        rng = np.random.default_rng(3)
        d = np.array([1.0, -2.0, 3.0j, -1.5j, 2.0 + 2.0j, -3.0 - 1.0j, 0.5, 4.0])
        p = random_complex(rng, 8) + 3.0 * np.eye(8)
        m = p @ np.diag(d) @ np.linalg.inv(p)
        cond = np.linalg.cond(p)
        assert_multisets_close(eigenvalues(m), d, 1e-8 * cond)

    def test_trace_consistency(self):
        rng = np.random.default_rng(4)
        m = random_complex(rng, 60)
        eigs = eigenvalues(m)
        bound = 1e-9 * 60 * np.linalg.norm(m, 2)
        assert abs(eigs.sum() - np.trace(m)) <= bound

    def test_similarity_invariance(self):
        rng = np.random.default_rng(5)
        m = random_complex(rng, 12)
        p = random_complex(rng, 12) + 4.0 * np.eye(12)
        sim = p @ m @ np.linalg.inv(p)
        assert_multisets_close(eigenvalues(sim), eigenvalues(m), 1e-7 * np.linalg.cond(p))

    def test_sylvester_xy_vs_yx(self):
        rng = np.random.default_rng(6)
        x = random_complex(rng, 10)
        y = random_complex(rng, 10)
        assert_multisets_close(eigenvalues(x @ y), eigenvalues(y @ x), 1e-8)

    def test_inversion_identity(self):
        rng = np.random.default_rng(9)
        m = random_complex(rng, 20) + 2.0 * np.eye(20)
        eigs = eigenvalues(m)
        inv_eigs = eigenvalues(np.linalg.inv(m))
        assert_multisets_close(np.sort_complex(inv_eigs), np.sort_complex(1.0 / eigs), 1e-8)
        rho_max_inv = np.max(np.abs(inv_eigs))
        rho_min = np.min(np.abs(eigs))
        assert rho_max_inv * rho_min == pytest.approx(1.0, abs=1e-8)

    def test_tol_validation(self):
        with pytest.raises(ValueError):
            eigenvalues(np.eye(2), tol=0.0)


class TestSingularValues:
    def test_diagonal(self):
        assert np.allclose(singular_values(np.diag([3.0, 4.0])), [3.0, 4.0])

    def test_jordan_block(self):
        # X X* = diag(1, 0)
        sv = singular_values(np.array([[0.0, 1.0], [0.0, 0.0]]))
        assert np.allclose(sv, [0.0, 1.0], atol=1e-14)

    def test_unitary(self):
        rng = np.random.default_rng(10)
        q, _ = np.linalg.qr(random_complex(rng, 16))
        assert np.max(np.abs(singular_values(q) - 1.0)) <= 1e-12

    def test_det_consistency(self):
        rng = np.random.default_rng(11)
        a = random_complex(rng, 50)
        log_lu = lu_decompose(a).log_abs_det
        log_sv = np.sum(np.log(singular_values(a)))
        log_ev = np.sum(np.log(np.abs(eigenvalues(a))))
        assert log_sv == pytest.approx(log_lu, rel=1e-7)
        assert log_ev == pytest.approx(log_lu, rel=1e-7)

    def test_smallest_identity(self):
        assert smallest_singular_value(np.eye(3)) == pytest.approx(1.0, abs=1e-14)

    def test_smallest_diagonal(self):
        assert smallest_singular_value(np.diag([1e-9, 1.0])) == pytest.approx(1e-9, rel=1e-10)

    def test_smallest_vs_inverse_power_iteration(self):
        # independent oracle: inverse power iteration on X* X
        rng = np.random.default_rng(12)
        x = random_complex(rng, 64) / np.sqrt(64)
        target = smallest_singular_value(x)
        gram = x.conj().T @ x
        v = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        v /= np.linalg.norm(v)
        lam = None
        for _ in range(20000):
            w = np.linalg.solve(gram, v)
            nw = np.linalg.norm(w)
            v = w / nw
            new_lam = 1.0 / nw
            if lam is not None and abs(new_lam - lam) <= 1e-14 * lam:
                lam = new_lam
                break
            lam = new_lam
        assert target == pytest.approx(np.sqrt(lam), rel=1e-6)


class TestSpectrumOfRatio:
    def test_identity_b(self):
        rng = np.random.default_rng(13)
        a = random_complex(rng, 8)
        sample = spectrum_of_ratio(a, np.eye(8))
        assert_multisets_close(sample.eigenvalues, eigenvalues(a), 1e-10)

    def test_equal_matrices(self):
        rng = np.random.default_rng(14)
        a = random_complex(rng, 8) + 2.0 * np.eye(8)
        sample = spectrum_of_ratio(a, a)
        assert np.max(np.abs(sample.eigenvalues - 1.0)) <= 1e-10
        assert sample.rho_max == pytest.approx(1.0, abs=1e-10)
        assert sample.rho_min == pytest.approx(1.0, abs=1e-10)

    def test_hand_example(self):
        # A = diag(1, 2), B = antidiag(1, 1): A B^-1 = [[0, 1], [2, 0]]
        a = np.diag([1.0, 2.0])
        b = np.array([[0.0, 1.0], [1.0, 0.0]])
        sample = spectrum_of_ratio(a, b)
        assert_multisets_close(sample.eigenvalues, [np.sqrt(2.0), -np.sqrt(2.0)], 1e-12)

    def test_singular_b(self):
        with pytest.raises(SingularMatrixError):
            spectrum_of_ratio(np.eye(2), np.zeros((2, 2)))

    def test_rho_ordering(self):
        rng = np.random.default_rng(15)
        sample = spectrum_of_ratio(random_complex(rng, 10), random_complex(rng, 10))
        assert sample.rho_min <= sample.rho_max
        assert sample.n == 10


class TestHermitianEigenvalues:
    def test_matches_qr_route(self):
        rng = np.random.default_rng(16)
        a = random_complex(rng, 20)
        h = a + a.conj().T
        herm = hermitian_eigenvalues(h)
        general = np.sort(eigenvalues(h).real)
        assert np.max(np.abs(herm - general)) <= 1e-9 * np.linalg.norm(h, 2)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            hermitian_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))
