import numpy as np
import pytest
import scipy.sparse as sp

from fibrelab.eigensolve import SolveConfig, smallest_eigenpairs, verify_pairs
from fibrelab.errors import FactorizationFailed, NoConvergence
from fibrelab.geometry import PeriodicProfile, WarpedTorusGeometry
from fibrelab.operators import DiscreteOperator, GridSpec, assemble_full, staggered_diff_periodic

TWO_PI = 2.0 * np.pi


def diag_operator(k_diag, w_diag, definite=True):
    k = sp.diags(np.asarray(k_diag, dtype=float)).tocsr()
    return DiscreteOperator(
        dim=len(k_diag), stiffness=k, weight=np.asarray(w_diag, dtype=float),
        positive_definite=definite,
    )


def torus_operator(n=48, eps=0.3, order=2):
    geom = WarpedTorusGeometry(
        np.pi, TWO_PI, PeriodicProfile(TWO_PI, 0.0, (0.3,)), warp_is_exp=True
    )
    return assemble_full(geom, eps, GridSpec(n, n, order, "periodic"))


class TestSmallestEigenpairs:
    def test_diagonal_case(self):
        pairs = smallest_eigenpairs(diag_operator([1.0, 2.0, 3.0], [1.0, 1.0, 1.0]),
                                    SolveConfig(k=2))
        assert pairs.values == pytest.approx([1.0, 2.0], abs=1e-14)

    def test_generalized_diagonal_case(self):
        pairs = smallest_eigenpairs(diag_operator([2.0, 2.0], [1.0, 2.0]), SolveConfig(k=2))
        assert pairs.values == pytest.approx([1.0, 2.0], abs=1e-14)

    def test_periodic_laplacian_n4(self):
        d = staggered_diff_periodic(4, 1.0, 2)
        k = (d.T @ d).tocsr()
        op = DiscreteOperator(dim=4, stiffness=k, weight=np.ones(4))
        pairs = smallest_eigenpairs(op, SolveConfig(k=4))
        assert pairs.values == pytest.approx([0.0, 2.0, 2.0, 4.0], abs=1e-13)

    def test_residuals_and_orthonormality(self):
        op = torus_operator()
        pairs = smallest_eigenpairs(op, SolveConfig(k=6, tol=1e-9, shift=-0.5))
        assert np.all(pairs.residuals <= 1e-9)
        gram = pairs.vectors.T @ (op.weight[:, None] * pairs.vectors)
        assert np.max(np.abs(gram - np.eye(6))) < 1e-8

    def test_rayleigh_quotient_sandwich(self):
        op = torus_operator()
        pairs = smallest_eigenpairs(op, SolveConfig(k=5, shift=-0.5))
        for lam, x in zip(pairs.values, pairs.vectors.T):
            rq = float(x @ (op.stiffness @ x)) / float(x @ (op.weight * x))
            assert abs(lam - rq) <= 1e-12 * abs(lam) + 1e-14

    def test_deterministic_repeat(self):
        op = torus_operator()
        a = smallest_eigenpairs(op, SolveConfig(k=5, seed=7, shift=-0.5))
        b = smallest_eigenpairs(op, SolveConfig(k=5, seed=7, shift=-0.5))
        assert np.array_equal(a.values, b.values)
        signs = np.sign(np.sum(a.vectors * b.vectors, axis=0))
        assert np.array_equal(a.vectors * signs, b.vectors)

    def test_shift_invariance_of_values(self):
        op = torus_operator()
        a = smallest_eigenpairs(op, SolveConfig(k=5, shift=-0.3))
        b = smallest_eigenpairs(op, SolveConfig(k=5, shift=-1.7))
        assert np.max(np.abs(a.values - b.values)) < 1e-9

    def test_closed_case_kernel_mode(self):
        op = torus_operator()
        pairs = smallest_eigenpairs(op, SolveConfig(k=3, tol=1e-8, shift=-0.5))
        assert abs(pairs.values[0]) <= 1e-8
        x0 = pairs.vectors[:, 0]
        x0 = x0 / np.max(np.abs(x0))
        spread = np.max(x0) - np.min(x0)
        assert spread <= 1e-6

    def test_singular_shift_fails_factorization(self):
        # integer diagonal makes K - 5 W exactly singular
        op = diag_operator(np.arange(1.0, 1001.0), np.ones(1000))
        with pytest.raises((FactorizationFailed, NoConvergence)):
            smallest_eigenpairs(op, SolveConfig(k=3, shift=5.0))

    def test_k_larger_than_dimension_rejected(self):
        with pytest.raises(ValueError):
            smallest_eigenpairs(diag_operator([1.0, 2.0], [1.0, 1.0]), SolveConfig(k=3))

    def test_bad_config_rejected(self):
        with pytest.raises(ValueError):
            SolveConfig(k=0)
        with pytest.raises(ValueError):
            SolveConfig(tol=0.0)


class TestVerifyPairs:
    def test_exact_pairs_have_zero_residual(self):
        op = diag_operator([1.0, 2.0, 3.0], [1.0, 1.0, 1.0])
        pairs = smallest_eigenpairs(op, SolveConfig(k=3))
        rep = verify_pairs(op, pairs)
        assert rep.max_residual < 1e-14
        assert rep.max_gram_offdiag < 1e-14

    def test_perturbation_grows_residual(self):
        op = diag_operator([1.0, 2.0, 3.0], [1.0, 1.0, 1.0])
        pairs = smallest_eigenpairs(op, SolveConfig(k=3))
        pairs.vectors[:, 0] += 1e-3
        rep = verify_pairs(op, pairs)
        assert rep.max_residual > 1e-5

    def test_gram_is_identity_for_orthonormal_set(self):
        op = torus_operator(n=32)
        pairs = smallest_eigenpairs(op, SolveConfig(k=4, shift=-0.5))
        rep = verify_pairs(op, pairs)
        assert np.max(np.abs(rep.gram - np.eye(4))) < 1e-12

    def test_dimension_mismatch(self):
        op = diag_operator([1.0, 2.0, 3.0], [1.0, 1.0, 1.0])
        pairs = smallest_eigenpairs(op, SolveConfig(k=2))
        other = diag_operator([1.0, 2.0], [1.0, 1.0])
        with pytest.raises(ValueError):
            verify_pairs(other, pairs)
