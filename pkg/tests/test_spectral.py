import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectional.errors import ConvergenceFailure, NonFiniteInput, NonSymmetricInput
from sectional.linalg import SymmetricForm, gram_error
from sectional.spectral import (
    _extremal_eigenpair,
    eigen_residual,
    is_curvature_zero,
    rank_one_spectrum,
    spectral_paper_mode,
    spectral_sweep_mode,
)

from .conftest import random_orthogonal, random_symmetric

SOLVERS = [spectral_paper_mode, spectral_sweep_mode]


def assert_contract(res, a, tol=1e-10):
    f = res.frame.vectors
    scale = max(np.max(np.abs(a)), 1e-300)
    assert gram_error(f) <= 1e-10
    assert np.max(np.abs(res.reconstruct() - a)) <= 1e-8 * scale + 1e-300
    b = f @ a @ f.T
    assert np.max(np.abs(b - np.diag(res.eigenvalues))) <= 1e-8 * max(scale, 1e-300) + 1e-300


def test_minors_rank_one():
    u = np.array([1.0, 2.0, 0.0])
    assert is_curvature_zero(np.outer(u, u))


def test_minors_rank_two():
    assert not is_curvature_zero(np.diag([1.0, 1.0, 0.0]))


def test_minors_zero():
    assert is_curvature_zero(np.zeros((3, 3)))


def test_rank_one_zero_form():
    r = rank_one_spectrum(np.zeros((3, 3)))
    np.testing.assert_array_equal(r.eigenvalues, [0, 0, 0])
    np.testing.assert_array_equal(r.frame.vectors, np.eye(3))


def test_rank_one_basis_vector():
    r = rank_one_spectrum(np.diag([1.0, 0.0, 0.0]))
    np.testing.assert_array_equal(r.frame.vectors[0], [1, 0, 0])
    np.testing.assert_array_equal(r.eigenvalues, [1, 0, 0])


def test_rank_one_scaled():
    u = np.array([0.6, 0.8])
    r = rank_one_spectrum(2 * np.outer(u, u))
    assert r.eigenvalues[0] == pytest.approx(2.0, abs=1e-15)
    np.testing.assert_allclose(r.frame.vectors[0], u, atol=1e-15)


def test_rank_one_rejects_rank_two():
    with pytest.raises(ValueError):
        rank_one_spectrum(np.eye(2))


@pytest.mark.parametrize("solver", SOLVERS)
def test_diagonal_input(solver):
    a = np.diag([3.0, 1.0, 2.0])
    res = solver(a)
    assert sorted(res.eigenvalues) == pytest.approx([1, 2, 3], abs=1e-14)
    assert np.all(np.isin(np.round(np.abs(res.frame.vectors), 12), [0.0, 1.0]))


@pytest.mark.parametrize("solver", SOLVERS)
def test_swap_matrix(solver):
    # roots of lambda^2 - 1
    res = solver(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert sorted(res.eigenvalues) == pytest.approx([-1, 1], abs=1e-14)


@pytest.mark.parametrize("solver", SOLVERS)
def test_block_matrix(solver):
    # (2 - lambda)^2 = 1 on the block, 5 alone
    a = np.array([[2.0, 1, 0], [1, 2, 0], [0, 0, 5]])
    res = solver(a)
    assert sorted(res.eigenvalues) == pytest.approx([1, 3, 5], abs=1e-12)
    assert_contract(res, a)


def test_sweep_diagonal_needs_no_rotation():
    res = spectral_sweep_mode(np.diag([4.0, -1.0, 2.0]))
    assert res.iterations == 0
    np.testing.assert_array_equal(res.frame.vectors, np.eye(3))


def test_sweep_ones():
    # lambda^2 - 2 lambda
    res = spectral_sweep_mode(np.ones((2, 2)))
    assert res.iterations == 1
    assert sorted(res.eigenvalues) == pytest.approx([0, 2], abs=1e-15)


def test_modes_agree_8x8(rng):
    for _ in range(10):
        a = random_symmetric(rng, 8)
        p, s = spectral_paper_mode(a, seed=1), spectral_sweep_mode(a)
        np.testing.assert_allclose(np.sort(p.eigenvalues), np.sort(s.eigenvalues), atol=1e-8)


def test_residual_examples():
    assert eigen_residual(np.diag([1.0, 2.0]), [1, 0]) == 0.0
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert eigen_residual(swap, np.array([1, 1]) / np.sqrt(2)) == pytest.approx(0.0, abs=1e-15)
    assert eigen_residual(swap, [1, 0]) == 1.0


@pytest.mark.parametrize("solver", SOLVERS)
def test_validation(solver):
    with pytest.raises(NonSymmetricInput):
        solver([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NonFiniteInput):
        solver([[1.0, np.nan], [np.nan, 1.0]])


def test_sweep_monotone(rng):
    for n in (3, 6, 10):
        hist = []
        spectral_sweep_mode(random_symmetric(rng, n), history=hist)
        assert all(b < a for a, b in zip(hist, hist[1:]))


def test_sweep_limit():
    a = random_symmetric(np.random.default_rng(0), 6)
    with pytest.raises(ConvergenceFailure):
        spectral_sweep_mode(a, max_rotations=3)


def test_paper_step_validity(rng):
    for n in (3, 5, 9):
        a = random_symmetric(rng, n)
        accept = 10 * 1e-10 * np.max(np.abs(a))
        vecs, _ = _extremal_eigenpair(a, seed=0, samples=64, refinements=100, target=1e-10, accept=accept)
        assert vecs
        for v in vecs:
            assert eigen_residual(a, v) <= accept


def test_paper_mode_is_seed_deterministic(rng):
    a = random_symmetric(rng, 7)
    r1, r2 = spectral_paper_mode(a, seed=4), spectral_paper_mode(a, seed=4)
    assert r1.frame.vectors.tobytes() == r2.frame.vectors.tobytes()


def test_paper_mode_does_not_fall_back(rng):
    for _ in range(10):
        n = int(rng.integers(2, 12))
        assert spectral_paper_mode(random_symmetric(rng, n)).fallbacks == 0


def test_json_keys():
    d = spectral_sweep_mode(np.eye(2)).to_dict()
    assert list(d) == ["eigenvalues", "frame", "mode", "iterations", "max_offdiagonal"]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["paper", "sweep"]))
def test_conjugation_equivariance(seed, mode):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    a = random_symmetric(rng, n)
    q = random_orthogonal(rng, n)
    solve = spectral_paper_mode if mode == "paper" else spectral_sweep_mode
    l1 = np.sort(solve(a).eigenvalues)
    l2 = np.sort(solve(q @ a @ q.T).eigenvalues)
    np.testing.assert_allclose(l1, l2, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_known_spectrum(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 10))
    lam = rng.uniform(-10, 10, n)
    q = random_orthogonal(rng, n)
    a = q @ np.diag(lam) @ q.T
    a = 0.5 * (a + a.T)
    for solve in SOLVERS:
        res = solve(a)
        np.testing.assert_allclose(np.sort(res.eigenvalues), np.sort(lam), atol=1e-8)
        assert_contract(res, a)


def test_repeated_eigenvalues(rng):
    q = random_orthogonal(rng, 6)
    a = q @ np.diag([2.0, 2.0, 2.0, -1.0, -1.0, 0.0]) @ q.T
    a = 0.5 * (a + a.T)
    for solve in SOLVERS:
        res = solve(a)
        np.testing.assert_allclose(np.sort(res.eigenvalues), [-1, -1, 0, 2, 2, 2], atol=1e-8)
        assert_contract(res, a)


def test_tiny_scale(rng):
    a = 1e-9 * random_symmetric(rng, 5)
    for solve in SOLVERS:
        assert_contract(solve(a), a)
