"""Unit tests for the dense-matrix and finite-difference utilities."""

import numpy as np
import pytest

from laxlab.matrixcore import (
    basis_matrix,
    central_diff,
    commutator,
    dir_diff,
    embed_pair,
    flip_tensor,
    grad_fd,
    make_rng,
    norm,
    power_traces,
    random_complex,
    random_traceless,
)


def test_commutator_basis_relation():
    E12 = basis_matrix(2, 0, 1)
    E21 = basis_matrix(2, 1, 0)
    expected = basis_matrix(2, 0, 0) - basis_matrix(2, 1, 1)
    assert norm(commutator(E12, E21) - expected) == 0.0


def test_commutator_antisymmetry_diagonal():
    rng = make_rng(1)
    A = random_complex(rng, (4, 4))
    assert norm(commutator(A, A)) == 0.0
    H = np.diag([1.0, -1.0]).astype(complex)
    E12 = basis_matrix(2, 0, 1)
    assert norm(commutator(H, E12) - 2.0 * E12) == 0.0


def test_commutator_trace_free():
    rng = make_rng(2)
    for _ in range(10):
        A = random_complex(rng, (5, 5))
        B = random_complex(rng, (5, 5))
        C = commutator(A, B)
        assert abs(np.trace(C)) < 1e-12 * max(norm(A) * norm(B), 1.0) * 25
        assert norm(C) <= 2.0 * norm(A) * norm(B) * 5 + 1e-12


def test_power_traces_oracles():
    assert np.allclose(power_traces(np.zeros((3, 3)), 4), 0.0)
    assert np.allclose(power_traces(np.eye(3), 4), 3.0)
    L = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(power_traces(L, 4), [0.0, 2.0, 0.0, 2.0])


def test_power_traces_matches_matrix_powers():
    rng = make_rng(3)
    L = random_complex(rng, (4, 4))
    tr = power_traces(L, 5)
    for k in range(1, 6):
        assert abs(tr[k - 1] - np.trace(np.linalg.matrix_power(L, k))) < 1e-10


def test_embed_pair_identity_and_placement():
    n = 2
    assert norm(embed_pair(np.eye(n * n), (1, 2), n) - np.eye(n**3)) == 0.0
    E11 = basis_matrix(n, 0, 0)
    M = np.kron(E11, E11)
    assert norm(embed_pair(M, (1, 2), n) - np.kron(M, np.eye(n))) == 0.0
    # E12 (x) E21 on legs (1, 3) -> E12 (x) I (x) E21
    E12 = basis_matrix(n, 0, 1)
    E21 = basis_matrix(n, 1, 0)
    got = embed_pair(np.kron(E12, E21), (1, 3), n)
    want = np.kron(E12, np.kron(np.eye(n), E21))
    assert norm(got - want) == 0.0


def test_embed_pair_brute_force_cross_check():
    # brute-force triple loop over basis terms, random kernel, legs (1, 3)
    rng = make_rng(4)
    n = 2
    M = random_complex(rng, (n * n, n * n))
    got = embed_pair(M, (1, 3), n)
    want = np.zeros((n**3, n**3), dtype=complex)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    coeff = M[a * n + c, b * n + d]
                    want += coeff * np.kron(
                        basis_matrix(n, a, b),
                        np.kron(np.eye(n), basis_matrix(n, c, d)))
    assert norm(got - want) < 1e-12


def test_embed_pair_swapped_legs_equals_flip():
    rng = make_rng(5)
    n = 2
    M = random_complex(rng, (n * n, n * n))
    assert norm(embed_pair(M, (2, 1), n) -
                embed_pair(flip_tensor(M, n), (1, 2), n)) == 0.0


def test_embed_pair_rejects_repeated_legs():
    with pytest.raises(ValueError):
        embed_pair(np.eye(4), (1, 1), 2)


def test_flip_tensor_involution():
    rng = make_rng(6)
    M = random_complex(rng, (9, 9))
    assert norm(flip_tensor(flip_tensor(M, 3), 3) - M) == 0.0


def test_fd_gradient_on_quadratic():
    rng = make_rng(7)
    x = random_complex(rng, 5)
    A = random_complex(rng, (5, 5))
    A = A + A.T
    f = lambda s: s @ A @ s
    g = grad_fd(f, x)
    assert np.max(np.abs(g - 2.0 * A @ x)) < 1e-7
    v = random_complex(rng, 5)
    assert abs(dir_diff(f, x, v) - g @ v) < 1e-6
    assert abs(central_diff(f, x, 0) - g[0]) < 1e-9


def test_rng_determinism():
    a = make_rng(42).standard_normal(8)
    b = make_rng(42).standard_normal(8)
    assert np.array_equal(a, b)


def test_random_traceless_is_traceless():
    rng = make_rng(8)
    X = random_traceless(rng, 4)
    assert abs(np.trace(X)) < 1e-12
