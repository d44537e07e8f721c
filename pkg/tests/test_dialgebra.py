"""Tests for splittings, R-brackets, and the Yang-Baxter kernels."""

import numpy as np
import pytest

from laxlab.dialgebra import (
    RKernel,
    Splitting,
    cybe_residual,
    dialgebra_lax_rhs,
    invariant_gradient,
    mcybe_residual,
    omega_identity_residual,
    r_bracket,
    split_apply,
)
from laxlab.matrixcore import (
    basis_matrix,
    flip_tensor,
    make_rng,
    norm,
    random_complex,
    random_traceless,
)

E12 = basis_matrix(2, 0, 1)
E21 = basis_matrix(2, 1, 0)


def test_splitting_projector_algebra():
    rng = make_rng(1)
    for family in ("aks", "cartan"):
        for n in (2, 3, 4):
            s = Splitting(n, family)
            X = random_traceless(rng, n)
            Xp, Xm = s.p_plus(X), s.p_minus(X)
            assert norm(Xp + Xm + s.p_zero(X) - X) < 1e-13
            assert norm(s.p_plus(Xp) - Xp) < 1e-13
            assert norm(s.p_minus(Xm) - Xm) < 1e-13
            # images closed under the commutator
            Y = random_traceless(rng, n)
            Yp = s.p_plus(Y)
            assert norm(s.p_minus(np.round(Xp @ Yp - Yp @ Xp, 14))) < 1e-12


def test_split_apply_aks_oracles():
    s = Splitting(2, "aks")
    plus, minus = split_apply(E12, s)
    assert norm(plus) == 0.0
    assert norm(minus + E12) < 1e-14
    skew = E12 - E21
    plus, minus = split_apply(skew, s)
    assert norm(plus - skew) < 1e-14
    assert norm(minus) < 1e-14
    plus, minus = split_apply(np.zeros((2, 2)), s)
    assert norm(plus) == 0.0 and norm(minus) == 0.0


def test_split_apply_reconstruction():
    rng = make_rng(2)
    s = Splitting(3, "cartan")
    X = random_traceless(rng, 3)
    plus, minus = split_apply(X, s)
    assert norm(plus - minus - X) < 1e-13


def test_split_apply_rejects_trace():
    s = Splitting(2, "aks")
    with pytest.raises(ValueError):
        split_apply(np.eye(2), s)


def test_r_bracket_subalgebra_cases():
    s = Splitting(3, "aks")
    rng = make_rng(3)
    Xp = s.p_plus(random_traceless(rng, 3))
    Yp = s.p_plus(random_traceless(rng, 3))
    assert norm(r_bracket(Xp, Yp, s) - (Xp @ Yp - Yp @ Xp)) < 1e-12
    Ym = -s.p_minus(random_traceless(rng, 3))   # element of the minus algebra
    assert norm(r_bracket(Xp, Ym, s)) < 1e-12


def test_r_bracket_assembles_from_split():
    rng = make_rng(4)
    s = Splitting(3, "aks")
    X = random_traceless(rng, 3)
    Y = random_traceless(rng, 3)
    RX = s.r(X)
    RY = s.r(Y)
    want = 0.5 * ((RX @ Y - Y @ RX) + (X @ RY - RY @ X))
    assert norm(r_bracket(X, Y, s) - want) < 1e-13


def test_r_plus_minus_homomorphism_property():
    rng = make_rng(5)
    for family in ("aks", "cartan"):
        s = Splitting(3, family)
        X = random_traceless(rng, 3)
        Y = random_traceless(rng, 3)
        br = r_bracket(X, Y, s)
        for rmap in (s.r_plus, s.r_minus):
            lhs = rmap(br)
            rx, ry = rmap(X), rmap(Y)
            assert norm(lhs - (rx @ ry - ry @ rx)) < 1e-12


def test_mcybe_oracles():
    s = Splitting(2, "aks")
    rng = make_rng(6)
    X = random_traceless(rng, 2)
    Y = random_traceless(rng, 2)
    assert mcybe_residual(X, Y, s) < 1e-12
    # zero map: the residual collapses to norm([X, Y]) = norm(E11 - E22) = 1
    assert abs(mcybe_residual(E12, E21, lambda M: 0 * M) - 1.0) < 1e-15
    assert mcybe_residual(X, Y, Splitting(3, "cartan").r
                          if False else Splitting(2, "cartan")) < 1e-12


def test_mcybe_property_loop():
    rng = make_rng(7)
    for n in (2, 3, 4):
        for family in ("aks", "cartan"):
            s = Splitting(n, family)
            for _ in range(20):
                X = random_traceless(rng, n)
                Y = random_traceless(rng, n)
                assert mcybe_residual(X, Y, s) < 1e-12


def test_rational_kernel_skewness_and_cyclotomic_limit():
    k = RKernel(2, "rational")
    assert norm(k.eval(0.3, 1.1) + flip_tensor(k.eval(1.1, 0.3), 2)) < 1e-15
    kc = RKernel(2, "cyclotomic", T=1)
    assert norm(k.eval(0.3, 1.1) - kc.eval(0.3, 1.1)) == 0.0


def test_cybe_oracles():
    k = RKernel(2, "rational")
    assert cybe_residual(k, 0.3, 1.1 + 0.2j, -0.7) < 1e-11
    kc = RKernel(2, "cyclotomic", T=2)
    rng = make_rng(8)
    pts = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    assert cybe_residual(kc, *pts) < 1e-11


def test_cybe_rejects_coincident_points():
    k = RKernel(2, "rational")
    with pytest.raises(ValueError):
        k.eval(0.5, 0.5)
    kc = RKernel(2, "cyclotomic", T=2)
    with pytest.raises(ValueError):
        kc.eval(0.5, -0.5)   # omega-equivalent under T=2


def test_omega_identity_property_loop():
    rng = make_rng(9)
    for T in (2, 3):
        for _ in range(10):
            z1, z2 = random_complex(rng, 2)
            for l in range(2 * T + 1):
                assert omega_identity_residual(z1, z2, l, T) < 1e-12


def test_invariant_gradient():
    rng = make_rng(10)
    L = random_complex(rng, (3, 3))
    assert norm(invariant_gradient(L, 1) - L) == 0.0
    assert norm(invariant_gradient(np.zeros((3, 3)), 2)) == 0.0
    # FD oracle: H_k = Tr L^{k+1}/(k+1), d/de H_k(L + e eta) = Tr(eta L^k)
    eta = random_complex(rng, (3, 3))
    eps = 1e-6
    k = 2
    hk = lambda M: np.trace(np.linalg.matrix_power(M, k + 1)) / (k + 1)
    fd = (hk(L + eps * eta) - hk(L - eps * eta)) / (2 * eps)
    assert abs(fd - np.trace(eta @ invariant_gradient(L, k))) < 1e-6


def test_dialgebra_lax_rhs_oracles():
    s = Splitting(2, "aks")
    L = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    rhs = dialgebra_lax_rhs(L, 1, -1.0, s, "+")
    # tridiagonal open-chain flow at a = (0, 0), b = (1): diag rates (2, -2)
    assert norm(rhs - np.diag([2.0, -2.0])) < 1e-13
    assert norm(rhs - dialgebra_lax_rhs(L, 1, -1.0, s, "-")) < 1e-12
    assert norm(dialgebra_lax_rhs(np.zeros((2, 2)), 1, -1.0, s, "+")) == 0.0


def test_dialgebra_lax_rhs_sign_independence_random():
    rng = make_rng(11)
    s = Splitting(4, "aks")
    a = rng.standard_normal(4)
    a -= a.mean()
    b = rng.standard_normal(3)
    L = np.diag(a.astype(complex)) + np.diag(b, 1) + np.diag(b, -1)
    for k in (1, 2):
        d = dialgebra_lax_rhs(L, k, -1.0 / (k + 1), s, "+") \
            - dialgebra_lax_rhs(L, k, -1.0 / (k + 1), s, "-")
        assert norm(d) < 1e-12
