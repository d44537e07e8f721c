"""Rational Gaudin model on coadjoint orbits."""

import numpy as np
import pytest

from laxlab.matrixcore import dir_diff, make_rng, norm
from laxlab.models import RationalGaudin, build_model, default_rational_gaudin
from laxlab.multitime import integrate_path
from laxlab.verify import flow_crosscheck


@pytest.fixture
def two_site():
    # zetas (0, 1); residues A_1 = diag(1, -1), A_2 = E12 + E21
    lam = np.diag([1.0, -1.0]).astype(complex)
    m = RationalGaudin([0.0, 1.0], [lam, lam.copy()])
    hadamard = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2)
    state = m.pack([np.eye(2, dtype=complex), hadamard])
    return m, state


def test_constructor_validations():
    lam = np.diag([1.0, -1.0]).astype(complex)
    with pytest.raises(ValueError):
        RationalGaudin([0.0, 0.0], [lam, lam])        # coincident poles
    with pytest.raises(ValueError):
        RationalGaudin([0.0], [lam])                  # single site
    with pytest.raises(ValueError):
        RationalGaudin([0.0, 1.0], [lam])             # seed count mismatch


def test_flow_labels():
    m = default_rational_gaudin(sites=3)
    assert m.flows == tuple((k, r) for k in (1, 2) for r in range(3))


def test_residue_reconstruction(two_site):
    m, state = two_site
    A = m.residues(state)
    assert norm(A[0] - np.diag([1.0, -1.0])) < 1e-14
    assert norm(A[1] - np.array([[0, 1], [1, 0]])) < 1e-14


def test_lax_large_lambda_limit():
    lam = np.diag([1.0, -1.0]).astype(complex)
    omega = np.array([[0.3, 0.1], [0.2, -0.3]], dtype=complex)
    m = RationalGaudin([0.0, 1.0], [lam, lam], omega)
    s = m.pack([np.eye(2, dtype=complex)] * 2)
    assert norm(m.lax(s, 1e8) - omega) < 1e-7


def test_lax_pole_guard(two_site):
    m, state = two_site
    with pytest.raises(ValueError):
        m.lax(state, 0.0)
    with pytest.raises(ValueError):
        m.lax(state)   # spectral model requires lambda


def test_printed_flow_oracle(two_site):
    # flow at site 0: the other residue evolves by
    # Adot_2 = [A_1, A_2] / (zeta_1 - zeta_2) = -2 (E12 - E21)
    m, state = two_site
    rhs = m.flow_rhs((1, 0), state)
    adot = dir_diff(lambda s: m.residues(s)[1], state, rhs)
    want = -2.0 * np.array([[0, 1], [-1, 0]], dtype=complex)
    assert norm(adot - want) < 1e-6


def test_m_matrix_oracle(two_site):
    # M_{1,r}(lambda) = -A_r / (lambda - zeta_r) at lambda = zeta_r + 1
    m, state = two_site
    A = m.residues(state)
    assert norm(m.m_matrix((1, 1), state, 2.0) + A[1]) < 1e-13


def test_group_tangent_structure(two_site):
    # phi_s' = V_s phi_s with V_s = A_r/(zeta_r - zeta_s) off the moved site
    m, state = two_site
    A = m.residues(state)
    rhs = m.flow_rhs((1, 0), state)
    phis = m.unpack(state)
    dphis = m.unpack(rhs.reshape(-1)) if False else [
        rhs[i * 4:(i + 1) * 4].reshape(2, 2) for i in range(2)]
    V1 = dphis[1] @ np.linalg.inv(phis[1])
    assert norm(V1 - A[0] / (m.zetas[0] - m.zetas[1])) < 1e-12


def test_flow_crosscheck_random():
    m = default_rational_gaudin(sites=2)
    s = m.random_state(make_rng(7))
    for flow in m.flows:
        assert flow_crosscheck(m, flow, s, (0.5 + 0.5j, -1.0)) < 1e-6


def test_orbit_invariance_under_integration():
    # Tr(A_s^k) is exactly conserved by the group-level motion
    m = default_rational_gaudin(sites=2)
    s0 = m.random_state(make_rng(3))
    traj = integrate_path(m, s0, [((1, 0), 0.5, 500)])
    before = [np.trace(np.linalg.matrix_power(A, k))
              for A in m.residues(traj.states[0]) for k in (1, 2, 3)]
    after = [np.trace(np.linalg.matrix_power(A, k))
             for A in m.residues(traj.states[-1]) for k in (1, 2, 3)]
    assert np.max(np.abs(np.array(before) - np.array(after))) < 1e-9


def test_hamiltonians_mutually_conserved():
    m = default_rational_gaudin(sites=2)
    s0 = m.random_state(make_rng(5))
    traj = integrate_path(m, s0, [((2, 0), 0.5, 500)])
    for flow in m.flows:
        drift = abs(m.hamiltonian(flow, traj.states[-1]) -
                    m.hamiltonian(flow, s0))
        assert drift < 1e-8
