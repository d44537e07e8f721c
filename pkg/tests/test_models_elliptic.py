"""Elliptic Gaudin / spin chain on the torus."""

import numpy as np
import pytest

from laxlab.matrixcore import make_rng, norm
from laxlab.models import EllipticGaudin, build_model
from laxlab.multitime import commutativity_residual, integrate_path
from laxlab.verify import involutivity_residual


@pytest.fixture(scope="module")
def model():
    return EllipticGaudin(tau=1.0j)


@pytest.fixture(scope="module")
def state(model):
    return model.random_state(make_rng(7))


def test_residue_at_marked_point(model, state):
    # contour integral of L around each marked point recovers the stored
    # residue matrix exactly (the kernel's per-site normalisation)
    _, _, spins = model.unpack(state)
    for z_a, L_a in zip(model.marked, spins):
        radius = 0.05
        nodes = 64
        acc = np.zeros((2, 2), dtype=complex)
        for k in range(nodes):
            lam = z_a + radius * np.exp(2j * np.pi * k / nodes)
            acc += model.lax(state, lam) * (lam - z_a)
        res = acc / nodes
        assert norm(res - L_a) < 1e-8


def test_state_constraints(model, state):
    # zero total Cartan charge and traceless spins
    assert model.state_residual(state) < 1e-12


def test_constraint_preserved_by_flows(model, state):
    traj = integrate_path(model, state, [(0, 0.2, 200)])
    assert model.state_residual(traj.states[-1]) < 1e-9


def test_involutivity(model, state):
    chart = model.canonical_chart()
    assert involutivity_residual(model, chart, 0, 1, state) < 1e-6


def test_gauged_flows_commute(model, state):
    assert commutativity_residual(model, 0, 1, state,
                                  delta=0.05, steps=50) < 1e-8


def test_hamiltonians_conserved(model, state):
    traj = integrate_path(model, state, [(0, 0.5, 500)])
    for flow in model.flows:
        drift = abs(model.hamiltonian(flow, traj.states[-1]) -
                    model.hamiltonian(flow, state))
        assert drift < 1e-8


def test_lax_pole_guard(model, state):
    with pytest.raises(ValueError):
        model.lax(state, model.marked[0])
    with pytest.raises(ValueError):
        model.lax(state)


def test_no_printed_m_matrix(model, state):
    with pytest.raises(NotImplementedError):
        model.m_matrix(0, state, 0.51 + 0.33j)


def test_build_model_entry():
    m = build_model({"family": "elliptic-gaudin", "tau": 1.0j})
    assert m.flows == (0, 1)
