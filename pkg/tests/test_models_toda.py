"""Open Toda chain: three charts, printed oracles, chart equivalences."""

import numpy as np
import pytest

from laxlab.matrixcore import dir_diff, make_rng, norm
from laxlab.models import (
    OpenTodaFlaschka,
    OpenTodaSkew,
    OpenTodaUB,
    build_model,
    tridiag_lax,
)
from laxlab.verify import flow_crosscheck


def test_build_model_flow_labels():
    m = build_model({"family": "open-toda", "sites": 2})
    assert m.flows == (1, 2)
    assert isinstance(m, OpenTodaFlaschka)


def test_build_model_rejects_unknown_family():
    with pytest.raises(ValueError):
        build_model({"family": "no-such-model"})


def test_lax_oracle():
    m = OpenTodaFlaschka(1)
    s = np.array([0.0, 0.0, 1.0], dtype=complex)
    assert norm(m.lax(s) - np.array([[0, 1], [1, 0]])) == 0.0


def test_hamiltonian_oracle():
    m = OpenTodaFlaschka(1)
    s = np.array([0.0, 0.0, 1.0], dtype=complex)
    assert abs(m.hamiltonian(1, s) + 1.0) < 1e-14     # -Tr L^2 / 2 = -1


def test_flow_rhs_oracle():
    m = OpenTodaFlaschka(1)
    s = np.array([0.0, 0.0, 1.0], dtype=complex)
    assert np.allclose(m.flow_rhs(1, s), [2.0, -2.0, 0.0])


def test_m_matrix_reproduces_flow():
    m = OpenTodaFlaschka(1)
    s = np.array([0.0, 0.0, 1.0], dtype=complex)
    L = m.lax(s)
    M = m.m_matrix(1, s)
    rhs_matrix = tridiag_lax(m.flow_rhs(1, s)[:2], m.flow_rhs(1, s)[2:])
    assert norm((M @ L - L @ M) - rhs_matrix) < 1e-13


@pytest.mark.parametrize("sites", [2, 3])
@pytest.mark.parametrize("flow", [1, 2])
def test_flow_crosscheck_all_charts(sites, flow):
    for family in ("open-toda", "open-toda-ub", "open-toda-skew"):
        m = build_model({"family": family, "sites": sites})
        rng = make_rng(7)
        for _ in range(3):
            s = m.random_state(rng)
            assert flow_crosscheck(m, flow, s) < 1e-6


def test_ub_chart_equivalence():
    # the (u, b) -> (a, b) map intertwines the chart flows with the
    # Flaschka flows
    ub = OpenTodaUB(3)
    fl = OpenTodaFlaschka(3)
    rng = make_rng(11)
    for flow in (1, 2):
        s = ub.random_state(rng)
        pushed = dir_diff(ub.to_flaschka, s, ub.flow_rhs(flow, s))
        direct = fl.flow_rhs(flow, ub.to_flaschka(s))
        assert np.max(np.abs(pushed - direct)) < 1e-9


def test_skew_chart_equivalence():
    sk = OpenTodaSkew(3)
    fl = OpenTodaFlaschka(3)
    rng = make_rng(12)
    for flow in (1, 2):
        s = sk.random_state(rng)
        pushed = dir_diff(sk.to_flaschka, s, sk.flow_rhs(flow, s))
        direct = fl.flow_rhs(flow, sk.to_flaschka(s))
        assert np.max(np.abs(pushed - direct)) < 1e-9


def test_charts_share_lax_matrix():
    ub = OpenTodaUB(3)
    rng = make_rng(13)
    s = ub.random_state(rng)
    fl = OpenTodaFlaschka(3)
    assert norm(ub.lax(s) - fl.lax(ub.to_flaschka(s))) < 1e-13


def test_flaschka_state_invariant():
    m = OpenTodaFlaschka(2)
    s = m.random_state(make_rng(1))
    assert m.state_residual(s) < 1e-10
    bad = s.copy()
    bad[0] += 1.0
    assert m.state_residual(bad) > 0.5


def test_lagrangian_zero_velocity():
    ub = OpenTodaUB(2)
    s = ub.random_state(make_rng(2))
    v = np.zeros(ub.dim, dtype=complex)
    assert abs(ub.lagrangian(1, s, v) + ub.hamiltonian(1, s)) < 1e-14


def test_invalid_flow_rejected():
    m = OpenTodaFlaschka(2)
    s = m.random_state(make_rng(3))
    with pytest.raises(KeyError):
        m.hamiltonian(5, s)
