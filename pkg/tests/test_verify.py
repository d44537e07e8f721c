"""Identity-certification operations: brackets, double-zero, Sklyanin."""

import numpy as np
import pytest

from laxlab.dialgebra import RKernel
from laxlab.matrixcore import make_rng, random_complex
from laxlab.models import build_model
from laxlab.verify import (
    Report,
    double_zero_residual,
    flow_crosscheck,
    involutivity_residual,
    poisson_bracket_fd,
    run_suite,
    sklyanin_residual,
)


@pytest.fixture(scope="module")
def toda_ub():
    m = build_model({"family": "open-toda-ub", "sites": 3})
    return m, m.random_state(make_rng(7)), m.canonical_chart()


def test_bracket_oracle_b_u(toda_ub):
    m, s, chart = toda_ub
    # {b_1, u_1} = 1 on the canonical (u, b) chart
    val = poisson_bracket_fd(m, chart, lambda st: st[3], lambda st: st[0], s)
    assert abs(val - 1.0) < 1e-9
    # disjoint pair vanishes
    val = poisson_bracket_fd(m, chart, lambda st: st[3], lambda st: st[1], s)
    assert abs(val) < 1e-9


def test_bracket_antisymmetry(toda_ub):
    m, s, chart = toda_ub
    rng = make_rng(1)
    A = random_complex(rng, (m.dim, m.dim))
    f = lambda st: st @ A @ st
    assert abs(poisson_bracket_fd(m, chart, f, f, s)) < 1e-10
    g = lambda st: np.sum(st ** 3)
    fg = poisson_bracket_fd(m, chart, f, g, s)
    gf = poisson_bracket_fd(m, chart, g, f, s)
    assert abs(fg + gf) < 1e-8


def test_bracket_dst_chart():
    m = build_model({"family": "dst", "T": 2})
    s = m.random_state(make_rng(2))
    chart = m.canonical_chart()
    # theta = X_i dx^i induces {x^1, X_1} = 1
    val = poisson_bracket_fd(m, chart, lambda st: st[0], lambda st: st[2], s)
    assert abs(val - 1.0) < 1e-9


def test_involutivity_same_flow(toda_ub):
    m, s, chart = toda_ub
    assert involutivity_residual(m, chart, 1, 1, s) < 1e-10


def test_involutivity_open_toda(toda_ub):
    m, s, chart = toda_ub
    assert involutivity_residual(m, chart, 1, 2, s) < 1e-6


def test_involutivity_coupled():
    m = build_model({"family": "coupled-toda-dst", "T": 3, "beta": 0.5})
    s = m.random_state(make_rng(3))
    assert involutivity_residual(m, m.canonical_chart(), (1, 0), (1, 1), s) < 1e-6


def test_double_zero_collapse_zero_velocity(toda_ub):
    m, s, chart = toda_ub
    z = np.zeros(m.dim, dtype=complex)
    assert double_zero_residual(m, chart, 1, 2, s, z, z) < 1e-10


def test_double_zero_random_velocities(toda_ub):
    m, s, chart = toda_ub
    rng = make_rng(4)
    for _ in range(5):
        vk = random_complex(rng, m.dim)
        vl = random_complex(rng, m.dim)
        assert double_zero_residual(m, chart, 1, 2, s, vk, vl) < 1e-6


def test_double_zero_on_shell_is_closure(toda_ub):
    m, s, chart = toda_ub
    vk = m.flow_rhs(1, s)
    vl = m.flow_rhs(2, s)
    assert double_zero_residual(m, chart, 1, 2, s, vk, vl) < 1e-6


def test_double_zero_swap_antisymmetry(toda_ub):
    m, s, chart = toda_ub
    rng = make_rng(5)
    vk = random_complex(rng, m.dim)
    vl = random_complex(rng, m.dim)
    a = double_zero_residual(m, chart, 1, 2, s, vk, vl)
    b = double_zero_residual(m, chart, 2, 1, s, vl, vk)
    assert abs(a - b) < 1e-10


def test_sklyanin_periodic_toda():
    m = build_model({"family": "periodic-toda", "T": 2})
    s = m.random_state(make_rng(6))
    kernel = RKernel(2, "cyclotomic", T=2)
    assert sklyanin_residual(m, m.canonical_chart(), 0.7, 1.3j, s, kernel) < 1e-8


def test_sklyanin_dst():
    m = build_model({"family": "dst", "T": 2})
    s = m.random_state(make_rng(7))
    kernel = RKernel(2, "cyclotomic", T=2)
    assert sklyanin_residual(m, m.canonical_chart(), 0.3, 1.7, s, kernel) < 1e-8


def test_sklyanin_trace_scalar_check():
    m = build_model({"family": "periodic-toda", "T": 2})
    s = m.random_state(make_rng(8))
    chart = m.canonical_chart()
    val = poisson_bracket_fd(
        m, chart,
        lambda st: np.trace(m.lax(st, 0.7)),
        lambda st: np.trace(m.lax(st, 1.3j)), s)
    assert abs(val) < 1e-8


def test_sklyanin_rejects_kks_chart():
    m = build_model({"family": "elliptic-gaudin"})
    s = m.random_state(make_rng(9))
    kernel = RKernel(2, "cyclotomic", T=1)
    with pytest.raises(ValueError):
        sklyanin_residual(m, m.canonical_chart(), 0.51 + 0.33j,
                          0.37 - 0.21j, s, kernel)


def test_flow_crosscheck_trivial_and_toda(toda_ub):
    m, s, chart = toda_ub
    dst = build_model({"family": "dst", "T": 2})
    sd = dst.random_state(make_rng(10))
    assert flow_crosscheck(dst, (1, 0), sd, (0.3,)) < 1e-10
    assert flow_crosscheck(m, 2, s) < 1e-6


def test_report_contract():
    rep = Report()
    rep.add("demo", "model", {}, 1e-12, 1e-10, 0.0)
    rep.add("demo2", "model", {}, 1.0, 1e-10, 0.0)
    assert not rep.ok
    assert len(rep.failures()) == 1
    assert rep.entries[0]["pass"] and not rep.entries[1]["pass"]


def test_run_suite_empty_config_is_empty():
    rep = run_suite({})
    assert rep.entries == []


def test_run_suite_single_model():
    rep = run_suite({"model": "open-toda-ub", "sites": 3})
    assert rep.ok
    assert {e["identity"] for e in rep.entries} >= {
        "flow-crosscheck", "isospectral-drift", "commutativity",
        "cross-conservation", "involutivity", "closure"}


def test_run_suite_seed_invariance_of_pass_set():
    a = run_suite({"model": "open-toda-skew", "sites": 3, "seed": 7})
    b = run_suite({"model": "open-toda-skew", "sites": 3, "seed": 8})
    assert [e["pass"] for e in a.entries] == [e["pass"] for e in b.entries]
    assert a.entries[0]["residual"] != b.entries[0]["residual"]
