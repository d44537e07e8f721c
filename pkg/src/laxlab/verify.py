"""Identity-certification suite.

Finite-difference Poisson brackets on canonical charts (with optional
Kirillov-Kostant blocks), involutivity, the off-shell double-zero
identity, Sklyanin r-matrix bracket residuals, coordinate-vs-Lax flow
cross-checks, and the aggregated residual report.

FD error budget: analytic/algebraic identities are certified at
1e-10..1e-12, single-FD identities at 1e-8, and double-FD quantities
(closure lattices, double-zero with FD gradients) at 1e-5..1e-6.
"""

from __future__ import annotations

import json
import time

import numpy as np

from .dialgebra import RKernel, Splitting, cybe_residual, mcybe_residual
from .elliptic import EllipticLattice
from .matrixcore import (
    DEFAULT_FD_STEP,
    commutator,
    dir_diff,
    flip_tensor,
    grad_fd,
    make_rng,
    norm,
    random_traceless,
)
from .models import build_model
from .multitime import (
    closure_residual,
    commutativity_residual,
    integrate_path,
    isospectral_drift,
)

__all__ = [
    "poisson_bracket_fd", "involutivity_residual", "double_zero_residual",
    "sklyanin_residual", "flow_crosscheck", "run_suite", "Report",
]


# ---------------------------------------------------------------------------
# finite-difference Poisson brackets on charts
# ---------------------------------------------------------------------------

def _kks_blocks(chart):
    """Normalise chart.kks entries to (offset, n, sign) triples."""
    blocks = getattr(chart, "kks", None) or []
    out = []
    for blk in blocks:
        if len(blk) == 2:
            off, n = blk
            sign = 1.0
        else:
            off, n, sign = blk
        out.append((int(off), int(n), complex(sign)))
    return out


def _matrix_grad(grad_vec, off, n):
    """Trace-pairing matrix gradient from the flat FD gradient:
    (grad)_{jk} = d f / d L_{kj}."""
    return grad_vec[off:off + n * n].reshape(n, n).T


def poisson_bracket_fd(model, chart, f, g, state, h=DEFAULT_FD_STEP):
    """{f, g} from the chart's Darboux pairs and KKS blocks.

    ``f`` and ``g`` are scalar observables of the packed state.  The pair
    contribution is sum of weight * (d_m f d_p g - d_p f d_m g); each KKS
    block (offset, n, sign) contributes sign * Tr(L [grad f, grad g])
    with the block matrix L read from the state.
    """
    if chart is None:
        raise ValueError("model exposes no canonical chart")
    state = np.asarray(state, dtype=complex)
    gf = grad_fd(f, state, h=h)
    gg = grad_fd(g, state, h=h)
    val = 0.0 + 0.0j
    for mom, pos, w in chart.pairs:
        val += w * (gf[mom] * gg[pos] - gf[pos] * gg[mom])
    for off, n, sign in _kks_blocks(chart):
        L = state[off:off + n * n].reshape(n, n)
        Gf = _matrix_grad(gf, off, n)
        Gg = _matrix_grad(gg, off, n)
        val += sign * np.trace(L @ commutator(Gf, Gg))
    return complex(val)


def involutivity_residual(model, chart, i, j, state, h=DEFAULT_FD_STEP):
    """|{H_i, H_j}| under the chart bracket."""
    f = lambda s: model.hamiltonian(i, s)
    g = lambda s: model.hamiltonian(j, s)
    return abs(poisson_bracket_fd(model, chart, f, g, state, h=h))


# ---------------------------------------------------------------------------
# double-zero identity
# ---------------------------------------------------------------------------

def _symplectic_matrix(chart, state, h=DEFAULT_FD_STEP):
    """omega_{mn} = d_m theta_n - d_n theta_m from the chart one-form."""
    if chart is None or chart.theta is None:
        raise ValueError("double-zero test needs a chart with a one-form")
    state = np.asarray(state, dtype=complex)
    dim = state.size
    jac = np.empty((dim, dim), dtype=complex)  # jac[m, n] = d_m theta_n
    for mlike in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[mlike] = h
        jac[mlike] = (np.asarray(chart.theta(state + e)) -
                      np.asarray(chart.theta(state - e))) / (2 * h)
    return jac - jac.T


def double_zero_residual(model, chart, k, l, state, v_k, v_l,
                         h=DEFAULT_FD_STEP):
    """Residual of the off-shell identity

        d(L_k)/dt^l - d(L_l)/dt^k + Ups_k^T P Ups_l = {H_k, H_l},

    with Ups_k = omega v_k - grad H_k, P = omega^{-1}, and arbitrary
    first velocities (the symmetric second-derivative terms cancel in the
    antisymmetrisation, so velocity derivatives are set to zero).
    """
    state = np.asarray(state, dtype=complex)
    v_k = np.asarray(v_k, dtype=complex)
    v_l = np.asarray(v_l, dtype=complex)
    omega = _symplectic_matrix(chart, state, h=h)
    # the identity contracts indices against omega_{mn} = d_m theta_n -
    # d_n theta_m, the transpose of the chart matrix (which satisfies
    # omega @ flow = grad H); its inverse therefore picks up a sign
    P = np.linalg.inv(omega.T)
    hk = lambda s: model.hamiltonian(k, s)
    hl = lambda s: model.hamiltonian(l, s)
    grad_hk = grad_fd(hk, state, h=h)
    grad_hl = grad_fd(hl, state, h=h)
    # d(L_k)/dt^l at frozen velocities = directional derivative along v_l
    lag_k = lambda s: model.lagrangian(k, s, v_k)
    lag_l = lambda s: model.lagrangian(l, s, v_l)
    dLk_dl = dir_diff(lag_k, state, v_l, h=h)
    dLl_dk = dir_diff(lag_l, state, v_k, h=h)
    ups_k = omega @ v_k - grad_hk
    ups_l = omega @ v_l - grad_hl
    lhs = dLk_dl - dLl_dk + ups_k @ P @ ups_l
    rhs = grad_hk @ P @ grad_hl
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Sklyanin bracket residual
# ---------------------------------------------------------------------------

def _lax_jacobian(model, state, lam, h=DEFAULT_FD_STEP):
    """d L_{ab}(lam) / d xi_m by central differences: shape (dim, n, n)."""
    state = np.asarray(state, dtype=complex)
    dim = state.size
    jac = []
    for mlike in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[mlike] = h
        jac.append((model.lax(state + e, lam) - model.lax(state - e, lam))
                   / (2 * h))
    return np.array(jac)


def sklyanin_residual(model, chart, lam, mu, state, kernel,
                      h=DEFAULT_FD_STEP):
    """Norm of {L1(lam), L2(mu)} - [r12(lam,mu), L1] + [r21(mu,lam), L2].

    The n^2 x n^2 matrix of entrywise FD brackets is assembled from the
    chart's Darboux pairs (canonical-chart models only); r21 is the
    flipped kernel at swapped arguments.
    """
    if chart is None:
        raise ValueError("sklyanin residual needs a canonical chart")
    if _kks_blocks(chart):
        raise ValueError("entrywise Sklyanin assembly supports Darboux "
                         "charts only")
    model.pole_guard(lam)
    model.pole_guard(mu)
    state = np.asarray(state, dtype=complex)
    n = model.lax(state, lam).shape[0]
    J_lam = _lax_jacobian(model, state, lam, h=h)
    J_mu = _lax_jacobian(model, state, mu, h=h)
    # bracket tensor B[(a c), (b d)] = {L_ab(lam), L_cd(mu)}
    B = np.zeros((n * n, n * n), dtype=complex)
    for mom, pos, w in chart.pairs:
        term = (np.einsum("ab,cd->acbd", J_lam[mom], J_mu[pos]) -
                np.einsum("ab,cd->acbd", J_lam[pos], J_mu[mom]))
        B += w * term.reshape(n * n, n * n)
    L1 = np.kron(model.lax(state, lam), np.eye(n))
    L2 = np.kron(np.eye(n), model.lax(state, mu))
    r12 = kernel.eval(lam, mu)
    r21 = flip_tensor(kernel.eval(mu, lam), n)
    rhs = commutator(r12, L1) - commutator(r21, L2)
    return norm(B - rhs)


# ---------------------------------------------------------------------------
# coordinate-vs-Lax flow cross-check
# ---------------------------------------------------------------------------

def flow_crosscheck(model, flow, state, lam_probes=(None,),
                    h=DEFAULT_FD_STEP):
    """Max over probes of || dL/dt|_FD - [M_flow, L] ||."""
    state = np.asarray(state, dtype=complex)
    rhs = model.flow_rhs(flow, state)
    worst = 0.0
    for lam in lam_probes:
        if model.spectral and lam is None:
            raise ValueError("spectral model: probes required")
        dL = dir_diff(lambda s: model.lax(s, lam), state, rhs, h=h)
        M = model.m_matrix(flow, state, lam)
        L = model.lax(state, lam)
        worst = max(worst, norm(dL - commutator(M, L)))
    return float(worst)


# ---------------------------------------------------------------------------
# the aggregated suite
# ---------------------------------------------------------------------------

class Report:
    """Ordered collection of residual entries with pass/fail flags."""

    def __init__(self):
        self.entries = []

    def add(self, identity, model, params, residual, tolerance, seconds):
        self.entries.append({
            "identity": identity,
            "model": model,
            "params": params,
            "residual": float(residual),
            "tolerance": float(tolerance),
            "pass": bool(residual < tolerance),
            "seconds": float(seconds),
        })

    @property
    def ok(self):
        return all(e["pass"] for e in self.entries)

    def failures(self):
        return [e for e in self.entries if not e["pass"]]

    def to_json(self):
        return json.dumps(self.entries, indent=2, sort_keys=True)


def _timed(report, identity, model_name, params, tolerance, fn):
    t0 = time.perf_counter()
    residual = fn()
    report.add(identity, model_name, params, residual,
               tolerance, time.perf_counter() - t0)


# per-family verification plans: (flow pair, probes, chart-based checks)
_SUITE_MODELS = (
    {"spec": {"family": "open-toda", "sites": 3}, "flows": (1, 2),
     "probes": (None,)},
    {"spec": {"family": "open-toda-ub", "sites": 3}, "flows": (1, 2),
     "probes": (None,), "closure": True, "involutivity": True},
    {"spec": {"family": "open-toda-skew", "sites": 3}, "flows": (1, 2),
     "probes": (None,), "closure": True},
    {"spec": {"family": "periodic-toda", "T": 3},
     "flows": ((1, 0), (2, 0)), "probes": (1.0, 2.0j), "sklyanin": True},
    {"spec": {"family": "dst", "T": 2}, "flows": ((1, 1), (1, 0)),
     "probes": (0.3, 1.7), "sklyanin": True, "involutivity": True},
    {"spec": {"family": "coupled-toda-dst", "T": 3, "beta": 0.5},
     "flows": ((1, 0), (1, 1)), "probes": (0.4, 2.2), "sklyanin": True,
     "closure": True, "involutivity": True},
    {"spec": {"family": "rational-gaudin", "sites": 2},
     "flows": ((1, 0), (1, 1)), "probes": (0.5 + 0.5j, -1.0),
     "closure": True},
    {"spec": {"family": "cyclotomic-gaudin", "T": 2, "sites": 1},
     "flows": ((1, 0), (1, 1)), "probes": (0.5 + 0.5j, 2.0 + 1.0j)},
    {"spec": {"family": "elliptic-gaudin"}, "flows": (0, 1),
     "probes": (0.51 + 0.33j,), "no_m_matrix": True,
     "involutivity": True},
)


def _algebra_entries(report, rng):
    for n in (2, 3, 4):
        for family in ("aks", "cartan"):
            s = Splitting(n, family)
            worst = 0.0
            for _ in range(50):
                X = random_traceless(rng, n)
                Y = random_traceless(rng, n)
                worst = max(worst, mcybe_residual(X, Y, s))
            report.add("mcybe", f"sl{n}-{family}", {"samples": 50},
                       worst, 1e-12, 0.0)
    for n in (2, 3):
        k = RKernel(n, "rational")
        worst = 0.0
        for _ in range(20):
            pts = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            worst = max(worst, cybe_residual(k, *pts))
        report.add("cybe", f"rational-n{n}", {"samples": 20}, worst,
                   1e-11, 0.0)
    for T in (2, 3):
        k = RKernel(2, "cyclotomic", T=T)
        worst = 0.0
        for _ in range(20):
            pts = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            worst = max(worst, cybe_residual(k, *pts))
        report.add("cybe", f"cyclotomic-T{T}", {"samples": 20}, worst,
                   1e-11, 0.0)


def _elliptic_entries(report):
    for tau in (1.0j, 0.3 + 1.0j):
        lat = EllipticLattice(tau)
        report.add("legendre", "elliptic-lattice", {"tau": str(tau)},
                   lat.legendre_residual(), 1e-10, 0.0)
    lat = EllipticLattice(1.0j)
    rng = make_rng(7)
    worst = 0.0
    for _ in range(20):
        z = (0.1 + 0.8 * rng.random()) + 1j * (0.1 + 0.8 * rng.random())
        dz = 1e-5
        dzeta = (lat.zeta(z + dz) - lat.zeta(z - dz)) / (2 * dz)
        worst = max(worst, abs(dzeta + lat.wp(z)))
    report.add("zeta-derivative", "elliptic-lattice", {"points": 20},
               worst, 1e-6, 0.0)
    worst = 0.0
    for w in (1.0, lat.tau, 1.0 + lat.tau):
        z = 0.31 + 0.27j
        worst = max(worst, abs(lat.wp(z + w) - lat.wp(z)))
    report.add("wp-periodicity", "elliptic-lattice", {}, worst, 1e-9, 0.0)


def run_suite(config=None):
    """Execute the identity ledger and return the Report.

    ``config`` keys (all optional): ``model`` (family name restricting the
    per-model entries), ``seed``, ``step``, ``delta``, model parameters
    forwarded to ``build_model``, and ``skip_algebra`` / ``skip_elliptic``
    to drop the model-independent entries.
    """
    if config is not None and len(config) == 0:
        return Report()
    config = dict(config or {})
    seed = int(config.pop("seed", 7))
    step = float(config.pop("step", 1e-3))
    delta = float(config.pop("delta", 0.1))
    only = config.pop("model", None)
    skip_algebra = bool(config.pop("skip_algebra", False))
    skip_elliptic = bool(config.pop("skip_elliptic", False))
    overrides = config

    report = Report()
    rng = make_rng(seed)
    if only is None and not skip_algebra:
        _algebra_entries(report, rng)
    if only is None and not skip_elliptic:
        _elliptic_entries(report)

    for plan in _SUITE_MODELS:
        family = plan["spec"]["family"]
        if only is not None and family != only:
            continue
        spec = dict(plan["spec"])
        if only is not None:
            spec.update(overrides)
        model = build_model(spec)
        s0 = model.random_state(make_rng(seed))
        fi, fj = plan["flows"]
        probes = plan["probes"]
        params = {k: str(v) for k, v in spec.items() if k != "family"}

        if not plan.get("no_m_matrix"):
            for flow in (fi, fj):
                _timed(report, "flow-crosscheck", family,
                       {**params, "flow": str(flow)}, 1e-6,
                       lambda f=flow: flow_crosscheck(model, f, s0, probes))

        steps = max(1, int(round(1.0 / step)))
        _timed(report, "isospectral-drift", family,
               {**params, "flow": str(fi)}, 1e-8,
               lambda: isospectral_drift(
                   integrate_path(model, s0, [(fi, 1.0, steps)],
                                  lam_probes=probes, kmax=3)))
        _timed(report, "commutativity", family,
               {**params, "flows": f"{fi},{fj}"}, 1e-8,
               lambda: commutativity_residual(
                   model, fi, fj, s0, delta=delta,
                   steps=max(1, int(round(delta / step)))))
        _timed(report, "cross-conservation", family,
               {**params, "flow": str(fi)}, 1e-8,
               lambda: max(
                   abs(model.hamiltonian(f, integrate_path(
                       model, s0, [(fi, 1.0, steps)]).states[-1]) -
                       model.hamiltonian(f, s0))
                   for f in model.flows))

        chart = model.canonical_chart()
        if plan.get("involutivity") and chart is not None:
            _timed(report, "involutivity", family,
                   {**params, "flows": f"{fi},{fj}"}, 1e-6,
                   lambda: involutivity_residual(model, chart, fi, fj, s0))
        if plan.get("closure"):
            _timed(report, "closure", family,
                   {**params, "flows": f"{fi},{fj}"}, 1e-5,
                   lambda: closure_residual(model, fi, fj, s0, delta=delta))
        if plan.get("sklyanin") and chart is not None:
            kernel = RKernel(model.lax(s0, probes[0]).shape[0],
                             "cyclotomic", T=model.T)
            lam, mu = probes[0], probes[1]
            _timed(report, "sklyanin", family,
                   {**params, "lam": str(lam), "mu": str(mu)}, 1e-8,
                   lambda: sklyanin_residual(model, chart, lam, mu, s0,
                                             kernel))
    return report
