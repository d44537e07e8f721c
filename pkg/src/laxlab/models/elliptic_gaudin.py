"""Elliptic sl(2) Gaudin model (elliptic spin chain) on a torus.

State: (q, p, L_1, ..., L_N) where q is the Cartan modulus of the
underlying bundle, p its conjugate momentum, and the L_alpha are traceless
2x2 spin matrices attached to marked points z_alpha (all nonzero mod the
lattice), subject to the moment constraint sum_alpha (L_alpha)^mu = 0 with
(L_alpha)^mu = ((L_alpha)_11 - (L_alpha)_22)/2.

The Lax matrix, with H = diag(1, -1) and Q = 2q, is

    L(lam) = L^mu(lam) H + L^+(lam) E_12 + L^-(lam) E_21,
    L^mu   = pi + sum_a (L_a)^mu zeta(lam - z_a),
    pi     = p/2 - sum_a (L_a)^mu zeta(-z_a),
    L^+/-  = sum_a (L_a)_{12/21}
             sigma(+-Q + lam - z_a) / (sigma(+-Q) sigma(lam - z_a))
             * exp(-+ Q (zeta(lam) - zeta(z_a))).

The per-site normalisation exp(+-Q zeta(z_a)) makes the residue of L at
z_a equal to L_a exactly, so the stored spin matrices are the genuine
orbit variables: they carry the Kirillov-Kostant bracket
{f, g}_a = -Tr(L_a [grad_a f, grad_a g]) (the sign reflects the
L_a = -phi Lambda phi^{-1} parametrisation of the coadjoint orbits),
while (q, p) is an ordinary Darboux pair {q, p} = 1.  Without this
normalisation the sigma-kernel coefficients differ from the residues by
exp(-+Q zeta(z_a)) and the Hamiltonians fail to commute.

Everything is built from the Weierstrass functions of
:mod:`laxlab.elliptic`.  The Hamiltonians are H_i = Tr L(kappa_i)^2 / 2
at fixed evaluation points kappa_i, and the flows are their Hamiltonian
vector fields:

    qdot = dH/dp,  pdot = -dH/dq,  Ldot_a = [L_a, grad_a H],

with all gradients computed analytically (the Lax matrix is affine in
(p, L_a); the q-derivative follows from d/dc log sigma(c + X)/sigma(c)
= zeta(c + X) - zeta(c)).
"""

from __future__ import annotations

import numpy as np

from ..elliptic import EllipticLattice
from .base import CanonicalChart, Model

_E12 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_E21 = _E12.T.copy()
_H = np.diag([1.0, -1.0]).astype(complex)


class EllipticGaudin(Model):
    """Flows labelled 0..n_flows-1, one per evaluation point kappa_i."""

    name = "elliptic-gaudin"
    spectral = True

    def __init__(self, tau=1.0j, marked_points=(0.23 + 0.31j, -0.41 + 0.12j),
                 eval_points=(0.37 - 0.21j, -0.11 + 0.43j), trunc=20):
        self.lattice = EllipticLattice(tau, trunc=trunc)
        self.marked = np.asarray(marked_points, dtype=complex)
        self.sites = len(self.marked)
        if self.sites < 2:
            raise ValueError("need at least two marked points")
        for z in self.marked:
            if self.lattice.distance_to_lattice(z) < 1e-6:
                raise ValueError("marked points must avoid the lattice")
        self.kappas = np.asarray(eval_points, dtype=complex)
        for k in self.kappas:
            self.pole_guard(k)
        self.flows = tuple(range(len(self.kappas)))
        self.dim = 2 + 4 * self.sites
        # cached constants zeta(z(p) - z_a) with the bundle point at 0
        self._zeta0 = np.array([self.lattice.zeta(-z) for z in self.marked])
        # per-site normalisation constants zeta(z_a) (see module docstring)
        self._zeta_site = np.array([self.lattice.zeta(z) for z in self.marked])

    # -- state packing -----------------------------------------------------
    def unpack(self, state):
        state = self._check_state(state)
        q, p = state[0], state[1]
        spins = [state[2 + 4 * a:6 + 4 * a].reshape(2, 2)
                 for a in range(self.sites)]
        return q, p, spins

    def pack(self, q, p, spins):
        return np.concatenate([[q, p]] + [s.ravel() for s in spins])

    def pole_guard(self, lam):
        lam = complex(lam)
        if self.lattice.distance_to_lattice(lam) < 1e-6:
            raise ValueError("spectral parameter at/near the origin pole")
        for z in self.marked:
            if self.lattice.distance_to_lattice(lam - z) < 1e-6:
                raise ValueError(f"spectral parameter {lam} at/near a marked point")

    # -- Lax matrix ----------------------------------------------------------
    def _components(self, state, lam, with_grads=False):
        """L^mu, L^+, L^- at lam, optionally with analytic q-derivatives
        of the dressing factors and the affine coefficient tables."""
        lat = self.lattice
        q, p, spins = self.unpack(state)
        Q = 2.0 * q
        if lat.distance_to_lattice(Q) < 1e-8:
            raise ValueError("Cartan modulus 2q degenerated onto the lattice")
        mu = np.array([(s[0, 0] - s[1, 1]) / 2.0 for s in spins])
        up = np.array([s[0, 1] for s in spins])
        dn = np.array([s[1, 0] for s in spins])

        zl = np.array([lat.zeta(lam - z) for z in self.marked])
        pi = p / 2.0 - np.sum(mu * self._zeta0)
        Lmu = pi + np.sum(mu * zl)

        zlam = lat.zeta(lam)
        sQ, sQm = lat.sigma(Q), lat.sigma(-Q)
        zQ, zQm = lat.zeta(Q), lat.zeta(-Q)
        fp = np.empty(self.sites, dtype=complex)
        fm = np.empty(self.sites, dtype=complex)
        dfp = np.empty(self.sites, dtype=complex)
        dfm = np.empty(self.sites, dtype=complex)
        for a, z in enumerate(self.marked):
            za = self._zeta_site[a]
            slz = lat.sigma(lam - z)
            sp, sm = lat.sigma(Q + lam - z), lat.sigma(-Q + lam - z)
            fp[a] = sp / (sQ * slz) * np.exp(-Q * (zlam - za))
            fm[a] = sm / (sQm * slz) * np.exp(Q * (zlam - za))
            if with_grads:
                dfp[a] = 2.0 * fp[a] * (lat.zeta(Q + lam - z) - zQ - zlam + za)
                dfm[a] = -2.0 * fm[a] * (lat.zeta(-Q + lam - z) - zQm - zlam + za)
        Lp = np.sum(up * fp)
        Lm = np.sum(dn * fm)
        if not with_grads:
            return Lmu, Lp, Lm
        # g_a = dL^mu / d mu_a ;  dLp/dq, dLm/dq
        g = zl - self._zeta0
        return Lmu, Lp, Lm, g, fp, fm, np.sum(up * dfp), np.sum(dn * dfm)

    def lax(self, state, lam=None):
        if lam is None:
            raise ValueError("spectral model: lambda required")
        self.pole_guard(lam)
        Lmu, Lp, Lm = self._components(state, lam)
        return Lmu * _H + Lp * _E12 + Lm * _E21

    # -- Hamiltonians and flows -----------------------------------------------
    def hamiltonian(self, flow, state):
        self._check_flow(flow)
        Lmu, Lp, Lm = self._components(state, self.kappas[flow])
        return Lmu * Lmu + Lp * Lm

    def _gradient(self, flow, state):
        """(dH/dq, dH/dp, [grad_a H]) -- matrix gradients in trace pairing."""
        Lmu, Lp, Lm, g, fp, fm, dLp_dq, dLm_dq = self._components(
            state, self.kappas[flow], with_grads=True
        )
        dH_dp = Lmu                       # dL^mu/dp = 1/2, dH = 2 L^mu dL^mu
        dH_dq = Lm * dLp_dq + Lp * dLm_dq
        grads = []
        for a in range(self.sites):
            # (grad_a)_{jk} = dH/d(L_a)_{kj}
            grads.append(np.array([
                [Lmu * g[a], Lp * fm[a]],
                [Lm * fp[a], -Lmu * g[a]],
            ]))
        return dH_dq, dH_dp, grads

    def flow_rhs(self, flow, state):
        """Gauged Hamiltonian vector field of H_flow.

        The residual torus action L_a -> g L_a g^{-1}, g = exp(t H/2),
        is generated by the moment C = sum_a (L_a)^mu; it leaves every
        H_i invariant, so the bare Hamiltonian flows only commute modulo
        this gauge direction.  We fix the gauge slice
        chi = (1/2N) sum_a (log (L_a)_12 - log (L_a)_21) = const by
        subtracting the flow's drift along the gauge orbit (the gauge
        generator moves chi at rate -1), which restores exact
        commutativity of the flows on the constraint surface C = 0.
        """
        self._check_flow(flow)
        _, _, spins = self.unpack(state)
        dH_dq, dH_dp, grads = self._gradient(flow, state)
        spin_dots = [s @ gr - gr @ s for gr, s in zip(grads, spins)]
        # gauge rate lambda = d(chi)/dt along the bare flow
        lam = sum(sd[0, 1] / s[0, 1] - sd[1, 0] / s[1, 0]
                  for s, sd in zip(spins, spin_dots)) / (2.0 * self.sites)
        # gauge generator: updot = -up, dndot = +dn, diagonal untouched
        for s, sd in zip(spins, spin_dots):
            sd[0, 1] -= lam * s[0, 1]
            sd[1, 0] += lam * s[1, 0]
        return self.pack(dH_dp, -dH_dq, spin_dots)

    def m_matrix(self, flow, state, lam=None):
        raise NotImplementedError(
            "elliptic Gaudin exposes no closed-form M-matrix; "
            "use isospectral drift of the Lax spectrum instead"
        )

    def lagrangian(self, flow, state, velocity):
        self._check_flow(flow)
        velocity = np.asarray(velocity, dtype=complex)
        if velocity.shape != (self.dim,):
            raise ValueError("velocity layout must match the packed state")
        _, p, _ = self.unpack(state)
        return p * velocity[0] - self.hamiltonian(flow, state)

    def canonical_chart(self):
        # {q, p} = +1 (so qdot = +dH/dp) plus Kirillov-Kostant blocks on
        # the spins; each block contributes sign * Tr(L [grad f, grad g]).
        chart = CanonicalChart([(0, 1, 1.0)])
        chart.kks = [(2 + 4 * a, 2, -1.0) for a in range(self.sites)]
        return chart

    def random_state(self, rng):
        q = 0.17 + 0.11j + 0.05 * (rng.standard_normal() +
                                   1j * rng.standard_normal())
        # modest amplitude: the complexified dynamics develops pole
        # excursions (sigma(2q) -> 0, spin entries winding through 0) for
        # larger seeds, which ruins finite-time flow comparisons
        p = 0.05 * (rng.standard_normal() + 1j * rng.standard_normal())
        spins = []
        for _ in range(self.sites):
            s = 0.05 * (rng.standard_normal((2, 2)) +
                        1j * rng.standard_normal((2, 2)))
            s -= (np.trace(s) / 2.0) * np.eye(2)
            spins.append(s)
        # enforce the moment constraint sum_a (L_a)^mu = 0 on the last spin
        excess = sum((s[0, 0] - s[1, 1]) / 2.0 for s in spins)
        spins[-1][0, 0] -= excess
        spins[-1][1, 1] += excess
        return self.pack(q, p, spins)

    def state_residual(self, state):
        _, _, spins = self.unpack(state)
        r = abs(sum((s[0, 0] - s[1, 1]) / 2.0 for s in spins))
        r = max(r, max(abs(np.trace(s)) for s in spins))
        return float(r)
