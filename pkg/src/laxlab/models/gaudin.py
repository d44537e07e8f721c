"""Rational Gaudin model on a product of coadjoint orbits.

State: group elements phi_1, ..., phi_N of GL(n, C), one per site, packed
row-major into a flat vector.  The Lax matrix is

    L(lambda) = sum_r A_r / (lambda - zeta_r) + Omega,
    A_r = phi_r Lambda_r phi_r^{-1},

with fixed orbit seeds Lambda_r and a constant twist Omega.  Two levels of
commuting flows are implemented per site, generated by

    H_{1,r} = sum_{s != r} Tr(A_r A_s)/(zeta_r - zeta_s) + Tr(A_r Omega),
    H_{2,r} = Tr(A_r F(zeta_r)^2) + Tr(A_r^2 F'(zeta_r)),

where F(lambda) = L(lambda) - A_r/(lambda - zeta_r) is the regular part of
L at zeta_r.  The flows act on the group elements, phi_s' = V_s phi_s, so
each residue evolves by conjugation, A_s' = [V_s, A_s], and the spectrum of
every A_s is preserved exactly.
"""

from __future__ import annotations

import numpy as np

from .base import Model


class RationalGaudin(Model):
    """Flows labelled (k, r) with level k in {1, 2} and site r in 0..N-1."""

    name = "rational-gaudin"
    spectral = True

    def __init__(self, zetas, lambdas, omega_twist=None):
        self.zetas = np.asarray(zetas, dtype=complex)
        self.sites = len(self.zetas)
        if self.sites < 2:
            raise ValueError("need at least two sites")
        if len(set(self.zetas.tolist())) != self.sites:
            raise ValueError("pole positions must be pairwise distinct")
        self.lambdas = [np.asarray(l, dtype=complex) for l in lambdas]
        if len(self.lambdas) != self.sites:
            raise ValueError("one orbit seed per site required")
        self.n = self.lambdas[0].shape[0]
        for l in self.lambdas:
            if l.shape != (self.n, self.n):
                raise ValueError("orbit seeds must share one square shape")
        if omega_twist is None:
            omega_twist = np.zeros((self.n, self.n))
        self.omega_twist = np.asarray(omega_twist, dtype=complex)
        self.dim = self.sites * self.n * self.n
        self.flows = tuple(
            (k, r) for k in (1, 2) for r in range(self.sites)
        )

    # -- state packing --------------------------------------------------
    def unpack(self, state):
        state = self._check_state(state)
        nn = self.n * self.n
        return [
            state[r * nn:(r + 1) * nn].reshape(self.n, self.n)
            for r in range(self.sites)
        ]

    def pack(self, phis):
        return np.concatenate([p.ravel() for p in phis])

    def residues(self, state):
        """Orbit points A_r = phi_r Lambda_r phi_r^{-1}."""
        return [
            phi @ lam @ np.linalg.inv(phi)
            for phi, lam in zip(self.unpack(state), self.lambdas)
        ]

    # -- Lax data --------------------------------------------------------
    def pole_guard(self, lam):
        if np.min(np.abs(lam - self.zetas)) < 1e-8:
            raise ValueError(f"spectral parameter {lam} is at/near a pole")

    def lax(self, state, lam=None):
        if lam is None:
            raise ValueError("rational Gaudin is spectral: lambda required")
        self.pole_guard(lam)
        A = self.residues(state)
        L = self.omega_twist.astype(complex).copy()
        for zr, Ar in zip(self.zetas, A):
            L += Ar / (lam - zr)
        return L

    def _regular_part(self, A, r):
        """F(zeta_r) and F'(zeta_r) with F = L - A_r/(lambda - zeta_r)."""
        F = self.omega_twist.astype(complex).copy()
        Fp = np.zeros_like(F)
        zr = self.zetas[r]
        for s, (zs, As) in enumerate(zip(self.zetas, A)):
            if s == r:
                continue
            F += As / (zr - zs)
            Fp -= As / (zr - zs) ** 2
        return F, Fp

    # -- Hamiltonians ------------------------------------------------------
    def hamiltonian(self, flow, state):
        self._check_flow(flow)
        k, r = flow
        A = self.residues(state)
        F, Fp = self._regular_part(A, r)
        if k == 1:
            return np.trace(A[r] @ F)
        return np.trace(A[r] @ F @ F) + np.trace(A[r] @ A[r] @ Fp)

    # -- flows --------------------------------------------------------------
    def _tangents(self, flow, state):
        """Group tangents V_s with phi_s' = V_s phi_s."""
        k, r = flow
        A = self.residues(state)
        zr = self.zetas[r]
        F, Fp = self._regular_part(A, r)
        V = []
        for s in range(self.sites):
            if s == r:
                if k == 1:
                    V.append(F)
                else:
                    V.append(A[r] @ Fp + Fp @ A[r] + F @ F)
            else:
                V.append(self.m_matrix(flow, state, self.zetas[s]))
        return V

    def flow_rhs(self, flow, state):
        self._check_flow(flow)
        V = self._tangents(flow, state)
        return self.pack([v @ phi for v, phi in zip(V, self.unpack(state))])

    def m_matrix(self, flow, state, lam=None):
        self._check_flow(flow)
        if lam is None:
            raise ValueError("spectral model: lambda required for M")
        k, r = flow
        A = self.residues(state)
        zr = self.zetas[r]
        if k == 1:
            return -A[r] / (lam - zr)
        F, _ = self._regular_part(A, r)
        return -(A[r] @ A[r]) / (lam - zr) ** 2 \
            - (A[r] @ F + F @ A[r]) / (lam - zr)

    # -- Lagrangian coefficients ---------------------------------------------
    def lagrangian(self, flow, state, velocity):
        self._check_flow(flow)
        velocity = np.asarray(velocity, dtype=complex)
        if velocity.shape != (self.dim,):
            raise ValueError("velocity layout must match the packed state")
        phis = self.unpack(state)
        nn = self.n * self.n
        kinetic = 0.0 + 0.0j
        for s, phi in enumerate(phis):
            dphi = velocity[s * nn:(s + 1) * nn].reshape(self.n, self.n)
            kinetic += np.trace(self.lambdas[s] @ np.linalg.inv(phi) @ dphi)
        return kinetic - self.hamiltonian(flow, state)

    def random_state(self, rng):
        phis = []
        for _ in range(self.sites):
            phi = np.eye(self.n) + 0.3 * (
                rng.standard_normal((self.n, self.n))
                + 1j * rng.standard_normal((self.n, self.n))
            )
            phis.append(phi)
        return self.pack(phis)

    def state_residual(self, state):
        # guard against degenerating group elements
        worst = 0.0
        for phi in self.unpack(state):
            det = abs(np.linalg.det(phi))
            if det < 1e-8:
                return float("inf")
            worst = max(worst, 0.0)
        return worst


def default_rational_gaudin(sites=3, n=2, seed=11):
    """A generic small instance used across tests and the CLI."""
    rng = np.random.default_rng(seed)
    zetas = np.arange(1, sites + 1, dtype=float) + 0.25j * np.arange(sites)
    lambdas = [np.diag(rng.standard_normal(n) + 1.0j * np.arange(n))
               for _ in range(sites)]
    omega_twist = np.diag(rng.standard_normal(n))
    return RationalGaudin(zetas, lambdas, omega_twist)
