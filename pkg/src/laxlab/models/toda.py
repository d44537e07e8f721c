"""Open Toda chain in three coordinate charts.

All three charts share the same symmetric tridiagonal Lax matrix

    L = sum_j a_j E_jj + sum_j b_j (E_{j,j+1} + E_{j+1,j}),   sum_j a_j = 0,

of size (N+1) x (N+1), and the first two commuting flows of the hierarchy.
They differ in the coordinates, the splitting used to produce the M-matrix,
and the normalisation of the Hamiltonians:

* ``OpenTodaFlaschka`` -- Flaschka coordinates (a_1..a_{N+1}, b_1..b_N);
  Hamiltonians H_k = -Tr L^{k+1}/(k+1); M-matrices from the skew/triangular
  splitting applied to -L^k.  No Lagrangian description.
* ``OpenTodaUB`` -- canonical chart (u_1..u_N, b_1..b_N) with kinetic
  one-form -sum_j b_j du_j and {b_j, u_k} = delta_{jk}; same Hamiltonians
  and M-matrices as the Flaschka chart, pulled back through
  a_1 = b_1 u_1, a_j = b_j u_j - b_{j-1} u_{j-1}, a_{N+1} = -b_N u_N.
* ``OpenTodaSkew`` -- canonical chart (w_1..w_N, z_1..z_N) with kinetic
  one-form sum_i z_i dw_i, realising the same L through
  a_i = (w_i z_i - w_{i-1} z_{i-1})/2, b_i = z_i/2;  Hamiltonians
  H_1 = Tr L^2, H_2 = (2/3) Tr L^3; M-matrices from the
  triangular/diagonal splitting applied to 2 L^k.
"""

from __future__ import annotations

import numpy as np

from ..dialgebra import Splitting
from .base import CanonicalChart, Model


def tridiag_lax(a, b):
    """Symmetric tridiagonal matrix with diagonal ``a``, off-diagonals ``b``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.diag(a) + np.diag(b, 1) + np.diag(b, -1)


def _pad(x):
    """Return x with a zero prepended and appended (boundary convention)."""
    return np.concatenate(([0.0], x, [0.0]))


class _OpenTodaBase(Model):
    spectral = False
    flows = (1, 2)

    def __init__(self, n_sites):
        if n_sites < 1:
            raise ValueError("need at least one (u, b) pair")
        self.n = int(n_sites)           # number of b's; matrix size n+1

    def pole_guard(self, lam):
        pass

    # Hamiltonians from exact power traces of L; subclasses provide
    # the trace normalisation through _h_coeff.
    def hamiltonian(self, flow, state):
        self._check_flow(flow)
        L = self.lax(self._check_state(state))
        return self._h_coeff(flow) * np.trace(np.linalg.matrix_power(L, flow + 1))

    def m_matrix(self, flow, state, lam=None):
        self._check_flow(flow)
        L = self.lax(self._check_state(state))
        grad = self._m_coeff * np.linalg.matrix_power(L, flow)
        # invariant gradient in sl: remove the trace part (a multiple of the
        # identity, which commutes with L and does not affect the flow)
        grad -= (np.trace(grad) / grad.shape[0]) * np.eye(grad.shape[0])
        return self._split.r_plus(grad)


class OpenTodaFlaschka(_OpenTodaBase):
    """Flaschka chart: state = (a_1..a_{N+1}, b_1..b_N), sum(a) = 0."""

    name = "open-toda-flaschka"
    _m_coeff = -1.0

    def __init__(self, n_sites):
        super().__init__(n_sites)
        self.dim = 2 * self.n + 1
        self._split = Splitting(self.n + 1, "aks")

    def _h_coeff(self, flow):
        return -1.0 / (flow + 1)

    def _ab(self, state):
        return state[: self.n + 1], state[self.n + 1:]

    def lax(self, state, lam=None):
        a, b = self._ab(self._check_state(state))
        return tridiag_lax(a, b)

    def flow_rhs(self, flow, state):
        self._check_flow(flow)
        a, b = self._ab(self._check_state(state))
        bp = _pad(b)                       # bp[j] = b_j with b_0 = b_{N+1} = 0
        bl, br = bp[:-1], bp[1:]           # b_{j-1}, b_j aligned with a_j
        if flow == 1:
            adot = 2.0 * (br**2 - bl**2)
            bdot = b * (a[1:] - a[:-1])
        else:
            adot = 2.0 * br**2 * (a + np.append(a[1:], 0.0)) \
                - 2.0 * bl**2 * (np.append(0.0, a[:-1]) + a)
            # correct the shifted-a padding: br is zero at the last slot and
            # bl at the first, so the padded entries never contribute.
            bext = _pad(b)
            bdot = b * (a[1:]**2 - a[:-1]**2 + bext[2:]**2 - bext[:-2]**2)
        return np.concatenate([adot, bdot])

    def random_state(self, rng):
        a = rng.standard_normal(self.n + 1)
        a -= a.mean()
        b = 0.5 + rng.random(self.n)
        return np.concatenate([a, b]).astype(complex)

    def state_residual(self, state):
        a, _ = self._ab(self._check_state(state))
        return float(abs(a.sum()))


class OpenTodaUB(_OpenTodaBase):
    """Canonical (u, b) chart: state = (u_1..u_N, b_1..b_N)."""

    name = "open-toda-ub"
    _m_coeff = -1.0

    def __init__(self, n_sites):
        super().__init__(n_sites)
        self.dim = 2 * self.n
        self._split = Splitting(self.n + 1, "aks")

    def _h_coeff(self, flow):
        return -1.0 / (flow + 1)

    def _ub(self, state):
        return state[: self.n], state[self.n:]

    def to_flaschka(self, state):
        """Map (u, b) -> (a, b) with a_j = b_j u_j - b_{j-1} u_{j-1}."""
        u, b = self._ub(self._check_state(state))
        v = _pad(b * u)                    # v[j] = b_j u_j, v_0 = v_{N+1} = 0
        return np.concatenate([v[1:] - v[:-1], b])

    def lax(self, state, lam=None):
        fl = self.to_flaschka(state)
        return tridiag_lax(fl[: self.n + 1], fl[self.n + 1:])

    def flow_rhs(self, flow, state):
        self._check_flow(flow)
        u, b = self._ub(self._check_state(state))
        v = _pad(b * u)
        bp = _pad(b)
        dvl = v[1:-1] - v[:-2]             # b_j u_j - b_{j-1} u_{j-1}
        dvr = v[2:] - v[1:-1]              # b_{j+1} u_{j+1} - b_j u_j
        if flow == 1:
            udot = u * dvl - u * dvr + 2.0 * b
            bdot = b * dvr - b * dvl
        else:
            udot = u * (dvl**2 - dvr**2) + u * (bp[:-2]**2 - bp[2:]**2) \
                + 2.0 * b * (v[2:] - v[:-2])
            bdot = b * (dvr**2 - dvl**2) - b * (bp[:-2]**2 - bp[2:]**2)
        return np.concatenate([udot, bdot])

    def lagrangian(self, flow, state, velocity):
        self._check_flow(flow)
        velocity = np.asarray(velocity, dtype=complex)
        if velocity.shape != (self.dim,):
            raise ValueError("velocity layout must match the (u, b) state")
        _, b = self._ub(self._check_state(state))
        kinetic = -np.sum(b * velocity[: self.n])
        return kinetic - self.hamiltonian(flow, state)

    def canonical_chart(self):
        # {b_j, u_k} = delta_{jk}; theta = -sum_j b_j du_j
        pairs = [(self.n + j, j, 1.0) for j in range(self.n)]

        def theta(state):
            th = np.zeros(self.dim, dtype=complex)
            th[: self.n] = -state[self.n:]
            return th

        return CanonicalChart(pairs, theta)

    def random_state(self, rng):
        u = rng.standard_normal(self.n)
        b = 0.5 + rng.random(self.n)
        return np.concatenate([u, b]).astype(complex)


class OpenTodaSkew(_OpenTodaBase):
    """Canonical (w, z) chart: state = (w_1..w_N, z_1..z_N)."""

    name = "open-toda-skew"
    _m_coeff = 2.0

    def __init__(self, n_sites):
        super().__init__(n_sites)
        self.dim = 2 * self.n
        self._split = Splitting(self.n + 1, "cartan")

    def _h_coeff(self, flow):
        return 2.0 / (flow + 1)

    def _wz(self, state):
        return state[: self.n], state[self.n:]

    def to_flaschka(self, state):
        """Map (w, z) -> (a, b): a_i = (w_i z_i - w_{i-1} z_{i-1})/2, b_i = z_i/2."""
        w, z = self._wz(self._check_state(state))
        v = _pad(w * z)
        return np.concatenate([(v[1:] - v[:-1]) / 2.0, z / 2.0])

    def lax(self, state, lam=None):
        fl = self.to_flaschka(state)
        return tridiag_lax(fl[: self.n + 1], fl[self.n + 1:])

    def flow_rhs(self, flow, state):
        self._check_flow(flow)
        w, z = self._wz(self._check_state(state))
        v = _pad(w * z)
        zp = _pad(z)
        dvl = v[1:-1] - v[:-2]             # w_i z_i - w_{i-1} z_{i-1}
        dvr = v[2:] - v[1:-1]              # w_{i+1} z_{i+1} - w_i z_i
        if flow == 1:
            wdot = z - (w / 2.0) * (dvr - dvl)
            zdot = (z / 2.0) * (dvr - dvl)
        else:
            bracket = dvr**2 - dvl**2 + zp[2:]**2 - zp[:-2]**2
            zdot = (z / 4.0) * bracket
            wdot = (z / 2.0) * (dvr + dvl) - (w / 4.0) * bracket
        return np.concatenate([wdot, zdot])

    def lagrangian(self, flow, state, velocity):
        self._check_flow(flow)
        velocity = np.asarray(velocity, dtype=complex)
        if velocity.shape != (self.dim,):
            raise ValueError("velocity layout must match the (w, z) state")
        _, z = self._wz(self._check_state(state))
        kinetic = np.sum(z * velocity[: self.n])
        return kinetic - self.hamiltonian(flow, state)

    def canonical_chart(self):
        # {z_i, w_j} = delta_{ij}; theta = sum_i z_i dw_i
        pairs = [(self.n + i, i, 1.0) for i in range(self.n)]

        def theta(state):
            th = np.zeros(self.dim, dtype=complex)
            th[: self.n] = state[self.n:]
            return th

        return CanonicalChart(pairs, theta)

    def random_state(self, rng):
        w = rng.standard_normal(self.n)
        z = 0.5 + rng.random(self.n)
        return np.concatenate([w, z]).astype(complex)
