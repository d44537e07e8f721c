"""Cyclotomic Gaudin models and their mechanical realisations.

The common Lax shape, equivariant under the order-T twist
sigma(E_ij) = omega^{j-i} E_ij with omega = exp(2 pi i / T), is

    L(lambda) = A0 / lambda + A1 / lambda^2
              + (1/T) sum_{r, k} sigma^k(A_r) / (lambda - omega^k zeta_r)
              + A_inf,

with A0 in the invariant (grade-0) subalgebra, A1 and A_inf of grade -1
and +1 respectively, and finite-site residues A_r/T distributed over the
orbit {omega^k zeta_r} of each pole.  The level-1 Hamiltonians attached to
the poles are the residues of (lambda/2) Tr L(lambda)^2 (with the full
twist orbit counted at the finite sites):

    H_{1,0}   = Tr(A0^2)/2 - sum_r Tr(A1 A_r)/zeta_r + Tr(A1 A_inf),
    H_{1,r}   = Tr(A0 A_r) + Tr(A1 A_r)/zeta_r
              + (1/2T) sum_k Tr(A_r sigma^k A_r)
              + (1/T) sum_{s != r, k} Tr(A_r sigma^k A_s)
                      zeta_r / (zeta_r - omega^k zeta_s)
              + Tr(A_r A_inf) zeta_r,
    H_{1,inf} = -Tr(A_inf C2) - Tr(C1^2)/2,

where C1 = A0 + (1/T) sum sigma^k A_r and C2 = A1 + (1/T) sum
omega^k zeta_r sigma^k A_r are the 1/lambda and 1/lambda^2 coefficients of
L at infinity; the three levels sum to zero by the residue theorem.

Four concrete models share this machinery:

* ``PeriodicToda`` -- T sites (q^i, p_i), A0 = diag(p),
  A1 = sum_i exp(q^i - q^{i+1}) E_{i+1,i} (cyclic), A_inf = sum_i E_{i,i+1}
  (cyclic), no finite poles.  Flows (1,0) and (2,0).
* ``DST`` -- discrete self-trapping chain: (x^i, X_i) with the orbit
  invariant sum_i x^i X_i = 1; A0 = diag(c), single finite pole at zeta_1
  with residue K1 = x X^T, A_inf cyclic shift.  Flows (1,0) (trivial)
  and (1,1).
* ``CoupledTodaDST`` -- L_Toda + beta L_DST on the joint phase space.
* ``CyclotomicGaudin`` -- generic orbit chart: group elements
  (phi0_0, phi0_1, phi_1..phi_N) dressing fixed seeds.
"""

from __future__ import annotations

import numpy as np

from ..dialgebra import sigma_twist
from .base import CanonicalChart, Model


# ---------------------------------------------------------------------------
# shared coefficient container
# ---------------------------------------------------------------------------

class CycloCoefficients:
    """Matrix coefficients (A0, A1, sites, A_inf) of a cyclotomic Lax matrix."""

    def __init__(self, a0, a1, zetas, site_residues, a_inf, twist_order, omega):
        self.a0 = np.asarray(a0, dtype=complex)
        self.a1 = np.asarray(a1, dtype=complex)
        self.zetas = np.asarray(zetas, dtype=complex)
        self.site_residues = [np.asarray(a, dtype=complex) for a in site_residues]
        self.a_inf = np.asarray(a_inf, dtype=complex)
        self.T = int(twist_order)
        self.omega = complex(omega)

    def poles(self):
        """All finite non-zero pole locations (the full twist orbits)."""
        return np.array([
            self.omega ** k * z
            for z in self.zetas for k in range(self.T)
        ])

    def lax(self, lam):
        L = self.a0 / lam + self.a1 / lam ** 2 + self.a_inf
        for zr, Ar in zip(self.zetas, self.site_residues):
            for k in range(self.T):
                L = L + sigma_twist(Ar, k, self.omega) / (
                    self.T * (lam - self.omega ** k * zr)
                )
        return L

    # level-1 Hamiltonians ---------------------------------------------
    def h_origin(self):
        h = 0.5 * np.trace(self.a0 @ self.a0) + np.trace(self.a1 @ self.a_inf)
        for zr, Ar in zip(self.zetas, self.site_residues):
            h -= np.trace(self.a1 @ Ar) / zr
        return h

    def h_site(self, r):
        zr = self.zetas[r]
        Ar = self.site_residues[r]
        h = np.trace(self.a0 @ Ar) + np.trace(self.a1 @ Ar) / zr \
            + np.trace(Ar @ self.a_inf) * zr
        for k in range(self.T):
            h += np.trace(Ar @ sigma_twist(Ar, k, self.omega)) / (2 * self.T)
        for s, (zs, As) in enumerate(zip(self.zetas, self.site_residues)):
            if s == r:
                continue
            for k in range(self.T):
                h += np.trace(Ar @ sigma_twist(As, k, self.omega)) \
                    * zr / (self.T * (zr - self.omega ** k * zs))
        return h

    def h_infinity(self):
        c1 = self.a0.astype(complex).copy()
        c2 = self.a1.astype(complex).copy()
        for zr, Ar in zip(self.zetas, self.site_residues):
            for k in range(self.T):
                tw = sigma_twist(Ar, k, self.omega) / self.T
                c1 += tw
                c2 += self.omega ** k * zr * tw
        return -np.trace(self.a_inf @ c2) - 0.5 * np.trace(c1 @ c1)

    def m_site(self, r, lam):
        """First-flow M-matrix attached to finite site r."""
        zr = self.zetas[r]
        Ar = self.site_residues[r]
        M = np.zeros_like(self.a0)
        for k in range(self.T):
            wk = self.omega ** k
            M -= wk * zr * sigma_twist(Ar, k, self.omega) / (
                self.T * (lam - wk * zr)
            )
        return M

    def m_origin(self, lam):
        return -self.a1 / lam


def _cyclic_shift_matrix(T):
    """sum_i E_{i,i+1} with cyclic index convention."""
    return np.roll(np.eye(T), -1, axis=0).astype(complex)


class _CycloModelBase(Model):
    """Shared pole guard / Lax plumbing for the mechanical realisations."""

    spectral = True

    def coefficients(self, state):
        raise NotImplementedError

    def pole_guard(self, lam):
        lam = complex(lam)
        if abs(lam) < 1e-8:
            raise ValueError("spectral parameter at/near the origin pole")
        poles = self.coefficients_pole_locations()
        if len(poles) and np.min(np.abs(lam - poles)) < 1e-8:
            raise ValueError(f"spectral parameter {lam} at/near a finite pole")

    def coefficients_pole_locations(self):
        return np.array([])

    def lax(self, state, lam=None):
        if lam is None:
            raise ValueError("spectral model: lambda required")
        self.pole_guard(lam)
        return self.coefficients(state).lax(lam)


# ---------------------------------------------------------------------------
# periodic Toda chain
# ---------------------------------------------------------------------------

class PeriodicToda(_CycloModelBase):
    """State (q^1..q^T, p_1..p_T); flows (1, 0) and (2, 0)."""

    name = "periodic-toda"
    flows = ((1, 0), (2, 0))

    def __init__(self, T=3):
        if T < 2:
            raise ValueError("need at least two sites")
        self.T = int(T)
        self.omega = np.exp(2j * np.pi / self.T)
        self.dim = 2 * self.T
        self._shift = _cyclic_shift_matrix(self.T)

    def _qp(self, state):
        return state[: self.T], state[self.T:]

    def _exp_gaps(self, q):
        # a_i = exp(q^i - q^{i+1}), cyclic
        return np.exp(q - np.roll(q, -1))

    def coefficients(self, state):
        q, p = self._qp(self._check_state(state))
        a1 = np.diag(self._exp_gaps(q)[:-1], -1).astype(complex)
        a1[0, -1] = self._exp_gaps(q)[-1]
        return CycloCoefficients(
            np.diag(p), a1, [], [], self._shift, self.T, self.omega
        )

    def hamiltonian(self, flow, state):
        self._check_flow(flow)
        q, p = self._qp(self._check_state(state))
        a = self._exp_gaps(q)
        if flow == (1, 0):
            return 0.5 * np.sum(p ** 2) + np.sum(a)
        co = self.coefficients(state)
        A, B, C = co.a0, co.a1, co.a_inf
        return (np.trace(A @ A @ A) + 3 * np.trace(A @ B @ C)
                + 3 * np.trace(A @ C @ B)) / 3.0

    def flow_rhs(self, flow, state):
        self._check_flow(flow)
        q, p = self._qp(self._check_state(state))
        a = self._exp_gaps(q)
        if flow == (1, 0):
            qdot = -p
            pdot = a - np.roll(a, 1)
            return np.concatenate([qdot, pdot])
        co = self.coefficients(state)
        A, B, C = co.a0, co.a1, co.a_inf
        # analytic gradient of H_{2,0}:
        #   dH/dp_i = (A^2 + BC + CB)_{ii}
        #   dH/dq^i = a_i (AC + CA)_{i,i+1} - a_{i-1} (AC + CA)_{i-1,i}
        dHdp = np.diag(A @ A + B @ C + C @ B)
        ACCA = A @ C + C @ A
        edge = a * np.array(
            [ACCA[i, (i + 1) % self.T] for i in range(self.T)]
        )
        dHdq = edge - np.roll(edge, 1)
        return np.concatenate([-dHdp, dHdq])

    def m_matrix(self, flow, state, lam=None):
        self._check_flow(flow)
        if lam is None:
            raise ValueError("spectral model: lambda required for M")
        self.pole_guard(lam)
        co = self.coefficients(state)
        A, B = co.a0, co.a1
        if flow == (1, 0):
            return -B / lam
        return -(A @ B + B @ A) / lam - (B @ B) / lam ** 2

    def lagrangian(self, flow, state, velocity):
        self._check_flow(flow)
        velocity = np.asarray(velocity, dtype=complex)
        if velocity.shape != (self.dim,):
            raise ValueError("velocity layout must match the (q, p) state")
        _, p = self._qp(self._check_state(state))
        return -np.sum(p * velocity[: self.T]) - self.hamiltonian(flow, state)

    def canonical_chart(self):
        # {p_i, q^j} = delta; theta = -sum_i p_i dq^i
        pairs = [(self.T + i, i, 1.0) for i in range(self.T)]

        def theta(state):
            th = np.zeros(self.dim, dtype=complex)
            th[: self.T] = -state[self.T:]
            return th

        return CanonicalChart(pairs, theta)

    def random_state(self, rng):
        # moderate amplitude keeps the exponential couplings well scaled
        # for finite-difference residual tests
        q = 0.5 * rng.standard_normal(self.T)
        p = 0.5 * rng.standard_normal(self.T)
        return np.concatenate([q, p]).astype(complex)


# ---------------------------------------------------------------------------
# discrete self-trapping chain
# ---------------------------------------------------------------------------

class DST(_CycloModelBase):
    """State (x^1..x^T, X_1..X_T) with sum_i x^i X_i = 1."""

    name = "dst"
    flows = ((1, 0), (1, 1))

    def __init__(self, T=3, zeta1=1.0, c=None):
        if T < 2:
            raise ValueError("need at least two sites")
        self.T = int(T)
        self.omega = np.exp(2j * np.pi / self.T)
        self.zeta1 = complex(zeta1)
        if abs(self.zeta1) < 1e-8:
            raise ValueError("the finite pole must not sit at the origin")
        self.c = (np.arange(1, self.T + 1, dtype=float) / self.T
                  if c is None else np.asarray(c, dtype=complex))
        self.dim = 2 * self.T
        self._shift = _cyclic_shift_matrix(self.T)

    def _xX(self, state):
        return state[: self.T], state[self.T:]

    def coefficients(self, state):
        x, X = self._xX(self._check_state(state))
        return CycloCoefficients(
            np.diag(self.c), np.zeros((self.T, self.T)),
            [self.zeta1], [np.outer(x, X)], self._shift,
            self.T, self.omega,
        )

    def coefficients_pole_locations(self):
        return self.zeta1 * self.omega ** np.arange(self.T)

    def hamiltonian(self, flow, state):
        self._check_flow(flow)
        if flow == (1, 0):
            return 0.5 * np.sum(self.c ** 2) + 0.0j
        return self.coefficients(state).h_site(0)

    def _kernel_sum(self, x, X, skip_k0):
        """(1/T) sum_{k} sum_j omega^{k(j-i)} x^j X_j, optionally without k=0."""
        idx = np.arange(self.T)
        out = np.zeros(self.T, dtype=complex)
        start = 1 if skip_k0 else 0
        for k in range(start, self.T):
            out += (self.omega ** (k * idx) * x * X).sum() \
                * self.omega ** (-k * idx)
        return out / self.T

    def flow_rhs(self, flow, state):
        self._check_flow(flow)
        x, X = self._xX(self._check_state(state))
        if flow == (1, 0):
            return np.zeros(self.dim, dtype=complex)
        ker = self._kernel_sum(x, X, skip_k0=True)
        Xdot = -self.c * X - self.zeta1 * np.roll(X, 1) - ker * X
        xdot = self.c * x + self.zeta1 * np.roll(x, -1) + ker * x
        return np.concatenate([xdot, Xdot])

    def m_matrix(self, flow, state, lam=None):
        self._check_flow(flow)
        if lam is None:
            raise ValueError("spectral model: lambda required for M")
        self.pole_guard(lam)
        if flow == (1, 0):
            return np.zeros((self.T, self.T), dtype=complex)
        return self.coefficients(state).m_site(0, lam)

    def lagrangian(self, flow, state, velocity):
        self._check_flow(flow)
        velocity = np.asarray(velocity, dtype=complex)
        if velocity.shape != (self.dim,):
            raise ValueError("velocity layout must match the (x, X) state")
        _, X = self._xX(self._check_state(state))
        return np.sum(X * velocity[: self.T]) - self.hamiltonian(flow, state)

    def canonical_chart(self):
        # {x^i, X_j} = delta (the orientation induced by theta = X_i dx^i,
        # under which the printed flows are xdot = {x, H}); theta below
        pairs = [(i, self.T + i, 1.0) for i in range(self.T)]

        def theta(state):
            th = np.zeros(self.dim, dtype=complex)
            th[: self.T] = state[self.T:]
            return th

        return CanonicalChart(pairs, theta)

    def random_state(self, rng):
        x = rng.standard_normal(self.T) + 1j * rng.standard_normal(self.T)
        X = rng.standard_normal(self.T) + 1j * rng.standard_normal(self.T)
        X /= np.sum(x * X)
        return np.concatenate([x, X])

    def state_residual(self, state):
        x, X = self._xX(self._check_state(state))
        return float(abs(np.sum(x * X) - 1.0))


# ---------------------------------------------------------------------------
# coupled Toda--DST
# ---------------------------------------------------------------------------

class CoupledTodaDST(_CycloModelBase):
    """State (q, p, x, X), each block of length T; L = L_Toda + beta L_DST."""

    name = "coupled-toda-dst"
    flows = ((1, 0), (1, 1))

    def __init__(self, T=3, zeta1=1.0, c=None, beta=0.5):
        self.toda = PeriodicToda(T)
        self.dst = DST(T, zeta1, c)
        self.T = int(T)
        self.omega = self.dst.omega
        self.zeta1 = self.dst.zeta1
        self.c = self.dst.c
        self.beta = complex(beta)
        self.dim = 4 * self.T
        self._shift = _cyclic_shift_matrix(self.T)

    def _blocks(self, state):
        T = self.T
        return state[:T], state[T:2 * T], state[2 * T:3 * T], state[3 * T:]

    def coefficients(self, state):
        q, p, x, X = self._blocks(self._check_state(state))
        toda_co = self.toda.coefficients(np.concatenate([q, p]))
        return CycloCoefficients(
            toda_co.a0 + self.beta * np.diag(self.c),
            toda_co.a1,
            [self.zeta1], [self.beta * np.outer(x, X)],
            (1.0 + self.beta) * self._shift,
            self.T, self.omega,
        )

    def coefficients_pole_locations(self):
        return self.zeta1 * self.omega ** np.arange(self.T)

    def hamiltonian(self, flow, state):
        self._check_flow(flow)
        co = self.coefficients(state)
        return co.h_origin() if flow == (1, 0) else co.h_site(0)

    def flow_rhs(self, flow, state):
        self._check_flow(flow)
        q, p, x, X = self._blocks(self._check_state(state))
        T, b, z1 = self.T, self.beta, self.zeta1
        a = np.exp(q - np.roll(q, -1))          # a_i = e^{q^i - q^{i+1}}
        al = np.roll(a, 1)                      # a_{i-1}
        xl, xr = np.roll(x, 1), np.roll(x, -1)  # x^{i-1}, x^{i+1}
        Xl, Xr = np.roll(X, 1), np.roll(X, -1)  # X_{i-1}, X_{i+1}
        if flow == (1, 0):
            pdot = (1 + b) * (a - al) + (b / z1) * (al * xl * X - a * x * Xr)
            qdot = -p - b * self.c
            Xdot = (1.0 / z1) * a * Xr
            xdot = -(1.0 / z1) * al * xl
        else:
            ker = self.dst._kernel_sum(x, X, skip_k0=False)
            pdot = (b / z1) * (a * x * Xr - al * xl * X)
            qdot = -b * x * X
            Xdot = -p * X - b * self.c * X - (1.0 / z1) * a * Xr \
                - b * ker * X - (1 + b) * z1 * Xl
            xdot = p * x + b * self.c * x + (1.0 / z1) * al * xl \
                + b * ker * x + (1 + b) * z1 * xr
        return np.concatenate([qdot, pdot, xdot, Xdot])

    def m_matrix(self, flow, state, lam=None):
        self._check_flow(flow)
        if lam is None:
            raise ValueError("spectral model: lambda required for M")
        self.pole_guard(lam)
        co = self.coefficients(state)
        return co.m_origin(lam) if flow == (1, 0) else co.m_site(0, lam)

    def lagrangian(self, flow, state, velocity):
        self._check_flow(flow)
        velocity = np.asarray(velocity, dtype=complex)
        if velocity.shape != (self.dim,):
            raise ValueError("velocity layout must match the (q, p, x, X) state")
        _, p, _, X = self._blocks(self._check_state(state))
        T = self.T
        kinetic = -np.sum(p * velocity[:T]) \
            + self.beta * np.sum(X * velocity[2 * T:3 * T])
        return kinetic - self.hamiltonian(flow, state)

    def canonical_chart(self):
        # {p_i, q^j} = delta, {x^i, X_j} = delta / beta (the orientations
        # induced by theta = -p_i dq^i + beta X_i dx^i, under which the
        # printed flows are Hamiltonian and H_{1,0}, H_{1,1} commute)
        T = self.T
        pairs = [(T + i, i, 1.0) for i in range(T)] \
            + [(2 * T + i, 3 * T + i, 1.0 / self.beta) for i in range(T)]

        def theta(state):
            th = np.zeros(self.dim, dtype=complex)
            th[:T] = -state[T:2 * T]
            th[2 * T:3 * T] = self.beta * state[3 * T:]
            return th

        return CanonicalChart(pairs, theta)

    def random_state(self, rng):
        # Small perturbations of the condensate (q, p) = 0, x = 1, X = 1/T
        # keep the Lagrangian's higher time derivatives moderate, which the
        # lattice-based closure residual needs to stay FD-truncation limited.
        T = self.T
        qp = 0.03 * rng.standard_normal(2 * T).astype(complex)
        x = 1.0 + 0.03 * (rng.standard_normal(T) + 1j * rng.standard_normal(T))
        w = 1.0 + 0.03 * (rng.standard_normal(T) + 1j * rng.standard_normal(T))
        X = w / np.sum(x * w)
        return np.concatenate([qp, x, X])

    def state_residual(self, state):
        _, _, x, X = self._blocks(self._check_state(state))
        return float(abs(np.sum(x * X) - 1.0))


# ---------------------------------------------------------------------------
# generic cyclotomic Gaudin on orbit charts
# ---------------------------------------------------------------------------

def grade_projection(X, grade, omega, T):
    """Projection of X onto the grade-``grade`` eigenspace of sigma."""
    out = np.zeros_like(np.asarray(X, dtype=complex))
    for k in range(T):
        out += omega ** (-k * grade) * sigma_twist(X, k, omega)
    return out / T


class CyclotomicGaudin(_CycloModelBase):
    """Orbit chart: state = (phi0_0, phi0_1, phi_1, ..., phi_N) packed.

    phi0_0 is a group element of grade 0, phi0_1 a grade-1 algebra element,
    and the phi_r are unconstrained group elements.  The Lax coefficients
    are the dressed seeds

        A1  = phi0_0 Lam0_1 phi0_0^{-1},
        A0  = phi0_0 Lam0_0 phi0_0^{-1} + [phi0_1 phi0_0^{-1}, A1],
        A_r = phi_r Lam_r phi_r^{-1},
        A_inf = Lam_inf (non-dynamical).

    Flows (1, r) for r = 0..N with M-matrices -A1/lambda (r = 0) and
    -(1/T) sum_k omega^k zeta_r sigma^k(A_r)/(lambda - omega^k zeta_r).
    """

    name = "cyclotomic-gaudin"

    def __init__(self, T, zetas, lam0_0, lam0_1, lambdas, lam_inf):
        self.T = int(T)
        self.omega = np.exp(2j * np.pi / self.T)
        self.zetas = np.asarray(zetas, dtype=complex)
        if np.min(np.abs(self.zetas)) < 1e-8:
            raise ValueError("finite poles must avoid the origin")
        self.sites = len(self.zetas)
        for r in range(self.sites):
            for s in range(r + 1, self.sites):
                for k in range(self.T):
                    if abs(self.zetas[r] - self.omega ** k * self.zetas[s]) < 1e-8:
                        raise ValueError(
                            "pole orbits must be pairwise disjoint: "
                            f"zeta_{r} and zeta_{s} share a twist orbit")
        self.lam0_0 = np.asarray(lam0_0, dtype=complex)
        self.n = self.lam0_0.shape[0]
        self.lam0_1 = np.asarray(lam0_1, dtype=complex)
        self.lambdas = [np.asarray(l, dtype=complex) for l in lambdas]
        self.lam_inf = np.asarray(lam_inf, dtype=complex)
        # enforce the equivariance grading of the seeds
        for seed, grade, label in (
            (self.lam0_0, 0, "Lam0_0"), (self.lam0_1, -1, "Lam0_1"),
            (self.lam_inf, 1, "Lam_inf"),
        ):
            proj = grade_projection(seed, grade, self.omega, self.T)
            if np.max(np.abs(seed - proj)) > 1e-10:
                raise ValueError(f"{label} must have twist grade {grade}")
        self.dim = (2 + self.sites) * self.n * self.n
        self.flows = tuple((1, r) for r in range(self.sites + 1))

    # -- packing ---------------------------------------------------------
    def unpack(self, state):
        state = self._check_state(state)
        nn = self.n * self.n
        mats = [state[i * nn:(i + 1) * nn].reshape(self.n, self.n)
                for i in range(2 + self.sites)]
        return mats[0], mats[1], mats[2:]

    def pack(self, phi0_0, phi0_1, phis):
        return np.concatenate(
            [phi0_0.ravel(), phi0_1.ravel()] + [p.ravel() for p in phis]
        )

    def coefficients(self, state):
        phi0_0, phi0_1, phis = self.unpack(state)
        inv0 = np.linalg.inv(phi0_0)
        a1 = phi0_0 @ self.lam0_1 @ inv0
        mix = phi0_1 @ inv0
        a0 = phi0_0 @ self.lam0_0 @ inv0 + (mix @ a1 - a1 @ mix)
        residues = [
            phi @ lam @ np.linalg.inv(phi)
            for phi, lam in zip(phis, self.lambdas)
        ]
        return CycloCoefficients(
            a0, a1, self.zetas, residues, self.lam_inf, self.T, self.omega
        )

    def coefficients_pole_locations(self):
        return np.array([
            self.omega ** k * z for z in self.zetas for k in range(self.T)
        ])

    def hamiltonian(self, flow, state):
        self._check_flow(flow)
        _, r = flow
        co = self.coefficients(state)
        return co.h_origin() if r == 0 else co.h_site(r - 1)

    def h_infinity(self, state):
        """Independent Hamiltonian attached to the pole at infinity."""
        return self.coefficients(state).h_infinity()

    def m_matrix(self, flow, state, lam=None):
        self._check_flow(flow)
        if lam is None:
            raise ValueError("spectral model: lambda required for M")
        self.pole_guard(lam)
        co = self.coefficients(state)
        _, r = flow
        return co.m_origin(lam) if r == 0 else co.m_site(r - 1, lam)

    def _site_tangents(self, flow, co):
        """Group tangents (V0_0, V0_1, [V_s]) for flow (1, r)."""
        _, r = flow
        T, om = self.T, self.omega
        if r == 0:
            v00 = co.a0
            # regular part of L at the origin, evaluated at 0
            v01 = co.a_inf.astype(complex).copy()
            for zr, Ar in zip(co.zetas, co.site_residues):
                for k in range(T):
                    v01 -= sigma_twist(Ar, k, om) / (T * om ** k * zr)
            vs = [-co.a1 / zs for zs in co.zetas]
            return v00, v01, vs
        ri = r - 1
        zr = co.zetas[ri]
        Ar = co.site_residues[ri]
        v00 = grade_projection(Ar, 0, om, T)
        v01 = grade_projection(Ar, 1, om, T) / zr
        vs = []
        for s, zs in enumerate(co.zetas):
            if s != ri:
                vs.append(co.m_site(ri, zs))
                continue
            # self-site tangent: drop only the k = 0 pole from M and L,
            # evaluate the regular remainders at zeta_r, and add the
            # invariant-direction piece A_r/T (which acts trivially on A_r)
            m_reg = np.zeros_like(co.a0)
            for k in range(1, T):
                m_reg -= om ** k * sigma_twist(Ar, k, om) / (T * (1 - om ** k))
            l_reg = co.a0 / zr + co.a1 / zr ** 2 + co.a_inf
            for t, (zt, At) in enumerate(zip(co.zetas, co.site_residues)):
                for k in range(T):
                    if t == ri and k == 0:
                        continue
                    l_reg += sigma_twist(At, k, om) / (
                        T * (zr - om ** k * zt)
                    )
            vs.append(m_reg + Ar / T + zr * l_reg)
        return v00, v01, vs

    def flow_rhs(self, flow, state):
        self._check_flow(flow)
        phi0_0, phi0_1, phis = self.unpack(state)
        co = self.coefficients(state)
        v00, v01, vs = self._site_tangents(flow, co)
        d00 = v00 @ phi0_0
        d01 = v00 @ phi0_1 + v01 @ phi0_0
        dphis = [v @ phi for v, phi in zip(vs, phis)]
        return self.pack(d00, d01, dphis)

    def lagrangian(self, flow, state, velocity):
        self._check_flow(flow)
        velocity = np.asarray(velocity, dtype=complex)
        if velocity.shape != (self.dim,):
            raise ValueError("velocity layout must match the packed state")
        phi0_0, _, phis = self.unpack(state)
        nn = self.n * self.n
        co = self.coefficients(state)
        d00 = velocity[:nn].reshape(self.n, self.n)
        kinetic = np.trace(co.a0 @ d00 @ np.linalg.inv(phi0_0))
        for i, phi in enumerate(phis):
            dphi = velocity[(2 + i) * nn:(3 + i) * nn].reshape(self.n, self.n)
            kinetic += np.trace(
                co.site_residues[i] @ dphi @ np.linalg.inv(phi)
            )
        return kinetic - self.hamiltonian(flow, state)

    def random_state(self, rng):
        def smallc(shape):
            return 0.25 * (rng.standard_normal(shape)
                           + 1j * rng.standard_normal(shape))

        eye = np.eye(self.n)
        phi0_0 = grade_projection(eye + smallc((self.n, self.n)),
                                  0, self.omega, self.T)
        phi0_1 = grade_projection(smallc((self.n, self.n)),
                                  1, self.omega, self.T)
        phis = [eye + smallc((self.n, self.n)) for _ in range(self.sites)]
        return self.pack(phi0_0, phi0_1, phis)

    def state_residual(self, state):
        phi0_0, phi0_1, _ = self.unpack(state)
        r = np.max(np.abs(
            phi0_0 - grade_projection(phi0_0, 0, self.omega, self.T)
        ))
        r = max(r, np.max(np.abs(
            phi0_1 - grade_projection(phi0_1, 1, self.omega, self.T)
        )))
        return float(r)
