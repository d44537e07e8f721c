"""Common interface for the finite-dimensional Lax hierarchies.

Every model exposes a small, uniform surface:

* ``flows`` -- ordered tuple of flow labels (hashable, typically ints or
  ``(p, r)`` pairs) identifying the commuting times of the hierarchy.
* ``lax(state, lam)`` -- the Lax matrix.  Spectral models require the
  spectral-parameter argument ``lam``; non-spectral models ignore it.
* ``hamiltonian(flow, state)`` -- scalar Hamiltonian generating ``flow``.
* ``flow_rhs(flow, state)`` -- time derivative of the packed state vector.
* ``m_matrix(flow, state, lam)`` -- the M-matrix of the zero-curvature /
  Lax representation ``dL/dt = [M, L]``.
* ``lagrangian(flow, state, velocity)`` -- the Lagrangian coefficient of
  the flow, evaluated on an arbitrary tangent ``velocity`` (same packing
  as the state).  Models without a Lagrangian description raise
  ``NotImplementedError``.
* ``canonical_chart()`` -- a :class:`CanonicalChart` describing the
  Poisson structure of the coordinates, or ``None``.
* ``random_state(rng)`` -- a generic point of the phase space.
* ``state_residual(state)`` -- violation of the model's on-shell
  constraints (0.0 when unconstrained); used as an integration guard.

States are always packed into flat complex numpy vectors so that generic
integrators and finite-difference tooling can treat all models uniformly.
"""

from __future__ import annotations

import numpy as np


class CanonicalChart:
    """Constant Darboux-type Poisson structure on packed coordinates.

    ``pairs`` is a list of ``(mom, pos, weight)`` index triples meaning
    ``{xi_mom, xi_pos} = weight`` (all other elementary brackets vanish), so

        {f, g} = sum_pairs weight * (df/dxi_mom dg/dxi_pos
                                     - df/dxi_pos dg/dxi_mom).

    With the convention ``xdot = {x, H}`` this reproduces the first-order
    flows of each model (e.g. weight +1 on ``(p, q)`` gives
    ``qdot = -dH/dp``, ``pdot = +dH/dq``).

    ``theta`` (optional) maps a state to the components of the kinetic
    one-form ``theta_alpha(xi) dxi^alpha`` whose exterior derivative is the
    symplectic form; it is required by the double-zero test.
    """

    def __init__(self, pairs, theta=None):
        self.pairs = [(int(m), int(p), complex(w)) for m, p, w in pairs]
        self.theta = theta


class Model:
    """Abstract base; see module docstring for the contract."""

    name = "model"
    #: True when ``lax`` takes a spectral parameter.
    spectral = True
    #: tuple of flow labels, in canonical order.
    flows = ()
    #: packed state dimension.
    dim = 0

    # -- required -----------------------------------------------------
    def lax(self, state, lam=None):
        raise NotImplementedError

    def hamiltonian(self, flow, state):
        raise NotImplementedError

    def flow_rhs(self, flow, state):
        raise NotImplementedError

    def m_matrix(self, flow, state, lam=None):
        raise NotImplementedError

    def random_state(self, rng):
        raise NotImplementedError

    # -- optional ------------------------------------------------------
    def lagrangian(self, flow, state, velocity):
        raise NotImplementedError(f"{self.name} has no Lagrangian coefficients")

    def canonical_chart(self):
        return None

    def state_residual(self, state):
        return 0.0

    def pole_guard(self, lam):
        """Raise ValueError when ``lam`` sits on a pole of the Lax matrix."""

    # -- helpers --------------------------------------------------------
    def _check_flow(self, flow):
        if flow not in self.flows:
            raise KeyError(f"unknown flow {flow!r}; expected one of {self.flows}")

    def _check_state(self, state):
        state = np.asarray(state, dtype=complex)
        if state.shape != (self.dim,):
            raise ValueError(
                f"state must have shape ({self.dim},), got {state.shape}"
            )
        return state
