"""Multitime integration of commuting Lax flows and residual functionals.

Fixed-step classical RK4 on the packed chart coordinates (deterministic,
no adaptivity, so residual ledgers are reproducible and the integrator
order is cleanly testable).  A trajectory records the cumulative path
parameter, the states, and the power traces Tr L(lambda)^k at a fixed
probe set, which makes isospectral drift a pure post-processing step.
"""

from __future__ import annotations

import io

import numpy as np

from .matrixcore import power_traces

DEFAULT_STEP = 1e-3
DEFAULT_DELTA = 0.1
STATE_GUARD_TOL = 1e-6


class MultitimePath:
    """Ordered sequence of (flow label, duration, steps) segments."""

    def __init__(self, segments):
        self.segments = []
        for flow, duration, steps in segments:
            duration = float(duration)
            steps = int(steps)
            if not np.isfinite(duration):
                raise ValueError("segment duration must be finite")
            if steps < 1:
                raise ValueError("segment steps must be >= 1")
            self.segments.append((flow, duration, steps))

    @property
    def total_duration(self):
        return sum(abs(d) for _, d, _ in self.segments)


class Trajectory:
    """Samples of a multitime integration with Lax power traces."""

    def __init__(self, times, states, probes, traces, kmax):
        self.times = np.asarray(times, dtype=float)
        self.states = [np.asarray(s, dtype=complex) for s in states]
        self.probes = list(probes)
        #: traces[sample][probe_index, k-1] = Tr L(probe)^k
        self.traces = [np.asarray(t, dtype=complex) for t in traces]
        self.kmax = int(kmax)
        if len(self.states) != len(self.times):
            raise ValueError("sample count mismatch")

    def __len__(self):
        return len(self.states)

    def csv_header(self):
        dim = len(self.states[0])
        cols = ["path_parameter"]
        cols += [f"coord_{i}" for i in range(dim)]
        for p in range(len(self.probes)):
            for k in range(1, self.kmax + 1):
                cols.append(f"trace_probe{p}_pow{k}")
        return cols

    def to_csv(self):
        """Frozen column order: path parameter, coordinates, probe traces
        (probe index-major, power-minor); complex values as a+bj."""
        buf = io.StringIO()
        buf.write(",".join(self.csv_header()) + "\n")
        for t, s, tr in zip(self.times, self.states, self.traces):
            row = [repr(t)]
            row += [format(z, ".17g") for z in s]
            row += [format(z, ".17g") for z in tr.ravel()]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def _rk4_step(model, flow, state, dt):
    k1 = model.flow_rhs(flow, state)
    k2 = model.flow_rhs(flow, state + 0.5 * dt * k1)
    k3 = model.flow_rhs(flow, state + 0.5 * dt * k2)
    k4 = model.flow_rhs(flow, state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _probe_traces(model, state, probes, kmax):
    if not probes:
        return np.zeros((0, kmax), dtype=complex)
    rows = []
    for lam in probes:
        L = model.lax(state, lam) if model.spectral else model.lax(state)
        rows.append(power_traces(L, kmax))
    return np.array(rows)


def integrate_path(model, s0, path, lam_probes=(), kmax=3,
                   guard_tol=STATE_GUARD_TOL):
    """RK4-integrate a multitime path; deterministic given the inputs.

    Raises ``RuntimeError`` (with the offending sample index) when the
    model's state residual exceeds ``guard_tol`` mid-flight.
    """
    if not isinstance(path, MultitimePath):
        path = MultitimePath(path)
    state = np.asarray(s0, dtype=complex).copy()
    times = [0.0]
    states = [state.copy()]
    traces = [_probe_traces(model, state, lam_probes, kmax)]
    t = 0.0
    sample = 0
    for flow, duration, steps in path.segments:
        dt = duration / steps
        for _ in range(steps):
            state = _rk4_step(model, flow, state, dt)
            t += abs(dt)
            sample += 1
            resid = model.state_residual(state)
            if resid > guard_tol:
                raise RuntimeError(
                    f"state invariant violated at sample {sample}: "
                    f"residual {resid:.3e} > {guard_tol:.1e}"
                )
            times.append(t)
            states.append(state.copy())
            traces.append(_probe_traces(model, state, lam_probes, kmax))
    return Trajectory(times, states, lam_probes, traces, kmax)


def commutativity_residual(model, i, j, s0, delta=DEFAULT_DELTA, steps=100):
    """Coordinate-norm defect between flow orders i∘j and j∘i."""
    a = integrate_path(model, s0, [(i, delta, steps), (j, delta, steps)])
    b = integrate_path(model, s0, [(j, delta, steps), (i, delta, steps)])
    return float(np.max(np.abs(a.states[-1] - b.states[-1])))


def closure_residual(model, i, j, s0, delta=DEFAULT_DELTA, grid=8,
                     steps_per_cell=4):
    """Max interior-node residual of d(L_i)/dt^j - d(L_j)/dt^i.

    The on-shell two-parameter family s(t^i, t^j) is built by
    commuting-flow integration on a (grid+1)^2 lattice of spacing
    delta/grid; the Lagrangian coefficients are evaluated with on-shell
    velocities (flow_rhs) and cross-differentiated by second-order
    central differences.
    """
    h = delta / grid
    # first leg along flow i, then fan out along flow j from each node
    base = [np.asarray(s0, dtype=complex)]
    for _ in range(grid):
        leg = integrate_path(model, base[-1], [(i, h, steps_per_cell)])
        base.append(leg.states[-1])
    lattice = []
    for node in base:
        row = [node]
        for _ in range(grid):
            leg = integrate_path(model, row[-1], [(j, h, steps_per_cell)])
            row.append(leg.states[-1])
        lattice.append(row)

    def lag(flow, state):
        return model.lagrangian(flow, state, model.flow_rhs(flow, state))

    resid = 0.0
    for a in range(1, grid):
        for b in range(1, grid):
            dLi_dj = (lag(i, lattice[a][b + 1]) - lag(i, lattice[a][b - 1])) / (2 * h)
            dLj_di = (lag(j, lattice[a + 1][b]) - lag(j, lattice[a - 1][b])) / (2 * h)
            resid = max(resid, abs(dLi_dj - dLj_di))
    return float(resid)


def isospectral_drift(traj, kmax=None):
    """Max drift of Tr L(lambda)^k over the trajectory's probe set."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    kmax = traj.kmax if kmax is None else min(int(kmax), traj.kmax)
    if len(traj) == 1 or not traj.probes:
        return 0.0
    ref = traj.traces[0][:, :kmax]
    return float(max(
        np.max(np.abs(tr[:, :kmax] - ref)) for tr in traj.traces[1:]
    ))
