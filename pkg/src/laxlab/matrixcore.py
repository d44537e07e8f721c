"""Dense complex matrix algebra, tensor-leg embeddings, finite differences, RNG.

Conventions used throughout the package:

* every residual is measured with the max-abs-entry norm :func:`norm`;
* all scalar observables of interest are holomorphic in the (complex) chart
  coordinates, so a central difference with a *real* step yields the complex
  derivative directly;
* randomness always flows through an explicitly seeded generator.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "norm",
    "commutator",
    "power_traces",
    "embed_pair",
    "flip_tensor",
    "basis_matrix",
    "central_diff",
    "grad_fd",
    "dir_diff",
    "matrix_grad_fd",
    "make_rng",
    "random_complex",
    "random_traceless",
]

DEFAULT_FD_STEP = 1e-6

# coefficients of the 5-point fourth-order central first-derivative stencil
_STENCIL4 = ((-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0))


def norm(a) -> float:
    """Max absolute entry of an array (the package-wide residual norm)."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix commutator AB - BA."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"commutator: incompatible shapes {a.shape} vs {b.shape}")
    return a @ b - b @ a


def power_traces(L: np.ndarray, kmax: int) -> np.ndarray:
    """(Tr L, Tr L^2, ..., Tr L^kmax) by iterated multiplication."""
    if kmax < 1:
        raise ValueError("power_traces: kmax must be >= 1")
    L = np.asarray(L, dtype=complex)
    out = np.empty(kmax, dtype=complex)
    P = L.copy()
    out[0] = np.trace(P)
    for k in range(1, kmax):
        P = P @ L
        out[k] = np.trace(P)
    return out


def basis_matrix(n: int, i: int, j: int) -> np.ndarray:
    """Elementary matrix E_ij (zero-based indices)."""
    E = np.zeros((n, n), dtype=complex)
    E[i, j] = 1.0
    return E


def flip_tensor(M: np.ndarray, n: int) -> np.ndarray:
    """Exchange the two legs of an n^2 x n^2 tensor-product operator."""
    T = np.asarray(M).reshape(n, n, n, n)
    return T.transpose(1, 0, 3, 2).reshape(n * n, n * n)


def embed_pair(M: np.ndarray, target_legs: tuple[int, int], n: int) -> np.ndarray:
    """Place a two-leg operator on the named legs of a three-leg space.

    ``target_legs`` is an ordered pair from {1,2,3}; descending order applies
    the leg flip first, so e.g. ``(3,2)`` embeds flip(M) on legs (2,3).
    """
    i, j = target_legs
    if i == j or not {i, j} <= {1, 2, 3}:
        raise ValueError(f"embed_pair: invalid target legs {target_legs}")
    if i > j:
        return embed_pair(flip_tensor(M, n), (j, i), n)
    M = np.asarray(M, dtype=complex)
    if M.shape != (n * n, n * n):
        raise ValueError("embed_pair: operator shape does not match base dimension")
    eye = np.eye(n, dtype=complex)
    if (i, j) == (1, 2):
        return np.kron(M, eye)
    if (i, j) == (2, 3):
        return np.kron(eye, M)
    # legs (1, 3): row (a, e, c), column (b, f, d) with M indexed [a, c, b, d]
    T = M.reshape(n, n, n, n)
    R = np.einsum("acbd,ef->aecbfd", T, eye)
    return R.reshape(n**3, n**3)


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def central_diff(f, x: np.ndarray, i: int, h: float = DEFAULT_FD_STEP, order: int = 2):
    """Partial derivative of scalar f at x along coordinate i.

    x is a flat complex vector; a real step is used (all package observables
    are holomorphic, so this equals the complex partial derivative).
    """
    x = np.asarray(x, dtype=complex)
    if order == 2:
        xp = x.copy(); xp[i] += h
        xm = x.copy(); xm[i] -= h
        return (f(xp) - f(xm)) / (2.0 * h)
    if order == 4:
        acc = 0.0
        for mult, coef in _STENCIL4:
            xs = x.copy(); xs[i] += mult * h
            acc += coef * f(xs)
        return acc / h
    raise ValueError("central_diff: order must be 2 or 4")


def grad_fd(f, x: np.ndarray, h: float = DEFAULT_FD_STEP, order: int = 2) -> np.ndarray:
    """Finite-difference gradient of a scalar function of a flat vector."""
    x = np.asarray(x, dtype=complex)
    return np.array([central_diff(f, x, i, h, order) for i in range(x.size)])


def dir_diff(f, x: np.ndarray, v: np.ndarray, h: float = DEFAULT_FD_STEP):
    """Directional derivative of (scalar- or array-valued) f along v."""
    x = np.asarray(x, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return (f(x + h * v) - f(x - h * v)) / (2.0 * h)


def matrix_grad_fd(f, A: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Gradient of scalar f(A) under the trace pairing: G_ij = df/dA_ji.

    Uses the fourth-order stencil so the result is accurate enough to drive
    Hamiltonian vector fields (truncation ~ h^4).
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    G = np.zeros_like(A)
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for mult, coef in _STENCIL4:
                As = A.copy()
                As[j, i] += mult * h
                acc += coef * f(As)
            G[i, j] = acc / h
    return G


# ---------------------------------------------------------------------------
# deterministic randomness
# ---------------------------------------------------------------------------

def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator: same seed, same stream."""
    return np.random.default_rng(int(seed))


def random_complex(rng: np.random.Generator, shape, scale: float = 1.0) -> np.ndarray:
    """Uniformly bounded complex array with independent real/imag parts."""
    return scale * (rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape))


def random_traceless(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """Random complex traceless n x n matrix."""
    X = random_complex(rng, (n, n), scale)
    X -= np.trace(X) / n * np.eye(n)
    return X
