"""Lie dialgebra kernels: splittings, R-brackets, r-matrix kernels, residuals.

Two concrete splittings of sl(n) are shipped:

* ``aks``: g+ = skew-symmetric matrices, g- = upper-triangular traceless
  matrices, R = P+ - P-, R+- = +-P+-; the unique decomposition X = S + U
  (S skew, U upper triangular) is fixed by the strictly-lower part of X.
* ``cartan``: g = n+ (strict upper) + h (diagonal) + n- (strict lower),
  R = P+ - P-, R+- = +-(P+- + P0/2).

Tensor kernels: the rational r(lam,mu) = C12/(mu-lam) and the cyclotomic
non-skew kernel r(lam,mu) = (1/T) sum_k (sigma^k x 1)C12 / (mu - omega^{-k}lam)
with sigma(E_ij) = omega^{j-i} E_ij.  ``cybe_residual`` checks the classical
Yang-Baxter equation in the three-leg tensor space.
"""

from __future__ import annotations

import numpy as np

from .matrixcore import basis_matrix, commutator, embed_pair, norm

__all__ = [
    "Splitting",
    "split_apply",
    "r_bracket",
    "mcybe_residual",
    "RKernel",
    "cybe_residual",
    "invariant_gradient",
    "dialgebra_lax_rhs",
    "omega_identity_residual",
    "sigma_twist",
]

_TRACE_TOL = 1e-10


class Splitting:
    """A direct-sum splitting of sl(n) realising R = P+ - P-."""

    def __init__(self, n: int, family: str):
        if family not in ("aks", "cartan"):
            raise ValueError(f"unknown splitting family {family!r}")
        if n < 2:
            raise ValueError("Splitting: n must be >= 2")
        self.n = n
        self.family = family

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        if X.shape != (self.n, self.n):
            raise ValueError("Splitting: dimension mismatch")
        if abs(np.trace(X)) > _TRACE_TOL * max(1.0, norm(X)):
            raise ValueError("Splitting: matrix is not traceless")
        return X

    # component projectors -------------------------------------------------

    def p_plus(self, X: np.ndarray) -> np.ndarray:
        X = self._check(X)
        if self.family == "aks":
            low = np.tril(X, -1)
            return low - low.T  # skew part fixed by the strictly-lower entries
        return np.triu(X, 1)

    def p_minus(self, X: np.ndarray) -> np.ndarray:
        X = self._check(X)
        if self.family == "aks":
            return X - self.p_plus(X)  # upper-triangular complement
        return np.tril(X, -1)

    def p_zero(self, X: np.ndarray) -> np.ndarray:
        X = self._check(X)
        if self.family == "aks":
            return np.zeros_like(X)
        return np.diag(np.diag(X))

    # the R-operator and its halves ----------------------------------------

    def r(self, X: np.ndarray) -> np.ndarray:
        return self.p_plus(X) - self.p_minus(X)

    def r_plus(self, X: np.ndarray) -> np.ndarray:
        if self.family == "aks":
            return self.p_plus(X)
        return self.p_plus(X) + 0.5 * self.p_zero(X)

    def r_minus(self, X: np.ndarray) -> np.ndarray:
        if self.family == "aks":
            return -self.p_minus(X)
        return -(self.p_minus(X) + 0.5 * self.p_zero(X))


def split_apply(X: np.ndarray, s: Splitting) -> tuple[np.ndarray, np.ndarray]:
    """Return (R+X, R-X); their difference reproduces X exactly."""
    return s.r_plus(X), s.r_minus(X)


def _as_r(s_or_R):
    return s_or_R.r if isinstance(s_or_R, Splitting) else s_or_R


def r_bracket(X: np.ndarray, Y: np.ndarray, s_or_R) -> np.ndarray:
    """Second Lie bracket [X,Y]_R = 1/2([RX,Y] + [X,RY])."""
    R = _as_r(s_or_R)
    return 0.5 * (commutator(R(X), Y) + commutator(X, R(Y)))


def mcybe_residual(X: np.ndarray, Y: np.ndarray, s_or_R) -> float:
    """Norm of [RX,RY] - R([RX,Y] + [X,RY]) + [X,Y]."""
    R = _as_r(s_or_R)
    RX, RY = R(X), R(Y)
    return norm(commutator(RX, RY) - R(commutator(RX, Y) + commutator(X, RY)) + commutator(X, Y))


# ---------------------------------------------------------------------------
# tensor kernels
# ---------------------------------------------------------------------------

def sigma_twist(X: np.ndarray, k: int, omega: complex) -> np.ndarray:
    """Order-T automorphism power sigma^k(E_ij) = omega^{k(j-i)} E_ij."""
    n = X.shape[0]
    i = np.arange(n)
    phase = omega ** (k * (i[None, :] - i[:, None]))
    return X * phase


class RKernel:
    """Two-point r-matrix kernel on gl_n (x) gl_n.

    family 'rational': r(lam,mu) = C12/(mu-lam).
    family 'cyclotomic': (1/T) sum_k (sigma^k (x) 1) C12 / (mu - omega^{-k} lam).
    """

    def __init__(self, n: int, family: str = "rational", T: int = 1, omega: complex | None = None):
        if family not in ("rational", "cyclotomic"):
            raise ValueError(f"unknown kernel family {family!r}")
        self.n = int(n)
        self.family = family
        self.T = 1 if family == "rational" else int(T)
        if self.T < 1:
            raise ValueError("RKernel: T must be >= 1")
        self.omega = complex(omega) if omega is not None else np.exp(2j * np.pi / self.T)

    def _guard(self, lam: complex, mu: complex):
        for k in range(self.T):
            if abs(mu - self.omega ** (-k) * lam) < 1e-10:
                raise ValueError("RKernel: spectral points are omega-equivalent")

    def eval(self, lam: complex, mu: complex) -> np.ndarray:
        self._guard(lam, mu)
        n, T, om = self.n, self.T, self.omega
        out = np.zeros((n * n, n * n), dtype=complex)
        i = np.arange(n)
        diff = i[None, :] - i[:, None]  # j - i
        coef = np.zeros((n, n), dtype=complex)
        for k in range(T):
            coef += om ** (k * diff) / (mu - om ** (-k) * lam)
        coef /= T
        for a in range(n):
            for b in range(n):
                out += coef[a, b] * np.kron(basis_matrix(n, a, b), basis_matrix(n, b, a))
        return out


def cybe_residual(k: RKernel, lam: complex, mu: complex, nu: complex) -> float:
    """Norm of [r12, r13] + [r12, r23] + [r32, r13] in the three-leg space."""
    pts = (lam, mu, nu)
    for a in range(3):
        for b in range(a + 1, 3):
            for p in range(k.T):
                if abs(pts[a] - k.omega**p * pts[b]) < 1e-10:
                    raise ValueError("cybe_residual: coincident or omega-equivalent points")
    n = k.n
    r12 = embed_pair(k.eval(lam, mu), (1, 2), n)
    r13 = embed_pair(k.eval(lam, nu), (1, 3), n)
    r23 = embed_pair(k.eval(mu, nu), (2, 3), n)
    r32 = embed_pair(k.eval(nu, mu), (3, 2), n)
    return norm(commutator(r12, r13) + commutator(r12, r23) + commutator(r32, r13))


# ---------------------------------------------------------------------------
# invariant functions and the dialgebra Lax right-hand side
# ---------------------------------------------------------------------------

def invariant_gradient(L: np.ndarray, k: int) -> np.ndarray:
    """Gradient of H_k = Tr(L^{k+1})/(k+1) under the trace pairing: L^k."""
    if k < 1:
        raise ValueError("invariant_gradient: k must be >= 1")
    return np.linalg.matrix_power(np.asarray(L, dtype=complex), k)


def dialgebra_lax_rhs(L: np.ndarray, k: int, coeff: complex, s: Splitting, sign: str = "+") -> np.ndarray:
    """[R+-(coeff * L^k), L]: the Lax hierarchy right-hand side.

    ``coeff`` is a per-model normalisation of the invariant Hamiltonian; the
    '+' and '-' choices differ by [grad H(L), L] = 0, hence agree.
    """
    grad = coeff * invariant_gradient(L, k)
    # the trace part of the gradient is central and drops out of the
    # commutator, so remove it before applying the triangular projectors
    grad -= np.trace(grad) / grad.shape[0] * np.eye(grad.shape[0])
    half = s.r_plus(grad) if sign == "+" else s.r_minus(grad)
    return commutator(half, L)


def omega_identity_residual(z1: complex, z2: complex, l: int, T: int, omega: complex | None = None) -> float:
    """Residual of the root-of-unity partial-fraction identity.

    z1^(T-1-[l]) z2^([l]) / (z1^T - z2^T) = (1/T) sum_k omega^{-kl} / (z1 - omega^k z2),
    with [l] the representative of l mod T.
    """
    om = complex(omega) if omega is not None else np.exp(2j * np.pi / T)
    lm = l % T
    lhs = z1 ** (T - 1 - lm) * z2**lm / (z1**T - z2**T)
    rhs = sum(om ** (-k * l) / (z1 - om**k * z2) for k in range(T)) / T
    return abs(lhs - rhs)
