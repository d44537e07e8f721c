"""Weierstrass p, zeta, sigma on the lattice Z + tau*Z (periods 2w1=1, 2w2=tau).

The functions are defined by the Eisenstein-regularised lattice sums

    zeta(z)  = 1/z + sum'_w [ 1/(z-w) + 1/w + z/w^2 ]
    p(z)     = 1/z^2 + sum'_w [ 1/(z-w)^2 - 1/w^2 ]
    sigma(z) = z * prod'_w (1 - z/w) exp(z/w + z^2/(2 w^2))

truncated over the symmetric box |m|, |n| <= trunc.  To reach ~1e-14 accuracy
at modest truncation the summands are rewritten *exactly*: the Taylor tail of
each regularised term is peeled off through order J, the odd-power lattice
sums cancel identically over the symmetric box, and the remaining even-power
coefficients (the Eisenstein series G4, G6, G8) are evaluated by
exponentially convergent row sums using cotangent-derivative closed forms.
No theta functions or special-function libraries are involved.

Arguments are reduced to the fundamental cell before summing, then zeta and
sigma are unfolded with their quasi-period laws (eta1, eta2 cached at
construction).  The classical sigma quasi-period exponent 2*eta*(z+omega)
is the one realised by these sums (verified by the test-suite oracle).
"""

from __future__ import annotations

import numpy as np

__all__ = ["EllipticLattice", "weierstrass", "PoleError"]

_J = 8   # regularisation order of the master sums
_K = 40  # far-field series length (ratio |z0/w| <= ~0.29, so ~1e-26 tail)


class PoleError(ValueError):
    """Raised when z is within the guard radius of a lattice point."""


def _row_sum_eisenstein(tau: complex, k: int) -> complex:
    """Eisenstein series G_k = sum'_w w^{-k} (k even >= 4) by row sums.

    Rows n != 0 use the closed forms for C_k(x) = sum_m (m+x)^{-k} obtained by
    differentiating pi*cot(pi*x); they decay like exp(-2*pi*|n|*Im(tau)).
    """
    u_pows = {
        # C_k(x) = pi^k * (1+u^2) * poly(u^2) / denom with u = cot(pi x)
        4: (np.array([1.0, 3.0]), 3.0),
        6: (np.array([2.0, 15.0, 15.0]), 15.0),
        8: (np.array([17.0, 231.0, 525.0, 315.0]), 315.0),
    }
    zeta_even = {4: np.pi**4 / 90.0, 6: np.pi**6 / 945.0, 8: np.pi**8 / 9450.0}
    coefs, denom = u_pows[k]
    total = 2.0 * zeta_even[k]
    n = 1
    while n <= 400:
        u = 1.0 / np.tan(np.pi * n * tau)
        u2 = u * u
        poly = 0.0
        for j, c in enumerate(coefs):
            poly += c * u2**j
        term = np.pi**k * (1.0 + u2) * poly / denom
        total += 2.0 * term  # rows n and -n are equal for even k
        if abs(term) < 1e-20 and n > 2:
            break
        n += 1
    return complex(total)


class EllipticLattice:
    """Period lattice Z + tau*Z with cached quasi-period constants."""

    def __init__(self, tau: complex, trunc: int = 60):
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("EllipticLattice: Im(tau) must be positive")
        self.tau = tau
        self.trunc = int(trunc)
        m = np.arange(-self.trunc, self.trunc + 1)
        M, N = np.meshgrid(m, m, indexing="ij")
        w = (M + N * tau).ravel()
        self._w = w[np.abs(w) > 1e-14]  # exclude the origin
        # Split the box into a near shell, summed exactly per call, and a far
        # remainder whose contribution is a convergent power series in z0
        # (|z0/w| <= ~0.29): resum it once into inverse-power sums T_p so
        # each evaluation costs O(near + _K) instead of O(box).
        near = np.abs(self._w) <= 3.5 * max(1.0, abs(tau))
        self._w_near = self._w[near]
        far = self._w[~near]
        pmax = _J + _K + 1
        self._far_pows = np.zeros(pmax + 1, dtype=complex)
        if far.size:
            inv = 1.0 / far
            acc = np.ones_like(inv)
            for p in range(1, pmax + 1):
                acc = acc * inv
                self._far_pows[p] = np.sum(acc)
        self.g4 = _row_sum_eisenstein(tau, 4)
        self.g6 = _row_sum_eisenstein(tau, 6)
        self.g8 = _row_sum_eisenstein(tau, 8)
        self.eta1 = self._zeta_reduced(0.5)
        self.eta2 = self._zeta_reduced(tau / 2.0)

    # -- reduction ---------------------------------------------------------

    def reduce(self, z: complex) -> tuple[complex, int, int]:
        """Write z = z0 + m + n*tau with z0 in the cell centred at 0."""
        z = complex(z)
        y = z.imag / self.tau.imag
        x = z.real - y * self.tau.real
        m = int(np.floor(x + 0.5))
        n = int(np.floor(y + 0.5))
        return z - m - n * self.tau, m, n

    def distance_to_lattice(self, z: complex) -> float:
        z0, _, _ = self.reduce(z)
        return abs(z0)

    # -- core sums on the reduced argument ---------------------------------

    def _z0_powers(self, z0: complex) -> np.ndarray:
        zp = np.empty(_J + _K + 2, dtype=complex)
        zp[0] = 1.0
        for p in range(1, zp.size):
            zp[p] = zp[p - 1] * z0
        return zp

    def _zeta_reduced(self, z0: complex) -> complex:
        w = self._w_near
        master = np.sum(z0 ** (_J + 1) / (w ** (_J + 1) * (z0 - w)))
        # far shell: z0^{J+1}/(w^{J+1}(z0-w)) = -sum_m z0^{J+1+m} / w^{J+2+m}
        zp = self._z0_powers(z0)
        m = np.arange(_K)
        master -= np.sum(zp[_J + 1 + m] * self._far_pows[_J + 2 + m])
        return (
            1.0 / z0
            + master
            - (z0**3 * self.g4 + z0**5 * self.g6 + z0**7 * self.g8)
        )

    def _p_reduced(self, z0: complex) -> complex:
        w = self._w_near
        D = z0**_J * (_J * z0 - (_J + 1) * w) / (w ** (_J + 1) * (z0 - w) ** 2)
        total = -np.sum(D)
        # far shell: -D is the z0-derivative of the zeta master term
        zp = self._z0_powers(z0)
        m = np.arange(_K)
        total += np.sum((_J + 1 + m) * zp[_J + m] * self._far_pows[_J + 2 + m])
        return (
            1.0 / z0**2
            + 3.0 * z0**2 * self.g4
            + 5.0 * z0**4 * self.g6
            + 7.0 * z0**6 * self.g8
            + total
        )

    def _log_sigma_reduced(self, z0: complex) -> complex:
        w = self._w_near
        eps = z0 / w
        rem = np.log1p(-eps)
        epow = np.ones_like(eps)
        for j in range(1, _J + 1):
            epow = epow * eps
            rem = rem + epow / j
        total = np.sum(rem)
        # far shell: log(1-eps) + sum_{j<=J} eps^j/j = -sum_{j>J} eps^j/j
        zp = self._z0_powers(z0)
        j = np.arange(_J + 1, _J + _K + 1)
        total -= np.sum(zp[j] * self._far_pows[j] / j)
        return (
            np.log(z0)
            + total
            - (z0**4 * self.g4 / 4.0 + z0**6 * self.g6 / 6.0 + z0**8 * self.g8 / 8.0)
        )

    # -- public evaluations -------------------------------------------------

    def legendre_residual(self) -> float:
        """|eta1*w2 - eta2*w1 - i*pi/2| with w1 = 1/2, w2 = tau/2."""
        return abs(self.eta1 * self.tau / 2.0 - self.eta2 * 0.5 - 1j * np.pi / 2.0)

    def wp(self, z: complex) -> complex:
        z0, _, _ = self._reduced_checked(z)
        return self._p_reduced(z0)

    def zeta(self, z: complex) -> complex:
        z0, m, n = self._reduced_checked(z)
        return self._zeta_reduced(z0) + 2.0 * m * self.eta1 + 2.0 * n * self.eta2

    def sigma(self, z: complex) -> complex:
        z0, m, n = self._reduced_checked(z)
        eta = 2.0 * m * self.eta1 + 2.0 * n * self.eta2
        phase = -1.0 if (m + n + m * n) % 2 else 1.0
        shift = eta * (z0 + (m + n * self.tau) / 2.0)
        return phase * np.exp(self._log_sigma_reduced(z0) + shift)

    def _reduced_checked(self, z: complex):
        z0, m, n = self.reduce(z)
        if abs(z0) <= 1e-8:
            raise PoleError(f"z = {z} is within 1e-8 of a lattice point")
        return z0, m, n


def weierstrass(z: complex, lat: EllipticLattice) -> tuple[complex, complex, complex]:
    """Return (p(z), zeta(z), sigma(z)) on the given lattice."""
    z0, m, n = lat._reduced_checked(z)
    p = lat._p_reduced(z0)
    zeta = lat._zeta_reduced(z0) + 2.0 * m * lat.eta1 + 2.0 * n * lat.eta2
    eta = 2.0 * m * lat.eta1 + 2.0 * n * lat.eta2
    phase = -1.0 if (m + n + m * n) % 2 else 1.0
    sigma = phase * np.exp(lat._log_sigma_reduced(z0) + eta * (z0 + (m + n * lat.tau) / 2.0))
    return p, zeta, sigma
