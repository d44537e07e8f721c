"""Tests for the Weierstrass lattice functions."""

import numpy as np
import pytest

from laxlab.elliptic import EllipticLattice, PoleError, weierstrass
from laxlab.matrixcore import make_rng


@pytest.fixture(scope="module")
def lat():
    return EllipticLattice(1.0j)


def test_constructor_rejects_bad_tau():
    with pytest.raises(ValueError):
        EllipticLattice(-1.0j)
    with pytest.raises(ValueError):
        EllipticLattice(0.5)


def test_legendre_relation(lat):
    assert lat.legendre_residual() < 1e-10
    assert EllipticLattice(0.3 + 1.0j).legendre_residual() < 1e-10


def test_zeta_is_odd(lat):
    rng = make_rng(1)
    for _ in range(5):
        z = (0.1 + 0.8 * rng.random()) + 1j * (0.1 + 0.8 * rng.random())
        assert abs(lat.zeta(-z) + lat.zeta(z)) < 1e-12


def test_sigma_small_z_limit(lat):
    z = 1e-4
    assert abs(lat.sigma(z) / z - 1.0) < 1e-6


def test_zeta_derivative_is_minus_wp(lat):
    rng = make_rng(2)
    h = 1e-5
    for _ in range(20):
        z = (0.1 + 0.8 * rng.random()) + 1j * (0.1 + 0.8 * rng.random())
        dzeta = (lat.zeta(z + h) - lat.zeta(z - h)) / (2 * h)
        assert abs(dzeta + lat.wp(z)) < 1e-6


def test_wp_double_periodicity(lat):
    z = 0.31 + 0.27j
    for w in (1.0, lat.tau, 1.0 + lat.tau):
        assert abs(lat.wp(z + w) - lat.wp(z)) < 1e-9


def test_log_sigma_derivative_is_zeta(lat):
    rng = make_rng(3)
    h = 1e-5
    for _ in range(10):
        z = (0.1 + 0.8 * rng.random()) + 1j * (0.1 + 0.8 * rng.random())
        d = (np.log(lat.sigma(z + h)) - np.log(lat.sigma(z - h))) / (2 * h)
        assert abs(d - lat.zeta(z)) < 1e-6


def test_sigma_quasi_period_law(lat):
    # Exponent form settled by direct lattice-sum evaluation: the law
    # sigma(z + 2w) = -sigma(z) exp(2 eta (z + w)) holds; the variant with
    # exponent 2 eta (z + 2w) fails by orders of magnitude.
    rng = make_rng(4)
    for _ in range(5):
        z = (0.05 + 0.4 * rng.random()) + 1j * (0.05 + 0.4 * rng.random())
        for w, eta in ((0.5, lat.eta1), (lat.tau / 2.0, lat.eta2)):
            good = abs(lat.sigma(z + 2 * w) +
                       lat.sigma(z) * np.exp(2 * eta * (z + w)))
            bad = abs(lat.sigma(z + 2 * w) +
                      lat.sigma(z) * np.exp(2 * eta * (z + 2 * w)))
            assert good < 1e-8
            assert bad > 1e-2


def test_zeta_quasi_period_law(lat):
    z = 0.23 + 0.37j
    assert abs(lat.zeta(z + 1.0) - lat.zeta(z) - 2 * lat.eta1) < 1e-10
    assert abs(lat.zeta(z + lat.tau) - lat.zeta(z) - 2 * lat.eta2) < 1e-10


def test_pole_guard(lat):
    for z in (0.0, 1.0, lat.tau, 2.0 + 3.0 * lat.tau, 1e-9):
        with pytest.raises(PoleError):
            lat.zeta(z)
        with pytest.raises(PoleError):
            lat.wp(z)


def test_reduction_consistency(lat):
    # values computed far outside the fundamental cell agree with the
    # quasi-period unfolding
    z = 0.21 + 0.34j
    shift = 3.0 - 2.0 * lat.tau
    assert abs(lat.wp(z + shift) - lat.wp(z)) < 1e-9


def test_weierstrass_tuple(lat):
    z = 0.4 + 0.2j
    p, zeta, sigma = weierstrass(z, lat)
    assert p == lat.wp(z)
    assert zeta == lat.zeta(z)
    assert sigma == lat.sigma(z)
