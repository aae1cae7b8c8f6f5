"""The band quantity P[z_m >= m*v, z_m + a_(m+1) < (m+1)*mu]: the stable
incomplete-gamma-difference evaluation against the expanded term form, direct
2-D quadrature of the joint density, and its own derivative/mass identities.
"""
import math

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from beamharvest.analytic import joint_pdf_next_and_sum
from beamharvest.analytic.bands import (
    band_density,
    band_integral,
    band_mass,
    band_probability,
    band_terms,
    band_upper,
)

CASES = [(2, 1, 1.0), (4, 1, 6.0), (4, 2, 2.0), (4, 3, 0.5),
         (8, 3, 0.25), (8, 7, 1.0), (6, 5, 4.0)]


def test_hand_value_two_antennas():
    # M=2, m=1, mu=1, v=1: P[z_1 >= 1, z_1 + a_2 < 2] = 2e^{-1} - 4e^{-2}
    got = band_probability(2, 1, 1.0, 1.0)
    assert got == pytest.approx(2 * math.exp(-1) - 4 * math.exp(-2), rel=1e-14)


@pytest.mark.parametrize("total,m,mu", CASES)
def test_probability_matches_joint_quadrature(total, m, mu):
    v = mu * 1.3 if mu * 1.3 < band_upper(m, mu) else 0.5 * (mu + band_upper(m, mu))
    # region {x >= 0, y >= m v, x + y < (m+1) mu}: x cannot exceed the corner
    x_hi = (m + 1) * mu - m * v
    ref, err = dblquad(
        lambda y, x: joint_pdf_next_and_sum(total, m, x, y),
        0.0, x_hi, lambda x: m * v, lambda x: (m + 1) * mu - x,
        epsabs=1e-12, epsrel=1e-11)
    got = band_probability(total, m, mu, v)
    assert got == pytest.approx(ref, abs=max(1e-11, 100 * err))


@pytest.mark.parametrize("total,m,mu", CASES)
def test_probability_matches_expanded_terms(total, m, mu):
    terms = band_terms(total, m, mu)
    for v in np.linspace(mu, band_upper(m, mu), 7):
        a = band_probability(total, m, mu, float(v))
        b = terms.value(float(v))
        assert a == pytest.approx(b, abs=1e-9 * max(1.0, abs(a)))


@pytest.mark.parametrize("total,m,mu", CASES)
def test_density_matches_term_derivative(total, m, mu):
    # independent oracle: differentiate the expanded polynomial-exponential
    # form algebraically and compare pointwise
    hi = band_upper(m, mu)
    dterms = band_terms(total, m, mu).derivative()
    for v in np.linspace(mu + 0.05 * (hi - mu), hi - 0.05 * (hi - mu), 5):
        d = band_density(total, m, mu, float(v))
        assert d >= 0.0
        assert d == pytest.approx(-dterms.value(float(v)), rel=2e-5, abs=1e-10)


@pytest.mark.parametrize("total,m,mu", CASES)
def test_density_is_minus_derivative_fd(total, m, mu):
    # finite differences carry the representation noise of band_probability
    # (~1e-12 absolute), so the step is wide and the bar loose
    hi = band_upper(m, mu)
    h = 1e-3 * mu
    for v in np.linspace(mu + 0.1 * (hi - mu), hi - 0.2 * (hi - mu), 4):
        fd = -(band_probability(total, m, mu, v + h)
               - band_probability(total, m, mu, v - h)) / (2 * h)
        d = band_density(total, m, mu, float(v))
        assert d == pytest.approx(fd, rel=5e-3, abs=1e-8)


@pytest.mark.parametrize("total,m,mu", CASES)
def test_density_integrates_to_mass(total, m, mu):
    mass = band_mass(total, m, mu)
    num, err = quad(lambda v: band_density(total, m, mu, v),
                    mu, band_upper(m, mu), epsabs=1e-13, epsrel=1e-11, limit=200)
    assert num == pytest.approx(mass, rel=1e-8, abs=1e-13)


@pytest.mark.parametrize("total,m,mu", CASES)
def test_band_integral_matches_quadrature(total, m, mu):
    num, err = quad(lambda v: band_probability(total, m, mu, v),
                    mu, band_upper(m, mu), epsabs=1e-14, epsrel=1e-11, limit=200)
    # both sides carry ~1e-13 absolute representation noise
    assert band_integral(total, m, mu) == pytest.approx(
        num, rel=1e-6, abs=max(1e-11, 10 * err))


def test_probability_vanishes_at_band_edge():
    for total, m, mu in CASES:
        assert band_probability(total, m, mu, band_upper(m, mu)) == 0.0
        assert band_probability(total, m, mu, band_upper(m, mu) + 0.5) == 0.0


def test_band_arguments_checked():
    with pytest.raises(ValueError):
        band_probability(4, 4, 1.0, 1.0)   # needs m < total
    with pytest.raises(ValueError):
        band_probability(4, 0, 1.0, 1.0)
    with pytest.raises(ValueError):
        band_probability(4, 2, 1.0, 0.5)   # v below the band
    with pytest.raises(ValueError):
        band_probability(64, 2, 1.0, 1.0)  # beyond workspace cap
