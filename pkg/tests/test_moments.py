from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from riuent.moments import (
    TANGLE_BETA_ALPHA,
    TANGLE_BETA_BETA,
    MonomialPoly,
    beta_fit,
    beta_pdf_tau2,
    det3_poly,
    monomial_expectation,
    tangle_even_moment,
)
from riuent.catalog import ghz
from riuent.haar import haar_state
from riuent.polyinv import det3

# ----------------------------------------------------------- exact moments


def test_first_three_even_moments():
    assert tangle_even_moment(1) == Fraction(8, 55)
    assert tangle_even_moment(2) == Fraction(128, 3003)
    assert tangle_even_moment(3) == Fraction(7168, 415701)


def test_higher_moments_need_the_flag():
    with pytest.raises(ValueError, match="allow_large"):
        tangle_even_moment(4)
    assert tangle_even_moment(4, allow_large=True) == Fraction(98304, 11685817)
    assert tangle_even_moment(5, allow_large=True) == Fraction(262144, 56497545)
    assert tangle_even_moment(6, allow_large=True) == Fraction(4194304, 1502700975)


def test_moment_k_range():
    with pytest.raises(ValueError):
        tangle_even_moment(0)
    with pytest.raises(ValueError):
        tangle_even_moment(7, allow_large=True)


def test_moments_decrease():
    vals = [tangle_even_moment(k, allow_large=True) for k in range(1, 7)]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))


# --------------------------------------------------------------- beta fit


def test_beta_fit_tangle_parameters():
    a, b = beta_fit(Fraction(1, 3), Fraction(8, 55))
    assert (a, b) == (Fraction(31, 17), Fraction(62, 17))
    assert (TANGLE_BETA_ALPHA, TANGLE_BETA_BETA) == (a, b)
    # consistency: the fitted Beta reproduces the input moments
    assert a / (a + b) == Fraction(1, 3)
    assert a * (a + 1) / ((a + b) * (a + b + 1)) == Fraction(8, 55)


def test_beta_fit_uniform_is_flat():
    assert beta_fit(Fraction(1, 2), Fraction(1, 3)) == (Fraction(1), Fraction(1))


def test_beta_fit_rejects_degenerate_variance():
    with pytest.raises(ValueError, match="variance"):
        beta_fit(Fraction(1, 2), Fraction(1, 4))
    with pytest.raises(ValueError, match="variance"):
        beta_fit(Fraction(1, 2), Fraction(1, 5))


def test_beta_pdf_tau2_normalized():
    val, err = quad(lambda x: float(beta_pdf_tau2(x)), 1e-12, 1.0, limit=200)
    assert val == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        beta_pdf_tau2(0.0)
    with pytest.raises(ValueError):
        beta_pdf_tau2(1.5)
    out = beta_pdf_tau2(np.array([0.1, 0.5, 1.0]))
    assert out.shape == (3,)
    assert np.all(out[:2] > 0)
    assert out[2] == 0.0  # (1 - tau)^(beta - 1) kills the right endpoint


# -------------------------------------------------- sphere monomial means


def test_monomial_expectation_basics():
    # E|psi_1|^2 = 1/d and E|psi_1|^4 = 2/(d(d+1)) on the unit sphere
    assert monomial_expectation((1,), 8) == Fraction(1, 8)
    assert monomial_expectation((2,), 8) == Fraction(1, 36)
    assert monomial_expectation((1, 1), 2) == Fraction(1, 6)
    assert monomial_expectation((0,), 3) == Fraction(1)
    # trailing zero exponents are allowed past d, nonzero ones are not
    assert monomial_expectation((1, 0, 0), 2) == Fraction(1, 2)
    with pytest.raises(ValueError):
        monomial_expectation((1, 1, 1), 2)
    with pytest.raises(ValueError):
        monomial_expectation((-1,), 2)


def test_monomial_expectation_total_mass():
    # sum over the multinomial expansion of (sum |psi_i|^2)^2 = 1
    total = (
        monomial_expectation((2, 0), 2)
        + 2 * monomial_expectation((1, 1), 2)
        + monomial_expectation((0, 2), 2)
    )
    assert total == Fraction(1)


def test_monomial_expectation_montecarlo_spotcheck(rng):
    z = rng.standard_normal((20000, 3)) + 1j * rng.standard_normal((20000, 3))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    p = np.abs(z) ** 2
    est = float(np.mean(p[:, 0] ** 2 * p[:, 1]))
    exact = float(monomial_expectation((2, 1), 3))
    assert est == pytest.approx(exact, rel=0.05)


# --------------------------------------------------------- the polynomial


def test_det3_poly_matches_numeric_det3():
    poly = det3_poly()
    assert poly.nvars == 8
    assert poly.degree() == 4
    assert len(poly) == 12
    for seed in (0, 1, 2):
        psi = haar_state((2, 2, 2), seed)
        flat = psi.array.ravel()
        assert complex(poly.evaluate(flat)) == pytest.approx(det3(psi), abs=1e-12)
    assert complex(poly.evaluate(ghz(3).array.ravel())) == pytest.approx(0.25)


def test_monomial_poly_algebra():
    x = MonomialPoly(2, {(1, 0): 1})
    y = MonomialPoly(2, {(0, 1): 1})
    s = x + y
    assert len(s) == 2
    sq = s * s
    assert sq.terms[(1, 1)] == 2
    assert sq.terms[(2, 0)] == 1
    assert sq == s**2
    assert (s**0).terms == {(0, 0): 1}
    assert s**3 == s * s * s
    with pytest.raises(ValueError):
        s ** (-1)
    with pytest.raises(ValueError):
        MonomialPoly(2, {(1, 0, 0): 1})
    assert s.evaluate([2.0, 3.0]) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        s.evaluate([1.0])


def test_monomial_poly_hash_consistency():
    a = MonomialPoly(2, {(1, 1): 3})
    b = MonomialPoly(2, {(1, 1): 3})
    assert a == b
    assert hash(a) == hash(b)
    assert a != MonomialPoly(2, {(1, 1): 2})


def test_moment_one_matches_polynomial_route():
    # independent recomputation of <tau^2> straight from the definition:
    # tau^2 = 16 |det3|^2, expanded monomial by monomial
    poly = det3_poly()
    total = Fraction(0)
    for expo, coeff in poly.terms.items():
        total += Fraction(coeff * coeff) * monomial_expectation(expo, 8)
    assert 16 * total == Fraction(8, 55)
