"""Exact rational moments of the 3-tangle over Haar-random pure states.

The tangle of a 3-qubit state is tau = 4 |Det3(C)|, so its even powers
tau^(2k) = 16^k Det3^k conj(Det3)^k are polynomials in the amplitudes and
their conjugates. For a Haar-random unit vector psi in C^d,

    < prod_i |psi_i|^(2 p_i) > = (d-1)! prod_i p_i! / (sum_i p_i + d - 1)!

and every mixed term with unequal holomorphic and anti-holomorphic
exponents averages to zero (each amplitude carries an independent uniform
phase). Since Det3 has integer coefficients, conj(Det3) is the same
polynomial in the conjugated variables, and the even moments reduce to a
diagonal sum of squared coefficients weighted by the expectation above.
All arithmetic is in fractions.Fraction, so the results are exact.

The odd moments involve |Det3| to an odd power and are not polynomial;
<tau> = 1/3 in particular is checked by Monte Carlo elsewhere, never
computed here.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

import numpy as np

__all__ = [
    "MonomialPoly",
    "det3_poly",
    "monomial_expectation",
    "tangle_even_moment",
    "beta_fit",
    "beta_pdf_tau2",
    "TANGLE_BETA_ALPHA",
    "TANGLE_BETA_BETA",
]


class MonomialPoly:
    """Sparse polynomial with exact coefficients, keyed by exponent tuples.

    Supports +, * and ** with like-term combination; zero coefficients are
    never stored. Coefficients may be int or Fraction.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = int(nvars)
        clean = {}
        for expo, coeff in (terms or {}).items():
            key = tuple(int(e) for e in expo)
            if len(key) != self.nvars or any(e < 0 for e in key):
                raise ValueError(f"bad exponent tuple {expo!r} for {self.nvars} variables")
            if coeff:
                clean[key] = clean.get(key, 0) + coeff
                if not clean[key]:
                    del clean[key]
        self.terms = clean

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MonomialPoly)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other: "MonomialPoly") -> "MonomialPoly":
        if not isinstance(other, MonomialPoly) or other.nvars != self.nvars:
            return NotImplemented
        out = dict(self.terms)
        for expo, coeff in other.terms.items():
            acc = out.get(expo, 0) + coeff
            if acc:
                out[expo] = acc
            else:
                out.pop(expo, None)
        return MonomialPoly(self.nvars, out)

    def __mul__(self, other: "MonomialPoly") -> "MonomialPoly":
        if not isinstance(other, MonomialPoly) or other.nvars != self.nvars:
            return NotImplemented
        out: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                acc = out.get(key, 0) + ca * cb
                if acc:
                    out[key] = acc
                else:
                    out.pop(key, None)
        return MonomialPoly(self.nvars, out)

    def __pow__(self, k: int) -> "MonomialPoly":
        if k < 0:
            raise ValueError("negative powers are not defined")
        result = MonomialPoly(self.nvars, {(0,) * self.nvars: 1})
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def evaluate(self, values) -> complex:
        """Numeric evaluation; values is a length-nvars sequence."""
        vals = np.asarray(values)
        if vals.shape != (self.nvars,):
            raise ValueError(f"need {self.nvars} values")
        total = 0.0 + 0.0j
        for expo, coeff in self.terms.items():
            term = complex(coeff)
            for v, e in zip(vals, expo):
                if e:
                    term *= v**e
            total += term
        return total


def det3_poly() -> MonomialPoly:
    """The 2x2x2 hyperdeterminant as an exact 12-monomial polynomial.

    Variables are the amplitudes c_000 .. c_111 in binary order; the sign
    convention matches polyinv.det3 (GHZ evaluates to +1/4).
    """

    def expo(*idx):
        e = [0] * 8
        for i in idx:
            e[i] += 1
        return tuple(e)

    terms = {
        expo(0, 0, 7, 7): 1,
        expo(1, 1, 6, 6): 1,
        expo(2, 2, 5, 5): 1,
        expo(3, 3, 4, 4): 1,
        expo(0, 1, 6, 7): -2,
        expo(0, 2, 5, 7): -2,
        expo(0, 3, 4, 7): -2,
        expo(1, 2, 5, 6): -2,
        expo(1, 3, 4, 6): -2,
        expo(2, 3, 4, 5): -2,
        expo(0, 3, 5, 6): 4,
        expo(1, 2, 4, 7): 4,
    }
    return MonomialPoly(8, terms)


def monomial_expectation(p, d: int | None = None) -> Fraction:
    """Haar average of prod_i |psi_i|^(2 p_i) on the unit sphere in C^d.

    p may be shorter than d; missing exponents are zero. Exact.
    """
    expo = tuple(int(e) for e in p)
    if any(e < 0 for e in expo):
        raise ValueError("exponents must be nonnegative")
    if d is None:
        d = len(expo)
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if len(expo) > d:
        if any(expo[d:]):
            raise ValueError(f"{len(expo)} exponents for dimension {d}")
        expo = expo[:d]
    num = factorial(d - 1)
    for e in expo:
        num *= factorial(e)
    return Fraction(num, factorial(sum(expo) + d - 1))


def tangle_even_moment(k: int, allow_large: bool = False) -> Fraction:
    """<tau^(2k)> over Haar 3-qubit states, exact.

    k up to 3 is instant; 4 <= k <= 6 must be requested with allow_large
    (the k-th power of the 12-term polynomial stays small, a few thousand
    monomials at k = 6, so "large" is a contract guard more than a cost).
    """
    k = int(k)
    if not 1 <= k <= 6:
        raise ValueError("k must be between 1 and 6")
    if k >= 4 and not allow_large:
        raise ValueError("pass allow_large=True for k >= 4")
    power = det3_poly() ** k
    total = Fraction(0)
    for expo, coeff in power.terms.items():
        total += Fraction(coeff * coeff) * monomial_expectation(expo, 8)
    return Fraction(16) ** k * total


def beta_fit(m1, m2) -> tuple[Fraction, Fraction]:
    """Moment-method Beta(alpha, beta) fit from the first two raw moments.

    alpha = m (m(1-m)/v - 1), beta = (1-m) (m(1-m)/v - 1) with
    v = m2 - m1^2. Exact over rationals; raises on nonpositive variance.
    """
    m1 = Fraction(m1)
    m2 = Fraction(m2)
    v = m2 - m1 * m1
    if v <= 0:
        raise ValueError("variance must be positive to fit a Beta distribution")
    f = m1 * (1 - m1) / v - 1
    return m1 * f, (1 - m1) * f


TANGLE_BETA_ALPHA, TANGLE_BETA_BETA = beta_fit(Fraction(1, 3), Fraction(8, 55))


def beta_pdf_tau2(x):
    """Density of tau^2 when tau follows the fitted Beta(31/17, 62/17).

    By the chain rule P(tau^2 = x) = Beta_pdf(sqrt(x)) / (2 sqrt(x)); the
    domain is 0 < x <= 1. Accepts scalars or arrays.
    """
    from scipy.special import beta as beta_function

    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr <= 0.0) or np.any(arr > 1.0):
        raise ValueError("tau^2 density is defined on (0, 1]")
    a = float(TANGLE_BETA_ALPHA)
    b = float(TANGLE_BETA_BETA)
    t = np.sqrt(arr)
    pdf_tau = t ** (a - 1.0) * (1.0 - t) ** (b - 1.0) / beta_function(a, b)
    out = pdf_tau / (2.0 * t)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out
