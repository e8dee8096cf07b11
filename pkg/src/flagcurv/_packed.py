"""Packed-integer evaluator for first-order operators with integer coefficients.

Monomials are packed into one Python int, ``FIELD`` bits per exponent, so a
monomial product is an integer addition.  Polynomials are ``{packed: int}``
dicts.  A Gaussian-rational test polynomial is split into integer real and
imaginary parts after clearing denominators; since every operator handled
here has real integer coefficients the two parts never mix, and the split is
exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

FIELD = 6
MASK = (1 << FIELD) - 1


def pack(mon: tuple[int, ...]) -> int:
    out = 0
    for i, e in enumerate(mon):
        if e > MASK:
            raise OverflowError(f"exponent {e} does not fit in {FIELD} bits")
        out |= e << (FIELD * i)
    return out


class PackedOp:
    """``[(shift, unit, [(packed coefficient monomial, int), ...]), ...]``."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = terms

    @classmethod
    def from_terms(cls, terms: dict) -> PackedOp:
        """Build from ``{var: PolyElement}``; raises if a coefficient is not a real integer."""
        out = []
        for i, c in sorted(terms.items()):
            coeffs = []
            for mon, v in c.items():
                if v.y != 0 or v.x.denominator != 1:
                    raise ValueError("packed evaluator needs real integer coefficients")
                coeffs.append((pack(mon), int(v.x)))
            shift = FIELD * i
            out.append((shift, 1 << shift, coeffs))
        return cls(out)

    def __call__(self, f: dict) -> dict:
        out: dict = {}
        get = out.get
        for m, a in f.items():
            for shift, unit, coeffs in self.terms:
                e = (m >> shift) & MASK
                if e:
                    base = m - unit
                    ae = a * e
                    for cm, cc in coeffs:
                        key = base + cm
                        out[key] = get(key, 0) + ae * cc
        return {k: v for k, v in out.items() if v}


def split_poly(f) -> tuple[dict, dict, int]:
    """Integer real part, integer imaginary part and the common denominator."""
    den = 1
    for v in f.values():
        den = lcm(den, int(v.x.denominator), int(v.y.denominator))
    re, im = {}, {}
    for mon, v in f.items():
        key = pack(mon)
        x = Fraction(int(v.x.numerator), int(v.x.denominator)) * den
        y = Fraction(int(v.y.numerator), int(v.y.denominator)) * den
        if x:
            re[key] = int(x)
        if y:
            im[key] = int(y)
    return re, im, den


def sub(f: dict, g: dict) -> dict:
    out = dict(f)
    for k, v in g.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def max_abs(f: dict) -> int:
    return max((abs(v) for v in f.values()), default=0)
