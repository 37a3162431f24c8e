"""Exact polynomial arithmetic over rationals.

Small helper layer used to expand factored structural polynomials, to
reconstruct polynomials from integer lattice tables (Newton form), and to
divide out known root factors without floating-point noise. Coefficient
lists are ascending (c[0] + c[1]*x + ...), entries are Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Coeffs = tuple[Fraction, ...]


def trim(coeffs: Sequence[Fraction]) -> Coeffs:
    """Drop trailing zero coefficients (the zero polynomial keeps one term)."""
    c = list(coeffs)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_eval(coeffs: Sequence[Fraction], x):
    """Horner evaluation; exact if x is Fraction/int, float otherwise."""
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> Coeffs:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return trim(out)


def poly_from_roots(leading: Fraction, roots: Sequence[Fraction]) -> Coeffs:
    """Expand leading * prod(x - r) into monomial coefficients."""
    coeffs: Coeffs = (Fraction(leading),)
    for r in roots:
        coeffs = poly_mul(coeffs, (-Fraction(r), Fraction(1)))
    return coeffs


def poly_shift(coeffs: Sequence[Fraction], h: Fraction) -> Coeffs:
    """Coefficients of p(x + h)."""
    out = (Fraction(coeffs[-1]),)
    for c in reversed(coeffs[:-1]):
        out = poly_mul(out, (Fraction(h), Fraction(1)))
        out = trim((out[0] + c,) + out[1:])
    return out


def poly_divmod(num: Sequence[Fraction], den: Sequence[Fraction]) -> tuple[Coeffs, Coeffs]:
    """Long division; returns (quotient, remainder), both exact."""
    den = trim(den)
    if den == (Fraction(0),):
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(c) for c in num]
    q = [Fraction(0)] * max(1, len(rem) - len(den) + 1)
    dlead = den[-1]
    for k in range(len(rem) - len(den), -1, -1):
        factor = rem[k + len(den) - 1] / dlead
        q[k] = factor
        if factor != 0:
            for j, dj in enumerate(den):
                rem[k + j] -= factor * dj
    return trim(q), trim(rem[: len(den) - 1] or [Fraction(0)])


def newton_from_table(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> Coeffs:
    """Monomial coefficients of the interpolating polynomial through (xs, ys).

    Divided differences in exact arithmetic; xs must be distinct.
    """
    n = len(xs)
    if n != len(ys):
        raise ValueError("xs and ys length mismatch")
    dd = [Fraction(y) for y in ys]
    newton = [dd[0]]
    for order in range(1, n):
        for i in range(n - order):
            dd[i] = (dd[i + 1] - dd[i]) / (Fraction(xs[i + order]) - Fraction(xs[i]))
        newton.append(dd[0])
    # Horner-style expansion of the Newton form into monomials.
    coeffs: Coeffs = (newton[-1],)
    for k in range(n - 2, -1, -1):
        coeffs = poly_mul(coeffs, (-Fraction(xs[k]), Fraction(1)))
        coeffs = trim((coeffs[0] + newton[k],) + coeffs[1:])
    return trim(coeffs)
