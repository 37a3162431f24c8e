"""Structural polynomials of the deformed ladder algebra.

The ladder operators of each sector obey [V_-, V_+] = psi(V_0 + 1) - psi(V_0)
for a polynomial psi that vanishes at both sector boundaries and is positive
inside. hg and Dicke have factored closed forms; fc polynomials are
tabulated from ladder matrix elements (exact integers) and interpolated
exactly when an off-lattice value is required.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import ratpoly
from .models import Family, ModelSpec
from .sectors import Sector


@dataclass(frozen=True)
class StructuralPoly:
    """Factored form psi(x) = leading * prod_i (x + offsets[i]).

    l0 and dim record the sector it was resolved for, so boundary and
    positivity identities can be checked without carrying the sector.
    """

    leading: Fraction
    offsets: tuple[Fraction, ...]
    l0: Fraction
    dim: int

    @property
    def degree(self) -> int:
        return len(self.offsets)

    def eval_exact(self, x: Fraction) -> Fraction:
        out = self.leading
        for b in self.offsets:
            out *= x + b
        return out

    def eval(self, x: float) -> float:
        out = float(self.leading)
        for b in self.offsets:
            out *= x + float(b)
        return out

    def value_at_level(self, v: int) -> Fraction:
        """psi(l_0 + v), exact."""
        return self.eval_exact(self.l0 + v)

    def level_values(self) -> tuple[Fraction, ...]:
        """psi(l_0 + v) for v = 0..dim."""
        return tuple(self.value_at_level(v) for v in range(self.dim + 1))

    def level_poly(self) -> tuple[Fraction, ...]:
        """Coefficients (ascending) of p(f) = psi(l_0 + 1 + f)."""
        roots = tuple(-b for b in self.offsets)
        coeffs = ratpoly.poly_from_roots(self.leading, roots)
        return ratpoly.poly_shift(coeffs, self.l0 + 1)


@dataclass(frozen=True)
class TabulatedPsi:
    """psi known only on the sector lattice l_0 + v, v = 0..dim."""

    values: tuple[Fraction, ...]
    l0: Fraction
    dim: int

    def value_at_level(self, v: int) -> Fraction:
        if not 0 <= v <= self.dim:
            raise ValueError(f"lattice point v={v} outside 0..{self.dim}")
        return self.values[v]

    def level_values(self) -> tuple[Fraction, ...]:
        return self.values

    @property
    def degree(self) -> int:
        return len(ratpoly.trim(self.level_poly())) - 1

    def level_poly(self) -> tuple[Fraction, ...]:
        """Exact interpolating polynomial p(f) = psi(l_0 + 1 + f) through
        the table; faithful to the operator polynomial only when the
        table has more points than the polynomial degree."""
        fs = [Fraction(v - 1) for v in range(self.dim + 1)]
        return ratpoly.newton_from_table(fs, self.values)

    def eval_exact(self, x: Fraction) -> Fraction:
        u = x - self.l0 - 1
        return ratpoly.poly_eval(self.level_poly(), u)

    def eval(self, x: float) -> float:
        return float(self.eval_exact(Fraction(x).limit_denominator(10**12)))


def su2_psi(j: Fraction | int, l0: Fraction | None = None) -> StructuralPoly:
    """The undeformed su(2) case psi(x) = (x + j)(j + 1 - x).

    Default lattice starts at l_0 = -j with dimension 2j + 1.
    """
    j = Fraction(j)
    if l0 is None:
        l0 = -j
    dim = int(2 * j) + 1
    return StructuralPoly(Fraction(-1), (j, -(j + 1)), l0=l0, dim=dim)


@lru_cache(maxsize=4096)
def structural_poly(model: ModelSpec, sector: Sector):
    """Structural polynomial resolved for one sector.

    hg and Dicke return factored StructuralPoly; fc returns TabulatedPsi
    derived from ladder matrix elements. Raises if any interior lattice
    value is non-positive (a label or bounds bug).
    """
    if sector.model != model:
        raise ValueError("sector was built for a different model")
    if model.family is Family.HG:
        l1 = sector.l1
        n = model.n
        offsets = tuple(Fraction(l1 - i, n) for i in range(n)) + (-(l1 + 1),)
        psi = StructuralPoly(Fraction(-(n ** n)), offsets, l0=sector.l0, dim=sector.dim)
    elif model.family is Family.DICKE:
        n = model.n
        l1, l2 = sector.labels[1], sector.labels[2]
        offsets = (l2, -(l2 + 1)) + tuple(-(l1 + Fraction(n - i, n)) for i in range(n))
        leading = Fraction((-1) ** (n + 1) * n ** n)
        psi = StructuralPoly(leading, offsets, l0=sector.l0, dim=sector.dim)
    else:
        from . import fock

        space = fock.chain_space(model, sector)
        values = fock.derive_psi_numeric(model, sector, space)
        psi = TabulatedPsi(tuple(Fraction(v) for v in values), l0=sector.l0, dim=sector.dim)
    validate_psi(psi)
    return psi


def validate_psi(psi) -> None:
    """Boundary zeros and interior positivity, exact."""
    vals = psi.level_values()
    if vals[0] != 0 or vals[-1] != 0:
        raise ValueError(f"psi must vanish at both sector boundaries, got {vals[0]}, {vals[-1]}")
    for v in range(1, psi.dim):
        if vals[v] <= 0:
            raise ValueError(f"psi(l0+{v}) = {vals[v]} is not positive inside the sector")


def phi(psi, x):
    """Commutator polynomial phi(x) = psi(x + 1) - psi(x).

    Exact for Fraction/int arguments; for TabulatedPsi the argument must
    lie on the sector lattice (x = l_0 + v).
    """
    if isinstance(psi, TabulatedPsi):
        u = Fraction(x) - psi.l0
        if u.denominator != 1 or not 0 <= u <= psi.dim - 1:
            raise ValueError("tabulated psi defines phi only on lattice points l0+v, v < dim")
        v = int(u)
        return psi.values[v + 1] - psi.values[v]
    if isinstance(x, float):
        return psi.eval(x + 1.0) - psi.eval(x)
    return psi.eval_exact(Fraction(x) + 1) - psi.eval_exact(Fraction(x))
