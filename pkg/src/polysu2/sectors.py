"""Invariant sectors: quantum numbers, dimensions, enumeration.

Each model Hamiltonian block-diagonalizes over finite-dimensional sectors
labeled by the eigenvalues l_i of its integrals of motion. Labels are exact
rationals (values like (kappa - s)/(n + 1) are not integers), so sector
boundary identities can be checked without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .models import Family, ModelSpec

# Enumeration guard: labels stay comfortably inside exact float/int range
# and sector arrays stay allocatable.
MAX_RAW_LABEL = 50_000_000


@dataclass(frozen=True)
class Sector:
    """One irreducible invariant subspace of a model.

    raw holds the model-native integer labels:
      hg:    (k, s) with 0 <= k <= n-1, s >= 0
      fc:    (kappa_1, .., kappa_n, s) with min(kappa_i) = 0, s >= 0
      dicke: (kappa, 2j) with kappa >= 0, j in {M/2 - floor(M/2), .., M/2}
    labels holds the rational eigenvalues (l_0, l_1, ..). dim = s + 1;
    degeneracy counts identical copies (Dicke quasispin multiplicity).
    """

    model: ModelSpec
    raw: tuple[int, ...]
    labels: tuple[Fraction, ...]
    dim: int
    degeneracy: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("sector dimension must be >= 1")

    @property
    def l0(self) -> Fraction:
        return self.labels[0]

    @property
    def l1(self) -> Fraction:
        return self.labels[1]

    @property
    def s(self) -> int:
        """Top chain level; dim = s + 1."""
        return self.dim - 1

    def to_dict(self) -> dict:
        return {"family": self.model.family.value, "raw_labels": list(self.raw), "dim": self.dim}


@dataclass(frozen=True)
class SectorBounds:
    """Finite enumeration window. max_kappa applies to fc and Dicke labels."""

    max_s: int
    max_kappa: int | None = None

    def __post_init__(self):
        kap = self.max_s if self.max_kappa is None else self.max_kappa
        if self.max_s < 0 or kap < 0:
            raise ValueError("bounds must be nonnegative")
        if self.max_s > MAX_RAW_LABEL or kap > MAX_RAW_LABEL:
            raise ValueError(f"bounds exceed supported label range ({MAX_RAW_LABEL})")

    @property
    def kappa_cap(self) -> int:
        return self.max_s if self.max_kappa is None else self.max_kappa


def hg_sector(model: ModelSpec, k: int, s: int) -> Sector:
    if model.family is not Family.HG:
        raise ValueError("hg_sector needs an hg model")
    n = model.n
    if not 0 <= k <= n - 1:
        raise ValueError(f"hg sector needs 0 <= k <= {n - 1}")
    if s < 0:
        raise ValueError("hg sector needs s >= 0")
    l0 = Fraction(k - s, n + 1)
    l1 = Fraction(k + n * s, n + 1)
    return Sector(model, (k, s), (l0, l1), dim=s + 1)


def fc_sector(model: ModelSpec, kappas: tuple[int, ...], s: int) -> Sector:
    if model.family is not Family.FC:
        raise ValueError("fc_sector needs an fc model")
    n = model.n
    if len(kappas) != n or any(k < 0 for k in kappas) or min(kappas) != 0:
        raise ValueError("fc sector needs n nonnegative kappas with min(kappa) = 0")
    if s < 0:
        raise ValueError("fc sector needs s >= 0")
    tot = sum(kappas)
    l0 = Fraction(tot - s, n + 1)
    l1 = Fraction(tot + n * s, n + 1)
    rest = tuple(Fraction(kappas[i - 1] - kappas[i]) for i in range(1, n))
    return Sector(model, (*kappas, s), (l0, l1, *rest), dim=s + 1)


def spin_multiplicity(twice_j: int, atoms: int) -> int:
    """Number of spin-j irreducible blocks in M spin-1/2 atoms."""
    if twice_j < 0 or twice_j > atoms or (atoms - twice_j) % 2:
        return 0
    k = (atoms - twice_j) // 2
    out = math.comb(atoms, k)
    if k > 0:
        out -= math.comb(atoms, k - 1)
    return out


def dicke_sector(model: ModelSpec, kappa: int, twice_j: int) -> Sector:
    if model.family is not Family.DICKE:
        raise ValueError("dicke_sector needs a dicke model")
    if kappa < 0:
        raise ValueError("dicke sector needs kappa >= 0")
    mult = spin_multiplicity(twice_j, model.atoms)
    if mult == 0:
        raise ValueError(f"no spin-{Fraction(twice_j, 2)} blocks for {model.atoms} atoms")
    j = Fraction(twice_j, 2)
    l0 = -j
    l1 = -j + Fraction(kappa, model.n)
    s = min(twice_j, kappa // model.n)
    return Sector(model, (kappa, twice_j), (l0, l1, j), dim=s + 1, degeneracy=mult)


def enumerate_sectors(model: ModelSpec, bounds: SectorBounds) -> list[Sector]:
    """All sectors with raw labels inside bounds, no duplicates.

    hg: k = 0..n-1 and s = 0..max_s. fc: kappa tuples with min = 0 and
    each kappa <= kappa_cap, s = 0..max_s. Dicke: kappa = 0..kappa_cap and
    every j of nonzero multiplicity (one Sector per (kappa, j), carrying
    the multiplicity as degeneracy).
    """
    out: list[Sector] = []
    if model.family is Family.HG:
        for k in range(model.n):
            for s in range(bounds.max_s + 1):
                out.append(hg_sector(model, k, s))
    elif model.family is Family.FC:
        for kappas in _fc_label_tuples(model.n, bounds.kappa_cap):
            for s in range(bounds.max_s + 1):
                out.append(fc_sector(model, kappas, s))
    else:
        lo = model.atoms % 2
        for kappa in range(bounds.kappa_cap + 1):
            for twice_j in range(lo, model.atoms + 1, 2):
                out.append(dicke_sector(model, kappa, twice_j))
    return out


def _fc_label_tuples(n: int, cap: int):
    """Ordered kappa tuples with min(kappa) = 0 and all entries <= cap."""
    def rec(prefix: tuple[int, ...]):
        if len(prefix) == n:
            if min(prefix) == 0:
                yield prefix
            return
        for k in range(cap + 1):
            yield from rec(prefix + (k,))

    yield from rec(())


def coefficients_C_Delta(model: ModelSpec, sector: Sector) -> tuple[float, float]:
    """Constant sector energy offset C and detuning Delta of the effective
    Hamiltonian H = Delta*V_0 + g*V_+ + g*conj*V_- + C."""
    ls = sector.labels
    if model.family is Family.HG:
        omega0, omega1 = model.omegas
        c = (omega1 + omega0) * float(ls[1])
    elif model.family is Family.FC:
        omega0 = model.omegas[0]
        n = model.n
        # sum_i i * l_{i+1} over i = 1..n-1, then the mode-frequency sums
        weighted = sum(Fraction(i) * ls[i + 1] for i in range(1, n))
        c = omega0 * float(ls[1])
        for jmode in range(1, n + 1):
            c += model.omegas[jmode] / n * float(ls[1] - weighted)
        for jmode in range(1, n):
            c += model.omegas[jmode] * float(sum(ls[i] for i in range(jmode + 1, n + 1)))
    else:
        c = model.n * float(ls[1]) * model.omegas[0]
    return c, model.detuning


def fock_sector_level(model: ModelSpec, occupations: tuple[int, ...]) -> tuple[Sector, int]:
    """Sector and chain level of a product Fock state.

    occupations are ordered like model.omegas: (n_0, n_1, ..) for hg/fc,
    (n_1,) for Dicke (all atoms down, the only product states that are
    chain members without angular-momentum recoupling).
    """
    if any(o < 0 for o in occupations):
        raise ValueError("occupations must be nonnegative")
    if len(occupations) != model.mode_count:
        raise ValueError(f"expected {model.mode_count} occupation numbers")
    if model.family is Family.HG:
        n0, n1 = occupations
        k = n1 % model.n
        f = n1 // model.n
        return hg_sector(model, k, n0 + f), f
    if model.family is Family.FC:
        n0, rest = occupations[0], occupations[1:]
        f = min(rest)
        kappas = tuple(ni - f for ni in rest)
        return fc_sector(model, kappas, n0 + f), f
    kappa = occupations[0]
    return dicke_sector(model, kappa, model.atoms), 0
