"""Model families and their parameters.

Three families of nonlinear boson / boson-spin Hamiltonians are supported,
all with an interaction that trades one quantum of a pump mode for n quanta
elsewhere (hbar = 1 throughout):

- harmonic generation, hg(n): modes (omega_0, omega_1), interaction
  g (a1+)^n a0 + h.c.; n = 2 is second-harmonic generation.
- frequency conversion, fc(n): modes (omega_0, .., omega_n), interaction
  g a1+ .. an+ a0 + h.c.
- Dicke, dicke(n, M): one mode omega_1 and M two-level atoms with splitting
  epsilon, interaction g J_+ a1^n + h.c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class Family(str, Enum):
    HG = "hg"
    FC = "fc"
    DICKE = "dicke"


@dataclass(frozen=True)
class ModelSpec:
    """Immutable description of one model instance.

    omegas is ordered (omega_0, omega_1, ..) for hg/fc and (omega_1,) for
    dicke. coupling may be complex; only its modulus affects spectra.
    """

    family: Family
    n: int
    omegas: tuple[float, ...]
    coupling: complex = 1.0
    epsilon: float = 0.0
    atoms: int = 0

    def __post_init__(self):
        if abs(self.coupling) <= 0.0:
            raise ValueError("coupling must be nonzero")
        if self.family in (Family.HG, Family.FC):
            if self.n < 2:
                raise ValueError(f"{self.family.value}(n) requires n >= 2, got n={self.n}")
        elif self.n < 1:
            raise ValueError("dicke requires n >= 1")
        expected = {
            Family.HG: 2,
            Family.FC: self.n + 1,
            Family.DICKE: 1,
        }[self.family]
        if len(self.omegas) != expected:
            raise ValueError(
                f"{self.family.value} expects {expected} mode frequencies, got {len(self.omegas)}"
            )
        if self.family is Family.DICKE and self.atoms < 1:
            raise ValueError("dicke requires atoms >= 1")

    @property
    def detuning(self) -> float:
        """Detuning Delta of the pump process against the free evolution.

        hg: n*omega_1 - omega_0; fc: sum(omega_i) - omega_0; dicke:
        epsilon - n*omega_1 (the n-photon resonance condition).
        """
        if self.family is Family.HG:
            return self.n * self.omegas[1] - self.omegas[0]
        if self.family is Family.FC:
            return math.fsum(self.omegas[1:]) - self.omegas[0]
        return self.epsilon - self.n * self.omegas[0]

    @property
    def mode_count(self) -> int:
        return len(self.omegas)

    def to_dict(self) -> dict:
        d = {
            "family": self.family.value,
            "n": self.n,
            "omegas": list(self.omegas),
            "coupling": [self.coupling.real, self.coupling.imag],
        }
        if self.family is Family.DICKE:
            d["epsilon"] = self.epsilon
            d["atoms"] = self.atoms
        return d

    @staticmethod
    def from_dict(d: dict) -> "ModelSpec":
        g = d.get("coupling", 1.0)
        if isinstance(g, (list, tuple)):
            g = complex(g[0], g[1])
        return ModelSpec(
            family=Family(d["family"]),
            n=int(d["n"]),
            omegas=tuple(float(w) for w in d["omegas"]),
            coupling=complex(g),
            epsilon=float(d.get("epsilon", 0.0)),
            atoms=int(d.get("atoms", 0)),
        )


def harmonic_generation(n: int = 2, omega1: float = 1.0, omega0: float | None = None,
                        g: complex = 1.0) -> ModelSpec:
    """hg(n) model; omega0 defaults to the resonance value n*omega1."""
    if omega0 is None:
        omega0 = n * omega1
    return ModelSpec(Family.HG, n, (omega0, omega1), coupling=g)


def second_harmonic(g: complex = 1.0, omega1: float = 1.0) -> ModelSpec:
    """Resonant second-harmonic generation, hg(2) with omega0 = 2*omega1."""
    return harmonic_generation(2, omega1=omega1, g=g)


def frequency_conversion(n: int = 2, omegas: tuple[float, ...] | None = None,
                         omega0: float | None = None, g: complex = 1.0) -> ModelSpec:
    """fc(n) model. omegas are the n converted modes (default all 1.0);
    omega0 defaults to their sum (resonance)."""
    if omegas is None:
        omegas = (1.0,) * n
    if len(omegas) != n:
        raise ValueError(f"fc({n}) needs {n} converted-mode frequencies")
    if omega0 is None:
        omega0 = math.fsum(omegas)
    return ModelSpec(Family.FC, n, (omega0, *omegas), coupling=g)


def dicke(n: int = 1, atoms: int = 1, omega1: float = 1.0,
          epsilon: float | None = None, g: complex = 1.0) -> ModelSpec:
    """n-photon Dicke model with M = atoms two-level atoms.

    epsilon defaults to the n-photon resonance n*omega1.
    """
    if epsilon is None:
        epsilon = n * omega1
    return ModelSpec(Family.DICKE, n, (omega1,), coupling=g, epsilon=epsilon, atoms=atoms)
