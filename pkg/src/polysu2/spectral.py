"""Exact sector spectra via the three-term-recurrence formulation.

In the orthonormal chain basis the sector Hamiltonian minus its constant
offset C is a real symmetric Jacobi matrix (the coupling phase is gauged
into the basis). The production solver brackets every eigenvalue with
Sturm sign counts and bisection, refines once (Newton on the pivot
recurrence, or a Rayleigh quotient when eigenvectors are computed), and
obtains eigenvectors by inverse iteration with reorthogonalization of
close pairs. A coefficient-level orthogonal-polynomial solver is kept as
an independent small-scale cross-check.
"""

from __future__ import annotations

import cmath
import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels, ratpoly
from .models import ModelSpec
from .sectors import Sector, coefficients_C_Delta
from .structural import structural_poly

# Bracket width for bisection, as a fraction of the Gershgorin spread.
BISECT_REL_TOL = 1e-13
# Eigenvalue pairs closer than this (relative to spread) share an
# orthogonalization cluster.
CLUSTER_REL_GAP = 1e-8
# Columns are sign-fixed on the first entry exceeding this times the max.
SIGN_ANCHOR_FLOOR = 1e-200

LITERAL_CAP = 20


@dataclass(frozen=True, eq=False)
class JacobiMatrix:
    """Sector Hamiltonian (minus C) in the gauged orthonormal basis.

    diag[v] = Delta * (l_0 + v); offdiag[v-1] = |g| sqrt(psi(l_0 + v))
    couples levels v-1 and v. phase records arg(g) gauged out of the
    basis; offset records C.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    offset: float
    phase: float
    sector: Sector

    def __post_init__(self):
        if self.offdiag.size and float(np.min(self.offdiag)) <= 0.0:
            raise ValueError("broken chain: off-diagonal entries must be positive")

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    def gershgorin(self) -> tuple[float, float]:
        b = np.concatenate(([0.0], self.offdiag, [0.0]))
        radius = b[:-1] + b[1:]
        return float(np.min(self.diag - radius)), float(np.max(self.diag + radius))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag[:, None] * x if x.ndim == 2 else self.diag * x
        if self.size > 1:
            if x.ndim == 2:
                y[:-1] += self.offdiag[:, None] * x[1:]
                y[1:] += self.offdiag[:, None] * x[:-1]
            else:
                y[:-1] += self.offdiag * x[1:]
                y[1:] += self.offdiag * x[:-1]
        return y

    def toarray(self) -> np.ndarray:
        m = np.diag(self.diag)
        if self.size > 1:
            m += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return m


@dataclass(frozen=True, eq=False)
class SectorSpectrum:
    """Eigenvalues (relative to C, ascending) and orthonormal amplitudes.

    amplitudes[v, f] is the weight of chain level v in eigenvector f, in
    the gauged (real) basis; None when only eigenvalues were requested.
    Columns are sign-fixed on the lowest level with representable weight,
    which is the Q_0 > 0 convention away from underflow.
    """

    sector: Sector
    eigenvalues: np.ndarray
    amplitudes: np.ndarray | None
    c_offset: float
    detuning: float
    coupling: complex
    jacobi: JacobiMatrix

    @property
    def energies(self) -> np.ndarray:
        return self.c_offset + self.eigenvalues

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    def residual(self) -> float:
        """max_f ||J q_f - lambda_f q_f||_inf; requires amplitudes."""
        if self.amplitudes is None:
            raise ValueError("spectrum was computed without eigenvectors")
        r = self.jacobi.matvec(self.amplitudes) - self.amplitudes * self.eigenvalues[None, :]
        return float(np.max(np.abs(r)))


def build_jacobi(model: ModelSpec, sector: Sector, psi=None) -> JacobiMatrix:
    """Jacobi matrix of a sector; the coupling phase is gauged away so the
    matrix is real regardless of arg(g)."""
    if psi is None:
        psi = structural_poly(model, sector)
    c, delta = coefficients_C_Delta(model, sector)
    s = sector.dim - 1
    diag = delta * (float(sector.l0) + np.arange(sector.dim, dtype=float))
    vals = psi.level_values()
    off = np.sqrt([float(vals[v]) for v in range(1, s + 1)]) * abs(model.coupling)
    return JacobiMatrix(
        diag=diag,
        offdiag=np.asarray(off, dtype=float),
        offset=c,
        phase=cmath.phase(model.coupling),
        sector=sector,
    )


def sturm_count(jacobi: JacobiMatrix, lam) -> int | np.ndarray:
    """Number of eigenvalues strictly below lam (scalar or array), by the
    scaled sign-count pivot recurrence."""
    off2 = jacobi.offdiag * jacobi.offdiag
    arr = np.atleast_1d(np.asarray(lam, dtype=float))
    counts = _kernels.sturm_count_batch(jacobi.diag, off2, arr)
    if np.isscalar(lam) or np.asarray(lam).ndim == 0:
        return int(counts[0])
    return counts


def _orthogonalize_clusters(q: np.ndarray, lams: np.ndarray, gap: float) -> None:
    """Modified Gram-Schmidt inside runs of nearly equal eigenvalues."""
    n = lams.shape[0]
    start = 0
    while start < n - 1:
        end = start
        while end + 1 < n and lams[end + 1] - lams[end] < gap:
            end += 1
        if end > start:
            for k in range(start + 1, end + 1):
                for m in range(start, k):
                    q[:, k] -= (q[:, m] @ q[:, k]) * q[:, m]
                q[:, k] /= np.linalg.norm(q[:, k])
        start = end + 1


def _fix_column_signs(q: np.ndarray) -> None:
    scale = np.max(np.abs(q), axis=0) * SIGN_ANCHOR_FLOOR
    for k in range(q.shape[1]):
        nz = np.nonzero(np.abs(q[:, k]) > scale[k])[0]
        anchor = nz[0] if nz.size else 0
        if q[anchor, k] < 0:
            q[:, k] = -q[:, k]


def solve_sector(model: ModelSpec, sector: Sector, compute_vectors: bool = True,
                 psi=None) -> SectorSpectrum:
    """Full sector eigensolve.

    Eigenvalues are returned relative to C, ascending; at zero detuning
    the spectrum is antisymmetric. Dimensions 1 and 2 short-circuit to
    closed forms.
    """
    jac = build_jacobi(model, sector, psi=psi)
    n = jac.size
    if n == 1:
        lam = np.zeros(1)
        q = np.ones((1, 1)) if compute_vectors else None
        return _spectrum(model, sector, jac, lam, q)
    if n == 2:
        a0, a1 = jac.diag
        b = jac.offdiag[0]
        mid = 0.5 * (a0 + a1)
        rad = math.hypot(0.5 * (a0 - a1), b)
        lam = np.array([mid - rad, mid + rad])
        q = None
        if compute_vectors:
            q = np.empty((2, 2))
            for k in (0, 1):
                vec = np.array([b, lam[k] - a0])
                nrm = np.linalg.norm(vec)
                if nrm == 0.0:  # b > 0 prevents this, keep a guard
                    vec = np.array([1.0, 0.0])
                    nrm = 1.0
                q[:, k] = vec / nrm
            _fix_column_signs(q)
        return _spectrum(model, sector, jac, lam, q)

    lo, hi = jac.gershgorin()
    spread = max(hi - lo, 1e-30)
    off2 = jac.offdiag * jac.offdiag
    lam = _kernels.bisect_eigenvalues(jac.diag, off2, lo, hi, BISECT_REL_TOL * spread)
    if not compute_vectors:
        lam = _kernels.newton_refine_batch(jac.diag, off2, lam, 2.0 * BISECT_REL_TOL * spread)
        return _spectrum(model, sector, jac, np.sort(lam), None)
    q = _kernels.inverse_iteration(jac.diag, jac.offdiag, lam, 2)
    _orthogonalize_clusters(q, lam, CLUSTER_REL_GAP * spread)
    lam = _kernels.rayleigh_quotients(jac.diag, jac.offdiag, q)
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    q = q[:, order]
    _fix_column_signs(q)
    return _spectrum(model, sector, jac, lam, q)


def _spectrum(model, sector, jac, lam, q) -> SectorSpectrum:
    return SectorSpectrum(
        sector=sector,
        eigenvalues=np.asarray(lam, dtype=float),
        amplitudes=q,
        c_offset=jac.offset,
        detuning=coefficients_C_Delta(model, sector)[1],
        coupling=model.coupling,
        jacobi=jac,
    )


def normalization_log_weights(model: ModelSpec, sector: Sector, psi=None) -> np.ndarray:
    """log N(v) for v = 0..s, with N(v) = prod_{r=1..v} psi(l_0+r)^{-1/2}."""
    if psi is None:
        psi = structural_poly(model, sector)
    vals = psi.level_values()
    logs = np.array([0.0] + [math.log(float(vals[v])) for v in range(1, sector.dim)])
    return -0.5 * np.cumsum(logs)


def amplitude_recurrence_residual(spec: SectorSpectrum, psi=None) -> float:
    """Max violation of the defining three-term relation on the scaled
    amplitudes N(v) Q_v^f, over all (v, f) including both boundary rows."""
    if spec.amplitudes is None:
        raise ValueError("spectrum was computed without eigenvectors")
    model = spec.sector.model
    r = spec.jacobi.matvec(spec.amplitudes) - spec.amplitudes * spec.eigenvalues[None, :]
    logn = normalization_log_weights(model, spec.sector, psi=psi)
    with np.errstate(under="ignore"):
        weights = np.exp(logn)
    return float(np.max(np.abs(r) * weights[:, None]))


def _sign_changes(seq_signs: list[int]) -> int:
    changes = 0
    prev = seq_signs[0]
    for s in seq_signs[1:]:
        if s == 0:
            s = -prev if prev != 0 else 1
        if prev != 0 and s != prev:
            changes += 1
        prev = s
    return changes


def literal_polynomial_solve(model: ModelSpec, sector: Sector, cap: int = LITERAL_CAP,
                             psi=None) -> SectorSpectrum:
    """Small-scale solver that follows the orthogonal-polynomial recipe
    directly: build the polynomial sequence P_v(lambda) by recurrence,
    find the admissible lambda as roots of the boundary equation, then
    recover amplitudes from P_v values and the normalization condition.

    Values of P_v overflow double range once psi products grow, hence the
    dimension cap. Exact rational coefficients are used for the sequence;
    root isolation counts sign agreements of the evaluated sequence.
    """
    if sector.dim > cap:
        raise ValueError(f"literal solver capped at dim <= {cap}")
    jac = build_jacobi(model, sector, psi=psi)
    if psi is None:
        psi = structural_poly(model, sector)
    n = jac.size
    if n == 1:
        return _spectrum(model, sector, jac, np.zeros(1), np.ones((1, 1)))

    g2 = Fraction(abs(model.coupling)) ** 2
    _, delta = coefficients_C_Delta(model, sector)
    delta_f = Fraction(delta)
    l0 = sector.l0
    vals = psi.level_values()

    # P_0 .. P_{s+1} as exact coefficient lists (ascending powers of lambda).
    polys: list[tuple[Fraction, ...]] = [(Fraction(1),)]
    first = (-delta_f * l0, Fraction(1))
    polys.append(first)
    for v in range(1, n):
        lin = (-delta_f * (l0 + v), Fraction(1))
        term = ratpoly.poly_mul(lin, polys[v])
        prev = ratpoly.poly_mul((g2 * Fraction(vals[v]),), polys[v - 1])
        coeffs = tuple(
            (term[i] if i < len(term) else Fraction(0))
            - (prev[i] if i < len(prev) else Fraction(0))
            for i in range(max(len(term), len(prev)))
        )
        polys.append(ratpoly.trim(coeffs))
    boundary = polys[n]  # degree s+1; its roots are the eigenvalues

    float_polys = [np.array([float(c) for c in p]) for p in polys]

    def seq_at(x: float) -> list[float]:
        return [float(np.polyval(p[::-1], x)) for p in float_polys]

    def roots_below(x: float) -> int:
        return _sign_changes([0 if v == 0 else (1 if v > 0 else -1) for v in seq_at(x)]) and 0 or 0

    # number of boundary-polynomial roots below x = sign agreements in the
    # sequence; equivalently n - sign changes.
    def count_below(x: float) -> int:
        signs = []
        for v in seq_at(x):
            signs.append(0 if v == 0.0 else (1 if v > 0.0 else -1))
        return n - _sign_changes(signs)

    lo, hi = jac.gershgorin()
    pad = 1e-9 * max(hi - lo, 1.0)
    lo, hi = lo - pad, hi + pad
    lam = np.empty(n)
    bpoly = float_polys[n]

    def bval(x: float) -> float:
        return float(np.polyval(bpoly[::-1], x))

    for i in range(n):
        a, c = lo, hi
        for _ in range(200):
            if c - a <= 1e-14 * max(abs(a), abs(c), 1.0):
                break
            mid = 0.5 * (a + c)
            if count_below(mid) > i:
                c = mid
            else:
                a = mid
        # polish on the boundary polynomial sign within the isolated bracket
        fa = bval(a)
        for _ in range(80):
            mid = 0.5 * (a + c)
            fm = bval(mid)
            if fm == 0.0:
                a = c = mid
                break
            if (fa < 0) == (fm < 0):
                a, fa = mid, fm
            else:
                c = mid
        lam[i] = 0.5 * (a + c)
    lam.sort()

    # Amplitudes: Q_v(lambda_f) proportional to N(v) P_v(lambda_f) / |g|^v,
    # assembled in log space to dodge the over/underflow of both factors.
    logn = normalization_log_weights(model, sector, psi=psi)
    logg = math.log(abs(model.coupling))
    q = np.empty((n, n))
    for f in range(n):
        logs = np.full(n, -np.inf)
        signs = np.zeros(n)
        for v in range(n):
            pv = float(np.polyval(float_polys[v][::-1], lam[f]))
            if pv != 0.0:
                logs[v] = math.log(abs(pv)) + logn[v] - v * logg
                signs[v] = 1.0 if pv > 0 else -1.0
        peak = np.max(logs)
        with np.errstate(under="ignore"):
            col = signs * np.exp(logs - peak)
        q[:, f] = col / np.linalg.norm(col)
    _fix_column_signs(q)
    return _spectrum(model, sector, jac, lam, q)


def spectrum_to_csv(spec: SectorSpectrum, path, precision: int = 17) -> None:
    """Rows (f, lambda, E = C + lambda)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["f", "lambda", "E"])
        for f in range(spec.size):
            w.writerow([
                f,
                f"{spec.eigenvalues[f]:.{precision}g}",
                f"{spec.energies[f]:.{precision}g}",
            ])


def spectrum_to_json(spec: SectorSpectrum, include_amplitudes: bool = False) -> dict:
    out = {
        "sector": spec.sector.to_dict(),
        "c_offset": spec.c_offset,
        "detuning": spec.detuning,
        "coupling": [spec.coupling.real, spec.coupling.imag],
        "gauge_phase": spec.jacobi.phase,
        "eigenvalues": spec.eigenvalues.tolist(),
        "energies": spec.energies.tolist(),
    }
    if include_amplitudes:
        if spec.amplitudes is None:
            raise ValueError("spectrum was computed without eigenvectors")
        out["amplitudes"] = spec.amplitudes.tolist()
    return out


def spectrum_json_dump(spec: SectorSpectrum, path, include_amplitudes: bool = False) -> None:
    with open(path, "w") as fh:
        json.dump(spectrum_to_json(spec, include_amplitudes), fh, indent=1, sort_keys=True)
        fh.write("\n")
