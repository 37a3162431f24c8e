"""Raw-operator oracle on truncated Fock (x atomic) spaces.

Everything here exists to ground-truth the algebraic layer: collective
operators assembled from bare mode operators, both Hamiltonian forms,
ladder-derived structural-polynomial tables, and dense brute-force sector
spectra for small instances. Nothing in the production solve path depends
on this module.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy import sparse

from .models import Family, ModelSpec
from .sectors import Sector


class TruncationError(RuntimeError):
    """A requested construction leaves the truncated space."""


@dataclass(frozen=True)
class TruncatedSpace:
    """Truncated product basis for a model.

    cutoffs are maximum occupation numbers, ordered like model.omegas.
    Dicke appends M two-valued atomic slots (0 = down, 1 = up); mps basis
    states are plain occupation tuples.
    """

    model: ModelSpec
    cutoffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.cutoffs) != self.model.mode_count:
            raise ValueError("one cutoff per mode required")
        if any(c < 0 for c in self.cutoffs):
            raise ValueError("cutoffs must be nonnegative")

    @cached_property
    def basis(self) -> list[tuple[int, ...]]:
        """Occupation tuples, plus atom bits for Dicke, lexicographic."""
        mode_ranges = [range(c + 1) for c in self.cutoffs]
        if self.model.family is Family.DICKE:
            mode_ranges += [range(2)] * self.model.atoms
        return list(itertools.product(*mode_ranges))

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {state: i for i, state in enumerate(self.basis)}

    @property
    def size(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class SparseOperator:
    """Sparse matrix plus a Hermitian flag the tests can trust."""

    matrix: sparse.csr_matrix
    hermitian: bool = False

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def entries(self):
        coo = self.matrix.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def check_hermitian(self, tol: float = 1e-12) -> bool:
        diff = (self.matrix - self.matrix.conj().T).tocoo()
        return len(diff.data) == 0 or float(np.max(np.abs(diff.data))) <= tol

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _mode_map_operator(space: TruncatedSpace, mapper) -> sparse.csr_matrix:
    """Build ops that send one basis state to (at most) one basis state.

    mapper(state) returns (target_state, amplitude) or None; targets
    outside the truncation are dropped (callers use safe masks).
    """
    rows, cols, vals = [], [], []
    for col, state in enumerate(space.basis):
        hit = mapper(state)
        if hit is None:
            continue
        target, amp = hit
        row = space.index.get(target)
        if row is not None and amp != 0.0:
            rows.append(row)
            cols.append(col)
            vals.append(amp)
    return sparse.csr_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)), shape=(space.size, space.size)
    )


def _diagonal(space: TruncatedSpace, value) -> sparse.csr_matrix:
    return sparse.diags([complex(value(s)) for s in space.basis], format="csr")


def _interaction_multiplicities(model: ModelSpec) -> tuple[int, ...]:
    """How many creation operators act on each non-pump mode in V_+."""
    if model.family is Family.HG:
        return (model.n,)
    return (1,) * model.n


def _vplus_image(model: ModelSpec, state: tuple[int, ...]):
    """(target occupations, squared amplitude) of V_+ on an mps basis state."""
    n0 = state[0]
    if n0 == 0:
        return None
    amp2 = n0
    target = [n0 - 1]
    for mode, mu in enumerate(_interaction_multiplicities(model), start=1):
        ni = state[mode]
        for t in range(1, mu + 1):
            amp2 *= ni + t
        target.append(ni + mu)
    return tuple(target), amp2


def build_collective_ops(model: ModelSpec, space: TruncatedSpace) -> dict[str, SparseOperator]:
    """Collective operators as matrices on the truncated space.

    Keys: "V+", "V-", "V0", "R1", and for fc "R2".."Rn"; Dicke also gets
    "J0", "JJ" (J squared; the quasispin label j is recovered from its
    spectrum). V- is built as the adjoint of V+.
    """
    nmodes = model.mode_count
    npl1 = model.n + 1
    ops: dict[str, SparseOperator] = {}
    if model.family in (Family.HG, Family.FC):
        def vp(state):
            hit = _vplus_image(model, state)
            if hit is None:
                return None
            target, amp2 = hit
            return target, math.sqrt(amp2)

        vplus = _mode_map_operator(space, vp)
        v0 = _diagonal(space, lambda s: Fraction(sum(s[1:]) - s[0], npl1))
        r1 = _diagonal(space, lambda s: Fraction(sum(s[1:]) + model.n * s[0], npl1))
        ops["V+"] = SparseOperator(vplus)
        ops["V-"] = SparseOperator(vplus.conj().T.tocsr())
        ops["V0"] = SparseOperator(v0, hermitian=True)
        ops["R1"] = SparseOperator(r1, hermitian=True)
        if model.family is Family.FC:
            for j in range(2, nmodes):
                rj = _diagonal(space, lambda s, j=j: s[j - 1] - s[j])
                ops[f"R{j}"] = SparseOperator(rj, hermitian=True)
        return ops

    # Dicke: photon slot 0, atom bits 1..M; V_+ = J_+ a^n.
    atoms = model.atoms
    n = model.n
    rows, cols, vals = [], [], []
    for col, state in enumerate(space.basis):
        n1 = state[0]
        if n1 < n:
            continue
        amp_ph = math.sqrt(math.prod(range(n1 - n + 1, n1 + 1)))
        for a in range(atoms):
            if state[1 + a] == 1:
                continue
            target = (n1 - n,) + state[1:1 + a] + (1,) + state[2 + a:]
            row = space.index.get(target)
            if row is not None:
                rows.append(row)
                cols.append(col)
                vals.append(amp_ph)
    vplus = sparse.csr_matrix(
        (np.asarray(vals, dtype=complex), (rows, cols)), shape=(space.size, space.size)
    )
    j0 = _diagonal(space, lambda s: Fraction(2 * sum(s[1:]) - atoms, 2))
    r1 = _diagonal(space, lambda s: Fraction(2 * sum(s[1:]) - atoms, 2) + Fraction(s[0], n))
    jp_rows, jp_cols, jp_vals = [], [], []
    for col, state in enumerate(space.basis):
        for a in range(atoms):
            if state[1 + a] == 1:
                continue
            target = state[:1 + a] + (1,) + state[2 + a:]
            jp_rows.append(space.index[target])
            jp_cols.append(col)
            jp_vals.append(1.0)
    jplus_m = sparse.csr_matrix(
        (np.asarray(jp_vals, dtype=complex), (jp_rows, jp_cols)),
        shape=(space.size, space.size),
    )
    jminus_m = jplus_m.conj().T.tocsr()
    jj = (j0 @ j0 + 0.5 * (jplus_m @ jminus_m + jminus_m @ jplus_m)).tocsr()
    ops["V+"] = SparseOperator(vplus)
    ops["V-"] = SparseOperator(vplus.conj().T.tocsr())
    ops["V0"] = SparseOperator(j0, hermitian=True)
    ops["R1"] = SparseOperator(r1, hermitian=True)
    ops["J0"] = SparseOperator(j0, hermitian=True)
    ops["JJ"] = SparseOperator(jj, hermitian=True)
    return ops


def vplus_safe_mask(model: ModelSpec, space: TruncatedSpace) -> np.ndarray:
    """Basis states whose V_+ image stays inside the truncation."""
    mask = np.zeros(space.size, dtype=bool)
    if model.family in (Family.HG, Family.FC):
        for i, state in enumerate(space.basis):
            hit = _vplus_image(model, state)
            if hit is None:
                mask[i] = True  # annihilated, trivially safe
            else:
                mask[i] = hit[0] in space.index
    else:
        # V_+ lowers the photon number; always inside.
        mask[:] = True
    return mask


def vminus_safe_mask(model: ModelSpec, space: TruncatedSpace) -> np.ndarray:
    """Basis states whose V_- image stays inside the truncation."""
    mask = np.zeros(space.size, dtype=bool)
    if model.family in (Family.HG, Family.FC):
        mask[:] = True  # V_- lowers every non-pump mode
        return mask
    for i, state in enumerate(space.basis):
        mask[i] = state[0] + model.n <= space.cutoffs[0] or sum(state[1:]) == 0
    return mask


def build_hamiltonian(model: ModelSpec, space: TruncatedSpace, form: str = "raw") -> SparseOperator:
    """Hamiltonian matrix, from the bare-mode form ("raw") or from the
    collective form Delta*V0 + g*V+ + conj(g)*V- + C({R}) ("collective")."""
    ops = build_collective_ops(model, space)
    g = model.coupling
    inter = g * ops["V+"].matrix + np.conj(g) * ops["V-"].matrix
    if form == "collective":
        c_op = _c_operator(model, space, ops)
        h = model.detuning * ops["V0"].matrix + inter + c_op
    elif form == "raw":
        h = _free_hamiltonian(model, space) + inter
    else:
        raise ValueError("form must be 'raw' or 'collective'")
    return SparseOperator(h.tocsr(), hermitian=True)


def _free_hamiltonian(model: ModelSpec, space: TruncatedSpace) -> sparse.csr_matrix:
    if model.family in (Family.HG, Family.FC):
        return _diagonal(
            space,
            lambda s: math.fsum(w * ni for w, ni in zip(model.omegas, s)),
        )
    omega1, eps = model.omegas[0], model.epsilon
    atoms = model.atoms
    return _diagonal(
        space,
        lambda s: omega1 * s[0] + eps * (2 * sum(s[1:]) - atoms) / 2.0,
    )


def _c_operator(model: ModelSpec, space: TruncatedSpace, ops) -> sparse.csr_matrix:
    """C({R_i}) as a (diagonal) matrix, mirroring coefficients_C_Delta."""
    if model.family is Family.HG:
        omega0, omega1 = model.omegas
        return ((omega1 + omega0) * ops["R1"].matrix).tocsr()
    if model.family is Family.FC:
        n = model.n
        r1 = ops["R1"].matrix
        weighted = sparse.csr_matrix(r1.shape, dtype=complex)
        for i in range(1, n):
            weighted = weighted + i * ops[f"R{i + 1}"].matrix
        c = model.omegas[0] * r1
        for j in range(1, n + 1):
            c = c + model.omegas[j] / n * (r1 - weighted)
        for j in range(1, n):
            tail = sparse.csr_matrix(r1.shape, dtype=complex)
            for i in range(j + 1, n + 1):
                tail = tail + ops[f"R{i}"].matrix
            c = c + model.omegas[j] * tail
        return c.tocsr()
    return (model.n * model.omegas[0] * ops["R1"].matrix).tocsr()


def chain_space(model: ModelSpec, sector: Sector) -> TruncatedSpace:
    """Smallest truncated space containing the sector's whole ladder chain."""
    if model.family is Family.HG:
        k, s = sector.raw
        return TruncatedSpace(model, (s, k + model.n * s))
    if model.family is Family.FC:
        *kappas, s = sector.raw
        return TruncatedSpace(model, (s, *(k + s for k in kappas)))
    kappa, _ = sector.raw
    return TruncatedSpace(model, (kappa,))


def lowest_weight_vectors(model: ModelSpec, sector: Sector, space: TruncatedSpace) -> np.ndarray:
    """Orthonormal lowest-weight vectors of the sector, one column per
    degeneracy copy. For mps those are single basis states; Dicke spin
    blocks with j < M/2 come from the J^2 eigenproblem on the m = -j
    magnetization slice."""
    if model.family in (Family.HG, Family.FC):
        if model.family is Family.HG:
            k, s = sector.raw
            occ = (s, k)
        else:
            *kappas, s = sector.raw
            occ = (s, *kappas)
        idx = space.index.get(occ)
        if idx is None:
            raise TruncationError(f"lowest-weight occupations {occ} exceed cutoffs")
        vec = np.zeros((space.size, 1))
        vec[idx, 0] = 1.0
        return vec
    kappa, twice_j = sector.raw
    if kappa > space.cutoffs[0]:
        raise TruncationError(f"kappa={kappa} exceeds photon cutoff")
    atoms = model.atoms
    ups = (atoms - twice_j) // 2  # magnetization m = -j
    slice_states = [st for st in space.basis if st[0] == kappa and sum(st[1:]) == ups]
    if not slice_states:
        raise TruncationError("empty magnetization slice")
    idxs = [space.index[st] for st in slice_states]
    jj = build_collective_ops(model, space)["JJ"].matrix
    sub = jj[np.ix_(idxs, idxs)].toarray().real
    evals, evecs = np.linalg.eigh(sub)
    j = twice_j / 2.0
    want = j * (j + 1.0)
    cols = [i for i, ev in enumerate(evals) if abs(ev - want) < 1e-8]
    if len(cols) != sector.degeneracy:
        raise RuntimeError(
            f"found {len(cols)} spin-{j} copies, expected {sector.degeneracy}"
        )
    out = np.zeros((space.size, len(cols)))
    for c, col in enumerate(cols):
        out[idxs, c] = evecs[:, col]
        # deterministic sign
        lead = np.argmax(np.abs(out[:, c]))
        if out[lead, c] < 0:
            out[:, c] = -out[:, c]
    return out


def derive_psi_numeric(model: ModelSpec, sector: Sector, space: TruncatedSpace) -> list[int]:
    """Structural-polynomial lattice values psi(l_0 + v), v = 0..dim, read
    off ladder matrix elements along the sector chain.

    mps families walk occupation tuples in exact integer arithmetic;
    Dicke walks the sparse V_+ numerically and snaps to the known-integer
    values. Raises TruncationError if the chain leaves the space.
    """
    dim = sector.dim
    if model.family in (Family.HG, Family.FC):
        if model.family is Family.HG:
            k, s = sector.raw
            occ = [s, k]
        else:
            *kappas, s = sector.raw
            occ = [s, *kappas]
        values = [0]
        for _ in range(dim):
            hit = _vplus_image(model, tuple(occ))
            if hit is None:
                values.append(0)
                continue
            target, amp2 = hit
            if any(t > c for t, c in zip(target, space.cutoffs)):
                raise TruncationError("sector chain leaves the truncated space")
            values.append(amp2)
            occ = list(target)
        assert values[dim] == 0, "chain did not terminate at the sector boundary"
        return values
    lw = lowest_weight_vectors(model, sector, space)[:, 0]
    ops = build_collective_ops(model, space)
    vplus, vminus = ops["V+"].matrix, ops["V-"].matrix
    if np.linalg.norm(vminus @ lw) > 1e-8:
        raise RuntimeError("candidate lowest-weight vector is not annihilated by V-")
    values = [0]
    w = lw
    for _ in range(dim):
        u = vplus @ w
        nrm2 = float(np.real(np.vdot(u, u)))
        snapped = round(nrm2)
        if abs(nrm2 - snapped) > 1e-6 * max(1.0, abs(nrm2)):
            raise RuntimeError(f"non-integer psi value {nrm2}")
        values.append(int(snapped))
        if snapped == 0:
            w = np.zeros_like(w)
        else:
            w = np.real(u) / math.sqrt(nrm2)
    assert values[dim] == 0, "chain did not terminate at the sector boundary"
    return values


def chain_basis(model: ModelSpec, sector: Sector, space: TruncatedSpace,
                copy: int = 0) -> np.ndarray:
    """Columns f = 0..s of normalized V_+^f acting on the lowest weight."""
    lw = lowest_weight_vectors(model, sector, space)[:, copy]
    vplus = build_collective_ops(model, space)["V+"].matrix
    cols = np.zeros((space.size, sector.dim), dtype=complex)
    w = lw.astype(complex)
    cols[:, 0] = w
    for f in range(1, sector.dim):
        w = vplus @ w
        nrm = np.linalg.norm(w)
        if nrm == 0:
            raise RuntimeError("chain terminated early")
        w = w / nrm
        cols[:, f] = w
    return cols


def brute_force_spectrum(model: ModelSpec, sector: Sector, space: TruncatedSpace,
                         cap: int = 64) -> np.ndarray:
    """Ascending eigenvalues of H restricted to the sector chain (absolute,
    including the sector offset C). Dense diagonalization; oracle use only."""
    if sector.dim > cap:
        raise ValueError(f"sector dim {sector.dim} exceeds oracle cap {cap}")
    basis = chain_basis(model, sector, space)
    h = build_hamiltonian(model, space, form="raw").matrix
    hs = basis.conj().T @ (h @ basis)
    return np.linalg.eigvalsh(hs)
