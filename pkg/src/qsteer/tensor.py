"""Small dense quantum-state primitives for one to three qubits.

Basis ordering: the amplitude of |abc> sits at index 4a + 2b + c, with qubit
A the most significant.  Qubits are addressed either by label ("A", "B", "C")
or by position (0, 1, 2).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple, Union

import numpy as np

from .errors import NumericalIntegrityError

LABELS = "ABC"

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

# PAULI_PAIRS[i, j] = sigma_i (x) sigma_j
PAULI_PAIRS = np.array([[np.kron(a, b) for b in PAULIS] for a in PAULIS])
_PAULI_STACK = np.array(PAULIS)

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
IMAG_RESIDUE_TOL = 1e-9


def _freeze(a):
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector of a 1-3 qubit pure state."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = _num_qubits_for(amps.shape[0], "amplitudes")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |a|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", _freeze(amps))
        object.__setattr__(self, "_n", n)

    @classmethod
    def normalized(cls, vector) -> "PureState":
        v = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if not np.isfinite(norm) or norm == 0:
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(v / norm)

    @property
    def num_qubits(self) -> int:
        return self._n

    @property
    def dim(self) -> int:
        return 1 << self._n

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self._n)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix on 1-3 qubits.

    Construction validates all three properties; ``check=False`` skips the
    eigenvalue test for matrices that are PSD by construction.
    """

    entries: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        n = _num_qubits_for(m.shape[0], "entries")
        if not np.all(np.isfinite(m)):
            raise ValueError("density matrix entries must be finite")
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > HERMITIAN_TOL:
            raise NumericalIntegrityError(f"density matrix not Hermitian (max deviation {herm_err:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise NumericalIntegrityError(f"density matrix trace is {tr!r}, expected 1")
        if self.check:
            lo = np.linalg.eigvalsh(m)[0]
            if lo < PSD_TOL:
                raise NumericalIntegrityError(f"density matrix has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "entries", _freeze(m))
        object.__setattr__(self, "_n", n)

    @classmethod
    def from_matrix(cls, m, check=True) -> "DensityMatrix":
        """Symmetrize away roundoff-level anti-Hermitian parts, then validate."""
        m = np.asarray(m, dtype=complex)
        return cls(0.5 * (m + m.conj().T), check=check)

    @property
    def num_qubits(self) -> int:
        return self._n

    @property
    def dim(self) -> int:
        return 1 << self._n

    def purity(self) -> float:
        m = self.entries
        return float(np.einsum("ij,ji->", m, m).real)


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Two-qubit Pauli correlation matrix, t[i, j] = <sigma_i (x) sigma_j>."""

    t: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        if t.shape != (3, 3):
            raise ValueError(f"correlation matrix must be 3x3, got {t.shape}")
        if np.max(np.abs(t)) > 1 + 1e-12:
            raise NumericalIntegrityError("correlation entry exceeds 1 in magnitude")
        object.__setattr__(self, "t", _freeze(t))

    @cached_property
    def singular_values(self) -> tuple[float, float, float]:
        return singular_values_3x3(self.t)

    def frobenius_sq(self) -> float:
        return float(np.sum(self.t * self.t))


def _num_qubits_for(dim, what):
    n = {2: 1, 4: 2, 8: 3}.get(dim)
    if n is None:
        raise ValueError(f"{what}: dimension {dim} is not 2, 4 or 8")
    return n


Qubits = Union[str, int, Iterable[Union[str, int]]]


def _qubit_indices(keep: Qubits, n: int) -> tuple[int, ...]:
    if isinstance(keep, (str, int)):
        keep = [keep] if isinstance(keep, int) else list(keep)
    out = []
    for q in keep:
        if isinstance(q, str):
            if q not in LABELS[:n]:
                raise ValueError(f"unknown qubit label {q!r} for a {n}-qubit state")
            q = LABELS.index(q)
        elif not 0 <= int(q) < n:
            raise ValueError(f"qubit index {q} out of range for a {n}-qubit state")
        out.append(int(q))
    idx = tuple(sorted(set(out)))
    if len(idx) != len(out):
        raise ValueError("duplicate qubits in keep set")
    if not idx or len(idx) == n:
        raise ValueError("keep must be a nonempty strict subset of the qubits")
    return idx


@lru_cache(maxsize=None)
def _trace_subscripts(n: int, keep: tuple[int, ...]):
    # rho indices: row r0..r(n-1), col c0..c(n-1); traced qubits share row/col letters
    letters = "abcdefghijkl"
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    for q in range(n):
        if q not in keep:
            cols[q] = rows[q]
    out = "".join(rows[q] for q in keep) + "".join(cols[q] for q in keep)
    return "".join(rows) + "".join(cols) + "->" + out


@lru_cache(maxsize=None)
def _pure_trace_subscripts(n: int, keep: tuple[int, ...]):
    letters = "abcdef"
    ket = list(letters[:n])
    bra = list(letters[n:2 * n])
    for q in range(n):
        if q not in keep:
            bra[q] = ket[q]
    out = "".join(ket[q] for q in keep) + "".join(bra[q] for q in keep)
    return "".join(ket) + "," + "".join(bra) + "->" + out


def density_from_pure(psi: PureState) -> DensityMatrix:
    """Return the projector |psi><psi|."""
    if not isinstance(psi, PureState):
        psi = PureState(psi)
    a = psi.amplitudes
    return DensityMatrix(np.outer(a, a.conj()), check=False)


def partial_trace(rho: Union[DensityMatrix, PureState], keep: Qubits) -> DensityMatrix:
    """Reduced state on the qubits in ``keep``, e.g. ``partial_trace(rho, "AB")``.

    Pure states are reduced directly from their amplitudes.
    """
    n = rho.num_qubits
    idx = _qubit_indices(keep, n)
    k = len(idx)
    if isinstance(rho, PureState):
        t = rho.tensor()
        red = np.einsum(_pure_trace_subscripts(n, idx), t, t.conj())
    else:
        red = np.einsum(_trace_subscripts(n, idx), rho.entries.reshape((2,) * (2 * n)))
    red = red.reshape(1 << k, 1 << k)
    return DensityMatrix.from_matrix(red / np.trace(red).real, check=False)


def correlation_matrix(rho2: DensityMatrix) -> CorrelationMatrix:
    if rho2.num_qubits != 2:
        raise ValueError("correlation_matrix needs a two-qubit state")
    t = np.einsum("ijab,ba->ij", PAULI_PAIRS, rho2.entries)
    resid = np.max(np.abs(t.imag))
    if resid > IMAG_RESIDUE_TOL:
        raise NumericalIntegrityError(f"Pauli expectations carry imaginary residue {resid:.3e}")
    return CorrelationMatrix(t.real)


def bloch_vector(rho1: DensityMatrix) -> BlochVector:
    if rho1.num_qubits != 1:
        raise ValueError("bloch_vector needs a single-qubit state")
    r = np.einsum("iab,ba->i", _PAULI_STACK, rho1.entries).real
    return BlochVector(float(r[0]), float(r[1]), float(r[2]))


def hermitian_eigenvalues(m, tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in descending order."""
    if isinstance(m, DensityMatrix):
        m = m.entries
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] > 8:
        raise ValueError(f"expected a square matrix of dimension <= 8, got {m.shape}")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise NumericalIntegrityError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))[::-1]


def singular_values_3x3(t) -> tuple[float, float, float]:
    t = np.asarray(t, dtype=float)
    if t.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError("matrix entries must be finite")
    s = np.linalg.svd(t, compute_uv=False)
    return float(s[0]), float(s[1]), float(s[2])


def apply_local_unitaries(state, unitaries):
    """Apply U_A (x) U_B (x) ... to a PureState or DensityMatrix."""
    u = unitaries[0]
    for v in unitaries[1:]:
        u = np.kron(u, v)
    if isinstance(state, PureState):
        return PureState.normalized(u @ state.amplitudes)
    return DensityMatrix.from_matrix(u @ state.entries @ u.conj().T)


# -- named states -----------------------------------------------------------

def basis_state(bits: str) -> PureState:
    """Computational basis state, e.g. ``basis_state("000")``."""
    v = np.zeros(1 << len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return PureState(v)


def ghz_state() -> PureState:
    v = np.zeros(8, dtype=complex)
    v[0] = v[7] = 1 / np.sqrt(2)
    return PureState(v)


def w_state() -> PureState:
    v = np.zeros(8, dtype=complex)
    v[[1, 2, 4]] = 1 / np.sqrt(3)
    return PureState(v)


def bell_state() -> PureState:
    """(|00> + |11>)/sqrt(2)."""
    return PureState(np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2))


def maximally_mixed(num_qubits: int) -> DensityMatrix:
    d = 1 << num_qubits
    return DensityMatrix(np.eye(d, dtype=complex) / d, check=False)
