"""Wootters concurrence and the three-qubit tangle.

The Wootters values l1 >= ... >= l4 (square roots of the spectrum of
rho rho~) are computed as the singular values of tau_ij = v_i^T (Y x Y) v_j
for any ensemble rho = sum_i v_i v_i^dag. Taking a square root of eigenvalues
that are zero up to roundoff would leave ~1e-8 noise in C for rank-deficient
states; the singular values carry no such floor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalIntegrityError, UnsupportedInputError
from .tensor import LABELS, SIGMA_Y, DensityMatrix, PureState, partial_trace

_YY = np.kron(SIGMA_Y, SIGMA_Y).real  # real: [[0,0,0,-1],[0,0,1,0],[0,1,0,0],[-1,0,0,0]]
SUPPORT_TOL = 1e-14
TANGLE_CLAMP = -1e-9


@dataclass(frozen=True)
class TangleReport:
    tangle: float
    c_sq_focus_rest: float
    c_sq_pair1: float
    c_sq_pair2: float
    focus: str


def spin_flip(rho2: DensityMatrix) -> np.ndarray:
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y), conjugation in the computational basis."""
    return _YY @ rho2.entries.conj() @ _YY


def wootters_lambdas(vectors) -> np.ndarray:
    """Descending square roots of the spectrum of rho rho~, rho = sum_i v_i v_i^dag.

    ``vectors`` holds one unnormalized 4-component vector per row.
    """
    v = np.asarray(vectors, dtype=complex).reshape(-1, 4)
    s = np.linalg.svd(v @ _YY @ v.T, compute_uv=False)
    out = np.zeros(4)
    out[: min(4, len(s))] = s[:4]
    return out


def _support_vectors(rho2: DensityMatrix) -> np.ndarray:
    w, vecs = np.linalg.eigh(rho2.entries)
    keep = w > SUPPORT_TOL
    return (vecs[:, keep] * np.sqrt(w[keep])).T


def _from_lambdas(lam):
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence(rho2: DensityMatrix) -> float:
    """C = max(0, l1 - l2 - l3 - l4)."""
    if rho2.num_qubits != 2:
        raise ValueError("concurrence needs a two-qubit state")
    return _from_lambdas(wootters_lambdas(_support_vectors(rho2)))


def pure_concurrence(psi: PureState) -> float:
    """2|ad - bc| for a|00> + b|01> + c|10> + d|11>."""
    a, b, c, d = psi.amplitudes
    return float(2 * abs(a * d - b * c))


def _require_pure3(psi):
    if isinstance(psi, DensityMatrix):
        raise UnsupportedInputError("tangle is only defined here for pure states (no convex roof)")
    if psi.num_qubits != 3:
        raise ValueError("expected a three-qubit pure state")


def bipartition_concurrence_sq(psi: PureState, focus: str = "A") -> float:
    """C^2 across focus|rest, i.e. 4 det(rho_focus) = 2(1 - Tr rho_focus^2)."""
    _require_pure3(psi)
    r = partial_trace(psi, focus).entries
    return float(max(0.0, 4 * (r[0, 0] * r[1, 1] - abs(r[0, 1]) ** 2).real))


def pair_concurrence_sq(psi: PureState, pair: str) -> float:
    """Squared concurrence of a two-qubit marginal of a pure three-qubit state.

    The traced qubit's basis slices form an exact rank-2 ensemble of the marginal.
    """
    idx = sorted(LABELS.index(q) for q in pair)
    (traced,) = {0, 1, 2} - set(idx)
    t = np.moveaxis(psi.tensor(), traced, 0).reshape(2, 4)
    return _from_lambdas(wootters_lambdas(t)) ** 2


def tangle(psi: PureState, focus: str = "A") -> TangleReport:
    """tau = C^2_{focus:rest} - C^2_{focus,x} - C^2_{focus,y}."""
    _require_pure3(psi)
    if focus not in LABELS:
        raise ValueError(f"focus must be one of {tuple(LABELS)}")
    others = [q for q in LABELS if q != focus]
    c_rest = bipartition_concurrence_sq(psi, focus)
    c1 = pair_concurrence_sq(psi, focus + others[0])
    c2 = pair_concurrence_sq(psi, focus + others[1])
    tau = c_rest - c1 - c2
    if tau < 0:
        if tau < TANGLE_CLAMP:
            raise NumericalIntegrityError(f"negative tangle {tau:.3e} for a pure state")
        tau = 0.0
    return TangleReport(tangle=tau, c_sq_focus_rest=c_rest, c_sq_pair1=c1, c_sq_pair2=c2, focus=focus)
