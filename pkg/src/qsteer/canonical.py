"""Five-term canonical form of three-qubit pure states and collusion criteria.

Every pure three-qubit state is local-unitarily equivalent to

    l0|000> + l1 e^{i phi}|100> + l2|101> + l3|110> + l4|111>,   l_i >= 0.

The criteria below decide, from the l_i alone, how many of the reduced pairs
can be made to violate CHSH once two parties may act jointly (global
unitaries on their pair) or apply local filters.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ensembles import canonical_state, substream
from .tensor import PAULI_PAIRS, DensityMatrix, PureState, bloch_vector, hermitian_eigenvalues, partial_trace
from .tradeoff import PAIRS, tradeoff_report

REAL_CLASS_TOL = 1e-8
STRICT_GUARD = 1e-12
MIXED_BLOCH_TOL = 1e-8
_ZERO = 1e-14

FILTERING = "filtering"
GLOBAL_UNITARY = "global_unitary"
STEERING_GLOBAL_UNITARY = "steering_global_unitary"


@dataclass(frozen=True, eq=False)
class CanonicalCoefficients:
    lambdas: tuple
    phi: float
    u_a: np.ndarray
    u_b: np.ndarray
    u_c: np.ndarray

    @property
    def lambda0(self):
        return self.lambdas[0]

    def state(self) -> PureState:
        return canonical_state(self.lambdas, self.phi)

    def reconstruct(self) -> PureState:
        """(U_A x U_B x U_C)^dag applied to the canonical state: the original input."""
        u = np.kron(np.kron(self.u_a, self.u_b), self.u_c)
        return PureState.normalized(u.conj().T @ self.state().amplitudes)

    @property
    def is_real_class(self) -> bool:
        return abs(np.sin(self.phi)) <= REAL_CLASS_TOL

    def signed_lambdas(self) -> tuple:
        """Real coefficients with the phase folded into l1's sign (real class only)."""
        l0, l1, l2, l3, l4 = self.lambdas
        return l0, l1 * (1.0 if np.cos(self.phi) >= 0 else -1.0), l2, l3, l4

    def to_dict(self) -> dict:
        def mat(u):
            return [[[float(z.real), float(z.imag)] for z in row] for row in u]
        return {"lambda": [float(x) for x in self.lambdas], "phi": float(self.phi),
                "unitaries": [mat(self.u_a), mat(self.u_b), mat(self.u_c)]}

    @classmethod
    def from_real(cls, lambdas) -> "CanonicalCoefficients":
        """Coefficients of a state already in real canonical form."""
        lam = tuple(float(x) for x in lambdas)
        if len(lam) != 5 or min(lam) < 0:
            raise ValueError("need five non-negative coefficients")
        if abs(sum(x * x for x in lam) - 1) > 1e-10:
            raise ValueError("coefficients must satisfy sum l_i^2 = 1")
        eye = np.eye(2, dtype=complex)
        return cls(lam, 0.0, eye, eye, eye)


@dataclass(frozen=True)
class CollusionVerdict:
    scenario: str
    applicable: bool
    pair_violates: dict = field(default_factory=dict)
    tradeoff_broken: bool = False
    all_pairs_violate: bool = False
    criteria_detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Theorem3Verdict:
    non_mixed_marginals: tuple
    bloch_norms: dict
    holds: bool

    @property
    def count(self) -> int:
        return len(self.non_mixed_marginals)


# -- decomposition -------------------------------------------------------------

def _candidate_rotations(t0, t1):
    """A-side unitaries whose first row makes the new |0>_A slice singular."""
    det0 = t0[0, 0] * t0[1, 1] - t0[0, 1] * t0[1, 0]
    det1 = t1[0, 0] * t1[1, 1] - t1[0, 1] * t1[1, 0]
    mid = t0[0, 0] * t1[1, 1] + t1[0, 0] * t0[1, 1] - t0[0, 1] * t1[1, 0] - t1[0, 1] * t0[1, 0]
    xs = []
    if abs(det1) >= _ZERO:
        disc = np.sqrt(mid * mid - 4 * det1 * det0 + 0j)
        # numerically stable pair of roots
        q = -0.5 * (mid + disc if abs(mid + disc) >= abs(mid - disc) else mid - disc)
        xs = [q / det1, det0 / q] if abs(q) >= _ZERO else [0j, 0j]
    else:
        if abs(mid) >= _ZERO:
            xs.append(-det0 / mid)
        elif abs(det0) < _ZERO:
            xs.append(0j)
        xs.append(None)  # root at infinity: the |1>_A slice itself is singular
    out = []
    for x in xs:
        if x is None:
            out.append(np.array([[0, 1], [1, 0]], dtype=complex))
        else:
            s = np.sqrt(1 + abs(x) ** 2)
            out.append(np.array([[1, x], [-np.conj(x), 1]], dtype=complex) / s)
    return out


def _canonicalize(t, u_a):
    s0 = u_a[0, 0] * t[0] + u_a[0, 1] * t[1]
    s1 = u_a[1, 0] * t[0] + u_a[1, 1] * t[1]
    w, _, vh = np.linalg.svd(s0)
    u_b, u_c = w.conj().T, vh.conj()
    lam0 = (u_b @ s0 @ u_c.T)[0, 0]
    m = u_b @ s1 @ u_c.T
    coeffs = np.array([m[0, 0], m[0, 1], m[1, 0], m[1, 1]])  # |100>, |101>, |110>, |111>
    # phase forms (alpha, beta, gamma) for A|1>, B|1>, C|1> acting on each coefficient
    forms = np.array([[1, 0, 0], [1, 0, 1], [1, 1, 0], [1, 1, 1]], dtype=float)
    nz = [i for i in (1, 2, 3) if abs(coeffs[i]) > _ZERO]
    if len(nz) < 3 and abs(coeffs[0]) > _ZERO:
        nz.append(0)
    alpha = beta = gamma = 0.0
    if nz:
        sol = np.linalg.lstsq(forms[nz], -np.angle(coeffs[nz]), rcond=None)[0]
        alpha, beta, gamma = sol
    ph = np.exp(1j * (forms @ np.array([alpha, beta, gamma])))
    fixed = coeffs * ph
    l0 = abs(lam0)  # leading singular value; any imaginary part is roundoff
    u_a = np.diag([1, np.exp(1j * alpha)]) @ u_a
    u_b = np.diag([1, np.exp(1j * beta)]) @ u_b
    u_c = np.diag([1, np.exp(1j * gamma)]) @ u_c
    phi = float(np.angle(fixed[0])) if abs(fixed[0]) > _ZERO else 0.0
    lams = (float(l0), float(abs(fixed[0])), float(abs(fixed[1])), float(abs(fixed[2])), float(abs(fixed[3])))
    return CanonicalCoefficients(lams, phi, u_a, u_b, u_c)


def acin_decompose(psi: PureState) -> CanonicalCoefficients:
    """Local unitaries and coefficients bringing ``psi`` to the five-term form.

    Of the (generically two) A-side rotations that work, the one giving the
    larger l0 is kept, ties broken by smaller |phi|.
    """
    if not isinstance(psi, PureState):
        raise ValueError("canonical decomposition needs a pure state")
    if psi.num_qubits != 3:
        raise ValueError("canonical decomposition needs a three-qubit state")
    t = psi.tensor()
    best = None
    for u_a in _candidate_rotations(t[0], t[1]):
        c = _canonicalize(t, u_a)
        if best is None or c.lambda0 > best.lambda0 + 1e-12 or (
                abs(c.lambda0 - best.lambda0) <= 1e-12 and abs(c.phi) < abs(best.phi)):
            best = c
    return best


def fidelity(a: PureState, b: PureState) -> float:
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def invariant_deltas(psi: PureState, coeffs: CanonicalCoefficients) -> dict:
    """Differences in local-unitary invariants between ``psi`` and its canonical state."""
    canon = coeffs.state()
    r_in, r_out = tradeoff_report(psi), tradeoff_report(canon)
    out = {"tangle": abs(r_in.tangle - r_out.tangle)}
    for p in PAIRS:
        out[f"f3_sq_{p.lower()}"] = abs(r_in.f3_sq[p] - r_out.f3_sq[p])
    for q in "ABC":
        e_in = hermitian_eigenvalues(partial_trace(psi, q))
        e_out = hermitian_eigenvalues(partial_trace(canon, q))
        out[f"spectrum_{q.lower()}"] = float(np.max(np.abs(e_in - e_out)))
    return out


# -- collusion criteria ----------------------------------------------------------

def _lt(lhs, rhs):
    return bool(lhs < rhs - STRICT_GUARD)


def _gt(lhs, rhs):
    return bool(lhs > rhs + STRICT_GUARD)


def _not_applicable(scenario, c):
    return CollusionVerdict(scenario, False, criteria_detail={
        "reason": "phi is not 0 or pi; criteria are stated for real coefficients", "phi": c.phi})


def _residual(c):
    """|l1 e^{i phi} l4 - l2 l3|^2, which reduces to (l2 l3 - l1 l4)^2 for real coefficients."""
    l0, l1, l2, l3, l4 = c.lambdas
    return abs(l1 * np.exp(1j * c.phi) * l4 - l2 * l3) ** 2


def theorem4_filtering(c: CanonicalCoefficients) -> CollusionVerdict:
    """CHSH violations reachable when each pair may apply local filters."""
    if not c.is_real_class:
        return _not_applicable(FILTERING, c)
    l0, l1, l2, l3, l4 = c.signed_lambdas()
    j = _residual(c)
    ab = 4 * l0**2 * (l3**2 - l4**2)
    ac = 4 * l0**2 * (l2**2 - l4**2)
    bc = j - (l0 * l4) ** 2
    pairs = {"AB": _gt(ab, 0), "AC": _gt(ac, 0), "BC": _gt(bc, 0)}
    l0_nonzero = _gt(l0, 0)
    crit1 = l0_nonzero and _lt(l4, min(l2, l3))
    crit2 = l0_nonzero and _gt(j, (l0 * l4) ** 2) and _lt(l4, max(l2, l3))
    broken = crit1 or crit2
    all_pairs = l0_nonzero and _lt(l4, min(l2, l3)) and _gt(j, (l0 * l4) ** 2)
    detail = {
        "ab_lhs": float(ab), "ac_lhs": float(ac), "bc_lhs": float(bc),
        "lambda0_nonzero": l0_nonzero, "criterion1": crit1, "criterion2": crit2,
        "pair_count": int(sum(pairs.values())),
    }
    return CollusionVerdict(FILTERING, True, pairs, broken, all_pairs, detail)


def _global_unitary(c, scenario):
    if not c.is_real_class:
        return _not_applicable(scenario, c)
    l0, l1, l2, l3, l4 = c.signed_lambdas()
    j = _residual(c)
    # each pair's lhs is det of the remaining qubit's marginal
    ab = l0**2 * (l2**2 + l4**2) + j
    ac = l0**2 * (l3**2 + l4**2) + j
    bc = l0**2 * (l2**2 + l3**2 + l4**2)
    crit1_lhs = l0**2 * (l4**2 + max(l2**2, l3**2)) + j
    crit2_lhs = l0**2 * (l4**2 + min(l2**2, l3**2)) + j
    crit1 = _lt(crit1_lhs, 0.25)
    crit2 = _lt(crit2_lhs, 0.25) and _lt(bc, 0.25)
    pairs = {"AB": _lt(ab, 0.25), "AC": _lt(ac, 0.25), "BC": _lt(bc, 0.25)}
    detail = {
        "ab_lhs": float(ab), "ac_lhs": float(ac), "bc_lhs": float(bc),
        "criterion1_lhs": float(crit1_lhs), "criterion2_lhs": float(crit2_lhs),
        "criterion1": crit1, "criterion2": crit2, "rhs": 0.25,
        "pair_count": int(sum(pairs.values())),
        "pair_attribution": "AB uses l2^2 (det rho_C), AC uses l3^2 (det rho_B)",
    }
    all_pairs = _lt(bc, 0.25) and crit1
    return CollusionVerdict(scenario, True, pairs, crit1 or crit2, all_pairs, detail)


def theorem5_global_unitary(c: CanonicalCoefficients) -> CollusionVerdict:
    """CHSH violations reachable when each pair may apply a joint unitary."""
    return _global_unitary(c, GLOBAL_UNITARY)


def theorem6_steering_global_unitary(c: CanonicalCoefficients) -> CollusionVerdict:
    """Steering counterpart of the global-unitary criteria (same conditions)."""
    return _global_unitary(c, STEERING_GLOBAL_UNITARY)


def theorem3_collusion_check(psi: PureState) -> Theorem3Verdict:
    """The CHSH trade-off survives joint unitaries iff at most one marginal is not maximally mixed."""
    norms = {q: bloch_vector(partial_trace(psi, q)).norm for q in "ABC"}
    non_mixed = tuple(q for q in "ABC" if norms[q] > MIXED_BLOCH_TOL)
    return Theorem3Verdict(non_mixed, norms, len(non_mixed) <= 1)


# -- spectral and filtering oracles ------------------------------------------------

def global_unitary_chsh_sq(rho2: DensityMatrix) -> float:
    """max over joint unitaries of (t1^2 + t2^2) = 2[(e1 - e4)^2 + (e2 - e3)^2]."""
    e = hermitian_eigenvalues(rho2)
    return 2 * ((e[0] - e[3]) ** 2 + (e[1] - e[2]) ** 2)


def absolute_chsh_spectral(rho2: DensityMatrix) -> bool:
    """True iff some joint unitary makes ``rho2`` violate CHSH."""
    if rho2.num_qubits != 2:
        raise ValueError("needs a two-qubit state")
    return global_unitary_chsh_sq(rho2) / 2 > 0.5 + STRICT_GUARD


@dataclass(frozen=True, eq=False)
class FilterResult:
    value: float
    k_a: np.ndarray
    k_b: np.ndarray
    evaluations: int

    def filtered_state(self, rho2: DensityMatrix) -> DensityMatrix:
        return apply_filters(rho2, self.k_a, self.k_b)


EPS_GRID = (1.0, 0.5, 0.25, 0.1, 0.05, 0.01)
_LOG_EPS_MIN = -8.0


def apply_filters(rho2: DensityMatrix, k_a, k_b) -> DensityMatrix:
    k = np.kron(k_a, k_b)
    m = k @ rho2.entries @ k.conj().T
    return DensityMatrix.from_matrix(m / np.trace(m).real)


def _su2(angles):
    """Batch of SU(2) matrices from (N, 3) Euler angles."""
    a, b, g = angles[:, 0], angles[:, 1], angles[:, 2]
    c, s = np.cos(b / 2), np.sin(b / 2)
    ep, em = np.exp(0.5j * (a + g)), np.exp(0.5j * (a - g))
    return np.stack([np.stack([ep * c, -em.conj() * s], -1),
                     np.stack([em * s, ep.conj() * c], -1)], -2)


def _filters(params):
    """params (N, 8): Euler angles and log10 eps for side A, then for side B."""
    out = []
    for off in (0, 4):
        w = _su2(params[:, off:off + 3])
        eps = 10.0 ** np.clip(params[:, off + 3], _LOG_EPS_MIN, 0.0)
        d = np.ones((len(params), 2))
        d[:, 1] = eps
        out.append(d[:, :, None] * w)  # diag(1, eps) @ W
    return out


def _batch_bell(rho, params):
    ka, kb = _filters(params)
    k = np.einsum("nij,nkl->nikjl", ka, kb).reshape(-1, 4, 4)
    s = k @ rho @ np.conj(np.swapaxes(k, 1, 2))
    tr = np.einsum("nii->n", s).real
    ok = tr > 1e-12
    s = s[ok] / tr[ok, None, None]
    t = np.einsum("ijab,nba->nij", PAULI_PAIRS, s).real
    sv = np.linalg.svd(t, compute_uv=False)
    vals = np.zeros(len(params))
    vals[ok] = 2 * np.sqrt(sv[:, 0] ** 2 + sv[:, 1] ** 2)
    return vals


def filtering_oracle(rho2: DensityMatrix, budget: int = 10_000, seed: int = 0) -> FilterResult:
    """Best CHSH value found over local filters K_X = diag(1, eps_X) W_X.

    A coarse grid over eps on both sides, crossed with Haar-random W pairs,
    spends half the budget; coordinate search around the best grid points
    spends the rest. Filters that annihilate the state are skipped.
    """
    if rho2.num_qubits != 2:
        raise ValueError("needs a two-qubit state")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    rng = substream(seed, 0)
    rho = rho2.entries
    log_grid = np.log10(EPS_GRID)
    cells = np.array([(ea, eb) for ea in log_grid for eb in log_grid])
    n_grid = max(1, budget // 2)
    per_cell = max(1, n_grid // len(cells))
    n_grid = min(budget, per_cell * len(cells))
    params = np.empty((n_grid, 8))
    params[:, [0, 1, 2, 4, 5, 6]] = _haar_euler(rng, (n_grid, 2)).reshape(n_grid, 6)
    reps = np.repeat(cells, per_cell, axis=0)[:n_grid]
    params[:, 3], params[:, 7] = reps[:, 0], reps[:, 1]
    params[0] = [0, 0, 0, 0, 0, 0, 0, 0]  # identity filter
    vals = _batch_bell(rho, params)
    used = n_grid

    n_starts = min(3, len(vals))
    order = np.argsort(-vals, kind="stable")[:n_starts]
    best_p, best_v = params[order[0]].copy(), float(vals[order[0]])
    remaining = budget - used
    for i, idx in enumerate(order):
        share = remaining // (n_starts - i)
        p, v, spent = _coordinate_search(rho, params[idx].copy(), float(vals[idx]), share)
        remaining -= spent
        used += spent
        if v > best_v:
            best_p, best_v = p, v
    ka, kb = _filters(best_p[None, :])
    return FilterResult(min(best_v, 2 * np.sqrt(2)), ka[0], kb[0], used)


def _haar_euler(rng, shape):
    """Euler angles of Haar-random SU(2) elements."""
    n = int(np.prod(shape))
    a = rng.random(n) * 2 * np.pi
    g = rng.random(n) * 2 * np.pi
    b = np.arccos(1 - 2 * rng.random(n))  # cos(b) uniform
    return np.stack([a, b, g], -1).reshape(*shape, 3)


def _coordinate_search(rho, p, v, budget):
    step = np.array([0.3, 0.3, 0.3, 0.5, 0.3, 0.3, 0.3, 0.5])
    spent = 0
    eye = np.eye(8)
    while spent + 16 <= budget and np.max(step) > 1e-7:
        trials = np.concatenate([p + eye * step, p - eye * step])
        trials[:, 3] = np.clip(trials[:, 3], _LOG_EPS_MIN, 0.0)
        trials[:, 7] = np.clip(trials[:, 7], _LOG_EPS_MIN, 0.0)
        tv = _batch_bell(rho, trials)
        spent += len(trials)
        k = int(np.argmax(tv))
        if tv[k] > v + 1e-15:
            p, v = trials[k], float(tv[k])
            step[k % 8] *= 1.5
        else:
            step *= 0.5
    return p, v, spent
