"""Monogamy relations for steering and CHSH violations of three-qubit states.

Relations checked here, each over the three reduced pairs AB, AC, BC:

* 2-setting steering:  sum F2^2 <= 3
* 3-setting steering:  sum F3^2 <= 3, with equality for every pure state
* Bell-CHSH:           sum B_max^2 <= 12
* complementarity:     2 tau + max F3^2 <= 3 (conjectured for pure states,
                       equality along the MDCC family)
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .entanglement import tangle as _tangle
from .errors import IdentityViolationError
from .steering import violation_report
from .tensor import DensityMatrix, PureState, partial_trace

PAIRS = ("AB", "AC", "BC")
DEFAULT_TOL = 1e-9
BELL_TOL = 1e-8
PURE_IDENTITY_LIMIT = 1e-7
CONSISTENCY_TOL = 1e-10
MDCC_TOL = 1e-10


@dataclass(frozen=True)
class TradeoffReport:
    f2_sq: dict
    f3_sq: dict
    bell_max_sq: dict
    singulars: dict
    sum_f2_sq: float
    sum_f3_sq: float
    sum_bell_sq: float
    purity_flag: bool
    tangle: Optional[float] = None
    complementarity_lhs: Optional[float] = None

    @property
    def max_pair_f3_sq(self) -> float:
        return max(self.f3_sq.values())


@dataclass(frozen=True)
class RelationCheck:
    relation: str
    passed: bool
    value: float
    bound: float
    margin: float
    equality: Optional[bool] = None


@dataclass(frozen=True)
class ExclusivityVerdict:
    violating_pairs: tuple
    maximal_pairs: tuple
    others_obey: bool

    @property
    def count(self) -> int:
        return len(self.violating_pairs)

    @property
    def ok(self) -> bool:
        return self.count <= 2 and self.others_obey


@dataclass(frozen=True)
class MdccPoint:
    m: float
    f3_sq_ab: float
    f3_sq_bc: float
    f3_sq_ac: float
    tangle: float
    complementarity_lhs: float
    closed_form: dict = field(default_factory=dict)

    @property
    def deltas(self) -> dict:
        return {
            "f3_sq_ab": abs(self.f3_sq_ab - self.closed_form["f3_sq_ab"]),
            "f3_sq_bc": abs(self.f3_sq_bc - self.closed_form["f3_sq_bc"]),
            "f3_sq_ac": abs(self.f3_sq_ac - self.closed_form["f3_sq_ac"]),
            "tangle": abs(self.tangle - self.closed_form["tangle"]),
            "complementarity_lhs": abs(self.complementarity_lhs - 3.0),
        }

    @property
    def max_delta(self) -> float:
        return max(self.deltas.values())


@dataclass(frozen=True)
class ConjectureCheck:
    lhs: float
    tangle: float
    max_pair_f3_sq: float
    passed: bool
    amplitudes: Optional[list] = None


def tradeoff_report(state: Union[PureState, DensityMatrix]) -> TradeoffReport:
    if state.num_qubits != 3:
        raise ValueError("trade-off relations need a three-qubit state")
    f2, f3, bell, sing = {}, {}, {}, {}
    for pair in PAIRS:
        v = violation_report(partial_trace(state, pair))
        f2[pair], f3[pair], sing[pair] = v.f2_sq, v.f3_sq, v.singulars
        bell[pair] = v.bell_max ** 2
    pure = isinstance(state, PureState)
    tau = comp = None
    if pure:
        tau = _tangle(state).tangle
        comp = 2 * tau + max(f3.values())
    return TradeoffReport(
        f2_sq=f2, f3_sq=f3, bell_max_sq=bell, singulars=sing,
        sum_f2_sq=sum(f2.values()), sum_f3_sq=sum(f3.values()), sum_bell_sq=sum(bell.values()),
        purity_flag=pure, tangle=tau, complementarity_lhs=comp,
    )


def check_theorem1(report: TradeoffReport, tol: float = DEFAULT_TOL) -> RelationCheck:
    """sum over pairs of the squared 2-setting maximum is at most 3."""
    s = report.sum_f2_sq
    return RelationCheck("theorem1", s <= 3 + tol, s, 3.0, 3.0 - s)


def check_theorem2(report: TradeoffReport, tol: float = DEFAULT_TOL) -> RelationCheck:
    """sum over pairs of the squared 3-setting maximum is at most 3, exactly 3 for pure states."""
    s = report.sum_f3_sq
    equality = abs(s - 3.0) <= tol
    if report.purity_flag and abs(s - 3.0) > PURE_IDENTITY_LIMIT:
        raise IdentityViolationError(f"pure state gives sum F3^2 = {s!r}, identity requires 3")
    passed = s <= 3 + tol and (equality or not report.purity_flag)
    return RelationCheck("theorem2", passed, s, 3.0, 3.0 - s, equality)


def check_bell_monogamy(report: TradeoffReport, tol: float = BELL_TOL) -> RelationCheck:
    s = report.sum_bell_sq
    if abs(s - 4 * report.sum_f2_sq) > CONSISTENCY_TOL:
        raise IdentityViolationError("sum B_max^2 differs from 4 sum F2^2")
    return RelationCheck("bell_monogamy", s <= 12 + tol, s, 12.0, 12.0 - s)


def exclusivity_check(report: TradeoffReport, tol: float = DEFAULT_TOL) -> ExclusivityVerdict:
    """At most two pairs violate the 3-setting inequality; a maximally violating pair silences the rest."""
    f3 = report.f3_sq
    violating = tuple(p for p in PAIRS if f3[p] > 1 + tol)
    maximal = tuple(p for p in PAIRS if f3[p] >= 3 - tol)
    others_obey = all(f3[q] <= 1 + tol for p in maximal for q in PAIRS if q != p)
    verdict = ExclusivityVerdict(violating, maximal, others_obey)
    if not verdict.ok and report.sum_f3_sq <= 3 + tol:
        raise IdentityViolationError(
            f"exclusivity broken by a state with sum F3^2 = {report.sum_f3_sq!r} <= 3")
    return verdict


def mdcc_state(m: float) -> PureState:
    """(|000> + m(|010> + |101>) + |111>) / sqrt(2 + 2m^2)."""
    if not 0 <= m <= 1:
        raise ValueError("m must lie in [0, 1]")
    v = np.zeros(8, dtype=complex)
    v[0b000] = v[0b111] = 1.0
    v[0b010] = v[0b101] = m
    return PureState(v / np.sqrt(2 + 2 * m * m))


def mdcc_closed_form(m: float) -> dict:
    s = 1 + m * m
    ab = ((1 - m * m) / s) ** 2
    return {
        "f3_sq_ab": ab,
        "f3_sq_bc": ab,
        "f3_sq_ac": 1 + 8 * m * m / s ** 2,
        "tangle": 1 - 4 * m * m / s ** 2,
    }


def mdcc_point(m: float) -> MdccPoint:
    """Numeric metrics of the MDCC state next to their closed forms."""
    rep = tradeoff_report(mdcc_state(m))
    return MdccPoint(
        m=float(m),
        f3_sq_ab=rep.f3_sq["AB"], f3_sq_bc=rep.f3_sq["BC"], f3_sq_ac=rep.f3_sq["AC"],
        tangle=rep.tangle, complementarity_lhs=rep.complementarity_lhs,
        closed_form=mdcc_closed_form(m),
    )


def check_conjecture(psi: Union[PureState, TradeoffReport], tol: float = DEFAULT_TOL) -> ConjectureCheck:
    """2 tau + max pair F3^2 <= 3; failing states keep their amplitudes."""
    rep = psi if isinstance(psi, TradeoffReport) else tradeoff_report(psi)
    if not rep.purity_flag:
        raise ValueError("the complementarity conjecture is checked on pure states only")
    lhs = rep.complementarity_lhs
    passed = lhs <= 3 + tol
    amps = None
    if not passed and isinstance(psi, PureState):
        amps = [[float(z.real), float(z.imag)] for z in psi.amplitudes]
    return ConjectureCheck(lhs, rep.tangle, rep.max_pair_f3_sq, passed, amps)
