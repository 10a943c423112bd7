"""Monte Carlo verification scans and their CSV / JSON outputs."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .ensembles import EnsembleSpec, draw
from .errors import IdentityViolationError
from .statefile import fmt17, state_to_dict, write_json
from .tradeoff import (
    check_bell_monogamy, check_theorem1, check_theorem2, exclusivity_check, tradeoff_report,
)

SCHEMA_VERSION = "1.0"
SCAN_COLUMNS = (
    "sample_index", "seed", "ensemble", "f2_ab", "f2_ac", "f2_bc", "f3_ab", "f3_ac", "f3_bc",
    "sum_f2", "sum_f3", "bell_sq_sum", "tangle", "conj_lhs", "t1_pass", "t2_pass", "bell_pass",
    "conj_pass",
)
CHUNK = 256


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = 1e-9
    restarts: int = 20
    budget: int = 10_000
    workers: int = 1
    timestamp: bool = True

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def bell_tolerance(self) -> float:
        return 10 * self.tolerance


@dataclass
class ScanRecord:
    sample_index: int
    seed: int
    ensemble: str
    f2: dict
    f3: dict
    sum_f2: float
    sum_f3: float
    bell_sq_sum: float
    tangle: Optional[float]
    conj_lhs: Optional[float]
    t1_pass: bool
    t2_pass: bool
    bell_pass: bool
    conj_pass: Optional[bool]
    exclusivity_count: int = 0
    exclusivity_ok: bool = True
    errors: list = field(default_factory=list)

    def csv_row(self) -> str:
        def num(x):
            return "" if x is None else fmt17(x)

        def flag(x):
            return "" if x is None else ("1" if x else "0")

        cells = [str(self.sample_index), str(self.seed), self.ensemble,
                 num(self.f2["AB"]), num(self.f2["AC"]), num(self.f2["BC"]),
                 num(self.f3["AB"]), num(self.f3["AC"]), num(self.f3["BC"]),
                 num(self.sum_f2), num(self.sum_f3), num(self.bell_sq_sum),
                 num(self.tangle), num(self.conj_lhs),
                 flag(self.t1_pass), flag(self.t2_pass), flag(self.bell_pass), flag(self.conj_pass)]
        return ",".join(cells)

    @property
    def passed(self) -> bool:
        return (self.t1_pass and self.t2_pass and self.bell_pass and self.conj_pass is not False
                and self.exclusivity_ok and not self.errors)


def scan_record(spec: EnsembleSpec, index: int, config: RunConfig, conjecture: bool) -> ScanRecord:
    state = draw(spec, index)
    rep = tradeoff_report(state)
    tol = config.tolerance
    errors = []
    t1 = check_theorem1(rep, tol).passed
    try:
        t2 = check_theorem2(rep, tol).passed
    except IdentityViolationError as exc:
        t2, errors = False, errors + [str(exc)]
    try:
        bell = check_bell_monogamy(rep, config.bell_tolerance).passed
    except IdentityViolationError as exc:
        bell, errors = False, errors + [str(exc)]
    try:
        ex = exclusivity_check(rep, tol)
        ex_count, ex_ok = ex.count, ex.ok
    except IdentityViolationError as exc:
        ex_count, ex_ok, errors = 3, False, errors + [str(exc)]
    conj_lhs = conj_pass = None
    if conjecture and rep.purity_flag:
        conj_lhs = rep.complementarity_lhs
        conj_pass = conj_lhs <= 3 + tol
    return ScanRecord(
        sample_index=index, seed=spec.seed, ensemble=spec.kind,
        f2=rep.f2_sq, f3=rep.f3_sq, sum_f2=rep.sum_f2_sq, sum_f3=rep.sum_f3_sq,
        bell_sq_sum=rep.sum_bell_sq, tangle=rep.tangle, conj_lhs=conj_lhs,
        t1_pass=t1, t2_pass=t2, bell_pass=bell, conj_pass=conj_pass,
        exclusivity_count=ex_count, exclusivity_ok=ex_ok, errors=errors,
    )


def _chunk(args):
    spec, start, stop, config, conjecture = args
    return [scan_record(spec, k, config, conjecture) for k in range(start, stop)]


def resolve_workers(requested: Optional[int]) -> int:
    env = os.environ.get("QSTEER_WORKERS")
    if env:
        return max(1, int(env))
    if requested:
        return max(1, requested)
    return os.cpu_count() or 1


def iter_records(spec: EnsembleSpec, config: RunConfig, conjecture: bool = False):
    """Yield ScanRecords in sample order, computed on ``config.workers`` processes."""
    jobs = [(spec, s, min(s + CHUNK, spec.count), config, conjecture)
            for s in range(0, spec.count, CHUNK)]
    if config.workers == 1:
        for job in jobs:
            yield from _chunk(job)
        return
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        for chunk in pool.map(_chunk, jobs):
            yield from chunk


class _Summary:
    def __init__(self, spec, conjecture):
        self.spec = spec
        self.conjecture = conjecture
        self.n = 0
        self.failures = {"theorem1": 0, "theorem2": 0, "bell_monogamy": 0, "conjecture": 0,
                         "exclusivity": 0}
        self.min_margin = {"theorem1": float("inf"), "theorem2": float("inf"),
                           "bell_monogamy": float("inf")}
        self.max_sum = {"sum_f2": float("-inf"), "sum_f3": float("-inf"), "bell_sq_sum": float("-inf")}
        self.max_pure_dev = None
        self.max_conj = None
        self.max_exclusivity_count = 0
        self.worst_index, self.worst_value = None, float("-inf")
        self.errors = []

    def add(self, r: ScanRecord):
        self.n += 1
        self.failures["theorem1"] += not r.t1_pass
        self.failures["theorem2"] += not r.t2_pass
        self.failures["bell_monogamy"] += not r.bell_pass
        self.failures["conjecture"] += r.conj_pass is False
        self.failures["exclusivity"] += not r.exclusivity_ok
        self.min_margin["theorem1"] = min(self.min_margin["theorem1"], 3 - r.sum_f2)
        self.min_margin["theorem2"] = min(self.min_margin["theorem2"], 3 - r.sum_f3)
        self.min_margin["bell_monogamy"] = min(self.min_margin["bell_monogamy"], 12 - r.bell_sq_sum)
        self.max_sum["sum_f2"] = max(self.max_sum["sum_f2"], r.sum_f2)
        self.max_sum["sum_f3"] = max(self.max_sum["sum_f3"], r.sum_f3)
        self.max_sum["bell_sq_sum"] = max(self.max_sum["bell_sq_sum"], r.bell_sq_sum)
        self.max_exclusivity_count = max(self.max_exclusivity_count, r.exclusivity_count)
        if r.tangle is not None:
            dev = abs(r.sum_f3 - 3)
            self.max_pure_dev = dev if self.max_pure_dev is None else max(self.max_pure_dev, dev)
        if r.conj_lhs is not None:
            self.max_conj = r.conj_lhs if self.max_conj is None else max(self.max_conj, r.conj_lhs)
        key = r.conj_lhs if r.conj_lhs is not None else r.sum_f3
        if key > self.worst_value:
            self.worst_index, self.worst_value = r.sample_index, key
        for e in r.errors:
            if len(self.errors) < 20:
                self.errors.append({"sample_index": r.sample_index, "error": e})

    @property
    def total_failures(self) -> int:
        return sum(self.failures.values())

    def to_dict(self, config, worst_file):
        measure = {"haar_pure": "Haar (normalized complex Gaussian amplitudes)",
                   "ginibre_mixed": "Ginibre-induced (G G^dag / Tr)",
                   "real_canonical": "uniform on the positive orthant of the unit 4-sphere"}
        return {
            "schema_version": SCHEMA_VERSION,
            "command": "scan",
            "ensemble": {"kind": self.spec.kind, "num_qubits": self.spec.num_qubits,
                         "rank": self.spec.rank, "count": self.spec.count, "seed": self.spec.seed,
                         "measure": measure[self.spec.kind]},
            "tolerance": config.tolerance,
            "bell_tolerance": config.bell_tolerance,
            "conjecture_checked": self.conjecture,
            "samples": self.n,
            "failures": self.failures,
            "total_failures": self.total_failures,
            "min_margin": self.min_margin,
            "max_sums": self.max_sum,
            "max_abs_pure_identity_deviation": self.max_pure_dev,
            "max_conjecture_lhs": self.max_conj,
            "max_pairs_violating_3_setting": self.max_exclusivity_count,
            "worst_sample": {"sample_index": self.worst_index,
                             "metric": "conj_lhs" if self.max_conj is not None else "sum_f3",
                             "value": self.worst_value, "file": worst_file},
            "errors": self.errors,
        }


def run_scan(spec: EnsembleSpec, config: RunConfig, out_csv, conjecture: bool = False,
             summary_path=None, worst_path=None) -> dict:
    """Write the scan CSV, the summary JSON and the worst sample's state file."""
    out_csv = Path(out_csv)
    stem = out_csv.with_suffix("")
    summary_path = Path(summary_path) if summary_path else Path(f"{stem}.summary.json")
    worst_path = Path(worst_path) if worst_path else Path(f"{stem}.worst.json")
    summary = _Summary(spec, conjecture)
    with out_csv.open("w", encoding="utf-8", newline="\n") as fh:
        if config.timestamp:
            fh.write(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
        fh.write(",".join(SCAN_COLUMNS) + "\n")
        for rec in iter_records(spec, config, conjecture):
            fh.write(rec.csv_row() + "\n")
            summary.add(rec)
    write_json(worst_path, {**state_to_dict(draw(spec, summary.worst_index)),
                            "source": {"ensemble": spec.kind, "seed": spec.seed,
                                       "sample_index": summary.worst_index}})
    result = summary.to_dict(config, str(worst_path))
    write_json(summary_path, result)
    return result


def read_csv_body(path) -> str:
    """CSV text without the timestamp comment line."""
    lines = Path(path).read_text(encoding="utf-8").splitlines(keepends=True)
    return "".join(l for l in lines if not l.startswith("#"))
