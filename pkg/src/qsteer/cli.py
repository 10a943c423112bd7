"""``qsteer`` command-line entry point.

Exit codes: 0 success, 1 a relation failed beyond tolerance, 2 invalid input.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .canonical import (
    acin_decompose, absolute_chsh_spectral, filtering_oracle, fidelity, global_unitary_chsh_sq,
    invariant_deltas, theorem3_collusion_check, theorem4_filtering, theorem5_global_unitary,
    theorem6_steering_global_unitary,
)
from .entanglement import concurrence, tangle
from .ensembles import EnsembleSpec
from .errors import QSteerError, UnsupportedInputError
from .harness import SCHEMA_VERSION, RunConfig, resolve_workers, run_scan
from .statefile import fmt17, read_state, write_json
from .steering import chsh_expectation, horodecki_settings, optimize_settings, violation_report
from .tensor import DensityMatrix, PureState, density_from_pure, partial_trace
from .tradeoff import (
    MDCC_TOL, PAIRS, check_bell_monogamy, check_conjecture, check_theorem1, check_theorem2,
    exclusivity_check, mdcc_point, tradeoff_report,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
ORACLE_MARGIN = 1e-6
OPTIMIZER_TOL = 1e-4
MDCC_COLUMNS = ("m", "f3_ab", "f3_bc", "f3_ac", "tangle", "comp_lhs",
                "cf_f3_ab", "cf_f3_bc", "cf_f3_ac", "cf_tangle", "max_delta", "pass")


def _warn(msg):
    print(f"warning: {msg}", file=sys.stderr)


def _config(args) -> RunConfig:
    return RunConfig(
        tolerance=args.tol, restarts=args.restarts, budget=args.budget,
        workers=resolve_workers(getattr(args, "workers", None)),
        timestamp=not getattr(args, "no_timestamp", False),
    )


def _relation(check) -> dict:
    out = {"passed": check.passed, "value": check.value, "bound": check.bound, "margin": check.margin}
    if check.equality is not None:
        out["equality"] = check.equality
    return out


def _pair_oracle(rho2, config, seed):
    """Closed-form steering maxima against the numeric optimizer."""
    rep = violation_report(rho2)
    out = {}
    for n, closed in ((2, rep.f2_sq), (3, rep.f3_sq)):
        _, value = optimize_settings(rho2, n, restarts=config.restarts, seed=seed)
        delta = abs(value ** 2 - closed)
        out[f"f{n}_sq"] = {"closed_form": closed, "optimizer": value ** 2, "delta": delta,
                           "agree": delta <= OPTIMIZER_TOL}
    out["bell_max"] = {"closed_form": rep.bell_max,
                       "explicit_operator": chsh_expectation(rho2, horodecki_settings(rho2))}
    return out


def cmd_analyze(args) -> int:
    config = _config(args)
    state = read_state(args.inp)
    report = {"schema_version": SCHEMA_VERSION, "command": "analyze",
              "num_qubits": state.num_qubits, "pure": isinstance(state, PureState)}
    failed = False
    if state.num_qubits == 2:
        rho2 = state if isinstance(state, DensityMatrix) else density_from_pure(state)
        v = violation_report(rho2)
        report["violation"] = {"f2_sq": v.f2_sq, "f3_sq": v.f3_sq, "bell_max": v.bell_max,
                               "singulars": list(v.singulars)}
        report["concurrence"] = concurrence(rho2)
        if args.oracle:
            report["oracle"] = _pair_oracle(rho2, config, 0)
            failed = not all(report["oracle"][k]["agree"] for k in ("f2_sq", "f3_sq"))
    elif state.num_qubits == 3:
        rep = tradeoff_report(state)
        t1 = check_theorem1(rep, config.tolerance)
        t2 = check_theorem2(rep, config.tolerance)
        bell = check_bell_monogamy(rep, config.bell_tolerance)
        ex = exclusivity_check(rep, config.tolerance)
        report["tradeoff"] = {
            "f2_sq": rep.f2_sq, "f3_sq": rep.f3_sq, "bell_max_sq": rep.bell_max_sq,
            "singulars": {p: list(s) for p, s in rep.singulars.items()},
            "sum_f2_sq": rep.sum_f2_sq, "sum_f3_sq": rep.sum_f3_sq, "sum_bell_sq": rep.sum_bell_sq,
        }
        report["relations"] = {"theorem1": _relation(t1), "theorem2": _relation(t2),
                               "bell_monogamy": _relation(bell)}
        report["exclusivity"] = {"violating_pairs": list(ex.violating_pairs),
                                 "maximal_pairs": list(ex.maximal_pairs),
                                 "others_obey": ex.others_obey, "ok": ex.ok}
        failed = not (t1.passed and t2.passed and bell.passed and ex.ok)
        if isinstance(state, PureState):
            tr = tangle(state)
            conj = check_conjecture(rep, config.tolerance)
            report["tangle"] = {"tangle": tr.tangle, "focus": tr.focus,
                                "c_sq_focus_rest": tr.c_sq_focus_rest,
                                "c_sq_pair1": tr.c_sq_pair1, "c_sq_pair2": tr.c_sq_pair2}
            report["conjecture"] = {"lhs": conj.lhs, "passed": conj.passed}
            failed = failed or not conj.passed
        else:
            report["tangle"] = None
        if args.oracle:
            report["oracle"] = {p: _pair_oracle(partial_trace(state, p), config, k)
                                for k, p in enumerate(PAIRS)}
            failed = failed or not all(report["oracle"][p][k]["agree"]
                                       for p in PAIRS for k in ("f2_sq", "f3_sq"))
    else:
        raise UnsupportedInputError("analyze handles two- and three-qubit states")
    write_json(args.out, report)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_scan(args) -> int:
    config = _config(args)
    kwargs = {"kind": args.ensemble, "count": args.count, "seed": args.seed}
    if args.rank is not None:
        kwargs["rank"] = args.rank
    spec = EnsembleSpec(**kwargs)
    summary = run_scan(spec, config, args.out, conjecture=args.conjecture,
                       summary_path=args.summary, worst_path=args.worst)
    print(f"{summary['samples']} samples, {summary['total_failures']} failures, "
          f"worst sample in {summary['worst_sample']['file']}")
    return EXIT_FAIL if summary["total_failures"] else EXIT_OK


def cmd_mdcc(args) -> int:
    if not 0 <= args.m_start <= args.m_end <= 1:
        raise ValueError("need 0 <= m-start <= m-end <= 1")
    if args.steps < 1:
        raise ValueError("steps must be >= 1")
    tol = args.tol if args.tol is not None else MDCC_TOL
    failed = False
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(MDCC_COLUMNS) + "\n")
        for m in np.linspace(args.m_start, args.m_end, args.steps + 1):
            pt = mdcc_point(float(m))
            cf = pt.closed_form
            ok = pt.max_delta <= tol
            failed = failed or not ok
            cells = [pt.m, pt.f3_sq_ab, pt.f3_sq_bc, pt.f3_sq_ac, pt.tangle, pt.complementarity_lhs,
                     cf["f3_sq_ab"], cf["f3_sq_bc"], cf["f3_sq_ac"], cf["tangle"], pt.max_delta]
            fh.write(",".join(fmt17(x) for x in cells) + f",{int(ok)}\n")
    return EXIT_FAIL if failed else EXIT_OK


def _require_pure3(state):
    if not isinstance(state, PureState):
        raise UnsupportedInputError("a pure three-qubit state is required")
    if state.num_qubits != 3:
        raise UnsupportedInputError("a three-qubit state is required")
    return state


def cmd_canonical(args) -> int:
    psi = _require_pure3(read_state(args.inp))
    c = acin_decompose(psi)
    fid = fidelity(psi, c.reconstruct())
    report = {"schema_version": SCHEMA_VERSION, "command": "canonical",
              "canonical": c.to_dict(), "real_class": c.is_real_class,
              "fidelity": fid, "invariant_deltas": invariant_deltas(psi, c)}
    write_json(args.out, report)
    return EXIT_OK


def _verdict(v) -> dict:
    return {"scenario": v.scenario, "applicable": v.applicable, "pair_violates": v.pair_violates,
            "tradeoff_broken": v.tradeoff_broken, "all_pairs_violate": v.all_pairs_violate,
            "criteria": v.criteria_detail}


def cmd_theorems(args) -> int:
    config = _config(args)
    psi = _require_pure3(read_state(args.inp))
    c = acin_decompose(psi)
    t3 = theorem3_collusion_check(psi)
    v4, v5, v6 = theorem4_filtering(c), theorem5_global_unitary(c), theorem6_steering_global_unitary(c)
    report = {
        "schema_version": SCHEMA_VERSION, "command": "theorems",
        "canonical": c.to_dict(), "real_class": c.is_real_class,
        "theorem3": {"non_mixed_marginals": t3.count, "bloch_norms": t3.bloch_norms,
                     "holds": t3.holds},
        "theorem4": _verdict(v4), "theorem5": _verdict(v5), "theorem6": _verdict(v6),
    }
    if not c.is_real_class:
        _warn("state is outside the real canonical class; theorem 4-6 verdicts are not applicable")
    failed = False
    if args.oracle and c.is_real_class:
        cross = {}
        for pair in PAIRS:
            rho2 = partial_trace(psi, pair)
            spectral = absolute_chsh_spectral(rho2)
            predicted = v5.pair_violates[pair]
            fo = filtering_oracle(rho2, budget=config.budget)
            found = fo.value > 2 + ORACLE_MARGIN
            entry = {
                "spectral": {"chsh_sq_max": global_unitary_chsh_sq(rho2), "violates": spectral,
                             "criterion": predicted, "agree": spectral == predicted},
                "filtering": {"oracle_bell_max": fo.value, "violates": found,
                              "criterion": v4.pair_violates[pair], "agree": found == v4.pair_violates[pair],
                              "evaluations": fo.evaluations},
            }
            if found and not v4.pair_violates[pair]:
                entry["filtering"]["certified_value"] = chsh_expectation(
                    fo.filtered_state(rho2), horodecki_settings(fo.filtered_state(rho2)))
                entry["filtering"]["classification"] = "criterion_counterexample"
                failed = True
            elif v4.pair_violates[pair] and not found:
                entry["filtering"]["classification"] = "oracle_budget_shortfall"
                _warn(f"filtering oracle found no violation for {pair} within budget {config.budget}")
            failed = failed or spectral != predicted
            cross[pair] = entry
        report["oracle"] = cross
    write_json(args.out, report)
    return EXIT_FAIL if failed else EXIT_OK


def _add_common(p, tol_default=1e-9):
    p.add_argument("--tol", type=float, default=tol_default, help="boundary tolerance for pass/fail")
    p.add_argument("--restarts", type=int, default=20, help="optimizer restarts")
    p.add_argument("--budget", type=int, default=10_000, help="filtering-oracle evaluation budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsteer", description="Steering and Bell-CHSH trade-off checks "
                                     "for two- and three-qubit states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="all metrics for one state file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--oracle", action="store_true", help="cross-check closed forms numerically")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan", help="Monte Carlo verification scan")
    p.add_argument("--ensemble", required=True,
                   choices=["haar-pure", "ginibre-mixed", "real-canonical"])
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--rank", type=int, default=None, help="Ginibre rank (default: full)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--summary", default=None, help="summary JSON path (default: OUT stem + .summary.json)")
    p.add_argument("--worst", default=None, help="worst-sample state path (default: OUT stem + .worst.json)")
    p.add_argument("--conjecture", action="store_true", help="also check 2 tau + max F3^2 <= 3")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: all cores; QSTEER_WORKERS overrides)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp header line")
    _add_common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("mdcc", help="sweep the MDCC family against its closed forms")
    p.add_argument("--m-start", type=float, default=0.0)
    p.add_argument("--m-end", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=100, help="number of intervals (steps + 1 points)")
    p.add_argument("--out", required=True)
    p.add_argument("--tol", type=float, default=None, help=f"closed-form tolerance (default {MDCC_TOL})")
    p.set_defaults(func=cmd_mdcc)

    p = sub.add_parser("canonical", help="local-unitary canonical form of a pure state")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("theorems", help="collusion verdicts from the canonical coefficients")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--oracle", action="store_true", help="spectral and filtering cross-checks")
    _add_common(p)
    p.set_defaults(func=cmd_theorems)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QSteerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT if isinstance(exc, ValueError) else EXIT_FAIL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
