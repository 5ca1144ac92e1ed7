"""Command-line front end.

Every command prints a JSON report on stdout; solvers can additionally write
the scheme to ``--out``.  Exit codes: 0 ok, 2 invalid input, 3 size budget
exceeded, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import fixtures
from .bicriteria import GRID_BUDGET, solve_bicriteria
from .core import TIE_TOL, ValidationError, expected_sender_utility, persuasiveness_slack
from .exact import DEFAULT_BUDGET, BudgetExceeded, solve_optimal_scheme
from .harness import simulate
from .io import (
    dumps,
    format_number,
    load_instance,
    mfs_from_dict,
    objective_from_dict,
    read_json,
    scheme_from_dict,
    scheme_to_dict,
)
from .lp import LpError, LpNumericalError
from .mfs import kstar_bruteforce, solve_mfs_kuniform

EXIT_OK, EXIT_INVALID, EXIT_BUDGET, EXIT_NUMERIC = 0, 2, 3, 4


def _slack_json(x: float):
    return None if x == float("inf") else x


def _load(args):
    inst, objective = load_instance(args.instance)
    if args.threshold is not None or args.preferred is not None:
        doc = {"type": "k-voting", "params": {}}
        if objective is not None:
            doc["params"]["threshold"] = objective.threshold
            doc["params"]["preferred_action"] = inst.profile_names(objective.preferred)
        if args.threshold is not None:
            doc["params"]["threshold"] = args.threshold
        if args.preferred is not None:
            doc["params"]["preferred_action"] = args.preferred
        objective = objective_from_dict(inst, doc)
    if objective is None:
        raise ValidationError("instance has no objective; pass --threshold")
    return inst, objective


def _write(path: str | None, doc: dict) -> None:
    if path:
        Path(path).write_text(dumps(doc))


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, indent=2) + "\n")


def cmd_solve_exact(args) -> int:
    t0 = time.perf_counter()
    inst, objective = _load(args)
    scheme, value = solve_optimal_scheme(inst, objective, args.eps, args.budget)
    slack = persuasiveness_slack(inst, scheme)
    _write(args.out, scheme_to_dict(inst, scheme))
    print(f"value {value:.6f}  slack {slack:.6g}", file=sys.stderr)
    _emit({
        "value": value,
        "slack": _slack_json(slack),
        "eps": args.eps,
        "n_signals": scheme.n_signals,
        "seconds": time.perf_counter() - t0,
        "scheme": scheme_to_dict(inst, scheme),
    })
    return EXIT_OK


def cmd_solve_bicriteria(args) -> int:
    t0 = time.perf_counter()
    if not 0 < args.delta < 1:
        raise ValidationError("delta must lie in (0, 1)")
    inst, objective = _load(args)
    res = solve_bicriteria(inst, objective, args.eps, args.delta, args.k_override, args.budget)
    slack = persuasiveness_slack(inst, res.scheme)
    _write(args.out, scheme_to_dict(inst, res.scheme))
    if res.guarantee:
        banner = (
            f"guarantee: value >= {objective.alpha:g}*(1-{args.delta:g})*OPT and "
            f"{args.eps:g}-persuasive"
        )
    else:
        banner = None
    print(f"value {res.value:.6f}  slack {slack:.6g}  k {res.k_used}  |K| {res.grid_size}", file=sys.stderr)
    if banner:
        print(banner, file=sys.stderr)
    _emit({
        "value": res.value,
        "slack": _slack_json(slack),
        "eps": args.eps,
        "delta": args.delta,
        "k_used": res.k_used,
        "grid_size": res.grid_size,
        "guarantee": banner,
        "gamma": [
            {"posterior": [str(q) for q in p], "weight": w} for p, w in res.gamma.items()
        ],
        "seconds": time.perf_counter() - t0,
        "scheme": scheme_to_dict(inst, res.scheme),
    })
    return EXIT_OK


def cmd_solve_mfs(args) -> int:
    t0 = time.perf_counter()
    inst = mfs_from_dict(read_json(args.matrix))
    sol = solve_mfs_kuniform(inst, args.eps, args.budget)
    report = {
        "satisfied": sol.satisfied,
        "x": [format_number(v) for v in sol.x],
        "k_used": sol.k_used,
        "eps": args.eps,
    }
    if args.compare_oracle:
        kstar = kstar_bruteforce(inst)
        report["kstar"] = kstar
        report["dominates_oracle"] = sol.satisfied >= kstar
    report["seconds"] = time.perf_counter() - t0
    _emit(report)
    return EXIT_OK


def cmd_audit(args) -> int:
    inst, objective = _load(args)
    scheme = scheme_from_dict(inst, read_json(args.scheme))
    slack = persuasiveness_slack(inst, scheme)
    _emit({
        "value": expected_sender_utility(inst, objective, scheme),
        "slack": _slack_json(slack),
        "persuasive": slack >= -TIE_TOL,
        "eps_persuasive": slack >= -args.eps - TIE_TOL,
        "eps": args.eps,
    })
    return EXIT_OK


def cmd_simulate(args) -> int:
    inst, objective = _load(args)
    scheme = scheme_from_dict(inst, read_json(args.scheme))
    report = simulate(inst, objective, scheme, args.trials, args.seed, args.eps)
    _emit(report.to_dict())
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.preset == "example":
        doc = fixtures.example_document(args.threshold or 2)
    elif args.preset == "example-scheme":
        doc = fixtures.example_scheme_document()
    elif args.preset == "random-voting":
        doc = fixtures.random_voting_document(args.receivers, args.states, args.seed, args.threshold)
    else:
        doc = fixtures.random_mfs_document(args.rows, args.cols, args.seed)
    text = dumps(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="persuasion", description="Public Bayesian persuasion solvers")
    sub = p.add_subparsers(dest="cmd", required=True)

    def instance_args(sp):
        sp.add_argument("instance", help="instance JSON")
        sp.add_argument("--threshold", type=int, default=None, help="override the k-voting threshold")
        sp.add_argument("--preferred", default=None, help="override the preferred action name")

    sp = sub.add_parser("solve-exact", help="optimal scheme via the full profile LP")
    instance_args(sp)
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--out", default=None, help="write the scheme JSON here")
    sp.set_defaults(func=cmd_solve_exact)

    sp = sub.add_parser("solve-bicriteria", help="k-uniform posterior decomposition")
    instance_args(sp)
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--delta", type=float, default=0.5)
    sp.add_argument("--k-override", type=int, default=None)
    sp.add_argument("--budget", type=int, default=GRID_BUDGET)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_solve_bicriteria)

    sp = sub.add_parser("solve-mfs", help="eps-feasible subsystem over the simplex")
    sp.add_argument("matrix", help="matrix JSON {matrix, range}")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--budget", type=int, default=GRID_BUDGET)
    sp.add_argument("--compare-oracle", action="store_true", help="also compute k* by subset enumeration")
    sp.set_defaults(func=cmd_solve_mfs)

    sp = sub.add_parser("audit", help="persuasiveness slack and sender value of a scheme")
    instance_args(sp)
    sp.add_argument("scheme")
    sp.add_argument("--eps", type=float, default=0.0)
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("simulate", help="Monte Carlo play of a scheme")
    instance_args(sp)
    sp.add_argument("scheme")
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--eps", type=float, default=0.0)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("gen", help="write a fixture")
    sp.add_argument("--preset", required=True, choices=["example", "example-scheme", "random-voting", "random-mfs"])
    sp.add_argument("--receivers", type=int, default=3)
    sp.add_argument("--states", type=int, default=3)
    sp.add_argument("--threshold", type=int, default=None)
    sp.add_argument("--rows", type=int, default=4)
    sp.add_argument("--cols", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except LpNumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValidationError, ValueError, LpError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
