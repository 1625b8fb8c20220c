"""Command-line entry point: ``epiupdate {sat,update,oracle,dialogue}``.

Exit codes: 0 success, 1 BOT or a reported violation, 2 malformed input,
3 world cap exceeded, 4 solver breakdown.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import Config
from .constraints import ConstraintSet, load_constraints
from .dialogue import interactive_session, load_scenario, replay
from .errors import DomainError, ParseError, ResourceError, SolverError, SupportError
from .model import (ProbabilityFunction, ProbabilityLabelling, World, check_world_cap,
                    load_baf, load_state)
from .oracle import bridge_suite, check_postulates, equivalence_suite, grid_suite, write_summary
from .solver import feasible
from .update import BOT, METHODS, update

EXIT_OK, EXIT_BOT, EXIT_INPUT, EXIT_RESOURCE, EXIT_SOLVER = 0, 1, 2, 3, 4
DISTRIBUTION_METHODS = ("2ls", "ls-world", "kl-world")


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _emit(args, text: str, data) -> None:
    if args.format == "json":
        print(json.dumps(data))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _labelling_text(L: ProbabilityLabelling) -> str:
    return "".join(f"{a}: {_fmt(L[a])}\n" for a in L.baf.ids)


def _distribution_text(P: ProbabilityFunction) -> str:
    return "".join(
        "{" + ",".join(World(P.baf, m).members) + "}: " + _fmt(p) + "\n"
        for m, p in enumerate(P.probs) if p > 0
    )


def _state_out(args, state) -> None:
    if isinstance(state, ProbabilityFunction):
        _emit(args, _distribution_text(state), state.to_dict())
    else:
        _emit(args, _labelling_text(state), state.to_dict())


def _load_cs(paths, baf) -> ConstraintSet:
    cs = ConstraintSet(baf)
    for p in paths:
        cs = cs | load_constraints(p, baf)
    return cs


def _config(args) -> Config:
    cfg = Config.from_file(args.config) if args.config else Config.from_env()
    overrides = {}
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise DomainError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key] = int(value) if key in ("pivot_factor", "bregman_max_sweeps",
                                                "dense_world_limit", "world_cap") else float(value)
    try:
        return cfg.replace(world_cap=args.world_cap, **overrides)
    except TypeError as exc:
        raise DomainError(f"unknown configuration key: {exc}") from None


# ---- subcommands --------------------------------------------------------------

def cmd_sat(args, cfg: Config) -> int:
    baf = load_baf(args.baf)
    cs = _load_cs(args.constraints, baf)
    result = feasible(cs.polytope(), config=cfg)
    if not result.feasible:
        _emit(args, "UNSAT", {"satisfiable": False, "min_violation": result.min_violation})
        return EXIT_BOT
    L = ProbabilityLabelling(baf, result.witness)
    _emit(args, "SAT\n" + _labelling_text(L), {"satisfiable": True, "witness": L.to_dict()})
    return EXIT_OK


def cmd_update(args, cfg: Config) -> int:
    baf = load_baf(args.baf)
    if args.method in DISTRIBUTION_METHODS:
        check_world_cap(baf, cfg)
    prior = load_state(args.prior, baf, config=cfg)
    cs = _load_cs(args.constraints, baf)
    try:
        result = update(prior, cs, args.method, config=cfg)
    except SupportError as exc:
        _emit(args, f"INFEASIBLE: {exc}", {"result": "INFEASIBLE", "reason": str(exc)})
        return EXIT_BOT
    if result is BOT:
        _emit(args, "BOT", {"result": "BOT"})
        return EXIT_BOT
    _state_out(args, result)
    return EXIT_OK


def cmd_oracle(args, cfg: Config) -> int:
    if args.suite == "postulates":
        ops = args.operator or ["2ls", "labelling", "ls-world", "kl-world"]
        reports = [check_postulates(m, args.trials, args.seed) for m in ops]
    elif args.suite == "equivalence":
        reports = equivalence_suite(args.trials, args.seed)
    elif args.suite == "bridge":
        reports = [bridge_suite(args.trials, args.seed)]
    else:
        reports = [grid_suite(args.trials, args.seed, max_arguments=args.max_arguments)]
    if args.format == "json":
        print(json.dumps([r.summary() for r in reports]))
    else:
        for r in reports:
            print("\n".join(r.lines()))
    if args.summary:
        write_summary(reports, args.summary)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_BOT


def cmd_dialogue(args, cfg: Config) -> int:
    scenario = load_scenario(args.scenario, verbatim=args.verbatim_constraints)
    if args.interactive:
        t = interactive_session(scenario.baf, scenario.constraints, scenario.initial,
                                stdin=sys.stdin, stdout=sys.stdout, config=cfg,
                                prompt="> " if sys.stdin.isatty() else "")
    else:
        t = replay(scenario, config=cfg)
        if args.format == "json":
            sys.stdout.write(t.json_lines())
        else:
            sys.stdout.write(t.table())
    if args.out:
        Path(args.out).write_text(t.json_lines())
    return EXIT_BOT if t.ended_in_bot else EXIT_OK


# ---- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def common_flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommand copies only set a value when given, so flags before the subcommand survive
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        c = argparse.ArgumentParser(add_help=False)
        c.add_argument("--config", default=d(None), help="JSON configuration file (default: $EPIUPDATE_CONFIG)")
        c.add_argument("--world-cap", type=int, default=d(None),
                       help="largest argument count for distribution methods")
        c.add_argument("--set", action="append", default=d(None), metavar="KEY=VALUE",
                       help="override one configuration value")
        c.add_argument("--format", choices=("text", "json"), default=d("text"))
        return c

    common = common_flags(suppress=True)
    p = argparse.ArgumentParser(prog="epiupdate", description="Update probabilistic beliefs in arguments "
                                "under linear atomic constraints.", parents=[common_flags(suppress=False)])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sat", parents=[common], help="check that constraint files can be satisfied together")
    s.add_argument("baf")
    s.add_argument("constraints", nargs="+")
    s.set_defaults(func=cmd_sat)

    s = sub.add_parser("update", parents=[common], help="update a labelling or distribution")
    s.add_argument("baf")
    s.add_argument("prior", help="labelling or distribution JSON file")
    s.add_argument("constraints", nargs="+")
    s.add_argument("--method", choices=tuple(METHODS), default="labelling")
    s.set_defaults(func=cmd_update)

    s = sub.add_parser("oracle", parents=[common], help="run randomized verification suites")
    s.add_argument("--suite", choices=("postulates", "equivalence", "bridge", "grid"), default="postulates")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--operator", action="append", choices=("2ls", "labelling", "ls-world", "kl-world"),
                   help="restrict the postulate suite to these operators (repeatable)")
    s.add_argument("--max-arguments", type=int, default=2, help="largest dimension for the grid suite (<= 3)")
    s.add_argument("--summary", help="write a JSON summary to this file")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("dialogue", parents=[common], help="replay a dialogue scenario")
    s.add_argument("scenario")
    s.add_argument("--interactive", action="store_true", help="read assert/update/show/undo/quit from stdin")
    s.add_argument("--verbatim-constraints", action="store_true",
                   help="use the scenario's verbatim_constraints file instead of its generator")
    s.add_argument("--out", help="also write the transcript as JSON lines to this file")
    s.set_defaults(func=cmd_dialogue)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except ResourceError as exc:
        print(f"epiupdate: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ParseError as exc:
        print(f"epiupdate: parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, ValueError, OSError) as exc:
        print(f"epiupdate: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"epiupdate: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
