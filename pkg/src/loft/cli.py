"""Command-line front end.

``loft solve`` reads a specification and a parameter file, runs one or
more seeded searches, writes a solution file in re-parseable letting
syntax plus a JSON-lines trajectory per run, and verifies the reported
solution independently before exiting 0.  Exit codes: 0 a verified
feasible solution was found, 20 no feasible solution within the limits,
1 bad input.

``loft score`` compares trajectory logs from several solvers with the
pairwise incomplete scoring method and emits CSV.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .canon import canon_to_literal
from .engine import EvalContext
from .generate import generate_with_retry
from .neighbourhoods import instantiate_structures
from .scoring import score_series, series_to_csv
from .search import SearchConfig, Solver, strictly_better
from .speclang import SpecError, instantiate, parse_params, parse_spec
from .verify import verify_solution

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_SOLUTION = 20


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="loft")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve an instance")
    ps.add_argument("spec", type=Path)
    ps.add_argument("param", type=Path, nargs="?")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--time-limit", type=float, default=None, metavar="SEC")
    ps.add_argument("--eval-limit", type=int, default=None, metavar="N")
    ps.add_argument("--runs", type=int, default=1, metavar="K")
    ps.add_argument("--out", type=Path, default=Path("."), metavar="DIR")
    ps.add_argument("--list-neighbourhoods", action="store_true")
    ps.add_argument("--dump-tree", action="store_true")

    pc = sub.add_parser("score", help="score trajectory logs pairwise")
    pc.add_argument("manifest", type=Path,
                    help="CSV with columns solver,instance,run,trajectory_path")
    pc.add_argument("--time-limit", type=int, required=True)
    pc.add_argument("--direction", choices=("min", "max"), default="min")
    pc.add_argument("--out", type=Path, default=None, metavar="CSV")

    args = parser.parse_args(argv)
    if args.command == "solve":
        return _cmd_solve(args)
    return _cmd_score(args)


def _cmd_solve(args) -> int:
    try:
        spec = parse_spec(args.spec.read_text())
        raw = parse_params(args.param.read_text()) if args.param else {}
        model, _ = instantiate(spec, raw)
    except (OSError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.list_neighbourhoods:
        from .engine import eliminate_integer_invariants
        for ns in instantiate_structures(eliminate_integer_invariants(model)):
            print(f"{ns.var}: {ns.name}")
        return EXIT_OK

    if args.dump_tree:
        import random
        ctx = EvalContext(model)
        rng = random.Random(args.seed)
        ctx.reset({name: generate_with_retry(dom, rng)[0] for name, dom in model.finds})
        json.dump(ctx.dump_tree(), sys.stdout, indent=1)
        print()
        return EXIT_OK

    if args.time_limit is None and args.eval_limit is None:
        args.time_limit = 10.0  # never run unbounded by accident

    args.out.mkdir(parents=True, exist_ok=True)
    stem = f"{args.spec.stem}_{args.param.stem}" if args.param else args.spec.stem
    best_result = None
    find_domains = dict(model.finds)
    for k in range(args.runs):
        seed = args.seed + k
        solver = Solver(model, seed=seed, config=SearchConfig(),
                        time_limit=args.time_limit, eval_limit=args.eval_limit)
        result = solver.solve()
        traj_path = args.out / f"{stem}_seed{seed}.trajectory.jsonl"
        with traj_path.open("w") as fh:
            for rec in result.trajectory:
                fh.write(json.dumps(rec) + "\n")
        sol_path = args.out / f"{stem}_seed{seed}.solution"
        _write_solution(sol_path, model, find_domains, result)
        print(f"seed {seed}: violation {result.best_violation}, "
              f"objective {result.best_objective}, "
              f"{result.evaluations} evaluations, {result.wall_time:.2f}s")
        key = (result.best_violation,
               0 if result.best_objective is None else
               (-result.best_objective if model.objective and model.objective[0] == "maximise"
                else result.best_objective))
        if best_result is None or strictly_better(key, best_result[0]):
            best_result = (key, result)

    result = best_result[1]
    if result.best_violation != 0:
        print("no feasible solution found")
        return EXIT_NO_SOLUTION
    report = verify_solution(model, result.best)
    print(str(report))
    if not report.ok:
        return EXIT_NO_SOLUTION
    return EXIT_OK


def _write_solution(path: Path, model, find_domains, result) -> None:
    lines = []
    if result.best_objective is not None:
        lines.append(f"$ objective {result.best_objective}")
    lines.append(f"$ violation {result.best_violation}")
    for name in sorted(result.best):
        dom = find_domains.get(name)
        lines.append(f"letting {name} be {canon_to_literal(result.best[name], dom)}")
    path.write_text("\n".join(lines) + "\n")


def _cmd_score(args) -> int:
    try:
        trajectories = {}
        with args.manifest.open() as fh:
            for row in csv.reader(fh):
                if not row or row[0] == "solver":
                    continue
                solver, instance, run, path = row
                entries = []
                with open(path) as tf:
                    for line in tf:
                        rec = json.loads(line)
                        entries.append((rec["elapsed_ms"] / 1000.0,
                                        rec["violation"], rec["objective"]))
                trajectories[(solver, instance, run)] = entries
        rows = score_series(trajectories, args.time_limit, args.direction)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = series_to_csv(rows)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
