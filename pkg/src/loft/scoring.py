"""Pairwise incomplete scoring of anytime solver runs.

On each instance and run, every ordered pair of solvers is compared by
the quality of the best solution found within the time limit: the
better one scores 1, the worse 0, equal quality splits the point by
time-to-best (t'/(t'+t)), and a solver that found no solution scores 0
regardless of its opponent.  Totals sum over opponents, instances and
runs, and can be evaluated at every integer time limit to show how the
ranking evolves.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass


@dataclass(frozen=True)
class ScoreRecord:
    solver: str
    instance: str
    run: str
    quality: float | None
    time_to_best: float
    found: bool


def _better(q1, q2, direction: str) -> bool:
    return q1 < q2 if direction == "min" else q1 > q2


def score_runs(records: list, direction: str = "min") -> dict:
    """Total score per solver over a common (instance, run) grid."""
    solvers = sorted({r.solver for r in records})
    cells = {}
    for r in records:
        key = (r.solver, r.instance, r.run)
        if key in cells:
            raise ValueError(f"duplicate record for {key}")
        cells[key] = r
    grid = sorted({(r.instance, r.run) for r in records})
    for s in solvers:
        for inst, run in grid:
            if (s, inst, run) not in cells:
                raise ValueError(f"missing record: solver {s} on {inst} run {run}")
    totals = {s: 0.0 for s in solvers}
    for inst, run in grid:
        for s in solvers:
            a = cells[(s, inst, run)]
            for s2 in solvers:
                if s2 == s:
                    continue
                b = cells[(s2, inst, run)]
                totals[s] += pairwise_score(a, b, direction)
    return totals


def pairwise_score(a: ScoreRecord, b: ScoreRecord, direction: str = "min") -> float:
    if not a.found:
        return 0.0
    if not b.found:
        return 1.0
    if _better(a.quality, b.quality, direction):
        return 1.0
    if _better(b.quality, a.quality, direction):
        return 0.0
    denom = a.time_to_best + b.time_to_best
    if denom == 0:
        return 0.5
    return b.time_to_best / denom


def records_at_limit(trajectories: dict, limit_s: float, direction: str = "min") -> list:
    """Project improvement trajectories onto ScoreRecords at a time limit.

    ``trajectories`` maps (solver, instance, run) to a list of
    (elapsed_seconds, violation, objective) improvement entries.
    """
    out = []
    for (solver, instance, run), entries in trajectories.items():
        feasible = [(t, obj) for t, viol, obj in entries if viol == 0 and t <= limit_s]
        if not feasible:
            out.append(ScoreRecord(solver, instance, run, None, 0.0, False))
            continue
        objs = [obj for _, obj in feasible if obj is not None]
        if objs:
            best = min(objs) if direction == "min" else max(objs)
            t_best = min(t for t, obj in feasible if obj == best)
            q = float(best)
        else:  # satisfaction problems: feasibility is the whole quality
            q = 0.0
            t_best = min(t for t, _ in feasible)
        out.append(ScoreRecord(solver, instance, run, q, t_best, True))
    return out


def score_series(trajectories: dict, time_limit: int, direction: str = "min") -> list:
    """(solver, limit, score) rows for every integer limit in 1..time_limit."""
    rows = []
    for t in range(1, time_limit + 1):
        totals = score_runs(records_at_limit(trajectories, t, direction), direction)
        for solver in sorted(totals):
            rows.append((solver, t, totals[solver]))
    return rows


def series_to_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["solver", "time_limit", "score"])
    for solver, t, score in rows:
        w.writerow([solver, t, f"{score:.6g}"])
    return buf.getvalue()
