"""Independent solution verification.

Verification never trusts the incremental engine or the 64-bit value
hashes: domains are checked structurally and constraints re-evaluated
from scratch with the relational-semantics ground evaluator.  This
guards against the (rare) possibility of a hash collision steering the
search to an assignment that only looks feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .speclang.ground import UNDEF, eval_ground
from .speclang.printer import print_expr


@dataclass
class VerifyReport:
    ok: bool
    failures: list = field(default_factory=list)
    objective: int | None = None

    def __str__(self):
        if self.ok:
            head = "solution verified"
            if self.objective is not None:
                head += f" (objective {self.objective})"
            return head
        return "solution rejected:\n  " + "\n  ".join(self.failures)


def verify_solution(model, assignment: dict) -> VerifyReport:
    failures = []
    env = {k: v for k, v in model.params.items()
           if not (isinstance(v, tuple) and v and v[0] == "enum")}
    for name, dom in model.finds:
        if name not in assignment:
            failures.append(f"missing value for {name}")
            continue
        err = dom.conforms(assignment[name])
        if err:
            failures.append(f"{name}: {err}")
    if failures:
        return VerifyReport(False, failures)
    env.update(assignment)
    for c in model.constraints:
        v = eval_ground(c, env)
        if v is UNDEF:
            failures.append(f"constraint undefined: {print_expr(c)}")
        elif v is not True:
            failures.append(f"constraint violated: {print_expr(c)}")
    objective = None
    if model.objective is not None:
        o = eval_ground(model.objective[1], env)
        objective = None if o is UNDEF else o
    return VerifyReport(not failures, failures, objective)
