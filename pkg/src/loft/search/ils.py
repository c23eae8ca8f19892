"""Iterated local search over an evaluation context.

The outer loop repairs violations, runs a hill climbing phase, and on
failure to improve the local best performs a random walk whose length
grows geometrically until a reset.  Hill climbing is a bandit choice
between a standard climber (accepts only feasible strict improvements)
and a climber that tolerates bounded temporary violations.  Three
cost-weighted UCB controllers pick neighbourhood structures, one per
reward regime: violation reduced, objective improved, objective
improved feasibly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..engine import EvalContext, eliminate_integer_invariants
from ..generate import generate_with_retry
from ..neighbourhoods import apply_structure, instantiate_structures, revert
from ..speclang.ground import UNDEF, eval_ground
from .bandit import UcbController


@dataclass
class SearchConfig:
    walk_init: float = 10.0
    walk_growth: float = 1.3
    walk_cap: float = 500.0
    climber_budget: int = 5000
    inner_cap: int = 500
    restart_patience: int = 5000
    nvio_init: float = 20.0
    nvio_growth: float = 1.2
    nvio_ceiling_exp: int = 10
    ucb_c: float = 1.0
    attempts: int = 50
    reject_valve: int = 1_000_000


@dataclass
class RunResult:
    best: dict
    best_violation: int
    best_objective: int | None  # user-facing sign; None without an objective
    trajectory: list
    seed: int
    wall_time: float
    evaluations: int


def strictly_better(a: tuple, b: tuple) -> bool:
    """(violation, internal objective) comparison; violation dominates."""
    va, oa = a
    vb, ob = b
    return va < vb or (va == 0 and vb == 0 and oa < ob)


class Solver:
    def __init__(self, model, seed: int, config: SearchConfig | None = None,
                 time_limit: float | None = None, eval_limit: int | None = None,
                 instrument=None):
        self.original_model = model
        self.model = eliminate_integer_invariants(model)
        self.config = config or SearchConfig()
        self.seed = seed
        import random
        self.rng = random.Random(seed)
        self.ctx = EvalContext(self.model)
        self.structures = instantiate_structures(self.model)
        c = self.config.ucb_c
        n = len(self.structures)
        self.ctrl_violation = UcbController(n, c=c)
        self.ctrl_objective = UcbController(n, c=c)
        self.ctrl_feasible = UcbController(n, c=c)
        self.ctrl_climber = UcbController(2, c=c, cost_weighted=False)
        self.time_limit = time_limit
        self.eval_limit = eval_limit
        self.instrument = instrument or (lambda tag, value: None)
        self.evaluations = 0
        self.trajectory = []
        self.t0 = None
        self.s_best = None
        self.best_assignment = None

    # -- plumbing -----------------------------------------------------------

    def should_stop(self) -> bool:
        if self.eval_limit is not None and self.evaluations >= self.eval_limit:
            return True
        if self.time_limit is not None and time.monotonic() - self.t0 >= self.time_limit:
            return True
        return False

    def _elapsed_ms(self) -> int:
        if self.eval_limit is not None:
            return 0  # wall clock excluded so eval-limited runs are reproducible
        return int((time.monotonic() - self.t0) * 1000)

    def _random_assignment(self) -> None:
        values = {}
        for name, dom in self.model.finds:
            values[name], _ = generate_with_retry(dom, self.rng)
        self.ctx.reset(values)
        self.evaluations += 1
        self.instrument("restart", self.evaluations)
        self._note_state()

    def _note_state(self) -> None:
        """Track the incumbent at move granularity (anytime reporting)."""
        cur = self.ctx.state()
        if self.s_best is None or strictly_better(cur, self.s_best):
            self.s_best = cur
            self.best_assignment = self.ctx.raw_snapshot()
            self._log_best(cur)

    def _log_best(self, state) -> None:
        viol, obj = state
        self.trajectory.append({
            "elapsed_ms": self._elapsed_ms(),
            "evaluations": self.evaluations,
            "violation": viol,
            "objective": self._user_obj(obj),
        })

    def _user_obj(self, internal):
        if self.model.objective is None:
            return None
        return -internal if self.ctx.maximise else internal

    def _propose(self, controller):
        """One neighbourhood application: returns (move, before, after)."""
        self.evaluations += 1
        if controller is None:
            arm = self.rng.randrange(len(self.structures))
        else:
            arm = controller.select(self.rng)
        before = self.ctx.state()
        move = apply_structure(self.structures[arm], self.ctx, self.rng,
                               self.config.attempts)
        after = before if move.abandoned else self.ctx.state()
        if controller is not None:
            reward = 0
            if not move.abandoned:
                if controller is self.ctrl_violation:
                    reward = 1 if after[0] < before[0] else 0
                elif controller is self.ctrl_objective:
                    reward = 1 if after[1] < before[1] else 0
                else:
                    reward = 1 if after[1] < before[1] and after[0] == 0 else 0
            controller.record(arm, reward, move.cost)
        return move, before, after

    # -- search phases -------------------------------------------------------

    def random_walk(self, n_r: float) -> None:
        cfg = self.config
        v_max = self.ctx.total_violation() + n_r
        accepted = 0
        rejects = 0
        while accepted < int(n_r) and not self.should_stop():
            move, before, after = self._propose(None)
            if move.abandoned:
                rejects += 1
            elif after[0] <= v_max:
                accepted += 1
                rejects = 0
                self._note_state()
            else:
                revert(move, self.ctx)
                rejects += 1
            if rejects >= cfg.reject_valve:
                break  # safety valve against an unsatisfiable violation cap

    def hill_climb_to_zero(self) -> None:
        cfg = self.config
        stall = 0
        while self.ctx.total_violation() > 0 and not self.should_stop():
            move, before, after = self._propose(self.ctrl_violation)
            if not move.abandoned and after[0] < before[0]:
                stall = 0
                self._note_state()
            else:
                if not move.abandoned:
                    revert(move, self.ctx)
                stall += 1
            if stall == cfg.restart_patience:
                self._random_assignment()
                stall = 0

    def hill_climb(self) -> None:
        arm = self.ctrl_climber.select(self.rng)
        self.instrument("climber", ("standard", "withViolations")[arm])
        self.instrument("climber_budget", self.config.climber_budget)
        if arm == 0:
            improvements = self.hill_climb_standard(self.config.climber_budget)
        else:
            improvements = self.hill_climb_with_violations(self.config.climber_budget)
        self.ctrl_climber.record(arm, improvements, 0)

    def hill_climb_standard(self, budget: int) -> int:
        improvements = 0
        i = 0
        while i < budget and not self.should_stop():
            i += 1
            move, before, after = self._propose(self.ctrl_feasible)
            if move.abandoned:
                continue
            if after[0] == 0 and after[1] < before[1]:
                improvements += 1
                self._note_state()
            else:
                revert(move, self.ctx)
        return improvements

    def hill_climb_with_violations(self, budget: int) -> int:
        cfg = self.config
        ceiling = cfg.nvio_init * cfg.nvio_growth ** cfg.nvio_ceiling_exp
        n_vio = cfg.nvio_init
        self.instrument("n_vio", n_vio)
        o = self.ctx.objective_internal()
        improvements = 0
        i = 0
        while True:
            k1 = 0
            while (self.ctx.objective_internal() >= o
                   and k1 <= min(budget - i, cfg.inner_cap)
                   and not self.should_stop()):
                move, before, after = self._propose(self.ctrl_objective)
                k1 += 1
                if move.abandoned:
                    continue
                if after[0] <= n_vio and after[1] <= o:
                    if after[0] == 0 and after[1] < before[1]:
                        improvements += 1
                    self._note_state()
                else:
                    revert(move, self.ctx)
            i += k1
            k2 = 0
            while (self.ctx.total_violation() > 0
                   and k2 <= min(budget - i, cfg.inner_cap)
                   and not self.should_stop()):
                move, before, after = self._propose(self.ctrl_violation)
                k2 += 1
                if move.abandoned:
                    continue
                if after[0] <= before[0] and after[1] < o:
                    if after[0] == 0 and after[1] < before[1]:
                        improvements += 1
                    self._note_state()
                else:
                    revert(move, self.ctx)
            i += k2
            if (self.ctx.total_violation() == 0 and self.ctx.objective_internal() < o) \
                    or n_vio >= ceiling:
                n_vio = cfg.nvio_init
                o = self.ctx.objective_internal()
            else:
                n_vio *= cfg.nvio_growth
            self.instrument("n_vio", n_vio)
            if i >= budget or self.should_stop():
                return improvements

    # -- the overall procedure -----------------------------------------------

    def solve(self) -> RunResult:
        cfg = self.config
        self.t0 = time.monotonic()
        self._random_assignment()
        s_star = self.ctx.state()
        n_r = cfg.walk_init
        self.instrument("n_r", n_r)
        satisfaction = self.model.objective is None
        if self.structures:
            while not self.should_stop():
                if self.ctx.total_violation() > 0:
                    self.hill_climb_to_zero()
                self.hill_climb()
                cur = self.ctx.state()
                if strictly_better(cur, s_star):
                    s_star = cur
                    n_r = cfg.walk_init
                    self.instrument("n_r", n_r)
                else:
                    n_r *= cfg.walk_growth
                    self.instrument("n_r", n_r)
                    self.random_walk(n_r)
                    if n_r > cfg.walk_cap:
                        n_r = cfg.walk_init
                        s_star = self.ctx.state()
                        self.instrument("n_r", n_r)
                if satisfaction and self.s_best[0] == 0:
                    break
        return self._result(self.s_best, self.best_assignment)

    def _result(self, s_best, best_assignment) -> RunResult:
        from ..engine.snapshots import canonize_raw
        assignment = {k: canonize_raw(v) for k, v in best_assignment.items()}
        if self.model.eliminated:
            env = {k: v for k, v in self.model.params.items()
                   if not (isinstance(v, tuple) and v and v[0] == "enum")}
            env.update(assignment)
            for name, expr in self.model.eliminated:
                v = eval_ground(expr, env)
                assignment[name] = 0 if v is UNDEF else v
                env[name] = assignment[name]
        return RunResult(
            best=assignment,
            best_violation=s_best[0],
            best_objective=self._user_obj(s_best[1]),
            trajectory=self.trajectory,
            seed=self.seed,
            wall_time=time.monotonic() - self.t0,
            evaluations=self.evaluations,
        )


def solve(model, seed: int, config: SearchConfig | None = None,
          time_limit: float | None = None, eval_limit: int | None = None,
          instrument=None) -> RunResult:
    return Solver(model, seed, config, time_limit, eval_limit, instrument).solve()
