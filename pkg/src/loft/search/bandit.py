"""Upper-confidence-bound arm selection with cost-weighted pull mass.

Unpulled arms are selected first (uniformly among them); afterwards the
arm maximising R(a)/n(a) + c * sqrt(ln t / n(a)) wins, with t the total
pull mass and ties broken uniformly at random.  When cost weighting is
on, a selection increases n(a) by cost(a) + 1 so that expensive
neighbourhood structures pay for their evaluation effort; the plain
controller (used for choosing between hill climbers) increases n(a) by 1.
"""

from __future__ import annotations

import math


class UcbController:
    def __init__(self, n_arms: int, c: float = 1.0, cost_weighted: bool = True):
        self.c = c
        self.cost_weighted = cost_weighted
        self.reward = [0.0] * n_arms
        self.mass = [0.0] * n_arms
        self.pulls = [0] * n_arms
        self.increments = []  # (arm, increment) audit trail

    @property
    def n_arms(self) -> int:
        return len(self.reward)

    def select(self, rng) -> int:
        fresh = [i for i, m in enumerate(self.mass) if m == 0]
        if fresh:
            return fresh[rng.randrange(len(fresh))]
        t = sum(self.mass)
        log_t = math.log(t)
        best, best_score = [], None
        for i in range(self.n_arms):
            score = self.reward[i] / self.mass[i] + self.c * math.sqrt(log_t / self.mass[i])
            if best_score is None or score > best_score:
                best, best_score = [i], score
            elif score == best_score:
                best.append(i)
        return best[rng.randrange(len(best))]

    def record(self, arm: int, reward: float, cost: int) -> None:
        inc = (cost + 1) if self.cost_weighted else 1
        self.mass[arm] += inc
        self.reward[arm] += reward
        self.pulls[arm] += 1
        self.increments.append((arm, inc))

    def score(self, arm: int) -> float:
        t = sum(self.mass)
        return self.reward[arm] / self.mass[arm] + self.c * math.sqrt(math.log(t) / self.mass[arm])
