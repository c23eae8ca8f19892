from .bandit import UcbController
from .ils import RunResult, SearchConfig, Solver, solve, strictly_better

__all__ = ['UcbController', 'RunResult', 'SearchConfig', 'Solver', 'solve',
           'strictly_better']
