import random
from pathlib import Path

import pytest

from loft.engine import EvalContext
from loft.speclang import instantiate, parse_params, parse_spec
from loft.speclang.ground import UNDEF, eval_ground

BENCH = Path(__file__).resolve().parent.parent / "benchmarks"


def model_from(spec_text: str, param_text: str = ""):
    spec = parse_spec(spec_text)
    params = parse_params(param_text) if param_text else {}
    model, _ = instantiate(spec, params)
    return model


def load_model(spec_name: str, param_name: str | None = None):
    spec = parse_spec((BENCH / spec_name).read_text())
    params = parse_params((BENCH / param_name).read_text()) if param_name else {}
    model, _ = instantiate(spec, params)
    return model


def tsp_params(n: int, seed: int = 0) -> str:
    rng = random.Random(seed)
    coords = [(rng.randint(0, 50), rng.randint(0, 50)) for _ in range(n)]

    def dist(a, b):
        return abs(coords[a][0] - coords[b][0]) + abs(coords[a][1] - coords[b][1])

    entries = ", ".join(
        f"({i + 1},{j + 1}) --> {dist(i, j)}" for i in range(n) for j in range(n)
    )
    return f"letting nCities be {n}\nletting distances be function({entries})"


def meb_params(n: int, seed: int = 0) -> str:
    rng = random.Random(seed)
    coords = [(rng.randint(0, 30), rng.randint(0, 30)) for _ in range(n)]

    def cost(a, b):
        if a == b:
            return 0
        return abs(coords[a][0] - coords[b][0]) + abs(coords[a][1] - coords[b][1]) + 1

    entries = ", ".join(
        f"({i + 1},{j + 1}) --> {cost(i, j)}" for i in range(n) for j in range(n)
    )
    return (f"letting n be {n}\nletting initNode be 1\n"
            f"letting linkCosts be function({entries})")


def ground_env(model, assignment: dict) -> dict:
    env = {k: v for k, v in model.params.items()
           if not (isinstance(v, tuple) and v and v[0] == "enum")}
    env.update(assignment)
    return env


def assert_state_consistent(ctx: EvalContext, model) -> None:
    """The master check: caches, the structural oracle, and a rebuilt context
    must all agree with the incrementally maintained state."""
    ctx.verify_caches()
    env = ground_env(model, ctx.snapshot())
    sat = all(eval_ground(c, env) is True for c in model.constraints)
    assert sat == (ctx.total_violation() == 0)
    if model.objective is not None and ctx.obj_root.defined:
        g = eval_ground(model.objective[1], env)
        assert g is not UNDEF and g == ctx.objective_user()
    fresh = EvalContext(model)
    fresh.reset(ctx.snapshot())
    assert fresh.total_violation() == ctx.total_violation()
    assert fresh.objective_internal() == ctx.objective_internal()


@pytest.fixture
def sonet_micro():
    return load_model("sonet.spec", "sonet_micro.param")


@pytest.fixture
def knapsack_tiny():
    return load_model("knapsack.spec", "knapsack_tiny.param")


@pytest.fixture
def binpacking_tiny():
    return load_model("binpacking.spec", "binpacking_tiny.param")


@pytest.fixture
def tsp_small():
    spec = parse_spec((BENCH / "tsp.spec").read_text())
    model, _ = instantiate(spec, parse_params(tsp_params(5, seed=3)))
    return model


@pytest.fixture
def meb_small():
    spec = parse_spec((BENCH / "meb.spec").read_text())
    model, _ = instantiate(spec, parse_params(meb_params(5, seed=4)))
    return model
