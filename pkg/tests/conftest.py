import copy

import pytest

from camopursuit import config_from_dict, solve_time_dependent

SMALL_GRID = {"cells": 60, "time_cells": 120}


def merged(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = merged(out[key], val)
        else:
            out[key] = val
    return out


def make_config(**overrides):
    """Full-experiment config (strength 5) with optional section overrides."""
    data = merged({"rate": {"overall_strength": 5.0}}, overrides)
    return config_from_dict(data)


@pytest.fixture
def reference_config():
    return make_config()


@pytest.fixture(scope="session")
def solved_small():
    """Coarse full-hazard solve shared by the solver and trajectory suites."""
    cfg = make_config(grid=SMALL_GRID)
    return cfg, solve_time_dependent(cfg)


@pytest.fixture(scope="session")
def solved_small_quiet():
    """Same grid with the escape hazard switched off."""
    cfg = make_config(rate={"overall_strength": 0.0}, grid=SMALL_GRID)
    return cfg, solve_time_dependent(cfg)


@pytest.fixture(scope="session")
def solved_small_sharp_eye():
    """Low visual acuity floor: holding the camouflage angle pays off most."""
    cfg = make_config(rate={"acuity": 5e-5}, grid=SMALL_GRID)
    return cfg, solve_time_dependent(cfg)
