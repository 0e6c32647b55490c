import time
from dataclasses import replace

import pytest

from crowdcoop.engine import run_batch
from crowdcoop.scenarios import generate_reenactment

BASE_SEED = 42
N_RUNS = 100


class Batch:
    def __init__(self, results, seconds):
        self.results = results
        self.seconds = seconds


def _batch(cognition: bool) -> Batch:
    scenario = generate_reenactment(seed=BASE_SEED)
    scenario = replace(scenario, params=replace(scenario.params, cognition=cognition))
    t0 = time.perf_counter()
    results = run_batch(scenario, N_RUNS, BASE_SEED)
    return Batch(results, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def reenactment_batch() -> Batch:
    return _batch(cognition=True)


@pytest.fixture(scope="session")
def deadlock_batch() -> Batch:
    return _batch(cognition=False)


@pytest.fixture(scope="session")
def reenactment_scenario():
    return generate_reenactment(seed=BASE_SEED)
