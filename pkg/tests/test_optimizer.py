import math

import numpy as np
import pytest

from confal.errors import ConfigError
from confal.fitness import FitnessOutcome
from confal.optimizer import Budget, CMAOptions, minimize, minimize_cmaes, minimize_random
from confal.param import ChannelSpace, SearchSpace

BOX4 = SearchSpace(tuple(ChannelSpace(f"x{i}", -5.0, 5.0, 1) for i in range(4)), horizon=1.0, step=0.1)


def sphere(x):
    return float(np.sum(x ** 2))


def never(_):
    return False


def test_budget_needs_a_finite_bound():
    with pytest.raises(ConfigError):
        Budget()
    Budget(timeout=5)


@pytest.mark.parametrize("seed", range(3))
def test_cmaes_sphere(seed):
    r = minimize_cmaes(sphere, BOX4, Budget(max_evaluations=2000), seed, stop_when=never)
    assert r.best_fitness < 1e-3
    assert r.evaluations_used == 2000


def test_cmaes_deterministic():
    a = minimize_cmaes(sphere, BOX4, Budget(max_evaluations=300), 11, stop_when=never)
    b = minimize_cmaes(sphere, BOX4, Budget(max_evaluations=300), 11, stop_when=never)
    assert np.array_equal(a.best_vector, b.best_vector)
    assert a.history == b.history


def test_cmaes_constant_fitness_runs_to_budget():
    r = minimize_cmaes(lambda x: 1.0, BOX4, Budget(max_evaluations=57), 0, stop_when=never)
    assert r.evaluations_used == 57 and r.best_fitness == 1.0
    assert BOX4.contains(r.best_vector)


def test_every_proposal_stays_in_box():
    seen = []

    def far(x):
        seen.append(x.copy())
        return -float(np.sum(x))  # optimum at the upper corner pushes proposals outside

    minimize_cmaes(far, BOX4, Budget(max_evaluations=400), 2, stop_when=never)
    assert all(BOX4.contains(x) for x in seen)


def test_history_is_monotone_and_early_stop():
    calls = []

    def f(x):
        calls.append(1)
        return sphere(x) - 1.0

    r = minimize_cmaes(f, BOX4, Budget(max_evaluations=5000), 4)
    vals = [v for _, v in r.history]
    assert vals == sorted(vals, reverse=True)
    assert r.falsified and r.best_fitness < 0
    assert len(calls) == r.evaluations_used  # nothing evaluated after success
    assert r.witness is not None


def test_simulation_accounting():
    def f(x):
        sim = x[0] > 0
        return FitnessOutcome(1.0, 0.0, 0.0 if sim else None, bool(sim))

    r = minimize_random(f, BOX4, Budget(max_evaluations=1000), 0, stop_when=never)
    assert 0 < r.simulations_used < r.evaluations_used == 1000
    r = minimize_random(f, BOX4, Budget(max_simulations=10), 0, stop_when=never)
    assert r.simulations_used == 10


def test_random_search_finds_half_volume_region():
    r = minimize_random(lambda x: -1.0 if x[0] > 0 else 1.0, BOX4, Budget(max_evaluations=100), 0)
    assert r.falsified


def test_random_search_zero_budget():
    r = minimize_random(sphere, BOX4, Budget(max_evaluations=0), 0)
    assert not r.falsified and r.evaluations_used == 0 and r.best_vector is None


def test_random_search_deterministic():
    seq = []
    minimize_random(lambda x: seq.append(x.copy()) or 1.0, BOX4, Budget(max_evaluations=20), 5, stop_when=never)
    again = []
    minimize_random(lambda x: again.append(x.copy()) or 1.0, BOX4, Budget(max_evaluations=20), 5, stop_when=never)
    assert all(np.array_equal(a, b) for a, b in zip(seq, again))


def test_restarts_keep_running_after_convergence():
    r = minimize_cmaes(sphere, BOX4, Budget(max_evaluations=6000), 0,
                       opts=CMAOptions(restarts=True, tolx=1e-8), stop_when=never)
    assert r.evaluations_used == 6000 and r.best_fitness < 1e-6


def test_timeout_budget():
    r = minimize_random(sphere, BOX4, Budget(timeout=0.05), 0, stop_when=never)
    assert r.elapsed >= 0.05 and r.evaluations_used > 0


def test_nan_objective_rejected():
    with pytest.raises(ValueError):
        minimize_random(lambda x: math.nan, BOX4, Budget(max_evaluations=3), 0)


def test_minimize_dispatch():
    with pytest.raises(ConfigError):
        minimize("anneal", sphere, BOX4, Budget(max_evaluations=1), 0)
    r = minimize("random", sphere, BOX4, Budget(max_evaluations=3), 0, opts=CMAOptions())
    assert r.evaluations_used == 3
