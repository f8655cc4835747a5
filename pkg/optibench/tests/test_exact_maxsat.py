import itertools
import statistics
import time

import numpy as np
import pytest

from optibench.applications import maxsat as maxsat_app
from optibench.exceptions import CapacityError, SolverTimeoutError
from optibench.models import Clause, Literal, MaxSatInstance
from optibench.schemas import DeviceConfig, ExactMaxSatParams
from optibench.solvers.exact_maxsat import (
    BranchAndBound,
    ExactMaxSatSolver,
    exact_maxsat,
    local_search,
)
from optibench.utils import make_rng


def exhaustive_best(inst: MaxSatInstance) -> float | None:
    configs = np.array(list(itertools.product((0, 1), repeat=inst.n_vars)))
    valid = maxsat_app.validate_many(inst, configs)
    if not valid.any():
        return None
    weights = maxsat_app.quality_many(inst, configs) * max(inst.total_soft_weight, 1)
    return float(weights[valid].max())


@pytest.mark.parametrize("seed", range(100))
def test_matches_exhaustive_search(seed):
    # Arrange
    inst = maxsat_app.generate_random(12, seed=seed)

    # Act
    result = exact_maxsat(inst, seed=seed)

    # Assert
    expected = exhaustive_best(inst)
    if expected is None:
        assert result is None
    else:
        config, weight = result
        assert maxsat_app.validate(inst, config)
        assert weight == pytest.approx(expected)
        assert maxsat_app.satisfied_soft_weight(inst, config) == pytest.approx(weight)


def test_unsatisfiable_hard_clauses():
    # Arrange
    x = Literal(0)
    inst = MaxSatInstance(
        2, hard=(Clause((x,)), Clause((Literal(0, True),))), soft=(Clause((x,)),)
    )

    # Act
    outcome = ExactMaxSatSolver().solve(
        inst, ExactMaxSatParams(), 0, DeviceConfig(name="cpu")
    )

    # Assert
    assert exact_maxsat(inst) is None
    assert outcome.solution is None
    assert outcome.metadata["unsat"] is True


def test_solver_reports_weight_and_nodes():
    inst = maxsat_app.generate_random(8, seed=2)
    outcome = ExactMaxSatSolver().solve(
        inst, ExactMaxSatParams(), 1, DeviceConfig(name="cpu")
    )
    if outcome.solution is not None:
        assert outcome.metadata["satisfied_soft_weight"] == pytest.approx(
            maxsat_app.satisfied_soft_weight(inst, outcome.solution)
        )
    assert outcome.metadata["nodes"] >= 1


def test_capacity_cap():
    inst = maxsat_app.generate_random(10, seed=0)
    with pytest.raises(CapacityError):
        exact_maxsat(inst, max_vars=9)


def test_deadline_in_the_past_times_out():
    search = BranchAndBound(maxsat_app.generate_random(6, seed=0), deadline=0.0)
    with pytest.raises(SolverTimeoutError):
        search._check_deadline()


def test_no_deadline_never_times_out():
    search = BranchAndBound(maxsat_app.generate_random(6, seed=0))
    search._check_deadline()
    assert search.deadline is None


def test_empty_soft_clause_is_lost_weight():
    inst = MaxSatInstance(2, soft=(Clause(()), Clause((Literal(1),))))
    config, weight = exact_maxsat(inst)
    assert weight == 1.0
    assert config[1] == 1


def test_empty_hard_clause_is_unsatisfiable():
    inst = MaxSatInstance(2, hard=(Clause(()),), soft=(Clause((Literal(0),)),))
    assert exact_maxsat(inst) is None


def test_local_search_returns_valid_assignment():
    inst = maxsat_app.generate_random(10, seed=4)
    result = local_search(inst, make_rng(0))
    if result is not None:
        config, weight = result
        assert maxsat_app.validate(inst, config)
        assert maxsat_app.satisfied_soft_weight(inst, config) == weight


def test_local_search_without_variables():
    assert local_search(MaxSatInstance(0), make_rng(0)) is None


@pytest.mark.slow
def test_search_effort_grows_with_size():
    def median_nodes(n_f: int) -> float:
        counts = []
        for seed in range(10):
            inst = maxsat_app.generate_random(n_f, seed=seed)
            search = BranchAndBound(inst, deadline=time.monotonic() + 60.0)
            search.solve()
            counts.append(search.nodes)
        return statistics.median(counts)

    assert median_nodes(18) > median_nodes(10)
