import pytest
from pydantic import ValidationError

from optibench.config import settings
from optibench.models import QuboInstance, Sense
from optibench.qubo import brute_force_optimum, evaluate
from optibench.schemas import DeviceConfig, SaParams
from optibench.solvers.annealing import SimulatedAnnealingSolver, simulated_annealing


FAST = SaParams(n_reads=40, n_sweeps=200)


def test_defaults_follow_benchmark_protocol():
    params = SaParams()
    assert params.n_reads == 500
    assert params.n_sweeps == 1000


def test_schedule_must_cool():
    with pytest.raises(ValidationError):
        SaParams(beta_hot=5.0, beta_cold=1.0)


def test_finds_optimum_of_small_instance(make_qubo):
    # Arrange
    q = make_qubo(8, seed=21)

    # Act
    outcome = simulated_annealing(q, FAST, seed=3)

    # Assert
    _, best = brute_force_optimum(q)
    assert outcome.best_energy == pytest.approx(best)
    assert evaluate(q, outcome.best_assignment) == pytest.approx(outcome.best_energy)
    assert len(outcome.per_read_energies) == FAST.n_reads
    assert min(outcome.per_read_energies) == pytest.approx(outcome.best_energy)


def test_respects_maximize_sense():
    q = QuboInstance(
        3, {0: 1.0, 1: 2.0, 2: -1.0}, {(0, 1): -0.5}, sense=Sense.MAXIMIZE
    )
    outcome = simulated_annealing(q, FAST, seed=0)
    assert outcome.best_assignment == (1, 1, 0)
    assert outcome.best_energy == pytest.approx(2.5)


def test_same_seed_same_outcome(make_qubo):
    q = make_qubo(10, seed=2)
    first = simulated_annealing(q, FAST, seed=9)
    second = simulated_annealing(q, FAST, seed=9)
    assert first.per_read_energies == second.per_read_energies
    assert first.best_assignment == second.best_assignment


def test_chunking_and_threads_do_not_change_results(make_qubo, mocker):
    # Arrange
    q = make_qubo(10, seed=4)
    reference = simulated_annealing(q, FAST, seed=1)
    mocker.patch.object(settings, "SA_MEMORY_BUDGET_FLOATS", 10 * 7 * 50)

    # Act
    chunked = simulated_annealing(q, FAST, seed=1, threads=3)

    # Assert
    assert chunked.per_read_energies == pytest.approx(reference.per_read_energies)
    assert chunked.best_assignment == reference.best_assignment


def test_empty_instance():
    outcome = simulated_annealing(QuboInstance(0, offset=1.5), FAST, seed=0)
    assert outcome.best_assignment == ()
    assert outcome.best_energy == 1.5


def test_solver_prefers_params_seed_over_cell_seed(make_qubo):
    q = make_qubo(6, seed=1)
    solver = SimulatedAnnealingSolver()
    params = SaParams(n_reads=10, n_sweeps=50, seed=42)
    outcome = solver.solve(q, params, seed=7, device=DeviceConfig(name="cpu"))
    assert outcome.seed == 42
    assert outcome.metadata["n_reads"] == 10


@pytest.mark.slow
def test_defaults_reach_brute_force_optimum_on_most_instances(make_qubo):
    hits = 0
    for seed in range(50):
        q = make_qubo(12, seed=1000 + seed)
        outcome = simulated_annealing(q, SaParams(), seed=seed)
        hits += outcome.best_energy == pytest.approx(brute_force_optimum(q)[1])
    assert hits >= 48
