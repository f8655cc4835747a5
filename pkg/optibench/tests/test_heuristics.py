import statistics

import pytest

from optibench.applications import maxsat as maxsat_app
from optibench.applications import pvc as pvc_app
from optibench.applications import tsp as tsp_app
from optibench.exceptions import InfeasibleError, ParameterError
from optibench.models import PvcInstance, PvcNode, PvcTour, TspInstance, TspTour
from optibench.mappings import tsp as tsp_map
from optibench.schemas import DeviceConfig, HeuristicParams, SaParams
from optibench.solvers import get_solver
from optibench.solvers.annealing import simulated_annealing
from optibench.solvers.heuristics import (
    GreedySolver,
    RandomAssignmentSolver,
    ReverseGreedySolver,
    greedy_path,
    random_assignment,
    random_path,
    reverse_greedy_path,
    setting_changes,
)

HOME = PvcNode.home()
A0, A1 = PvcNode(0, 0, 0, 0), PvcNode(0, 1, 0, 0)
B0, B1 = PvcNode(1, 0, 0, 0), PvcNode(1, 1, 0, 0)
CPU = DeviceConfig(name="cpu")


def line_instance() -> PvcInstance:
    edges = {}
    for node, w in ((A0, 1.0), (A1, 5.0), (B0, 7.0), (B1, 2.0)):
        edges[(HOME, node)] = w
        edges[(node, HOME)] = w + 1.0
    for u in (A0, A1):
        for v in (B0, B1):
            edges[(u, v)] = 3.0
            edges[(v, u)] = 4.0
    return PvcInstance(2, 1, 1, edges)


def triangle() -> TspInstance:
    return TspInstance(3, ((0, 3, 4), (3, 0, 5), (4, 5, 0)))


def test_greedy_tsp_takes_cheapest_moves():
    tour = greedy_path(triangle())
    assert tour == TspTour((0, 1, 2))
    assert tsp_app.evaluate_tour(triangle(), tour) == 12.0


def test_reverse_greedy_tsp_takes_costliest_moves():
    assert reverse_greedy_path(triangle()) == TspTour((0, 2, 1))


def test_greedy_pvc_breaks_ties_by_node_order():
    # Arrange
    inst = line_instance()

    # Act
    tour = greedy_path(inst)

    # Assert
    assert tour == PvcTour((HOME, A0, B0))
    assert pvc_app.evaluate_tour(inst, tour) == 12.0


def test_reverse_greedy_pvc():
    inst = line_instance()
    tour = reverse_greedy_path(inst)
    assert tour == PvcTour((HOME, B0, A0))
    assert pvc_app.evaluate_tour(inst, tour) == 13.0


def test_random_path_is_seeded_and_valid():
    inst = tsp_app.random_instance(7, seed=3)
    first = random_path(inst, seed=11)
    assert first == random_path(inst, seed=11)
    assert tsp_app.validate_tour(inst, first)


def test_random_path_depends_on_bit_generator():
    inst = tsp_app.random_instance(9, seed=0)
    tours = {random_path(inst, 5, bg) for bg in ("PCG64", "Philox", "SFC64")}
    assert all(tsp_app.validate_tour(inst, tour) for tour in tours)


def test_dead_end_raises():
    inst = PvcInstance(2, 1, 1, {(HOME, A0): 1.0})
    with pytest.raises(InfeasibleError):
        greedy_path(inst)


def test_missing_return_home_raises():
    inst = PvcInstance(1, 1, 1, {(HOME, A0): 1.0})
    with pytest.raises(InfeasibleError):
        greedy_path(inst)


def test_path_heuristics_reject_maxsat():
    with pytest.raises(ParameterError):
        greedy_path(maxsat_app.generate_random(4, seed=0))


def test_setting_changes_counts_closing_move():
    steps = (PvcNode.home(0, 0), PvcNode(0, 0, 1, 0), PvcNode(1, 0, 1, 0))
    assert setting_changes(PvcTour(steps)) == 2


def test_greedy_solver_reports_setting_changes():
    outcome = GreedySolver().solve(line_instance(), HeuristicParams(), 0, CPU)
    assert outcome.solution == PvcTour((HOME, A0, B0))
    assert outcome.metadata == {"setting_changes": 0}


def setting_penalized_instance(seed: int) -> PvcInstance:
    base = pvc_app.generate_instance(4, 2, 2, seed, edge_fraction=1.0)
    edges = {
        (u, v): w + (1000.0 if u.setting != v.setting else 0.0)
        for (u, v), w in base.edges.items()
    }
    return PvcInstance(4, 2, 2, edges)


@pytest.mark.parametrize("seed", range(10))
def test_greedy_keeps_its_setting_when_switching_costs_more(seed):
    # Arrange
    inst = setting_penalized_instance(seed)

    # Act
    greedy = GreedySolver().solve(inst, HeuristicParams(), 0, CPU)
    reverse = ReverseGreedySolver().solve(inst, HeuristicParams(), 0, CPU)

    # Assert
    assert pvc_app.validate_tour(inst, greedy.solution)
    assert greedy.metadata == {"setting_changes": 0}
    assert reverse.metadata["setting_changes"] > 0


def test_random_assignment_solver():
    inst = maxsat_app.generate_random(8, seed=1)
    outcome = RandomAssignmentSolver().solve(inst, HeuristicParams(), 4, CPU)
    assert outcome.solution == random_assignment(inst, 4)
    assert len(outcome.solution) == 8
    assert set(outcome.solution) <= {0, 1}


def test_heuristics_only_accept_direct_mappings():
    greedy = get_solver("greedy")
    assert greedy.supports("tsp", produces_qubo=False)
    assert not greedy.supports("tsp", produces_qubo=True)
    assert not greedy.supports("maxsat", produces_qubo=False)


def test_unknown_solver():
    with pytest.raises(ParameterError):
        get_solver("nope")


@pytest.mark.slow
def test_solver_ordering_on_random_tours():
    # Arrange
    lengths = {"greedy": [], "random": [], "reverse": []}
    annealed_pairs = []
    annealing = SaParams(n_reads=500, n_sweeps=200)

    # Act
    for k in range(100):
        inst = tsp_app.random_instance(4 + k % 5, seed=500 + k)
        lengths["greedy"].append(tsp_app.evaluate_tour(inst, greedy_path(inst)))
        lengths["random"].append(tsp_app.evaluate_tour(inst, random_path(inst, k)))
        lengths["reverse"].append(
            tsp_app.evaluate_tour(inst, reverse_greedy_path(inst))
        )
        q, idx = tsp_map.map_to_qubo(inst)
        outcome = simulated_annealing(q, annealing, seed=k)
        tour = tsp_map.decode(outcome.best_assignment, idx)
        if tour is not None:
            annealed_pairs.append(
                (tsp_app.evaluate_tour(inst, tour), lengths["random"][-1])
            )

    # Assert
    means = {name: statistics.mean(values) for name, values in lengths.items()}
    assert means["greedy"] <= means["random"] <= means["reverse"]
    assert len(annealed_pairs) >= 90
    annealed, random_lengths = zip(*annealed_pairs, strict=True)
    assert statistics.mean(annealed) <= statistics.mean(random_lengths)
