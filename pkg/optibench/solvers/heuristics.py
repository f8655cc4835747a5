"""Constructive path heuristics and the random-assignment MAX-SAT baseline."""

from abc import abstractmethod
from collections.abc import Callable

import numpy as np

from optibench.exceptions import InfeasibleError, ParameterError
from optibench.models import (
    MaxSatInstance,
    PvcInstance,
    PvcNode,
    PvcTour,
    SolverOutcome,
    TspInstance,
    TspTour,
)
from optibench.schemas import DeviceConfig, HeuristicParams
from optibench.solvers.base import SolveContext, SolverBase
from optibench.utils import make_rng

Chooser = Callable[[list[tuple[float, int]]], int]


def _cheapest(candidates: list[tuple[float, int]]) -> int:
    return min(candidates)[1]


def _costliest(candidates: list[tuple[float, int]]) -> int:
    # ties still resolve to the lowest index
    return min(candidates, key=lambda c: (-c[0], c[1]))[1]


def _random_chooser(rng: np.random.Generator) -> Chooser:
    def choose(candidates: list[tuple[float, int]]) -> int:
        return candidates[int(rng.integers(len(candidates)))][1]

    return choose


def _tsp_path(inst: TspInstance, choose: Chooser) -> TspTour:
    order = [0]
    unvisited = set(range(1, inst.n_nodes))
    while unvisited:
        current = order[-1]
        candidates = [(inst.dist[current][v], v) for v in sorted(unvisited)]
        nxt = choose(candidates)
        order.append(nxt)
        unvisited.remove(nxt)
    return TspTour(tuple(order))


def _pvc_path(inst: PvcInstance, choose: Chooser) -> PvcTour:
    start = PvcNode.home(0, 0)
    steps = [start]
    remaining = set(range(inst.n_seams))
    while remaining:
        current = steps[-1]
        candidates = []
        for node in inst.nodes:
            if node.seam not in remaining:
                continue
            d = inst.distance(current, node)
            if d is not None:
                candidates.append((d, inst.node_index[node]))
        if not candidates:
            raise InfeasibleError(
                f"dead end at {current}: no move to an unvisited seam "
                f"({len(remaining)} seams left)"
            )
        nxt = inst.nodes[choose(candidates)]
        steps.append(nxt)
        remaining.remove(nxt.seam)
    if inst.distance(steps[-1], start) is None:
        raise InfeasibleError(f"no move from {steps[-1]} back to home")
    return PvcTour(tuple(steps))


def _build_path(problem, choose: Chooser):
    if isinstance(problem, TspInstance):
        return _tsp_path(problem, choose)
    if isinstance(problem, PvcInstance):
        return _pvc_path(problem, choose)
    raise ParameterError(
        f"path heuristics need a TSP or PVC instance, got {type(problem).__name__}"
    )


def greedy_path(problem: TspInstance | PvcInstance):
    """Cheapest move at every step, starting at node 0 / HOME(0, 0)."""
    return _build_path(problem, _cheapest)


def reverse_greedy_path(problem: TspInstance | PvcInstance):
    """Costliest move at every step."""
    return _build_path(problem, _costliest)


def random_path(
    problem: TspInstance | PvcInstance, seed: int, bit_generator: str = "PCG64"
):
    """Uniform choice among the feasible moves at every step."""
    return _build_path(problem, _random_chooser(make_rng(seed, bit_generator)))


def setting_changes(tour: PvcTour) -> int:
    """Moves that switch the (config, tool) setting, closing move included."""
    steps = tour.steps
    return sum(
        steps[i].setting != steps[(i + 1) % len(steps)].setting
        for i in range(len(steps))
    )


def random_assignment(
    inst: MaxSatInstance, seed: int, bit_generator: str = "PCG64"
) -> tuple[int, ...]:
    rng = make_rng(seed, bit_generator)
    return tuple(int(b) for b in rng.integers(0, 2, size=inst.n_vars))


class _PathSolver(SolverBase):
    input_kind = "instance"
    applications = ("pvc", "tsp")
    params_model = HeuristicParams

    @abstractmethod
    def build(self, problem, seed: int, device: DeviceConfig): ...

    def solve(
        self,
        problem,
        params: HeuristicParams,
        seed: int,
        device: DeviceConfig,
        context: SolveContext | None = None,
    ) -> SolverOutcome:
        tour = self.build(problem, seed, device)
        metadata = {}
        if isinstance(tour, PvcTour):
            metadata["setting_changes"] = setting_changes(tour)
        return SolverOutcome(
            solver_name=self.name, seed=seed, solution=tour, metadata=metadata
        )


class GreedySolver(_PathSolver):
    name = "greedy"

    def build(self, problem, seed: int, device: DeviceConfig):
        return greedy_path(problem)


class ReverseGreedySolver(_PathSolver):
    name = "reverse_greedy"

    def build(self, problem, seed: int, device: DeviceConfig):
        return reverse_greedy_path(problem)


class RandomPathSolver(_PathSolver):
    name = "random"

    def build(self, problem, seed: int, device: DeviceConfig):
        return random_path(problem, seed, device.bit_generator)


class RandomAssignmentSolver(SolverBase):
    name = "random_assignment"
    input_kind = "instance"
    applications = ("maxsat",)
    params_model = HeuristicParams

    def solve(
        self,
        problem: MaxSatInstance,
        params: HeuristicParams,
        seed: int,
        device: DeviceConfig,
        context: SolveContext | None = None,
    ) -> SolverOutcome:
        config = random_assignment(problem, seed, device.bit_generator)
        return SolverOutcome(solver_name=self.name, seed=seed, solution=config)
