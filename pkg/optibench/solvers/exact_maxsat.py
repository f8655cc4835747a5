"""
Exact partial MAX-SAT by depth-first branch and bound.

Hard clauses are unit-propagated; a branch is cut when the satisfied soft
weight plus the weight of soft clauses not yet falsified cannot beat the
incumbent. The incumbent is seeded by a random-restart local search.
"""

import math
import time

import numpy as np

from optibench.applications import maxsat as maxsat_app
from optibench.config import settings
from optibench.exceptions import CapacityError, SolverTimeoutError
from optibench.models import Clause, MaxSatInstance, SolverOutcome, VehicleConfig
from optibench.schemas import DeviceConfig, ExactMaxSatParams
from optibench.solvers.base import SolveContext, SolverBase
from optibench.utils import get_logger, make_rng

logger = get_logger(__name__)

_DEADLINE_CHECK_EVERY = 1024


def _literal_matrices(
    clauses: tuple[Clause, ...], n_vars: int
) -> tuple[np.ndarray, np.ndarray]:
    pos = np.zeros((len(clauses), n_vars))
    neg = np.zeros((len(clauses), n_vars))
    for k, clause in enumerate(clauses):
        for lit in clause.literals:
            (neg if lit.negated else pos)[k, lit.var] = 1.0
    return pos, neg


def _satisfied(configs: np.ndarray, pos: np.ndarray, neg: np.ndarray) -> np.ndarray:
    return (configs @ pos.T + (1.0 - configs) @ neg.T) > 0


def local_search(
    inst: MaxSatInstance, rng: np.random.Generator, n_restarts: int = 8
) -> tuple[VehicleConfig, float] | None:
    """
    Best-improvement single-flip hill climbing on (hard satisfied, soft weight),
    lexicographically. Returns the best assignment satisfying every hard clause
    it met, or None.
    """
    n = inst.n_vars
    if n == 0:
        return None
    hard_pos, hard_neg = _literal_matrices(inst.hard, n)
    soft_pos, soft_neg = _literal_matrices(inst.soft, n)
    weights = np.asarray(inst.weights)
    scale = inst.total_soft_weight + 1.0
    flips = np.eye(n, dtype=bool)

    best = None
    for _ in range(n_restarts):
        v = rng.integers(0, 2, size=n).astype(bool)
        for _ in range(4 * n):
            candidates = np.vstack([v, v ^ flips]).astype(float)
            hard_sat = _satisfied(candidates, hard_pos, hard_neg).sum(axis=1)
            soft_sat = _satisfied(candidates, soft_pos, soft_neg) @ weights
            k = int(np.argmax(hard_sat * scale + soft_sat))
            if k == 0:
                break
            v = candidates[k].astype(bool)
        config = tuple(int(b) for b in v)
        if maxsat_app.validate(inst, config):
            weight = maxsat_app.satisfied_soft_weight(inst, config)
            if best is None or weight > best[1]:
                best = (config, weight)
    return best


class BranchAndBound:
    def __init__(self, inst: MaxSatInstance, deadline: float | None = None):
        self.inst = inst
        self.deadline = deadline
        clauses = inst.hard + inst.soft
        self.is_hard = [True] * inst.n_hard + [False] * inst.n_soft
        self.weight = [0.0] * inst.n_hard + list(inst.weights)
        self.size = [len(c) for c in clauses]
        self.literals = [
            [(lit.var, lit.negated) for lit in c.literals] for c in clauses
        ]
        self.occurrences: list[list[tuple[int, bool]]] = [
            [] for _ in range(inst.n_vars)
        ]
        for c, lits in enumerate(self.literals):
            for var, negated in lits:
                self.occurrences[var].append((c, negated))
        self.branch_order = sorted(
            range(inst.n_vars), key=lambda v: (-len(self.occurrences[v]), v)
        )

        self.value = [-1] * inst.n_vars
        self.n_true = [0] * len(clauses)
        self.n_false = [0] * len(clauses)
        self.sat_weight = 0.0
        self.lost_weight = 0.0
        self.hard_conflicts = 0
        self.total = inst.total_soft_weight
        for c, size in enumerate(self.size):
            if size == 0:
                if self.is_hard[c]:
                    self.hard_conflicts += 1
                else:
                    self.lost_weight += self.weight[c]

        self.best: VehicleConfig | None = None
        self.best_weight = -1.0
        self.nodes = 0

    def _assign(self, var: int, val: int) -> None:
        self.value[var] = val
        for c, negated in self.occurrences[var]:
            if (val == 0) == negated:
                self.n_true[c] += 1
                if self.n_true[c] == 1 and not self.is_hard[c]:
                    self.sat_weight += self.weight[c]
            else:
                self.n_false[c] += 1
                if self.n_false[c] == self.size[c]:
                    if self.is_hard[c]:
                        self.hard_conflicts += 1
                    else:
                        self.lost_weight += self.weight[c]

    def _unassign(self, var: int) -> None:
        val = self.value[var]
        for c, negated in self.occurrences[var]:
            if (val == 0) == negated:
                self.n_true[c] -= 1
                if self.n_true[c] == 0 and not self.is_hard[c]:
                    self.sat_weight -= self.weight[c]
            else:
                if self.n_false[c] == self.size[c]:
                    if self.is_hard[c]:
                        self.hard_conflicts -= 1
                    else:
                        self.lost_weight -= self.weight[c]
                self.n_false[c] -= 1
        self.value[var] = -1

    def _propagate(self) -> list[int]:
        """Assigns forced literals of unit hard clauses; returns the trail."""
        trail = []
        changed = True
        while changed and self.hard_conflicts == 0:
            changed = False
            for c, lits in enumerate(self.literals):
                if not self.is_hard[c] or self.n_true[c]:
                    continue
                if self.n_false[c] != self.size[c] - 1:
                    continue
                for var, negated in lits:
                    if self.value[var] == -1:
                        self._assign(var, 0 if negated else 1)
                        trail.append(var)
                        changed = True
                        break
                if self.hard_conflicts:
                    break
        return trail

    def _pick(self) -> int | None:
        for var in self.branch_order:
            if self.value[var] == -1:
                return var
        return None

    def _polarities(self, var: int) -> tuple[int, int]:
        # prefer the value satisfying more open soft weight
        gain = 0.0
        for c, negated in self.occurrences[var]:
            if not self.n_true[c] and not self.is_hard[c]:
                gain += -self.weight[c] if negated else self.weight[c]
        return (1, 0) if gain >= 0 else (0, 1)

    def _check_deadline(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolverTimeoutError(
                f"exact MAX-SAT exceeded its time budget after {self.nodes} nodes"
            )

    def _search(self) -> None:
        self.nodes += 1
        if self.nodes % _DEADLINE_CHECK_EVERY == 0:
            self._check_deadline()
        trail = self._propagate()
        bound = self.total - self.lost_weight
        if self.hard_conflicts == 0 and bound > self.best_weight:
            var = self._pick()
            if var is None:
                config = tuple(self.value)
                self.best = config
                self.best_weight = maxsat_app.satisfied_soft_weight(self.inst, config)
            else:
                for val in self._polarities(var):
                    self._assign(var, val)
                    if self.hard_conflicts == 0:
                        self._search()
                    self._unassign(var)
        for var in reversed(trail):
            self._unassign(var)

    def solve(
        self, incumbent: tuple[VehicleConfig, float] | None = None
    ) -> tuple[VehicleConfig, float] | None:
        if incumbent is not None:
            self.best, self.best_weight = incumbent
        self._search()
        if self.best is None:
            return None
        return self.best, self.best_weight


def exact_maxsat(
    inst: MaxSatInstance,
    max_vars: int | None = None,
    time_budget_s: float | None = None,
    seed: int = 0,
    n_restarts: int = 8,
) -> tuple[VehicleConfig, float] | None:
    """
    Optimal partial MAX-SAT assignment and its satisfied soft weight, or None
    when the hard clauses are jointly unsatisfiable.

    :param inst: Instance to solve
    :param max_vars: Variable cap, defaults to ``settings.EXACT_MAXSAT_MAX_VARS``
    :param time_budget_s: Wall-clock budget, defaults to the settings value
    :param seed: Seed of the local-search incumbent
    :param n_restarts: Local-search restarts
    """
    params = ExactMaxSatParams(
        max_vars=max_vars, time_budget_s=time_budget_s, n_restarts=n_restarts
    )
    result, _ = ExactMaxSatSolver().run(inst, params, seed)
    return result


class ExactMaxSatSolver(SolverBase):
    name = "exact_maxsat"
    input_kind = "instance"
    applications = ("maxsat",)
    params_model = ExactMaxSatParams

    def run(
        self, inst: MaxSatInstance, params: ExactMaxSatParams, seed: int
    ) -> tuple[tuple[VehicleConfig, float] | None, int]:
        cap = params.max_vars or settings.EXACT_MAXSAT_MAX_VARS
        if inst.n_vars > cap:
            raise CapacityError(
                f"exact MAX-SAT limited to {cap} variables, got {inst.n_vars}"
            )
        budget = params.time_budget_s or settings.EXACT_MAXSAT_TIME_BUDGET_S
        deadline = time.monotonic() + budget if math.isfinite(budget) else None

        incumbent = local_search(inst, make_rng(seed), params.n_restarts)
        search = BranchAndBound(inst, deadline)
        result = search.solve(incumbent)
        logger.debug(
            "Exact MAX-SAT n_vars=%s nodes=%s unsat=%s",
            inst.n_vars,
            search.nodes,
            result is None,
        )
        return result, search.nodes

    def solve(
        self,
        problem: MaxSatInstance,
        params: ExactMaxSatParams,
        seed: int,
        device: DeviceConfig,
        context: SolveContext | None = None,
    ) -> SolverOutcome:
        result, nodes = self.run(problem, params, seed)
        metadata = {"nodes": nodes, "unsat": result is None}
        if result is None:
            return SolverOutcome(solver_name=self.name, seed=seed, metadata=metadata)
        config, weight = result
        metadata["satisfied_soft_weight"] = weight
        return SolverOutcome(
            solver_name=self.name, seed=seed, solution=config, metadata=metadata
        )
