from optibench.exceptions import ParameterError
from optibench.solvers.annealing import SimulatedAnnealingSolver
from optibench.solvers.base import SolveContext, SolverBase
from optibench.solvers.exact_maxsat import ExactMaxSatSolver
from optibench.solvers.exhaustive import BruteForceSolver
from optibench.solvers.heuristics import (
    GreedySolver,
    RandomAssignmentSolver,
    RandomPathSolver,
    ReverseGreedySolver,
)
from optibench.solvers.qaoa import QaoaSolver

SOLVERS: dict[str, SolverBase] = {
    solver.name: solver
    for solver in (
        SimulatedAnnealingSolver(),
        QaoaSolver(),
        BruteForceSolver(),
        GreedySolver(),
        ReverseGreedySolver(),
        RandomPathSolver(),
        RandomAssignmentSolver(),
        ExactMaxSatSolver(),
    )
}


def get_solver(name: str) -> SolverBase:
    try:
        return SOLVERS[name]
    except KeyError:
        raise ParameterError(
            f"unknown solver '{name}', expected one of {sorted(SOLVERS)}"
        ) from None


__all__ = ["SOLVERS", "SolveContext", "SolverBase", "get_solver"]
