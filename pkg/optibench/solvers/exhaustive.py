from optibench.models import QuboInstance, SolverOutcome
from optibench.qubo import brute_force_optimum
from optibench.schemas import BruteForceParams, DeviceConfig
from optibench.solvers.base import SolveContext, SolverBase


class BruteForceSolver(SolverBase):
    """Exhaustive QUBO optimum; only for instances under the capacity cap."""

    name = "brute_force"
    params_model = BruteForceParams

    def solve(
        self,
        problem: QuboInstance,
        params: BruteForceParams,
        seed: int,
        device: DeviceConfig,
        context: SolveContext | None = None,
    ) -> SolverOutcome:
        bits, value = brute_force_optimum(problem, params.max_vars)
        return SolverOutcome(
            solver_name=self.name,
            seed=seed,
            best_assignment=bits,
            best_energy=value,
            per_read_energies=(value,),
        )
