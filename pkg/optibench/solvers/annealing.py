"""Seeded single-flip Metropolis simulated annealing over QUBO instances."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from optibench.config import settings
from optibench.models import QuboInstance, Sense, SolverOutcome
from optibench.qubo import evaluate_many
from optibench.schemas import DeviceConfig, SaParams
from optibench.solvers.base import SolveContext, SolverBase
from optibench.utils import get_logger, make_rng

logger = get_logger(__name__)


def _read_generators(
    seed: int, n_reads: int, bit_generator: str
) -> list[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(n_reads)
    return [make_rng(child, bit_generator) for child in children]


def _chunk_sizes(n_vars: int, n_reads: int, n_sweeps: int) -> tuple[int, int]:
    """Reads per chunk and sweeps per pre-drawn block within the float budget."""
    budget = settings.SA_MEMORY_BUDGET_FLOATS
    reads = max(1, min(n_reads, budget // max(1, n_vars * n_sweeps)))
    sweeps = max(1, min(n_sweeps, budget // max(1, reads * n_vars)))
    return reads, sweeps


def _anneal_chunk(
    lin: np.ndarray,
    coupling: np.ndarray,
    betas: np.ndarray,
    generators: list[np.random.Generator],
    sweep_block: int,
) -> np.ndarray:
    """
    Anneals one chunk of reads and returns the best state each read visited,
    the initial state included. Every read draws only from its own generator.
    """
    n = lin.size
    x = np.stack([rng.integers(0, 2, size=n) for rng in generators]).astype(float)
    field = lin + x @ coupling
    energy = x @ lin + 0.5 * np.einsum("ri,ij,rj->r", x, coupling, x)
    best_x = x.copy()
    best_energy = energy.copy()
    rows = np.arange(len(generators))

    n_sweeps = betas.size
    for start in range(0, n_sweeps, sweep_block):
        stop = min(n_sweeps, start + sweep_block)
        uniforms = np.stack([rng.random((stop - start, n)) for rng in generators])
        for s in range(start, stop):
            beta = betas[s]
            draws = uniforms[:, s - start, :]
            for i in range(n):
                step = 1.0 - 2.0 * x[:, i]
                delta = step * field[:, i]
                accept = draws[:, i] < np.exp(-beta * np.maximum(delta, 0.0))
                if not accept.any():
                    continue
                flip = rows[accept]
                x[flip, i] += step[flip]
                field[flip] += step[flip, None] * coupling[i]
                energy[flip] += delta[flip]
            improved = energy < best_energy
            best_x[improved] = x[improved]
            best_energy[improved] = energy[improved]
    return best_x


def simulated_annealing(
    q: QuboInstance,
    params: SaParams,
    seed: int | None = None,
    threads: int = 1,
    bit_generator: str = "PCG64",
) -> SolverOutcome:
    """
    Best of ``n_reads`` independent restarts under a geometric inverse
    temperature schedule. Read r draws from the r-th child of
    ``SeedSequence(seed)``, so results do not depend on chunking or threads.

    :param q: QUBO instance, either sense
    :param params: Schedule and read count
    :param seed: Overrides ``params.seed``
    :param threads: Chunks annealed concurrently
    :param bit_generator: numpy bit generator of the read streams
    :return: Outcome with energies in the instance's own sense
    """
    seed = seed if seed is not None else (params.seed or 0)
    n = q.n_vars
    if n == 0:
        return SolverOutcome(
            solver_name="simulated_annealing",
            seed=seed,
            best_assignment=(),
            best_energy=q.offset,
            per_read_energies=(q.offset,) * params.n_reads,
        )

    lin, upper = q.as_minimization().to_arrays()
    coupling = upper + upper.T
    betas = np.geomspace(params.beta_hot, params.beta_cold, params.n_sweeps)
    generators = _read_generators(seed, params.n_reads, bit_generator)
    chunk_reads, sweep_block = _chunk_sizes(n, params.n_reads, params.n_sweeps)
    chunks = [
        generators[k : k + chunk_reads]
        for k in range(0, params.n_reads, chunk_reads)
    ]
    logger.debug(
        "Annealing n_vars=%s reads=%s sweeps=%s chunks=%s threads=%s",
        n,
        params.n_reads,
        params.n_sweeps,
        len(chunks),
        threads,
    )

    def run(chunk):
        return _anneal_chunk(lin, coupling, betas, chunk, sweep_block)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            states = list(pool.map(run, chunks))
    else:
        states = [run(chunk) for chunk in chunks]

    best_states = np.vstack(states).astype(np.int8)
    energies = evaluate_many(q, best_states)
    k = int(np.argmin(energies) if q.sense is Sense.MINIMIZE else np.argmax(energies))
    return SolverOutcome(
        solver_name="simulated_annealing",
        seed=seed,
        best_assignment=tuple(int(b) for b in best_states[k]),
        best_energy=float(energies[k]),
        per_read_energies=tuple(float(e) for e in energies),
        metadata={
            "n_reads": params.n_reads,
            "n_sweeps": params.n_sweeps,
            "beta_hot": params.beta_hot,
            "beta_cold": params.beta_cold,
        },
    )


class SimulatedAnnealingSolver(SolverBase):
    name = "simulated_annealing"
    params_model = SaParams

    def solve(
        self,
        problem: QuboInstance,
        params: SaParams,
        seed: int,
        device: DeviceConfig,
        context: SolveContext | None = None,
    ) -> SolverOutcome:
        return simulated_annealing(
            problem,
            params,
            seed=params.seed if params.seed is not None else seed,
            threads=device.threads,
            bit_generator=device.bit_generator,
        )
