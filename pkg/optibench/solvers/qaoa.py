"""
Dense state-vector QAOA simulator.

Basis index bit ordering follows ``qubo.bits_of``: qubit 0 is the most
significant bit. Spin s_i = +1 for bit 0 and -1 for bit 1. The phase layer is
exp(-i gamma E) with E the Ising energy, the mixer exp(-i beta X) on every
qubit. For a single spin with h_0 = 1 this gives <Z> = sin(2 beta) sin(2 gamma).
"""

from collections.abc import Callable, Iterable
from pathlib import Path

import numpy as np
import pandas as pd

from optibench.config import settings
from optibench.exceptions import CapacityError, DimensionError
from optibench.models import (
    Assignment,
    IsingInstance,
    QaoaState,
    QuboInstance,
    Sense,
    SolverOutcome,
)
from optibench.qubo import bits_of, index_of, qubo_to_ising
from optibench.schemas import DeviceConfig, QaoaParams
from optibench.solvers.base import SolveContext, SolverBase
from optibench.utils import get_logger, make_rng

logger = get_logger(__name__)


def _check_size(n: int) -> None:
    cap = settings.QAOA_MAX_QUBITS
    if n > cap:
        raise CapacityError(
            f"state-vector simulation limited to {cap} qubits, got {n}"
        )


def ising_energies(h: IsingInstance) -> np.ndarray:
    """Energy of every basis state, indexed like the amplitude vector."""
    n = h.n_spins
    _check_size(n)
    index = np.arange(1 << n, dtype=np.int64)
    spins = [1.0 - 2.0 * ((index >> (n - 1 - i)) & 1) for i in range(n)]
    energies = np.full(1 << n, h.offset)
    for i, c in sorted(h.h.items()):
        energies += c * spins[i]
    for (i, j), c in sorted(h.J.items()):
        energies += c * spins[i] * spins[j]
    return energies


def _split(psi: np.ndarray, n: int, qubit: int) -> np.ndarray:
    return psi.reshape(1 << qubit, 2, 1 << (n - qubit - 1))


def _apply_mixer(psi: np.ndarray, n: int, beta: float) -> np.ndarray:
    c, s = np.cos(beta), np.sin(beta)
    for q in range(n):
        view = _split(psi, n, q)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = c * a0 - 1j * s * a1
        view[:, 1, :] = c * a1 - 1j * s * a0
    return psi


def _apply_x_sum(psi: np.ndarray, n: int) -> np.ndarray:
    """sum_q X_q |psi>."""
    out = np.zeros_like(psi)
    for q in range(n):
        view = _split(psi, n, q)
        target = _split(out, n, q)
        target[:, 0, :] += view[:, 1, :]
        target[:, 1, :] += view[:, 0, :]
    return out


def _evolve(
    energies: np.ndarray, n: int, gammas: Iterable[float], betas: Iterable[float]
) -> np.ndarray:
    psi = np.full(1 << n, 1.0 / np.sqrt(1 << n), dtype=complex)
    for gamma, beta in zip(gammas, betas, strict=True):
        psi *= np.exp(-1j * gamma * energies)
        _apply_mixer(psi, n, beta)
    return psi


def run_circuit(
    h: IsingInstance, gammas: Iterable[float], betas: Iterable[float]
) -> QaoaState:
    """
    Mixer(beta_p) Phase(gamma_p) ... Mixer(beta_1) Phase(gamma_1) |+>^n.

    :raises CapacityError: More spins than ``settings.QAOA_MAX_QUBITS``
    """
    energies = ising_energies(h)
    return QaoaState(_evolve(energies, h.n_spins, list(gammas), list(betas)))


def expectation(state: QaoaState, h: IsingInstance) -> float:
    energies = ising_energies(h)
    if energies.size != state.amplitudes.size:
        raise DimensionError("state and Ising instance disagree on the qubit count")
    return float(np.dot(state.probabilities, energies))


def value_and_gradient(
    h: IsingInstance, gammas: Iterable[float], betas: Iterable[float]
) -> tuple[float, np.ndarray]:
    """
    Expectation and its exact gradient by the adjoint method, ordered
    (gamma_1..gamma_p, beta_1..beta_p).
    """
    gammas, betas = list(gammas), list(betas)
    n, p = h.n_spins, len(gammas)
    energies = ising_energies(h)
    phi = _evolve(energies, n, gammas, betas)
    lam = energies * phi
    value = float(np.real(np.vdot(phi, lam)))

    grad = np.zeros(2 * p)
    for layer in reversed(range(p)):
        grad[p + layer] = 2.0 * np.imag(np.vdot(lam, _apply_x_sum(phi, n)))
        _apply_mixer(phi, n, -betas[layer])
        _apply_mixer(lam, n, -betas[layer])
        grad[layer] = 2.0 * np.imag(np.vdot(lam, energies * phi))
        undo = np.exp(1j * gammas[layer] * energies)
        phi *= undo
        lam *= undo
    return value, grad


def gradient(
    h: IsingInstance, gammas: Iterable[float], betas: Iterable[float]
) -> np.ndarray:
    return value_and_gradient(h, gammas, betas)[1]


def optimize(
    h: IsingInstance, params: QaoaParams, seed: int | None = None
) -> tuple[tuple[np.ndarray, np.ndarray], list[float]]:
    """
    Gradient descent with momentum from seeded uniform(0, 2 pi) angles unless
    ``params`` fixes them. The trace holds the expectation at the start of
    every iteration.
    """
    seed = seed if seed is not None else (params.seed or 0)
    p = params.p
    if params.gammas is not None:
        theta = np.asarray(params.gammas + params.betas, dtype=float)
    else:
        theta = make_rng(seed).uniform(0.0, 2.0 * np.pi, size=2 * p)
    velocity = np.zeros_like(theta)
    trace = []
    for _ in range(params.n_iterations):
        value, grad = value_and_gradient(h, theta[:p], theta[p:])
        trace.append(value)
        velocity = params.momentum * velocity + params.stepsize * grad
        theta = theta - velocity
    return (theta[:p].copy(), theta[p:].copy()), trace


def sample(state: QaoaState, n_samples: int, seed: int) -> np.ndarray:
    """Seeded basis-state indices drawn from |psi|^2."""
    probs = state.probabilities
    return make_rng(seed).choice(probs.size, size=n_samples, p=probs / probs.sum())


def measure_metrics(
    state: QaoaState,
    decode_cost: Callable[[Assignment], float | None],
    n_samples: int,
    seed: int,
    candidates: Iterable[Assignment] | None = None,
) -> tuple[float, float | None]:
    """
    Sampled validity V and the valid-renormalized expected cost Q.

    :param state: Output state
    :param decode_cost: Cost of a bitstring's decoded solution, None if invalid
    :param n_samples: Measurements drawn for V
    :param seed: Sampling seed
    :param candidates: Every valid bitstring when cheaply enumerable;
        otherwise all basis states with nonzero probability are scanned
    :return: (V, Q), Q is None when no valid state has support
    """
    n = state.n_qubits
    probs = state.probabilities
    cache: dict[int, float | None] = {}

    def cost_of(index: int) -> float | None:
        if index not in cache:
            cache[index] = decode_cost(bits_of(index, n))
        return cache[index]

    draws = sample(state, n_samples, seed)
    validity = sum(cost_of(int(k)) is not None for k in draws) / n_samples

    if candidates is not None:
        indices = {index_of(bits) for bits in candidates}
    else:
        indices = np.flatnonzero(probs > 0.0)
    weight = 0.0
    total = 0.0
    for k in sorted(int(i) for i in indices):
        cost = cost_of(k)
        if cost is not None and probs[k] > 0.0:
            weight += probs[k]
            total += probs[k] * cost
    quality = total / weight if weight > 0.0 else None
    return validity, quality


def trace_to_csv(trace: list[float], path: str | Path) -> None:
    pd.DataFrame(
        {"iteration": range(len(trace)), "expectation": trace}
    ).to_csv(path, index=False)


class QaoaSolver(SolverBase):
    """
    Trains the circuit on the Ising form of the (minimization) QUBO and
    returns the lowest-energy sampled bitstring.
    """

    name = "qaoa"
    params_model = QaoaParams

    def solve(
        self,
        problem: QuboInstance,
        params: QaoaParams,
        seed: int,
        device: DeviceConfig,
        context: SolveContext | None = None,
    ) -> SolverOutcome:
        seed = params.seed if params.seed is not None else seed
        _check_size(problem.n_vars)
        ising = qubo_to_ising(problem.as_minimization())
        (gammas, betas), trace = optimize(ising, params, seed)
        state = run_circuit(ising, gammas, betas)

        draws = sample(state, params.n_samples, seed)
        energies = ising_energies(ising)
        sampled = energies[draws]
        best = int(draws[int(np.argmin(sampled))])
        sign = -1.0 if problem.sense is Sense.MAXIMIZE else 1.0

        metadata = {
            "p": params.p,
            "gammas": [float(g) for g in gammas],
            "betas": [float(b) for b in betas],
            "trace": [float(t) for t in trace],
        }
        if context is not None and context.decode_cost is not None:
            candidates = (
                context.feasible_encodings() if context.feasible_encodings else None
            )
            v, q = measure_metrics(
                state, context.decode_cost, params.n_samples, seed, candidates
            )
            metadata.update({"sampled_validity": v, "expected_quality": q})
        logger.debug("QAOA n_qubits=%s p=%s seed=%s", problem.n_vars, params.p, seed)
        return SolverOutcome(
            solver_name=self.name,
            seed=seed,
            best_assignment=bits_of(best, problem.n_vars),
            best_energy=sign * float(energies[best]),
            per_read_energies=tuple(sign * float(e) for e in sampled),
            metadata=metadata,
        )
