"""Immutable domain types shared by applications, mappings and solvers."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from optibench.exceptions import DimensionError, ParameterError, ShapeError

Assignment = tuple[int, ...]
VehicleConfig = tuple[int, ...]


class Sense(str, Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


def _check_coefficients(
    n: int, linear: dict, quadratic: dict, offset: float, what: str
) -> None:
    if n < 0:
        raise ParameterError(f"{what}: variable count must be >= 0, got {n}")
    if not math.isfinite(offset):
        raise ParameterError(f"{what}: offset must be finite")
    for i, c in linear.items():
        if not 0 <= i < n:
            raise DimensionError(f"{what}: linear index {i} out of range 0..{n - 1}")
        if not math.isfinite(c):
            raise ParameterError(f"{what}: linear coefficient of {i} is not finite")
    for (i, j), c in quadratic.items():
        if i == j:
            raise ShapeError(
                f"{what}: diagonal term ({i}, {j}) must be folded into linear"
            )
        if not i < j:
            raise ShapeError(f"{what}: quadratic key ({i}, {j}) must have i < j")
        if j >= n or i < 0:
            raise DimensionError(
                f"{what}: quadratic index ({i}, {j}) out of range 0..{n - 1}"
            )
        if not math.isfinite(c):
            raise ParameterError(f"{what}: coefficient of ({i}, {j}) is not finite")


@dataclass(frozen=True)
class QuboInstance:
    """
    Sparse quadratic pseudo-Boolean objective
    ``offset + sum(linear_i x_i) + sum(quadratic_ij x_i x_j)`` over ``n_vars`` bits.
    """

    n_vars: int
    linear: dict[int, float] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0
    sense: Sense = Sense.MINIMIZE

    def __post_init__(self):
        object.__setattr__(
            self, "linear", {int(k): float(v) for k, v in self.linear.items()}
        )
        object.__setattr__(
            self,
            "quadratic",
            {(int(i), int(j)): float(v) for (i, j), v in self.quadratic.items()},
        )
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "sense", Sense(self.sense))
        _check_coefficients(
            self.n_vars, self.linear, self.quadratic, self.offset, "QuboInstance"
        )

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Dense view: linear vector and strictly upper-triangular coupling matrix.
        """
        lin = np.zeros(self.n_vars)
        upper = np.zeros((self.n_vars, self.n_vars))
        for i, c in self.linear.items():
            lin[i] = c
        for (i, j), c in self.quadratic.items():
            upper[i, j] = c
        return lin, upper

    def scaled(self, alpha: float) -> "QuboInstance":
        return QuboInstance(
            n_vars=self.n_vars,
            linear={i: alpha * c for i, c in self.linear.items()},
            quadratic={k: alpha * c for k, c in self.quadratic.items()},
            offset=alpha * self.offset,
            sense=self.sense,
        )

    def as_minimization(self) -> "QuboInstance":
        """Same argmin/argmax problem expressed as a minimization."""
        if self.sense is Sense.MINIMIZE:
            return self
        negated = self.scaled(-1.0)
        return QuboInstance(
            n_vars=negated.n_vars,
            linear=negated.linear,
            quadratic=negated.quadratic,
            offset=negated.offset,
            sense=Sense.MINIMIZE,
        )


@dataclass(frozen=True)
class IsingInstance:
    n_spins: int
    h: dict[int, float] = field(default_factory=dict)
    J: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "h", {int(k): float(v) for k, v in self.h.items()})
        object.__setattr__(
            self, "J", {(int(i), int(j)): float(v) for (i, j), v in self.J.items()}
        )
        object.__setattr__(self, "offset", float(self.offset))
        _check_coefficients(self.n_spins, self.h, self.J, self.offset, "IsingInstance")


HOME_SEAM = -1


@dataclass(frozen=True, order=True)
class PvcNode:
    seam: int
    endpoint: int
    config: int
    tool: int

    @classmethod
    def home(cls, config: int = 0, tool: int = 0) -> "PvcNode":
        return cls(HOME_SEAM, 0, config, tool)

    @property
    def is_home(self) -> bool:
        return self.seam == HOME_SEAM

    @property
    def setting(self) -> tuple[int, int]:
        return self.config, self.tool


@dataclass(frozen=True)
class PvcInstance:
    """
    Directed, possibly incomplete and asymmetric graph over (seam, endpoint,
    config, tool) nodes plus one home node per (config, tool).
    """

    n_seams: int
    n_configs: int
    n_tools: int
    edges: dict[tuple[PvcNode, PvcNode], float]
    seed: int | None = None
    nodes: tuple[PvcNode, ...] = field(init=False, repr=False, compare=False)
    node_index: dict[PvcNode, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if min(self.n_seams, self.n_configs, self.n_tools) < 1:
            raise ParameterError("n_seams, n_configs and n_tools must all be >= 1")
        nodes = [
            PvcNode.home(c, t)
            for c in range(self.n_configs)
            for t in range(self.n_tools)
        ]
        nodes += [
            PvcNode(s, n, c, t)
            for s in range(self.n_seams)
            for n in range(2)
            for c in range(self.n_configs)
            for t in range(self.n_tools)
        ]
        index = {node: k for k, node in enumerate(nodes)}
        for (u, v), d in self.edges.items():
            if u not in index or v not in index:
                raise DimensionError(f"edge ({u}, {v}) references an unknown node")
            if not math.isfinite(d) or d < 0:
                raise ParameterError(f"edge ({u}, {v}) has invalid distance {d}")
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "node_index", index)

    def distance(self, u: PvcNode, v: PvcNode) -> float | None:
        return self.edges.get((u, v))

    @property
    def n_steps(self) -> int:
        return self.n_seams + 1

    @property
    def max_edge(self) -> float:
        return max(self.edges.values(), default=0.0)


@dataclass(frozen=True)
class PvcTour:
    steps: tuple[PvcNode, ...]


@dataclass(frozen=True)
class TspInstance:
    n_nodes: int
    dist: tuple[tuple[float, ...], ...]
    source_name: str = "unnamed"
    coords: tuple[tuple[float, float], ...] | None = None
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        matrix = np.asarray(self.dist, dtype=float)
        if matrix.shape != (self.n_nodes, self.n_nodes):
            raise DimensionError(
                f"distance matrix shape {matrix.shape} does not match "
                f"n_nodes={self.n_nodes}"
            )
        if not np.all(np.isfinite(matrix)) or np.any(matrix < 0):
            raise ParameterError("distances must be finite and non-negative")
        if np.any(np.diag(matrix) != 0):
            raise ParameterError("distance matrix diagonal must be zero")
        if not np.array_equal(matrix, matrix.T):
            raise ParameterError("distance matrix must be symmetric")
        if self.coords is not None and len(self.coords) != self.n_nodes:
            raise DimensionError("coordinate count does not match n_nodes")
        matrix.setflags(write=False)
        object.__setattr__(
            self, "dist", tuple(tuple(float(x) for x in row) for row in matrix)
        )
        object.__setattr__(self, "matrix", matrix)


@dataclass(frozen=True)
class TspTour:
    order: tuple[int, ...]


@dataclass(frozen=True, order=True)
class Literal:
    var: int
    negated: bool = False

    @classmethod
    def from_dimacs(cls, value: int) -> "Literal":
        return cls(abs(value) - 1, value < 0)

    def to_dimacs(self) -> int:
        return -(self.var + 1) if self.negated else self.var + 1

    def value(self, bits) -> int:
        return 1 - bits[self.var] if self.negated else bits[self.var]


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(self.literals))
        seen = set()
        for lit in self.literals:
            if lit.var in seen:
                raise ParameterError(f"variable {lit.var} appears twice in a clause")
            seen.add(lit.var)

    def __len__(self) -> int:
        return len(self.literals)

    def is_satisfied(self, bits) -> bool:
        return any(lit.value(bits) for lit in self.literals)


@dataclass(frozen=True)
class MaxSatInstance:
    """
    Partial MAX-SAT: every hard clause must hold, the weighted count of
    satisfied soft clauses is maximized.
    """

    n_vars: int
    hard: tuple[Clause, ...] = ()
    soft: tuple[Clause, ...] = ()
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "hard", tuple(self.hard))
        object.__setattr__(self, "soft", tuple(self.soft))
        weights = self.weights
        if weights is None:
            weights = (1.0,) * len(self.soft)
        weights = tuple(float(w) for w in weights)
        if len(weights) != len(self.soft):
            raise DimensionError("one weight per soft clause is required")
        if any(not w > 0 or not math.isfinite(w) for w in weights):
            raise ParameterError("soft clause weights must be positive and finite")
        object.__setattr__(self, "weights", weights)
        for clause in self.hard + self.soft:
            for lit in clause.literals:
                if not 0 <= lit.var < self.n_vars:
                    raise DimensionError(
                        f"literal variable {lit.var} out of range 0..{self.n_vars - 1}"
                    )

    @property
    def n_hard(self) -> int:
        return len(self.hard)

    @property
    def n_soft(self) -> int:
        return len(self.soft)

    @property
    def total_soft_weight(self) -> float:
        return float(sum(self.weights))


@dataclass(frozen=True)
class SolverOutcome:
    """
    What a solver hands back: a raw bitstring for QUBO solvers, or an
    application-level solution for solvers working on the instance directly.
    """

    solver_name: str
    seed: int | None = None
    best_assignment: Assignment | None = None
    best_energy: float | None = None
    per_read_energies: tuple[float, ...] = ()
    solution: Any = None
    metadata: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class QaoaState:
    amplitudes: np.ndarray

    @property
    def n_qubits(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.sum(self.probabilities))
