"""Time-indexed N^2 QUBO encoding of the travelling salesperson problem."""

import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from optibench.applications import tsp as tsp_app
from optibench.exceptions import DimensionError, ParameterError
from optibench.mappings.base import MappingBase
from optibench.models import Assignment, TspInstance, TspTour
from optibench.qubo import QuboBuilder


def tsp_qubit_count(n_nodes: int) -> int:
    return n_nodes * n_nodes


@dataclass(frozen=True)
class TspVarIndex:
    """x_{v,t} lives at flat index t * n_nodes + v."""

    n_nodes: int

    @property
    def n_vars(self) -> int:
        return tsp_qubit_count(self.n_nodes)

    def index(self, step: int, node: int) -> int:
        return step * self.n_nodes + node

    def key(self, flat: int) -> tuple[int, int]:
        return divmod(flat, self.n_nodes)


def default_lagrange(inst: TspInstance) -> float:
    """
    Twice an average-tour-length estimate: 2 * n * mean off-diagonal distance.
    """
    n = inst.n_nodes
    if n < 2:
        return 1.0
    mean_edge = float(inst.matrix.sum()) / (n * (n - 1))
    return max(2.0 * n * mean_edge, 1.0)


def map_to_qubo(inst: TspInstance, lagrange: float | None = None):
    lam = default_lagrange(inst) if lagrange is None else lagrange
    lam = MappingBase.positive("lagrange", lam)
    n = inst.n_nodes
    idx = TspVarIndex(n)
    builder = QuboBuilder()

    for t in range(n):
        nxt = (t + 1) % n
        for u in range(n):
            for v in range(n):
                if u != v:
                    builder.add_quadratic(
                        idx.index(t, u), idx.index(nxt, v), inst.dist[u][v]
                    )

    penalty = QuboBuilder()
    for t in range(n):
        penalty.add_squared_one_hot([idx.index(t, v) for v in range(n)], 1.0)
    for v in range(n):
        penalty.add_squared_one_hot([idx.index(t, v) for t in range(n)], 1.0)
    builder.add_builder(penalty, lam)

    return builder.build(idx.n_vars), idx


def reverse_map(bits: Sequence[int], idx: TspVarIndex) -> tuple[int, ...] | None:
    """
    Node order by time step, or None unless both one-hot families hold.
    """
    if len(bits) != idx.n_vars:
        raise DimensionError(f"bitstring has length {len(bits)}, expected {idx.n_vars}")
    n = idx.n_nodes
    grid = np.asarray(bits, dtype=np.int8).reshape(n, n)
    if not (np.all(grid.sum(axis=1) == 1) and np.all(grid.sum(axis=0) == 1)):
        return None
    return tuple(int(k) for k in grid.argmax(axis=1))


def decode(bits: Sequence[int], idx: TspVarIndex) -> TspTour | None:
    order = reverse_map(bits, idx)
    if order is None:
        return None
    return TspTour(tsp_app.rotate_to_start(order))


def encode(tour: TspTour, idx: TspVarIndex) -> Assignment:
    if len(tour.order) != idx.n_nodes:
        raise ParameterError("tour does not visit every node")
    bits = [0] * idx.n_vars
    for step, node in enumerate(tour.order):
        bits[idx.index(step, node)] = 1
    return tuple(bits)


class TspQuboMapping(MappingBase[TspInstance, TspVarIndex]):
    name = "qubo"

    def map(self, instance: TspInstance, lagrange: float | None = None, **params):
        return map_to_qubo(instance, lagrange)

    def reverse_map(self, bits: Sequence[int], index: TspVarIndex):
        return reverse_map(bits, index)

    def feasible_encodings(self, index: TspVarIndex) -> Iterator[Assignment]:
        for order in itertools.permutations(range(index.n_nodes)):
            yield encode(TspTour(order), index)
