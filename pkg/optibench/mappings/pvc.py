"""Time-step QUBO encoding of the robot path problem."""

import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

from optibench.applications import pvc as pvc_app
from optibench.exceptions import DimensionError, ParameterError
from optibench.mappings.base import MappingBase
from optibench.models import Assignment, PvcInstance, PvcNode, PvcTour
from optibench.qubo import QuboBuilder

MISSING_EDGE_FACTOR = 10.0


def pvc_qubit_count(n_seams: int, n_configs: int, n_tools: int) -> int:
    """
    (2 * seams + home) * configs * tools * (seams + 1) time steps.
    """
    return (2 * n_seams + 1) * n_configs * n_tools * (n_seams + 1)


@dataclass(frozen=True)
class PvcVarIndex:
    """
    Invertible (step, node) <-> flat index map; step-major ordering.
    Building it never touches edge weights.
    """

    n_seams: int
    n_configs: int
    n_tools: int
    instance: PvcInstance | None = field(default=None, compare=False, repr=False)
    nodes: tuple[PvcNode, ...] = field(init=False, repr=False, compare=False)
    node_index: dict[PvcNode, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        skeleton = self.instance or PvcInstance(
            self.n_seams, self.n_configs, self.n_tools, edges={}
        )
        object.__setattr__(self, "nodes", skeleton.nodes)
        object.__setattr__(self, "node_index", skeleton.node_index)

    @classmethod
    def for_instance(cls, inst: PvcInstance) -> "PvcVarIndex":
        return cls(inst.n_seams, inst.n_configs, inst.n_tools, instance=inst)

    @property
    def n_steps(self) -> int:
        return self.n_seams + 1

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_vars(self) -> int:
        return self.n_steps * self.n_nodes

    def index(self, step: int, node: PvcNode) -> int:
        return step * self.n_nodes + self.node_index[node]

    def key(self, flat: int) -> tuple[int, PvcNode]:
        step, k = divmod(flat, self.n_nodes)
        return step, self.nodes[k]


def default_lagrange(inst: PvcInstance) -> float:
    """Twice the largest possible tour length bound (steps * heaviest edge)."""
    return 2.0 * inst.n_steps * max(inst.max_edge, 1.0)


def map_to_qubo(inst: PvcInstance, lagrange: float | None = None):
    """
    f_dist + lagrange * (f_comp + f_time). The distance term treats the step
    index cyclically; moves absent from the graph cost MISSING_EDGE_FACTOR * lagrange.
    """
    lam = default_lagrange(inst) if lagrange is None else lagrange
    lam = MappingBase.positive("lagrange", lam)
    idx = PvcVarIndex.for_instance(inst)
    missing = MISSING_EDGE_FACTOR * lam
    builder = QuboBuilder()

    T = idx.n_steps
    for step in range(T):
        nxt = (step + 1) % T
        for u in idx.nodes:
            a = idx.index(step, u)
            for v in idx.nodes:
                d = inst.distance(u, v)
                builder.add_quadratic(a, idx.index(nxt, v), missing if d is None else d)

    penalty = QuboBuilder()
    for step in range(T):
        penalty.add_squared_one_hot([idx.index(step, u) for u in idx.nodes], 1.0)
    groups: dict[int, list[int]] = {}
    for step in range(T):
        for u in idx.nodes:
            groups.setdefault(u.seam, []).append(idx.index(step, u))
    for variables in groups.values():
        penalty.add_squared_one_hot(variables, 1.0)
    builder.add_builder(penalty, lam)

    return builder.build(idx.n_vars), idx


def _check_bits(bits: Sequence[int], idx: PvcVarIndex) -> None:
    if len(bits) != idx.n_vars:
        raise DimensionError(f"bitstring has length {len(bits)}, expected {idx.n_vars}")


def reverse_map(bits: Sequence[int], idx: PvcVarIndex) -> tuple[PvcNode, ...] | None:
    """
    Node per time step, or None unless exactly one variable is set per step.
    """
    _check_bits(bits, idx)
    steps = []
    for step in range(idx.n_steps):
        base = step * idx.n_nodes
        chosen = [k for k in range(idx.n_nodes) if bits[base + k]]
        if len(chosen) != 1:
            return None
        steps.append(idx.nodes[chosen[0]])
    return tuple(steps)


def decode(bits: Sequence[int], idx: PvcVarIndex) -> PvcTour | None:
    """
    Valid tour rotated to begin at home, or None.
    """
    if idx.instance is None:
        raise ParameterError("decoding needs an index built from an instance")
    steps = reverse_map(bits, idx)
    if steps is None:
        return None
    tour = PvcTour(pvc_app.rotate_to_home(steps))
    return tour if pvc_app.validate_tour(idx.instance, tour) else None


def encode(tour: PvcTour, idx: PvcVarIndex) -> Assignment:
    bits = [0] * idx.n_vars
    for step, node in enumerate(tour.steps):
        bits[idx.index(step, node)] = 1
    return tuple(bits)


def feasible_tours(inst: PvcInstance) -> Iterator[PvcTour]:
    """
    Every valid home-first tour; exponential, meant for tiny instances.
    """
    homes = [node for node in inst.nodes if node.is_home]
    variants = [
        [node for node in inst.nodes if node.seam == s] for s in range(inst.n_seams)
    ]
    for home in homes:
        for order in itertools.permutations(range(inst.n_seams)):
            for picks in itertools.product(*(variants[s] for s in order)):
                tour = PvcTour((home, *picks))
                if pvc_app.validate_tour(inst, tour):
                    yield tour


class PvcQuboMapping(MappingBase[PvcInstance, PvcVarIndex]):
    name = "qubo"

    def map(self, instance: PvcInstance, lagrange: float | None = None, **params):
        return map_to_qubo(instance, lagrange)

    def reverse_map(self, bits: Sequence[int], index: PvcVarIndex):
        return reverse_map(bits, index)

    def feasible_encodings(self, index: PvcVarIndex) -> Iterator[Assignment]:
        T = index.n_steps
        for tour in feasible_tours(index.instance):
            for shift in range(T):
                rotated = PvcTour(tour.steps[shift:] + tour.steps[:shift])
                yield encode(rotated, index)
