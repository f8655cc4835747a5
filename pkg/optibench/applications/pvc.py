"""Robot path (PVC sealing) application: instances, validation and path length."""

import json
from collections.abc import Sequence
from pathlib import Path

from optibench.applications.base import ApplicationBase
from optibench.exceptions import FormatError, InfeasibleError, ParameterError
from optibench.models import HOME_SEAM, PvcInstance, PvcNode, PvcTour
from optibench.schemas import PvcParams
from optibench.utils import get_logger, make_rng

logger = get_logger(__name__)

DEFAULT_EDGE_FRACTION = 0.9
DEFAULT_WEIGHT_RANGE = (1.0, 100.0)


def generate_instance(
    n_seams: int,
    n_configs: int,
    n_tools: int,
    seed: int,
    edge_fraction: float = DEFAULT_EDGE_FRACTION,
    weight_range: tuple[float, float] = DEFAULT_WEIGHT_RANGE,
) -> PvcInstance:
    """
    Seeded synthetic sealing graph. Inter-seam moves exist with probability
    ``edge_fraction``; home connects to every seam node in both directions.
    All weights are drawn independently, so the graph is asymmetric.
    """
    if min(n_seams, n_configs, n_tools) < 1:
        raise ParameterError("n_seams, n_configs and n_tools must all be >= 1")
    if not 0.0 <= edge_fraction <= 1.0:
        raise ParameterError(f"edge_fraction must be in [0, 1], got {edge_fraction}")
    low, high = weight_range
    if not 0 <= low <= high:
        raise ParameterError(f"invalid weight range {weight_range}")

    rng = make_rng(seed)
    skeleton = PvcInstance(n_seams, n_configs, n_tools, edges={})
    homes = [node for node in skeleton.nodes if node.is_home]
    seam_nodes = [node for node in skeleton.nodes if not node.is_home]

    edges: dict[tuple[PvcNode, PvcNode], float] = {}
    for home in homes:
        for node in seam_nodes:
            edges[(home, node)] = float(rng.uniform(low, high))
            edges[(node, home)] = float(rng.uniform(low, high))
    for u in seam_nodes:
        for v in seam_nodes:
            if u.seam == v.seam:
                continue
            keep = rng.random() < edge_fraction
            weight = float(rng.uniform(low, high))
            if keep:
                edges[(u, v)] = weight

    logger.debug(
        "Generated PVC instance seams=%s configs=%s tools=%s seed=%s edges=%s",
        n_seams,
        n_configs,
        n_tools,
        seed,
        len(edges),
    )
    return PvcInstance(n_seams, n_configs, n_tools, edges=edges, seed=seed)


def reduce_instance(inst: PvcInstance, target_seams: int) -> PvcInstance:
    """
    Drops the highest-index seams until ``target_seams`` remain.
    """
    if target_seams > inst.n_seams:
        raise ParameterError(
            f"cannot reduce {inst.n_seams} seams to {target_seams}: target is larger"
        )
    if target_seams < 1:
        raise ParameterError("target_seams must be >= 1")
    if target_seams == inst.n_seams:
        return inst
    edges = {
        (u, v): d
        for (u, v), d in inst.edges.items()
        if u.seam < target_seams and v.seam < target_seams
    }
    return PvcInstance(
        target_seams, inst.n_configs, inst.n_tools, edges=edges, seed=inst.seed
    )


def rotate_to_home(steps: Sequence[PvcNode]) -> tuple[PvcNode, ...]:
    """Rotates a cyclic step sequence so it begins at the (first) home node."""
    for k, node in enumerate(steps):
        if node.is_home:
            return tuple(steps[k:]) + tuple(steps[:k])
    return tuple(steps)


def validate_tour(inst: PvcInstance, tour: PvcTour) -> bool:
    """
    A tour is valid when it starts at home, visits home once and every seam
    exactly once (one of its endpoints, any setting), and every cyclic move
    exists in the graph.
    """
    steps = tour.steps
    if len(steps) != inst.n_steps or not steps[0].is_home:
        return False
    if any(node not in inst.node_index for node in steps):
        return False
    seams = sorted(node.seam for node in steps)
    if seams != [HOME_SEAM, *range(inst.n_seams)]:
        return False
    return all(
        inst.distance(steps[i], steps[(i + 1) % len(steps)]) is not None
        for i in range(len(steps))
    )


def evaluate_tour(inst: PvcInstance, tour: PvcTour) -> float:
    """
    Path length of the closed tour.
    """
    total = 0.0
    steps = tour.steps
    for i, u in enumerate(steps):
        v = steps[(i + 1) % len(steps)]
        d = inst.distance(u, v)
        if d is None:
            raise InfeasibleError(f"tour uses missing move {u} -> {v}")
        total += d
    return total


def _node_fields(node: PvcNode) -> list[int]:
    return [node.seam, node.endpoint, node.config, node.tool]


def dumps(inst: PvcInstance) -> str:
    return json.dumps(
        {
            "n_seams": inst.n_seams,
            "n_configs": inst.n_configs,
            "n_tools": inst.n_tools,
            "seed": inst.seed,
            "edges": [
                [*_node_fields(u), *_node_fields(v), d]
                for (u, v), d in sorted(inst.edges.items())
            ],
        }
    )


def loads(text: str) -> PvcInstance:
    try:
        doc = json.loads(text)
        edges = {}
        for row in doc["edges"]:
            if len(row) != 9:
                raise ValueError(f"edge row must have 9 entries, got {len(row)}")
            u = PvcNode(*(int(x) for x in row[0:4]))
            v = PvcNode(*(int(x) for x in row[4:8]))
            edges[(u, v)] = float(row[8])
        return PvcInstance(
            int(doc["n_seams"]),
            int(doc["n_configs"]),
            int(doc["n_tools"]),
            edges=edges,
            seed=doc.get("seed"),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed PVC instance document: {e}") from e


def save(inst: PvcInstance, path: str | Path) -> None:
    Path(path).write_text(dumps(inst), encoding="utf-8")


def load(path: str | Path) -> PvcInstance:
    return loads(Path(path).read_text(encoding="utf-8"))


class PvcApplication(ApplicationBase[PvcInstance, PvcTour]):
    name = "pvc"
    lower_is_better = True
    params_model = PvcParams

    def generate(self, size: int, seed: int, params: PvcParams) -> PvcInstance:
        if params.source is not None:
            return reduce_instance(load(params.source), size)
        return generate_instance(
            size,
            params.n_configs,
            params.n_tools,
            seed,
            edge_fraction=params.edge_fraction,
        )

    def process_solution(self, instance: PvcInstance, raw) -> PvcTour | None:
        if raw is None:
            return None
        steps = raw.steps if isinstance(raw, PvcTour) else raw
        return PvcTour(rotate_to_home(steps))

    def validate(self, instance: PvcInstance, solution: PvcTour | None) -> bool:
        return solution is not None and validate_tour(instance, solution)

    def evaluate(self, instance: PvcInstance, solution: PvcTour) -> float:
        return evaluate_tour(instance, solution)
