"""TSP application: TSPLIB subset I/O, node reduction and tour evaluation."""

import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from optibench.applications.base import ApplicationBase
from optibench.exceptions import DimensionError, FormatError, ParameterError
from optibench.models import TspInstance, TspTour
from optibench.schemas import TspParams
from optibench.utils import get_logger, make_rng

logger = get_logger(__name__)

SUPPORTED_WEIGHT_TYPES = ("EUC_2D", "EXPLICIT")


def nint(x: float) -> int:
    """TSPLIB nearest-integer rounding."""
    return int(x + 0.5)


def euc_2d_matrix(coords: Sequence[tuple[float, float]]) -> list[list[float]]:
    n = len(coords)
    dist = [[0.0] * n for _ in range(n)]
    for i in range(n):
        xi, yi = coords[i]
        for j in range(i + 1, n):
            xj, yj = coords[j]
            d = float(nint(math.sqrt((xi - xj) ** 2 + (yi - yj) ** 2)))
            dist[i][j] = dist[j][i] = d
    return dist


def _parse_number(token: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError as e:
        raise FormatError(f"line {line_no}: '{token}' is not a number") from e


def _build_instance(n: int, dist, name: str, coords=None) -> TspInstance:
    try:
        return TspInstance(n, dist, name, coords)
    except (DimensionError, ParameterError) as e:
        raise FormatError(f"invalid distance data: {e.detail}") from e


def parse_tsplib(text: str) -> TspInstance:
    """
    Parses EUC_2D coordinate files and EXPLICIT FULL_MATRIX files.
    """
    header: dict[str, str] = {}
    coords: list[tuple[float, float]] = []
    weights: list[float] = []
    section = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        keyword = line.rstrip(":").strip()
        if keyword in ("NODE_COORD_SECTION", "EDGE_WEIGHT_SECTION"):
            section = keyword
            continue
        if ":" in line:
            key, _, value = line.partition(":")
            header[key.strip()] = value.strip()
            section = None
            continue
        if section == "NODE_COORD_SECTION":
            parts = line.split()
            if len(parts) != 3:
                raise FormatError(f"line {line_no}: expected 'id x y', got '{line}'")
            coords.append(
                (_parse_number(parts[1], line_no), _parse_number(parts[2], line_no))
            )
        elif section == "EDGE_WEIGHT_SECTION":
            weights.extend(_parse_number(tok, line_no) for tok in line.split())
        else:
            raise FormatError(f"line {line_no}: unexpected content '{line}'")

    try:
        n = int(header["DIMENSION"])
    except (KeyError, ValueError) as e:
        raise FormatError("missing or invalid DIMENSION") from e
    weight_type = header.get("EDGE_WEIGHT_TYPE", "")
    if weight_type not in SUPPORTED_WEIGHT_TYPES:
        raise FormatError(f"unsupported EDGE_WEIGHT_TYPE '{weight_type}'")
    name = header.get("NAME", "unnamed")

    if weight_type == "EUC_2D":
        if len(coords) != n:
            raise FormatError(f"DIMENSION is {n} but {len(coords)} coordinates given")
        dist = tuple(map(tuple, euc_2d_matrix(coords)))
        return _build_instance(n, dist, name, tuple(coords))

    fmt = header.get("EDGE_WEIGHT_FORMAT", "FULL_MATRIX")
    if fmt != "FULL_MATRIX":
        raise FormatError(f"unsupported EDGE_WEIGHT_FORMAT '{fmt}'")
    if len(weights) != n * n:
        raise FormatError(f"FULL_MATRIX needs {n * n} weights, got {len(weights)}")
    matrix = np.asarray(weights, dtype=float).reshape(n, n)
    return _build_instance(n, tuple(map(tuple, matrix)), name)


def _format_number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def write_tsplib(inst: TspInstance) -> str:
    """
    Writes EUC_2D when coordinates are known, otherwise an explicit full matrix.
    """
    lines = [
        f"NAME : {inst.source_name}",
        "TYPE : TSP",
        f"DIMENSION : {inst.n_nodes}",
    ]
    if inst.coords is not None:
        lines.append("EDGE_WEIGHT_TYPE : EUC_2D")
        lines.append("NODE_COORD_SECTION")
        for k, (x, y) in enumerate(inst.coords, start=1):
            lines.append(f"{k} {_format_number(x)} {_format_number(y)}")
    else:
        lines.append("EDGE_WEIGHT_TYPE : EXPLICIT")
        lines.append("EDGE_WEIGHT_FORMAT : FULL_MATRIX")
        lines.append("EDGE_WEIGHT_SECTION")
        for row in inst.dist:
            lines.append(" ".join(_format_number(x) for x in row))
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def load(path: str | Path) -> TspInstance:
    return parse_tsplib(Path(path).read_text(encoding="utf-8"))


def random_instance(n_nodes: int, seed: int, extent: int = 1000) -> TspInstance:
    """
    Seeded EUC_2D instance with integer coordinates in [0, extent).
    """
    if n_nodes < 1:
        raise ParameterError("n_nodes must be >= 1")
    rng = make_rng(seed)
    points = rng.integers(0, extent, size=(n_nodes, 2))
    coords = tuple((float(x), float(y)) for x, y in points)
    dist = tuple(map(tuple, euc_2d_matrix(coords)))
    return TspInstance(n_nodes, dist, f"random{n_nodes}-{seed}", coords)


def reduce_nodes(inst: TspInstance, target_n: int) -> TspInstance:
    """
    Keeps the first ``target_n`` nodes in file order.
    """
    if target_n < 3:
        raise ParameterError(f"target_n must be >= 3, got {target_n}")
    if target_n > inst.n_nodes:
        raise ParameterError(
            f"cannot reduce {inst.n_nodes} nodes to {target_n}: target is larger"
        )
    if target_n == inst.n_nodes:
        return inst
    dist = tuple(row[:target_n] for row in inst.dist[:target_n])
    coords = inst.coords[:target_n] if inst.coords is not None else None
    return TspInstance(target_n, dist, inst.source_name, coords)


def rotate_to_start(order: Sequence[int], start: int = 0) -> tuple[int, ...]:
    order = tuple(order)
    if start not in order:
        return order
    k = order.index(start)
    return order[k:] + order[:k]


def validate_tour(inst: TspInstance, tour: TspTour) -> bool:
    return sorted(tour.order) == list(range(inst.n_nodes))


def evaluate_tour(inst: TspInstance, tour: TspTour) -> float:
    order = tour.order
    n = len(order)
    return float(sum(inst.dist[order[t]][order[(t + 1) % n]] for t in range(n)))


class TspApplication(ApplicationBase[TspInstance, TspTour]):
    name = "tsp"
    lower_is_better = True
    params_model = TspParams

    def generate(self, size: int, seed: int, params: TspParams) -> TspInstance:
        if params.source is not None:
            return reduce_nodes(load(params.source), size)
        return random_instance(size, seed, params.extent)

    def process_solution(self, instance: TspInstance, raw) -> TspTour | None:
        if raw is None:
            return None
        order = raw.order if isinstance(raw, TspTour) else raw
        return TspTour(rotate_to_start(order))

    def validate(self, instance: TspInstance, solution: TspTour | None) -> bool:
        return solution is not None and validate_tour(instance, solution)

    def evaluate(self, instance: TspInstance, solution: TspTour) -> float:
        return evaluate_tour(instance, solution)
