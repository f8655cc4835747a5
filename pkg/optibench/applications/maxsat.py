"""Vehicle options application as partial MAX-3SAT."""

import json
import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from optibench.applications.base import ApplicationBase
from optibench.exceptions import DimensionError, FormatError, ParameterError
from optibench.models import Clause, Literal, MaxSatInstance, VehicleConfig
from optibench.schemas import MaxSatParams
from optibench.utils import get_logger, make_rng

logger = get_logger(__name__)

HARD_PER_FEATURE = 2.0
SOFT_PER_FEATURE = 4.2


def recipe_counts(n_f: int) -> tuple[int, int]:
    """Hard and soft clause counts of the vehicle-options instance recipe."""
    # round first: 4.2 * n_f is not exact in binary floating point
    return int(HARD_PER_FEATURE * n_f), math.ceil(round(SOFT_PER_FEATURE * n_f, 9))


def _random_clause(rng: np.random.Generator, n_f: int, width: int) -> Clause:
    variables = rng.choice(n_f, size=width, replace=False)
    polarities = rng.integers(0, 2, size=width)
    return Clause(
        tuple(
            Literal(int(v), bool(p))
            for v, p in zip(variables, polarities, strict=True)
        )
    )


def generate_random(n_f: int, seed: int) -> MaxSatInstance:
    """
    Random partial MAX-3SAT instance with 2*n_f hard and ceil(4.2*n_f) soft
    clauses; clause variables are distinct, polarities uniform.
    """
    if n_f < 3:
        raise ParameterError(f"n_f must be >= 3, got {n_f}")
    n_h, n_s = recipe_counts(n_f)
    rng = make_rng(seed)
    hard = tuple(_random_clause(rng, n_f, 3) for _ in range(n_h))
    soft = tuple(_random_clause(rng, n_f, 3) for _ in range(n_s))
    return MaxSatInstance(n_vars=n_f, hard=hard, soft=soft)


def provenance(n_f: int, seed: int) -> str:
    n_h, n_s = recipe_counts(n_f)
    return json.dumps({"n_f": n_f, "seed": seed, "n_h": n_h, "n_s": n_s})


def _check_config(inst: MaxSatInstance, v: Sequence[int]) -> None:
    if len(v) != inst.n_vars:
        raise DimensionError(
            f"configuration has length {len(v)}, instance has {inst.n_vars} features"
        )


def validate(inst: MaxSatInstance, v: Sequence[int]) -> bool:
    """True when every hard clause holds."""
    _check_config(inst, v)
    return all(clause.is_satisfied(v) for clause in inst.hard)


def satisfied_soft_weight(inst: MaxSatInstance, v: Sequence[int]) -> float:
    _check_config(inst, v)
    return float(
        sum(
            w
            for clause, w in zip(inst.soft, inst.weights, strict=True)
            if clause.is_satisfied(v)
        )
    )


def quality(inst: MaxSatInstance, v: Sequence[int]) -> float:
    """
    Weighted ratio of satisfied soft clauses, in [0, 1]. An instance without
    soft clauses scores 1.
    """
    total = inst.total_soft_weight
    if total == 0:
        _check_config(inst, v)
        return 1.0
    return satisfied_soft_weight(inst, v) / total


def clause_mask(clauses: Sequence[Clause], configs: np.ndarray) -> np.ndarray:
    """
    Boolean matrix (configs x clauses) of satisfied clauses, vectorized over rows.
    """
    configs = np.atleast_2d(np.asarray(configs, dtype=bool))
    mask = np.zeros((configs.shape[0], len(clauses)), dtype=bool)
    for k, clause in enumerate(clauses):
        for lit in clause.literals:
            column = configs[:, lit.var]
            mask[:, k] |= ~column if lit.negated else column
    return mask


def validate_many(inst: MaxSatInstance, configs: np.ndarray) -> np.ndarray:
    return clause_mask(inst.hard, configs).all(axis=1)


def quality_many(inst: MaxSatInstance, configs: np.ndarray) -> np.ndarray:
    total = inst.total_soft_weight
    mask = clause_mask(inst.soft, configs)
    if total == 0:
        return np.ones(mask.shape[0])
    return mask @ np.asarray(inst.weights) / total


def _format_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def write_wcnf(inst: MaxSatInstance) -> str:
    """
    Old-style DIMACS WCNF; hard clauses carry the ``top`` weight.
    """
    top = math.floor(inst.total_soft_weight) + 1
    lines = [f"p wcnf {inst.n_vars} {inst.n_hard + inst.n_soft} {top}"]
    rows = [(str(top), clause) for clause in inst.hard]
    rows += [
        (_format_weight(w), clause)
        for clause, w in zip(inst.soft, inst.weights, strict=True)
    ]
    for weight, clause in rows:
        lits = [str(lit.to_dimacs()) for lit in clause.literals]
        lines.append(" ".join([weight, *lits, "0"]))
    return "\n".join(lines) + "\n"


def _parse_literals(tokens: list[str], n_vars: int | None, line_no: int) -> Clause:
    if not tokens or tokens[-1] != "0":
        raise FormatError(f"line {line_no}: clause is not terminated by 0")
    try:
        values = [int(tok) for tok in tokens[:-1]]
    except ValueError as e:
        raise FormatError(f"line {line_no}: non-integer literal") from e
    if any(v == 0 for v in values):
        raise FormatError(f"line {line_no}: literal 0 inside a clause")
    if n_vars is not None and any(abs(v) > n_vars for v in values):
        raise FormatError(f"line {line_no}: variable index exceeds {n_vars}")
    try:
        return Clause(tuple(Literal.from_dimacs(v) for v in values))
    except ParameterError as e:
        raise FormatError(f"line {line_no}: {e.detail}") from e


def parse_wcnf(text: str) -> MaxSatInstance:
    """
    Reads old-style WCNF (``p wcnf <nvars> <nclauses> <top>``) and the newer
    header-less variant where hard clauses start with ``h``.
    """
    n_vars: int | None = None
    n_declared: int | None = None
    top: float | None = None
    hard: list[Clause] = []
    soft: list[Clause] = []
    weights: list[float] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        if tokens[0] == "p":
            if len(tokens) != 5 or tokens[1] != "wcnf":
                raise FormatError(f"line {line_no}: expected 'p wcnf <v> <c> <top>'")
            try:
                n_vars, n_declared = int(tokens[2]), int(tokens[3])
                top = float(tokens[4])
            except ValueError as e:
                raise FormatError(f"line {line_no}: malformed header") from e
            continue
        if tokens[0] == "h":
            hard.append(_parse_literals(tokens[1:], n_vars, line_no))
            continue
        try:
            weight = float(tokens[0])
        except ValueError as e:
            raise FormatError(
                f"line {line_no}: weight '{tokens[0]}' is not a number"
            ) from e
        if not weight > 0:
            raise FormatError(f"line {line_no}: weight must be positive, got {weight}")
        clause = _parse_literals(tokens[1:], n_vars, line_no)
        if top is not None and weight >= top:
            hard.append(clause)
        else:
            soft.append(clause)
            weights.append(weight)

    if n_declared is not None and n_declared != len(hard) + len(soft):
        raise FormatError(
            f"header declares {n_declared} clauses, found {len(hard) + len(soft)}"
        )
    if n_vars is None:
        used = [lit.var for clause in hard + soft for lit in clause.literals]
        n_vars = max(used, default=-1) + 1
    return MaxSatInstance(
        n_vars=n_vars, hard=tuple(hard), soft=tuple(soft), weights=tuple(weights)
    )


def load(path: str | Path) -> MaxSatInstance:
    return parse_wcnf(Path(path).read_text(encoding="utf-8"))


class MaxSatApplication(ApplicationBase[MaxSatInstance, VehicleConfig]):
    name = "maxsat"
    lower_is_better = False
    params_model = MaxSatParams

    def generate(self, size: int, seed: int, params: MaxSatParams) -> MaxSatInstance:
        if params.source is None:
            return generate_random(size, seed)
        inst = load(params.source)
        if inst.n_vars != size:
            raise ParameterError(
                f"{params.source} has {inst.n_vars} features, size asks for {size}"
            )
        return inst

    def process_solution(self, instance: MaxSatInstance, raw) -> VehicleConfig | None:
        return None if raw is None else tuple(int(b) for b in raw)

    def validate(
        self, instance: MaxSatInstance, solution: VehicleConfig | None
    ) -> bool:
        return solution is not None and validate(instance, solution)

    def evaluate(self, instance: MaxSatInstance, solution: VehicleConfig) -> float:
        return quality(instance, solution)
