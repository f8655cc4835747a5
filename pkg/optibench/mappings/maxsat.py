"""
QUBO encodings of partial MAX-3SAT.

Dinneen: every clause becomes a quadratic gadget over its three variables plus
one ancilla whose maximum over the ancilla equals the clause truth value.
Choi: one vertex per literal occurrence, a weighted independent-set objective.
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from optibench.config import settings
from optibench.exceptions import CapacityError, DimensionError, ShapeError
from optibench.mappings.base import MappingBase
from optibench.models import (
    Assignment,
    Clause,
    Literal,
    MaxSatInstance,
    QuboInstance,
    Sense,
    VehicleConfig,
)
from optibench.qubo import QuboBuilder, bit_matrix, evaluate_many

_ORACLE_BLOCK = 1 << 14


def dinneen_variable_count(n_f: int, n_h: int, n_s: int) -> int:
    return n_f + n_h + n_s


def default_lagrange(inst: MaxSatInstance) -> float:
    """Total soft weight (N_s with unit weights), so no hard violation pays off."""
    return max(inst.total_soft_weight, 1.0)


def _affine(lit: Literal) -> tuple[float, float]:
    # x = a + b * v
    return (1.0, -1.0) if lit.negated else (0.0, 1.0)


def clause_qubo_terms(clause: Clause, ancilla: int) -> QuboBuilder:
    """
    T(v, z) = sum(x) - sum(x_i x_j) + z * (sum(x) - 2) for a 3-literal clause.
    max over z of T equals the clause truth value.

    :param clause: Clause with exactly three literals
    :param ancilla: Flat index of the fresh ancilla variable
    :return: Builder holding the quadratic polynomial
    """
    if len(clause) != 3:
        raise ShapeError(
            f"the ancilla gadget needs 3-literal clauses, got {len(clause)}"
        )
    terms = QuboBuilder()
    lits = [(lit.var, *_affine(lit)) for lit in clause.literals]

    for var, a, b in lits:
        terms.add_constant(a).add_linear(var, b)
        terms.add_linear(ancilla, a).add_quadratic(var, ancilla, b)
    terms.add_linear(ancilla, -2.0)

    for k, (vi, ai, bi) in enumerate(lits):
        for vj, aj, bj in lits[k + 1 :]:
            terms.add_constant(-ai * aj)
            terms.add_linear(vj, -ai * bj)
            terms.add_linear(vi, -aj * bi)
            terms.add_quadratic(vi, vj, -bi * bj)
    return terms


@dataclass(frozen=True)
class DinneenVarIndex:
    """v occupies 0..n_f-1, then one ancilla per hard clause, then per soft."""

    n_f: int
    n_hard: int
    n_soft: int

    @property
    def n_vars(self) -> int:
        return dinneen_variable_count(self.n_f, self.n_hard, self.n_soft)

    def hard_ancilla(self, j: int) -> int:
        return self.n_f + j

    def soft_ancilla(self, k: int) -> int:
        return self.n_f + self.n_hard + k


def map_to_qubo_dinneen(inst: MaxSatInstance, lagrange: float | None = None):
    """
    Maximize-sense QUBO  lagrange * sum(hard gadgets) + sum(w_k * soft gadgets).
    """
    lam = default_lagrange(inst) if lagrange is None else lagrange
    lam = MappingBase.positive("lagrange", lam)
    idx = DinneenVarIndex(inst.n_vars, inst.n_hard, inst.n_soft)
    builder = QuboBuilder()
    for j, clause in enumerate(inst.hard):
        builder.add_builder(clause_qubo_terms(clause, idx.hard_ancilla(j)), lam)
    for k, (clause, w) in enumerate(zip(inst.soft, inst.weights, strict=True)):
        builder.add_builder(clause_qubo_terms(clause, idx.soft_ancilla(k)), w)
    return builder.build(idx.n_vars, Sense.MAXIMIZE), idx


def _all_true(clauses: Sequence[Clause], configs: np.ndarray) -> np.ndarray:
    ones = np.ones((configs.shape[0], len(clauses)), dtype=bool)
    for k, clause in enumerate(clauses):
        for lit in clause.literals:
            column = configs[:, lit.var].astype(bool)
            ones[:, k] &= ~column if lit.negated else column
    return ones


def complete_ancillas(
    inst: MaxSatInstance, idx: DinneenVarIndex, configs: np.ndarray
) -> np.ndarray:
    """
    Appends the optimal ancilla bits to each row of ``configs``; z = 1 exactly
    when all three literals of its clause are true.
    """
    configs = np.atleast_2d(np.asarray(configs, dtype=np.int8))
    if configs.shape[1] != idx.n_f:
        raise DimensionError(
            f"configurations have {configs.shape[1]} features, expected {idx.n_f}"
        )
    z_hard = _all_true(inst.hard, configs).astype(np.int8)
    z_soft = _all_true(inst.soft, configs).astype(np.int8)
    return np.hstack([configs, z_hard, z_soft])


def dinneen_optimum(
    q: QuboInstance,
    inst: MaxSatInstance,
    idx: DinneenVarIndex,
    max_vars: int | None = None,
) -> tuple[Assignment, float]:
    """
    Exact argmax of the Dinneen QUBO enumerating only the 2^n_f feature
    vectors; ancillas are separable and completed per clause. Ties go to the
    lexicographically smallest feature vector.
    """
    cap = settings.BRUTE_FORCE_MAX_VARS if max_vars is None else max_vars
    if idx.n_f > cap:
        raise CapacityError(f"oracle limited to {cap} features, got {idx.n_f}")
    best_value = -np.inf
    best_row = None
    total = 1 << idx.n_f
    for start in range(0, total, _ORACLE_BLOCK):
        count = min(_ORACLE_BLOCK, total - start)
        full = complete_ancillas(inst, idx, bit_matrix(idx.n_f, start, count))
        values = evaluate_many(q, full)
        k = int(np.argmax(values))
        if values[k] > best_value:
            best_value = float(values[k])
            best_row = full[k]
    return tuple(int(b) for b in best_row), best_value


@dataclass(frozen=True)
class ChoiVarIndex:
    """
    One vertex per literal occurrence, hard clauses first. ``occurrences[i]``
    is (is_hard, clause position, literal).
    """

    n_f: int
    occurrences: tuple[tuple[bool, int, Literal], ...]

    @property
    def n_vars(self) -> int:
        return len(self.occurrences)


def map_to_qubo_choi(inst: MaxSatInstance, lagrange: float | None = None):
    """
    Weighted independent-set QUBO. Vertex weight is lagrange for hard literals
    and w_k for soft ones; conflicting and same-clause vertices are coupled by
    minus (w_i + w_j + 1).
    """
    lam = default_lagrange(inst) if lagrange is None else lagrange
    lam = MappingBase.positive("lagrange", lam)

    occurrences: list[tuple[bool, int, Literal]] = []
    weights: list[float] = []
    groups = [(True, j, c, lam) for j, c in enumerate(inst.hard)]
    groups += [
        (False, k, c, w)
        for k, (c, w) in enumerate(zip(inst.soft, inst.weights, strict=True))
    ]
    for is_hard, pos, clause, w in groups:
        if len(clause) == 0:
            kind = "hard" if is_hard else "soft"
            raise ShapeError(f"{kind} clause {pos} is empty and can never hold")
        for lit in clause.literals:
            occurrences.append((is_hard, pos, lit))
            weights.append(w)

    builder = QuboBuilder()
    for i, w in enumerate(weights):
        builder.add_linear(i, w)
    for i in range(len(occurrences)):
        hard_i, pos_i, lit_i = occurrences[i]
        for j in range(i + 1, len(occurrences)):
            hard_j, pos_j, lit_j = occurrences[j]
            same_clause = hard_i == hard_j and pos_i == pos_j
            conflict = lit_i.var == lit_j.var and lit_i.negated != lit_j.negated
            if same_clause or conflict:
                builder.add_quadratic(i, j, -(weights[i] + weights[j] + 1.0))

    idx = ChoiVarIndex(inst.n_vars, tuple(occurrences))
    return builder.build(idx.n_vars, Sense.MAXIMIZE), idx


def reverse_map_dinneen(bits: Sequence[int], idx: DinneenVarIndex) -> VehicleConfig:
    if len(bits) != idx.n_vars:
        raise DimensionError(f"bitstring has length {len(bits)}, expected {idx.n_vars}")
    return tuple(int(b) for b in bits[: idx.n_f])


def reverse_map_choi(bits: Sequence[int], idx: ChoiVarIndex) -> VehicleConfig:
    """Selected positive literals set their variable; everything else is 0."""
    if len(bits) != idx.n_vars:
        raise DimensionError(f"bitstring has length {len(bits)}, expected {idx.n_vars}")
    v = [0] * idx.n_f
    for bit, (_, _, lit) in zip(bits, idx.occurrences, strict=True):
        if bit and not lit.negated:
            v[lit.var] = 1
    return tuple(v)


class DinneenMapping(MappingBase[MaxSatInstance, DinneenVarIndex]):
    name = "dinneen"

    def map(self, instance: MaxSatInstance, lagrange: float | None = None, **params):
        return map_to_qubo_dinneen(instance, lagrange)

    def reverse_map(self, bits: Sequence[int], index: DinneenVarIndex):
        return reverse_map_dinneen(bits, index)


class ChoiMapping(MappingBase[MaxSatInstance, ChoiVarIndex]):
    name = "choi"

    def map(self, instance: MaxSatInstance, lagrange: float | None = None, **params):
        return map_to_qubo_choi(instance, lagrange)

    def reverse_map(self, bits: Sequence[int], index: ChoiVarIndex):
        return reverse_map_choi(bits, index)
