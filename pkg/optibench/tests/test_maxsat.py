import itertools
import math

import numpy as np
import pytest

from optibench.applications import maxsat as maxsat_app
from optibench.applications.maxsat import MaxSatApplication
from optibench.exceptions import (
    CapacityError,
    DimensionError,
    FormatError,
    ParameterError,
    ShapeError,
)
from optibench.mappings import maxsat as maxsat_map
from optibench.models import Clause, Literal, MaxSatInstance
from optibench.qubo import brute_force_optimum, evaluate
from optibench.schemas import MaxSatParams
from optibench.services.oracle import OracleService
from optibench.solvers.exact_maxsat import exact_maxsat
from optibench.utils import make_rng


def clause(*dimacs: int) -> Clause:
    return Clause(tuple(Literal.from_dimacs(v) for v in dimacs))


def small_instance() -> MaxSatInstance:
    return MaxSatInstance(
        n_vars=4,
        hard=(clause(1, 2, -3), clause(-1, 3, 4)),
        soft=(clause(-1, -2, 3), clause(2, -3, -4), clause(1, 3, 4)),
    )


def mixed_instance(n_f: int, seed: int) -> MaxSatInstance:
    rng = make_rng(seed)

    def random_clause():
        width = int(rng.integers(1, 4))
        variables = rng.choice(n_f, size=width, replace=False)
        return Clause(
            tuple(Literal(int(v), bool(rng.integers(2))) for v in variables)
        )

    hard = tuple(random_clause() for _ in range(2))
    soft = tuple(random_clause() for _ in range(4))
    return MaxSatInstance(n_f, hard, soft)


def test_literal_dimacs_conversion():
    assert Literal.from_dimacs(-3) == Literal(2, True)
    assert Literal(0).to_dimacs() == 1


def test_clause_rejects_repeated_variable():
    with pytest.raises(ParameterError):
        clause(1, -1, 2)


def test_instance_rejects_bad_weights():
    with pytest.raises(ParameterError):
        MaxSatInstance(3, soft=(clause(1),), weights=(0.0,))
    with pytest.raises(DimensionError):
        MaxSatInstance(3, soft=(clause(1),), weights=(1.0, 2.0))


def test_validate_and_quality():
    inst = small_instance()
    v = (1, 0, 1, 0)
    assert maxsat_app.validate(inst, v)
    # soft: (-1 -2 3) true, (2 -3 -4) true, (1 3 4) true
    assert maxsat_app.quality(inst, v) == 1.0
    assert not maxsat_app.validate(inst, (0, 0, 1, 0))


def test_validate_length_mismatch():
    with pytest.raises(DimensionError):
        maxsat_app.validate(small_instance(), (1, 0))


def test_quality_without_soft_clauses():
    inst = MaxSatInstance(2, hard=(clause(1, 2),))
    assert maxsat_app.quality(inst, (1, 0)) == 1.0


def test_vectorized_checks_match_scalar():
    inst = maxsat_app.generate_random(6, seed=2)
    configs = np.array(list(itertools.product((0, 1), repeat=6)))
    valid = maxsat_app.validate_many(inst, configs)
    ratios = maxsat_app.quality_many(inst, configs)
    for row, ok, ratio in zip(configs, valid, ratios, strict=True):
        assert ok == maxsat_app.validate(inst, row)
        assert ratio == pytest.approx(maxsat_app.quality(inst, row))


def test_generate_follows_instance_recipe():
    inst = maxsat_app.generate_random(10, seed=7)
    assert (inst.n_hard, inst.n_soft) == (20, 42)
    for c in inst.hard + inst.soft:
        assert len(c) == 3
        assert len({lit.var for lit in c.literals}) == 3
    assert maxsat_app.generate_random(10, seed=7) == inst


def test_generate_needs_three_features():
    with pytest.raises(ParameterError):
        maxsat_app.generate_random(2, seed=0)


@pytest.mark.parametrize("n_f", range(5, 31))
def test_dinneen_variable_count_follows_recipe(n_f):
    n_h, n_s = maxsat_app.recipe_counts(n_f)
    assert maxsat_map.dinneen_variable_count(n_f, n_h, n_s) == math.ceil(
        round(7.2 * n_f, 9)
    )


def test_dinneen_qubo_size_matches_count():
    inst = maxsat_app.generate_random(8, seed=0)
    q, idx = maxsat_map.map_to_qubo_dinneen(inst)
    assert q.n_vars == idx.n_vars == maxsat_map.dinneen_variable_count(
        8, inst.n_hard, inst.n_soft
    )


def test_random_assignment_baseline_ratio():
    # Arrange
    inst = maxsat_app.generate_random(20, seed=1)
    configs = make_rng(5).integers(0, 2, size=(100_000, 20))

    # Act
    ratio = maxsat_app.quality_many(inst, configs).mean()

    # Assert
    assert ratio == pytest.approx(0.875, abs=0.005)


def test_wcnf_round_trip_with_weights():
    inst = MaxSatInstance(
        3,
        hard=(clause(1, -2),),
        soft=(clause(2, 3), clause(-1)),
        weights=(2.5, 4.0),
    )
    text = maxsat_app.write_wcnf(inst)
    assert text.splitlines()[0] == "p wcnf 3 3 7"
    assert maxsat_app.parse_wcnf(text) == inst


@pytest.mark.parametrize("case", range(100))
def test_wcnf_round_trip_on_generated_instances(case):
    # Arrange
    rng = make_rng(case)
    inst = maxsat_app.generate_random(int(rng.integers(3, 16)), seed=case)
    if case % 2:
        halves = rng.integers(1, 20, size=inst.n_soft) / 2
        inst = MaxSatInstance(inst.n_vars, inst.hard, inst.soft, tuple(halves))

    # Act
    parsed = maxsat_app.parse_wcnf(maxsat_app.write_wcnf(inst))

    # Assert
    assert parsed == inst


def test_wcnf_header_less_format():
    text = "c new style\nh 1 -2 0\n3 2 3 0\n1 -1 0\n"
    inst = maxsat_app.parse_wcnf(text)
    assert inst.n_vars == 3
    assert inst.hard == (clause(1, -2),)
    assert inst.weights == (3.0, 1.0)


@pytest.mark.parametrize(
    "text",
    [
        "p wcnf 2 1 5\n5 1 2\n",
        "p wcnf 2 1 5\n5 1 3 0\n",
        "p wcnf 2 2 5\n5 1 2 0\n",
        "p cnf 2 1\n1 2 0\n",
        "p wcnf 2 1 5\nx 1 0\n",
    ],
)
def test_wcnf_rejects_malformed_documents(text):
    with pytest.raises(FormatError):
        maxsat_app.parse_wcnf(text)


def test_application_source_must_match_size(tmp_path):
    path = tmp_path / "inst.wcnf"
    path.write_text(maxsat_app.write_wcnf(small_instance()))
    app = MaxSatApplication()
    assert app.generate(4, 0, MaxSatParams(source=str(path))) == small_instance()
    with pytest.raises(ParameterError):
        app.generate(5, 0, MaxSatParams(source=str(path)))


def test_clause_gadget_equals_clause_truth():
    result = OracleService.gadget_check()
    assert result["cases"] == 64
    assert result["failures"] == []


@pytest.mark.parametrize("polarity", list(itertools.product((1, -1), repeat=3)))
def test_clause_gadget_without_oracle(polarity):
    c = clause(*(sign * (k + 1) for k, sign in enumerate(polarity)))
    q = maxsat_map.clause_qubo_terms(c, 3).build(4)
    for x in itertools.product((0, 1), repeat=3):
        assert max(evaluate(q, (*x, z)) for z in (0, 1)) == int(c.is_satisfied(x))


def test_clause_gadget_needs_three_literals():
    with pytest.raises(ShapeError):
        maxsat_map.clause_qubo_terms(clause(1, 2), 2)


def test_complete_ancillas_marks_fully_true_clauses():
    inst = small_instance()
    _, idx = maxsat_map.map_to_qubo_dinneen(inst)
    full = maxsat_map.complete_ancillas(inst, idx, np.array([[1, 1, 0, 0]]))
    # hard (1 2 -3) and soft (2 -3 -4) have every literal true
    assert tuple(full[0]) == (1, 1, 0, 0, 1, 0, 0, 1, 0)


def test_dinneen_optimum_agrees_with_full_brute_force():
    # Arrange
    inst = small_instance()
    q, idx = maxsat_map.map_to_qubo_dinneen(inst)

    # Act
    bits, value = maxsat_map.dinneen_optimum(q, inst, idx)

    # Assert
    _, expected = brute_force_optimum(q)
    assert value == pytest.approx(expected)
    assert evaluate(q, bits) == pytest.approx(value)


def test_dinneen_optimum_over_cap():
    inst = maxsat_app.generate_random(8, seed=0)
    q, idx = maxsat_map.map_to_qubo_dinneen(inst)
    with pytest.raises(CapacityError):
        maxsat_map.dinneen_optimum(q, inst, idx, max_vars=7)


@pytest.mark.parametrize("seed", range(50))
def test_hard_clauses_dominate_with_default_lagrange(seed):
    result = OracleService.maxsat_dominance(6, seed)
    assert result["match"], result
    if result["satisfiable"]:
        assert result["hard_violations"] == 0


@pytest.mark.parametrize("seed", range(30))
def test_choi_optimum_reaches_exact_soft_weight(seed):
    # Arrange
    inst = mixed_instance(5, seed)
    exact = exact_maxsat(inst, seed=seed)
    q, idx = maxsat_map.map_to_qubo_choi(inst)

    # Act
    bits, _ = brute_force_optimum(q)
    v = maxsat_map.reverse_map_choi(bits, idx)

    # Assert
    if exact is not None:
        assert maxsat_app.validate(inst, v)
        assert maxsat_app.satisfied_soft_weight(inst, v) == exact[1]


def test_choi_rejects_empty_clause():
    inst = MaxSatInstance(2, soft=(Clause(()),))
    with pytest.raises(ShapeError):
        maxsat_map.map_to_qubo_choi(inst)


@pytest.mark.parametrize("seed", range(5))
def test_dinneen_and_choi_agree(seed):
    # Arrange
    inst = MaxSatInstance(
        4,
        hard=maxsat_app.generate_random(4, seed).hard[:2],
        soft=maxsat_app.generate_random(4, seed + 100).soft[:4],
    )
    q_d, idx_d = maxsat_map.map_to_qubo_dinneen(inst)
    q_c, idx_c = maxsat_map.map_to_qubo_choi(inst)

    # Act
    v_d = maxsat_map.reverse_map_dinneen(
        maxsat_map.dinneen_optimum(q_d, inst, idx_d)[0], idx_d
    )
    v_c = maxsat_map.reverse_map_choi(brute_force_optimum(q_c)[0], idx_c)

    # Assert
    if maxsat_app.validate(inst, v_d):
        assert maxsat_app.validate(inst, v_c)
        assert maxsat_app.satisfied_soft_weight(
            inst, v_d
        ) == maxsat_app.satisfied_soft_weight(inst, v_c)
