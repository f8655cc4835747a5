import json

import pandas as pd
import pytest

from optibench.config import BASE_DIR
from optibench.exceptions import ConfigError, InfeasibleError
from optibench.schemas import TIMING_COLUMNS, BenchConfig, Cell, DeviceConfig
from optibench.services import benchmark as benchmark_module
from optibench.services.benchmark import BenchmarkService, new_run_id
from optibench.services.results import META_FILE, RESULTS_FILE, SUMMARY_FILE
from optibench.solvers import SOLVERS

TRIANGLE = """NAME : triangle
TYPE : TSP
DIMENSION : 3
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 3 0
3 0 4
EOF
"""

THIRTY_CELLS = """
repetitions: 5
run_seed: 7
applications:
  - name: tsp
    sizes: [3, 4]
    mappings:
      - name: direct
        solvers:
          - name: greedy
          - name: random
          - name: reverse_greedy
"""


@pytest.fixture
def triangle_file(tmp_path):
    path = tmp_path / "triangle.tsp"
    path.write_text(TRIANGLE)
    return path


def make_cell(solver="greedy", mapping="direct", application="tsp", size=3, **kw):
    return Cell(
        index=0,
        application=application,
        problem_size=size,
        instance_seed=kw.get("instance_seed", 0),
        app_params=kw.get("app_params", {}),
        mapping=mapping,
        mapping_params=kw.get("mapping_params", {}),
        solver=solver,
        solver_params=kw.get("solver_params", {}),
        device=DeviceConfig(name="cpu"),
        repetition=0,
        cell_seed=kw.get("cell_seed", 123),
    )


def test_parse_config_applies_defaults():
    cfg = BenchmarkService.parse_config(
        "applications:\n  - name: tsp\n    sizes: [4]\n    mappings:\n"
        "      - name: direct\n        solvers: [{name: greedy}]\n"
    )
    assert cfg.repetitions == 5
    assert cfg.workers == 1
    assert cfg.devices[0].name == "cpu"
    assert cfg.applications[0].seeds == [0]


def test_parse_config_reports_field_path_of_unknown_solver():
    text = THIRTY_CELLS.replace("name: greedy", "name: nope")
    with pytest.raises(ConfigError) as exc:
        BenchmarkService.parse_config(text)
    assert exc.value.errors[0]["field"] == "applications.0.mappings.0.solvers.0.name"
    assert exc.value.status_code == 400


def test_parse_config_rejects_non_positive_size():
    text = THIRTY_CELLS.replace("[3, 4]", "[0, 4]")
    with pytest.raises(ConfigError) as exc:
        BenchmarkService.parse_config(text)
    assert exc.value.errors[0]["field"] == "applications.0.sizes.0"


def test_parse_config_rejects_incompatible_solver():
    text = THIRTY_CELLS.replace("name: direct", "name: qubo")
    with pytest.raises(ConfigError) as exc:
        BenchmarkService.parse_config(text)
    assert len(exc.value.errors) == 3


@pytest.mark.parametrize("text", ["[1, 2]", "applications: [", ""])
def test_parse_config_rejects_non_mapping_documents(text):
    with pytest.raises(ConfigError) as exc:
        BenchmarkService.parse_config(text)
    assert exc.value.errors[0]["field"] == "<root>"


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        BenchmarkService.load_config(tmp_path / "missing.yaml")


def test_plan_size_order_and_seeds():
    # Arrange
    cfg = BenchmarkService.parse_config(THIRTY_CELLS)

    # Act
    plan = BenchmarkService.build_plan(cfg)

    # Assert
    assert len(plan) == 30
    assert [cell.index for cell in plan] == list(range(30))
    assert plan[0].coordinates == (
        "tsp", "{}", 3, 0, "direct", "{}", "greedy", "{}", "cpu", 0
    )
    assert plan[5].solver == "random"
    assert plan[15].problem_size == 4
    assert len({cell.cell_seed for cell in plan}) == 30
    assert [c.cell_seed for c in BenchmarkService.build_plan(cfg)] == [
        c.cell_seed for c in plan
    ]


TWO_ANNEALERS = """
repetitions: 2
applications:
  - name: tsp
    sizes: [3]
    mappings:
      - name: qubo
        solvers:
          - name: simulated_annealing
            params: {n_reads: 1, n_sweeps: 20}
          - name: simulated_annealing
            params: {n_sweeps: 20, n_reads: 5}
"""


def test_plan_tells_apart_solver_entries_by_params():
    # Arrange
    cfg = BenchmarkService.parse_config(TWO_ANNEALERS)

    # Act
    plan = BenchmarkService.build_plan(cfg)

    # Assert
    assert len(plan) == 4
    assert plan[0].solver_config == '{"n_reads":1,"n_sweeps":20}'
    assert plan[2].solver_config == '{"n_reads":5,"n_sweeps":20}'
    assert plan[0].coordinates != plan[2].coordinates
    assert len({cell.cell_seed for cell in plan}) == 4


def test_run_keeps_solver_entries_apart_in_records_and_summary(tmp_path):
    # Arrange
    cfg = BenchmarkService.parse_config(TWO_ANNEALERS)

    # Act
    _, records, out = BenchmarkService.run(cfg, tmp_path, "two")

    # Assert
    assert [r.solver_config for r in records] == [
        '{"n_reads":1,"n_sweeps":20}',
        '{"n_reads":1,"n_sweeps":20}',
        '{"n_reads":5,"n_sweeps":20}',
        '{"n_reads":5,"n_sweeps":20}',
    ]
    assert all(r.mapping_config == "{}" for r in records)
    summary = pd.read_csv(out / SUMMARY_FILE)
    assert len(summary) == 2
    assert summary["count"].tolist() == [2, 2]
    assert summary["solver_config"].tolist() == [
        '{"n_reads":1,"n_sweeps":20}',
        '{"n_reads":5,"n_sweeps":20}',
    ]


def test_parse_config_rejects_repeated_solver_entry():
    text = TWO_ANNEALERS.replace("n_reads: 5", "n_reads: 1")
    with pytest.raises(ConfigError) as exc:
        BenchmarkService.parse_config(text)
    assert exc.value.errors[0]["field"] == "applications.0.mappings.0.solvers.1.name"


def test_parse_config_rejects_repeated_mapping_entry():
    text = THIRTY_CELLS + "      - name: direct\n        solvers: [{name: greedy}]\n"
    with pytest.raises(ConfigError) as exc:
        BenchmarkService.parse_config(text)
    assert exc.value.errors[0]["field"] == "applications.0.mappings.1.name"


def test_cell_seed_depends_on_run_seed():
    cfg = BenchmarkService.parse_config(THIRTY_CELLS)
    other = cfg.model_copy(update={"run_seed": 8})
    first = BenchmarkService.build_plan(cfg)[0].cell_seed
    assert first != BenchmarkService.build_plan(other)[0].cell_seed


def test_empty_plan_logs_warning(mocker):
    # Arrange
    warning = mocker.patch.object(benchmark_module.logger, "warning")
    cfg = BenchConfig.model_validate(
        {
            "applications": [
                {"name": "tsp", "sizes": [3], "mappings": [{"name": "qubo"}]}
            ]
        }
    )

    # Act
    plan = BenchmarkService.build_plan(cfg)

    # Assert
    assert plan == []
    warning.assert_called_once()


def test_run_cell_greedy_on_triangle(triangle_file):
    # Arrange
    cell = make_cell(app_params={"source": str(triangle_file)})

    # Act
    record = BenchmarkService.run_cell(cell, run_id="r1")

    # Assert
    assert record.error is None
    assert record.validity is True
    assert record.quality == 12.0
    assert record.n_variables is None
    assert record.run_id == "r1"
    assert record.tts_ms == pytest.approx(
        sum(getattr(record, column) for column in TIMING_COLUMNS)
    )


def test_run_cell_is_reproducible():
    cell = make_cell(solver="random", size=6)
    first = BenchmarkService.run_cell(cell)
    second = BenchmarkService.run_cell(cell)
    assert first.quality == second.quality
    assert first.solver_metadata == second.solver_metadata


def test_run_cell_records_solver_failure(mocker):
    mocker.patch.object(
        SOLVERS["greedy"], "solve", side_effect=InfeasibleError("dead end")
    )
    record = BenchmarkService.run_cell(make_cell())
    assert record.validity is False
    assert record.quality is None
    assert record.error == "InfeasibleError: dead end"


def test_run_cell_records_unexpected_failure(mocker):
    mocker.patch.object(SOLVERS["greedy"], "solve", side_effect=RuntimeError("boom"))
    record = BenchmarkService.run_cell(make_cell())
    assert record.validity is False
    assert record.error == "RuntimeError: boom"


def test_run_cell_qaoa_reports_sampled_metrics(triangle_file):
    # Arrange
    cell = make_cell(
        solver="qaoa",
        mapping="qubo",
        app_params={"source": str(triangle_file)},
        solver_params={"n_iterations": 3, "n_samples": 20},
    )

    # Act
    record = BenchmarkService.run_cell(cell)

    # Assert
    metadata = json.loads(record.solver_metadata)
    assert record.error is None
    assert record.n_variables == 9
    assert 0.0 <= metadata["sampled_validity"] <= 1.0
    assert metadata["expected_quality"] == pytest.approx(12.0)
    assert len(metadata["trace"]) == 3


def test_run_cell_simulated_annealing_on_tsp_qubo(triangle_file):
    cell = make_cell(
        solver="simulated_annealing",
        mapping="qubo",
        app_params={"source": str(triangle_file)},
        solver_params={"n_reads": 20, "n_sweeps": 200},
    )
    record = BenchmarkService.run_cell(cell)
    assert record.error is None
    assert record.validity is True
    assert record.quality == 12.0


def test_run_cell_exact_maxsat():
    record = BenchmarkService.run_cell(
        make_cell(application="maxsat", solver="exact_maxsat", size=6)
    )
    assert record.error is None
    metadata = json.loads(record.solver_metadata)
    assert "nodes" in metadata
    if record.validity:
        assert 0.0 <= record.quality <= 1.0


def test_run_cell_unknown_mapping_is_recorded():
    record = BenchmarkService.run_cell(make_cell(mapping="dinneen"))
    assert record.error.startswith("ParameterError")


def test_run_persists_and_parallel_matches_serial(tmp_path):
    # Arrange
    cfg = BenchmarkService.parse_config(THIRTY_CELLS)
    parallel = cfg.model_copy(update={"workers": 2})

    # Act
    _, serial_records, out = BenchmarkService.run(cfg, tmp_path / "serial", "s1")
    _, parallel_records, _ = BenchmarkService.run(parallel, tmp_path / "par", "p1")

    # Assert
    for name in (RESULTS_FILE, META_FILE, SUMMARY_FILE):
        assert (out / name).is_file()
    meta = json.loads((tmp_path / "par" / META_FILE).read_text())
    assert meta["timing_contention"] is True
    assert [(r.cell_seed, r.quality) for r in serial_records] == [
        (r.cell_seed, r.quality) for r in parallel_records
    ]


def test_run_defaults_to_results_dir(tmp_path, mocker):
    mocker.patch.object(benchmark_module.settings, "RESULTS_DIR", tmp_path)
    cfg = BenchmarkService.parse_config(THIRTY_CELLS)
    run_id, records, out = BenchmarkService.run(cfg, run_id="fixed")
    assert out == tmp_path / "fixed"
    assert len(records) == 30


def test_new_run_id_is_unique():
    assert new_run_id() != new_run_id()


@pytest.mark.asyncio
async def test_run_async(tmp_path):
    cfg = BenchmarkService.parse_config(THIRTY_CELLS)
    run_id, records, out = await BenchmarkService.run_async(cfg, tmp_path)
    assert len(records) == 30
    assert out == tmp_path
    assert run_id


def test_shipped_example_config_is_valid():
    cfg = BenchmarkService.load_config(BASE_DIR / "configs" / "example.yaml")
    assert len(BenchmarkService.build_plan(cfg)) > 0
