import asyncio
import json
import uuid
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from optibench.applications import get_application
from optibench.config import settings
from optibench.exceptions import BenchError, ConfigError
from optibench.mappings import get_mapping
from optibench.schemas import (
    TIMING_COLUMNS,
    BenchConfig,
    BenchmarkRecord,
    Cell,
    MappingParams,
)
from optibench.services.results import ResultsService
from optibench.solvers import SolveContext, get_solver
from optibench.utils import StageTimer, current_timestamp, derive_seed, get_logger
from optibench.validators.config_validator import ConfigValidator, format_errors

logger = get_logger(__name__)

STAGES = [
    "map",
    "solve",
    "reverse_map",
    "process_solution",
    "validation",
    "evaluation",
]


def new_run_id() -> str:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S")
    return f"{stamp}-{uuid.uuid4().hex[:6]}"


def _instance_key(cell: Cell) -> str:
    return json.dumps(
        [cell.application, cell.problem_size, cell.instance_seed, cell.app_params],
        sort_keys=True,
        default=str,
    )


def _error_tag(exc: Exception) -> str:
    detail = exc.detail if isinstance(exc, BenchError) else str(exc)
    return f"{type(exc).__name__}: {detail}"


class BenchmarkService:
    @staticmethod
    def parse_document(document: Any) -> BenchConfig:
        """
        Validates an already-decoded configuration document.

        :raises ConfigError: With the dotted path of every offending key
        """
        if not isinstance(document, dict):
            raise ConfigError.at("<root>", "configuration must be a mapping")
        try:
            cfg = BenchConfig.model_validate(document)
        except ValidationError as e:
            errors = format_errors(e)
            summary = "; ".join(f"{x['field']}: {x['message']}" for x in errors)
            raise ConfigError(f"invalid benchmark configuration: {summary}", errors)
        ConfigValidator.validate_config(cfg)
        return cfg

    @staticmethod
    def parse_config(text: str) -> BenchConfig:
        """Parses a YAML (or JSON) benchmark configuration."""
        try:
            document = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ConfigError.at("<root>", f"not a valid YAML document: {e}") from e
        return BenchmarkService.parse_document(document)

    @staticmethod
    def load_config(path: str | Path) -> BenchConfig:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError.at("<file>", f"cannot read {path}: {e}") from e
        return BenchmarkService.parse_config(text)

    @staticmethod
    def build_plan(cfg: BenchConfig) -> list[Cell]:
        """
        Cross product in the order application, size, instance seed, mapping,
        solver, device, repetition. Cell seeds derive from the run seed and the
        cell coordinates only.
        """
        cells: list[Cell] = []
        for app_cfg in cfg.applications:
            for size in app_cfg.sizes:
                for instance_seed in app_cfg.seeds:
                    for map_cfg in app_cfg.mappings:
                        for solver_cfg in map_cfg.solvers:
                            for device in cfg.devices:
                                for rep in range(cfg.repetitions):
                                    cell = Cell(
                                        index=len(cells),
                                        application=app_cfg.name,
                                        problem_size=size,
                                        instance_seed=instance_seed,
                                        app_params=app_cfg.params,
                                        mapping=map_cfg.name,
                                        mapping_params=map_cfg.params,
                                        solver=solver_cfg.name,
                                        solver_params=solver_cfg.params,
                                        device=device,
                                        repetition=rep,
                                        cell_seed=0,
                                    )
                                    seed = derive_seed(
                                        cfg.run_seed, *cell.coordinates
                                    )
                                    cells.append(
                                        cell.model_copy(update={"cell_seed": seed})
                                    )
        if not cells:
            logger.warning("The experiment plan is empty: no solver is configured")
        return cells

    @staticmethod
    def generate_instance(cell: Cell):
        app = get_application(cell.application)
        return app.generate(
            cell.problem_size, cell.instance_seed, app.parse_params(cell.app_params)
        )

    @staticmethod
    def run_cell(cell: Cell, run_id: str = "adhoc", instance=None) -> BenchmarkRecord:
        """
        Runs map, solve, reverse map, post-processing, validation and evaluation,
        timing each stage. Never raises: failures become invalid records with
        an error tag.
        """
        timer = StageTimer()
        validity = False
        quality = None
        n_variables = None
        metadata: dict[str, Any] = {}
        error = None
        try:
            app = get_application(cell.application)
            mapping = get_mapping(cell.application, cell.mapping)
            solver = get_solver(cell.solver)
            if instance is None:
                instance = BenchmarkService.generate_instance(cell)
            solver_params = solver.parse_params(cell.solver_params)
            map_params = MappingParams(**cell.mapping_params).model_dump(
                exclude_none=True
            )

            with timer.stage("map"):
                problem, index = mapping.map(instance, **map_params)
            if mapping.produces_qubo:
                n_variables = problem.n_vars

            def decode_cost(bits):
                solution = app.process_solution(
                    instance, mapping.reverse_map(bits, index)
                )
                if not app.validate(instance, solution):
                    return None
                return app.evaluate(instance, solution)

            context = SolveContext(
                decode_cost=decode_cost,
                feasible_encodings=lambda: mapping.feasible_encodings(index),
            )

            outcome = None
            with timer.stage("solve"):
                try:
                    outcome = solver.solve(
                        problem, solver_params, cell.cell_seed, cell.device, context
                    )
                except BenchError as e:
                    error = _error_tag(e)
                    logger.info("Cell %s: solver failed: %s", cell.index, error)

            if outcome is not None:
                metadata = {
                    "seed": outcome.seed,
                    "best_energy": outcome.best_energy,
                    **outcome.metadata,
                }
                with timer.stage("reverse_map"):
                    if mapping.produces_qubo:
                        raw = mapping.reverse_map(outcome.best_assignment, index)
                    else:
                        raw = mapping.reverse_map(outcome.solution, index)
                with timer.stage("process_solution"):
                    solution = app.process_solution(instance, raw)
                with timer.stage("validation"):
                    validity = app.validate(instance, solution)
                with timer.stage("evaluation"):
                    if validity:
                        quality = app.evaluate(instance, solution)
        except Exception as e:
            error = _error_tag(e)
            validity = False
            quality = None
            logger.error("Cell %s failed: %s", cell.index, error)

        durations = {
            column: timer.get(stage)
            for column, stage in zip(TIMING_COLUMNS, STAGES, strict=True)
        }
        return BenchmarkRecord(
            run_id=run_id,
            timestamp=current_timestamp(),
            application=cell.application,
            app_config=cell.app_config,
            problem_size=cell.problem_size,
            instance_seed=cell.instance_seed,
            mapping=cell.mapping,
            mapping_config=cell.mapping_config,
            solver=cell.solver,
            solver_config=cell.solver_config,
            device=cell.device.name,
            repetition=cell.repetition,
            cell_seed=cell.cell_seed,
            n_variables=n_variables,
            **durations,
            tts_ms=sum(durations.values()),
            validity=validity,
            quality=quality,
            solver_metadata=json.dumps(metadata, default=str),
            error=error,
        )

    @staticmethod
    def run(
        cfg: BenchConfig,
        out_dir: str | Path | None = None,
        run_id: str | None = None,
    ) -> tuple[str, list[BenchmarkRecord], Path]:
        """
        Executes the whole plan and persists it. Instances are generated once
        per (application, size, seed, params), outside the timed stages.
        """
        run_id = run_id or new_run_id()
        out = Path(out_dir) if out_dir is not None else settings.RESULTS_DIR / run_id
        plan = BenchmarkService.build_plan(cfg)
        logger.info(
            "Run %s: %s cells, %s workers", run_id, len(plan), cfg.workers
        )

        instances: dict[str, Any] = {}
        for cell in plan:
            key = _instance_key(cell)
            if key not in instances:
                try:
                    instances[key] = BenchmarkService.generate_instance(cell)
                except Exception as e:
                    # the cell regenerates it and records the failure
                    logger.warning("Instance %s could not be built: %s", key, e)
                    instances[key] = None

        def execute(cell: Cell) -> BenchmarkRecord:
            return BenchmarkService.run_cell(
                cell, run_id, instances.get(_instance_key(cell))
            )

        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                records = list(pool.map(execute, plan))
        else:
            records = [execute(cell) for cell in plan]

        extra = {"workers": cfg.workers, "timing_contention": cfg.workers > 1}
        ResultsService.persist(records, cfg, out, run_id, plan, extra)
        return run_id, records, out

    @staticmethod
    async def run_async(
        cfg: BenchConfig, out_dir: str | Path | None = None
    ) -> tuple[str, list[BenchmarkRecord], Path]:
        return await asyncio.to_thread(BenchmarkService.run, cfg, out_dir)
