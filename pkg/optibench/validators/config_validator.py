from pydantic import ValidationError

from optibench.applications import APPLICATIONS
from optibench.exceptions import ConfigError
from optibench.mappings import MAPPINGS
from optibench.schemas import BenchConfig, MappingParams
from optibench.solvers import SOLVERS
from optibench.utils import canonical_params, get_logger

logger = get_logger(__name__)


def format_errors(exc: ValidationError, prefix: str = "") -> list[dict]:
    """Dotted field path and message per pydantic error."""
    errors = []
    for error in exc.errors():
        loc = ".".join(str(x) for x in error["loc"])
        field = f"{prefix}.{loc}" if prefix and loc else (prefix or loc)
        errors.append({"field": field, "message": error["msg"]})
    return errors


class ConfigValidator:
    @staticmethod
    def _check_model(model, params: dict, path: str, errors: list[dict]) -> None:
        try:
            model(**params)
        except ValidationError as e:
            errors.extend(format_errors(e, path))

    @staticmethod
    def validate_config(cfg: BenchConfig) -> None:
        """
        Resolves every module name and checks that each solver accepts what its
        mapping produces. All problems are reported at once.

        :raises ConfigError: With one entry per offending key
        """
        errors: list[dict] = []
        for i, app_cfg in enumerate(cfg.applications):
            app_path = f"applications.{i}"
            app = APPLICATIONS.get(app_cfg.name)
            if app is None:
                errors.append(
                    {
                        "field": f"{app_path}.name",
                        "message": f"unknown application '{app_cfg.name}', "
                        f"expected one of {sorted(APPLICATIONS)}",
                    }
                )
                continue
            ConfigValidator._check_model(
                app.params_model, app_cfg.params, f"{app_path}.params", errors
            )

            seen_mappings: set[tuple[str, str]] = set()
            for j, map_cfg in enumerate(app_cfg.mappings):
                map_path = f"{app_path}.mappings.{j}"
                map_key = (map_cfg.name, canonical_params(map_cfg.params))
                if map_key in seen_mappings:
                    errors.append(
                        {
                            "field": f"{map_path}.name",
                            "message": f"mapping '{map_cfg.name}' is listed twice "
                            "with the same parameters",
                        }
                    )
                    continue
                seen_mappings.add(map_key)
                mapping = MAPPINGS[app.name].get(map_cfg.name)
                if mapping is None:
                    errors.append(
                        {
                            "field": f"{map_path}.name",
                            "message": f"unknown mapping '{map_cfg.name}' for "
                            f"{app.name}, expected one of "
                            f"{sorted(MAPPINGS[app.name])}",
                        }
                    )
                    continue
                if mapping.produces_qubo:
                    ConfigValidator._check_model(
                        MappingParams, map_cfg.params, f"{map_path}.params", errors
                    )
                elif map_cfg.params:
                    errors.append(
                        {
                            "field": f"{map_path}.params",
                            "message": "the direct mapping takes no parameters",
                        }
                    )
                if not map_cfg.solvers:
                    logger.warning("%s lists no solvers, it adds no cells", map_path)

                seen_solvers: set[tuple[str, str]] = set()
                for k, solver_cfg in enumerate(map_cfg.solvers):
                    solver_path = f"{map_path}.solvers.{k}"
                    solver_key = (solver_cfg.name, canonical_params(solver_cfg.params))
                    if solver_key in seen_solvers:
                        errors.append(
                            {
                                "field": f"{solver_path}.name",
                                "message": f"solver '{solver_cfg.name}' is listed "
                                "twice with the same parameters",
                            }
                        )
                        continue
                    seen_solvers.add(solver_key)
                    solver = SOLVERS.get(solver_cfg.name)
                    if solver is None:
                        errors.append(
                            {
                                "field": f"{solver_path}.name",
                                "message": f"unknown solver '{solver_cfg.name}', "
                                f"expected one of {sorted(SOLVERS)}",
                            }
                        )
                        continue
                    if not solver.supports(app.name, mapping.produces_qubo):
                        errors.append(
                            {
                                "field": f"{solver_path}.name",
                                "message": f"solver '{solver.name}' cannot run on "
                                f"mapping '{mapping.name}' of {app.name}",
                            }
                        )
                        continue
                    ConfigValidator._check_model(
                        solver.params_model,
                        solver_cfg.params,
                        f"{solver_path}.params",
                        errors,
                    )

        if errors:
            summary = "; ".join(f"{e['field']}: {e['message']}" for e in errors)
            raise ConfigError(f"invalid benchmark configuration: {summary}", errors)
