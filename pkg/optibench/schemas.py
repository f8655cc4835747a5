from typing import Any, Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    PositiveInt,
    model_validator,
)

from optibench.utils import canonical_params


class DeviceConfig(BaseModel):
    """Local execution profile: worker threads and RNG stream family."""

    name: str = Field(..., min_length=1)
    threads: PositiveInt = 1
    bit_generator: Literal["PCG64", "Philox", "SFC64"] = "PCG64"

    model_config = ConfigDict(extra="forbid", frozen=True)


class SolverConfig(BaseModel):
    name: str = Field(..., min_length=1)
    params: dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(extra="forbid")


class MappingConfig(BaseModel):
    name: str = Field(..., min_length=1)
    params: dict[str, Any] = Field(default_factory=dict)
    solvers: list[SolverConfig] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")


class ApplicationConfig(BaseModel):
    name: str = Field(..., min_length=1)
    sizes: list[PositiveInt] = Field(..., min_length=1)
    seeds: list[int] = Field(default_factory=lambda: [0], min_length=1)
    params: dict[str, Any] = Field(default_factory=dict)
    mappings: list[MappingConfig] = Field(..., min_length=1)

    model_config = ConfigDict(extra="forbid")


class BenchConfig(BaseModel):
    applications: list[ApplicationConfig] = Field(..., min_length=1)
    devices: list[DeviceConfig] = Field(
        default_factory=lambda: [DeviceConfig(name="cpu")], min_length=1
    )
    repetitions: PositiveInt = 5
    run_seed: int = 0
    workers: PositiveInt = 1

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def validate_device_names(self) -> "BenchConfig":
        names = [device.name for device in self.devices]
        if len(set(names)) != len(names):
            raise ValueError("device names must be unique")
        return self


class PvcParams(BaseModel):
    n_configs: PositiveInt = 2
    n_tools: PositiveInt = 2
    edge_fraction: float = Field(0.9, ge=0.0, le=1.0)
    source: str | None = None

    model_config = ConfigDict(extra="forbid")


class TspParams(BaseModel):
    source: str | None = None
    extent: PositiveInt = 1000

    model_config = ConfigDict(extra="forbid")


class MaxSatParams(BaseModel):
    source: str | None = None

    model_config = ConfigDict(extra="forbid")


class MappingParams(BaseModel):
    lagrange: PositiveFloat | None = None

    model_config = ConfigDict(extra="forbid")


class SaParams(BaseModel):
    n_reads: PositiveInt = 500
    n_sweeps: PositiveInt = 1000
    beta_hot: PositiveFloat = 0.1
    beta_cold: PositiveFloat = 10.0
    seed: int | None = None

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def validate_schedule(self) -> "SaParams":
        if not self.beta_hot < self.beta_cold:
            raise ValueError("beta_hot must be smaller than beta_cold")
        return self


class QaoaParams(BaseModel):
    p: PositiveInt = 1
    gammas: list[float] | None = None
    betas: list[float] | None = None
    n_iterations: int = Field(60, ge=0)
    stepsize: PositiveFloat = 0.001
    momentum: float = Field(0.9, ge=0.0, lt=1.0)
    n_samples: PositiveInt = 50
    seed: int | None = None

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def validate_angles(self) -> "QaoaParams":
        if (self.gammas is None) != (self.betas is None):
            raise ValueError("gammas and betas must be given together")
        for label, values in (("gammas", self.gammas), ("betas", self.betas)):
            if values is not None and len(values) != self.p:
                raise ValueError(f"{label} must have p={self.p} entries")
        return self


class ExactMaxSatParams(BaseModel):
    max_vars: PositiveInt | None = None
    time_budget_s: PositiveFloat | None = None
    n_restarts: PositiveInt = 8

    model_config = ConfigDict(extra="forbid")


class BruteForceParams(BaseModel):
    max_vars: PositiveInt | None = None

    model_config = ConfigDict(extra="forbid")


class HeuristicParams(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Cell(BaseModel):
    """One point of the experiment plan."""

    index: int
    application: str
    problem_size: int
    instance_seed: int
    app_params: dict[str, Any] = Field(default_factory=dict)
    mapping: str
    mapping_params: dict[str, Any] = Field(default_factory=dict)
    solver: str
    solver_params: dict[str, Any] = Field(default_factory=dict)
    device: DeviceConfig
    repetition: int
    cell_seed: int

    model_config = ConfigDict(frozen=True)

    @property
    def app_config(self) -> str:
        return canonical_params(self.app_params)

    @property
    def mapping_config(self) -> str:
        return canonical_params(self.mapping_params)

    @property
    def solver_config(self) -> str:
        return canonical_params(self.solver_params)

    @property
    def coordinates(self) -> tuple:
        return (
            self.application,
            self.app_config,
            self.problem_size,
            self.instance_seed,
            self.mapping,
            self.mapping_config,
            self.solver,
            self.solver_config,
            self.device.name,
            self.repetition,
        )


class BenchmarkRecord(BaseModel):
    run_id: str
    timestamp: str
    application: str
    app_config: str = "{}"
    problem_size: int
    instance_seed: int
    mapping: str
    mapping_config: str = "{}"
    solver: str
    solver_config: str = "{}"
    device: str
    repetition: int
    cell_seed: int
    n_variables: int | None = None
    t_mapping_ms: NonNegativeFloat = 0.0
    t_solver_ms: NonNegativeFloat = 0.0
    t_reverse_map_ms: NonNegativeFloat = 0.0
    t_process_solution_ms: NonNegativeFloat = 0.0
    t_validation_ms: NonNegativeFloat = 0.0
    t_evaluation_ms: NonNegativeFloat = 0.0
    tts_ms: NonNegativeFloat = 0.0
    validity: bool = False
    quality: float | None = None
    solver_metadata: str = "{}"
    error: str | None = None

    @model_validator(mode="after")
    def validate_quality(self) -> "BenchmarkRecord":
        if not self.validity and self.quality is not None:
            raise ValueError("quality is only reported for valid solutions")
        return self


RECORD_COLUMNS = list(BenchmarkRecord.model_fields)

TIMING_COLUMNS = [
    "t_mapping_ms",
    "t_solver_ms",
    "t_reverse_map_ms",
    "t_process_solution_ms",
    "t_validation_ms",
    "t_evaluation_ms",
]


class RunRequest(BaseModel):
    config: BenchConfig
    out_dir: str | None = None


class RunResponse(BaseModel):
    run_id: str
    n_records: int
    n_valid: int
    out_dir: str


class QubitCountResponse(BaseModel):
    application: str
    n_variables: int
    parameters: dict[str, int]
