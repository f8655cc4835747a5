from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from typing import Any, ClassVar

from pydantic import BaseModel, ValidationError

from optibench.exceptions import ParameterError
from optibench.models import Assignment, SolverOutcome
from optibench.schemas import DeviceConfig


@dataclass
class SolveContext:
    """
    Application hooks a solver may use to score raw bitstrings itself,
    e.g. the sampled validity/quality metrics of QAOA.
    """

    decode_cost: Callable[[Assignment], float | None] | None = None
    feasible_encodings: Callable[[], Iterable[Assignment] | None] | None = None


class SolverBase(ABC):
    """
    ``input_kind`` is "qubo" for solvers consuming a QuboInstance, "instance"
    for solvers working on the application instance through a direct mapping.
    """

    name: ClassVar[str]
    input_kind: ClassVar[str] = "qubo"
    applications: ClassVar[tuple[str, ...] | None] = None
    params_model: ClassVar[type[BaseModel]]

    def parse_params(self, params: dict[str, Any] | None) -> BaseModel:
        try:
            return self.params_model(**(params or {}))
        except ValidationError as e:
            raise ParameterError(f"invalid {self.name} parameters: {e}") from e

    def supports(self, application: str, produces_qubo: bool) -> bool:
        if self.input_kind == "qubo":
            return produces_qubo
        if produces_qubo:
            return False
        return self.applications is None or application in self.applications

    @abstractmethod
    def solve(
        self,
        problem: Any,
        params: BaseModel,
        seed: int,
        device: DeviceConfig,
        context: SolveContext | None = None,
    ) -> SolverOutcome: ...
