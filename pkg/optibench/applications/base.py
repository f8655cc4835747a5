from abc import ABC, abstractmethod
from typing import Any, ClassVar, Generic, TypeVar

from pydantic import BaseModel, ValidationError

from optibench.exceptions import ParameterError

InstanceType = TypeVar("InstanceType")
SolutionType = TypeVar("SolutionType")


class ApplicationBase(ABC, Generic[InstanceType, SolutionType]):
    """
    Problem side of a benchmark cell: builds instances, post-processes raw
    solutions, checks them and computes the application metric.
    """

    name: ClassVar[str]
    lower_is_better: ClassVar[bool] = True
    params_model: ClassVar[type[BaseModel]]

    def parse_params(self, params: dict[str, Any] | None) -> BaseModel:
        try:
            return self.params_model(**(params or {}))
        except ValidationError as e:
            raise ParameterError(f"invalid {self.name} parameters: {e}") from e

    @abstractmethod
    def generate(self, size: int, seed: int, params: BaseModel) -> InstanceType: ...

    @abstractmethod
    def process_solution(
        self, instance: InstanceType, raw: Any
    ) -> SolutionType | None: ...

    @abstractmethod
    def validate(self, instance: InstanceType, solution: SolutionType | None) -> bool:
        """False for a missing solution."""

    @abstractmethod
    def evaluate(self, instance: InstanceType, solution: SolutionType) -> float: ...
