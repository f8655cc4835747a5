from abc import ABC, abstractmethod
from collections.abc import Iterator, Sequence
from typing import Any, Generic, TypeVar

from optibench.exceptions import ParameterError
from optibench.models import Assignment, QuboInstance

InstanceType = TypeVar("InstanceType")
IndexType = TypeVar("IndexType")


class MappingBase(ABC, Generic[InstanceType, IndexType]):
    """
    Turns an application instance into a QUBO and bitstrings back into
    application-level raw solutions.
    """

    name: str = "qubo"
    produces_qubo: bool = True

    @abstractmethod
    def map(
        self, instance: InstanceType, **params: Any
    ) -> tuple[QuboInstance, IndexType]: ...

    @abstractmethod
    def reverse_map(self, bits: Sequence[int], index: IndexType) -> Any:
        """Raw application solution, or None when the bits do not encode one."""

    def feasible_encodings(self, index: IndexType) -> Iterator[Assignment] | None:
        """
        Every bitstring that decodes to a valid solution, when the mapping can
        enumerate them cheaply. None means "scan the whole space".
        """
        return None

    @staticmethod
    def positive(name: str, value: float) -> float:
        if not value > 0:
            raise ParameterError(f"{name} must be > 0, got {value}")
        return float(value)


class DirectMapping(MappingBase[Any, None]):
    """
    Pass-through used by solvers that work on the application instance itself.
    """

    name = "direct"
    produces_qubo = False

    def map(self, instance: Any, **params: Any) -> tuple[Any, None]:
        return instance, None

    def reverse_map(self, solution: Any, index: None) -> Any:
        return solution
