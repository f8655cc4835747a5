from optibench.exceptions import ParameterError
from optibench.mappings.base import DirectMapping, MappingBase
from optibench.mappings.maxsat import ChoiMapping, DinneenMapping
from optibench.mappings.pvc import PvcQuboMapping
from optibench.mappings.tsp import TspQuboMapping

MAPPINGS: dict[str, dict[str, MappingBase]] = {
    "pvc": {"qubo": PvcQuboMapping(), "direct": DirectMapping()},
    "tsp": {"qubo": TspQuboMapping(), "direct": DirectMapping()},
    "maxsat": {
        "dinneen": DinneenMapping(),
        "choi": ChoiMapping(),
        "direct": DirectMapping(),
    },
}


def get_mapping(application: str, name: str) -> MappingBase:
    options = MAPPINGS.get(application, {})
    if name not in options:
        raise ParameterError(
            f"unknown mapping '{name}' for {application}, "
            f"expected one of {sorted(options)}"
        )
    return options[name]


__all__ = ["MAPPINGS", "MappingBase", "get_mapping"]
