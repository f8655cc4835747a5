import itertools
import math

from optibench.applications import maxsat as maxsat_app
from optibench.applications import pvc as pvc_app
from optibench.applications import tsp as tsp_app
from optibench.exceptions import ParameterError
from optibench.mappings import maxsat as maxsat_map
from optibench.mappings import pvc as pvc_map
from optibench.mappings import tsp as tsp_map
from optibench.models import Clause, Literal, TspTour
from optibench.qubo import brute_force_optimum, evaluate
from optibench.schemas import QubitCountResponse
from optibench.solvers.exact_maxsat import exact_maxsat
from optibench.utils import get_logger

logger = get_logger(__name__)

QUBIT_PARAMETERS = {
    "pvc": ("n_seams", "n_configs", "n_tools"),
    "tsp": ("n_nodes",),
    "maxsat": ("n_f",),
}


class OracleService:
    """Brute-force cross-checks and resource estimates, cheap enough for CI."""

    @staticmethod
    def qubit_count(application: str, **dims: int) -> QubitCountResponse:
        """
        Variables of the QUBO encoding, computed without building it.

        :param application: pvc, tsp or maxsat
        :param dims: pvc: n_seams, n_configs, n_tools; tsp: n_nodes; maxsat: n_f
            and optionally n_h, n_s (the instance recipe counts otherwise)
        """
        if application not in QUBIT_PARAMETERS:
            raise ParameterError(
                f"unknown application '{application}', "
                f"expected one of {sorted(QUBIT_PARAMETERS)}"
            )
        missing = [k for k in QUBIT_PARAMETERS[application] if dims.get(k) is None]
        if missing:
            raise ParameterError(f"{application} qubit count needs {missing}")
        if any(v is not None and v < 0 for v in dims.values()):
            raise ParameterError("dimensions must be non-negative")

        if application == "pvc":
            n = pvc_map.pvc_qubit_count(
                dims["n_seams"], dims["n_configs"], dims["n_tools"]
            )
        elif application == "tsp":
            n = tsp_map.tsp_qubit_count(dims["n_nodes"])
        else:
            n_h, n_s = maxsat_app.recipe_counts(dims["n_f"])
            if dims.get("n_h") is not None:
                n_h = dims["n_h"]
            if dims.get("n_s") is not None:
                n_s = dims["n_s"]
            dims = {"n_f": dims["n_f"], "n_h": n_h, "n_s": n_s}
            n = maxsat_map.dinneen_variable_count(dims["n_f"], n_h, n_s)
        keys = dims if application == "maxsat" else QUBIT_PARAMETERS[application]
        parameters = {k: int(dims[k]) for k in keys}
        return QubitCountResponse(
            application=application, n_variables=n, parameters=parameters
        )

    @staticmethod
    def tour_equivalence(application: str, size: int, seed: int) -> dict:
        """
        Decodes the brute-force QUBO optimum and compares its cost with the
        best tour found by exhaustive enumeration.

        :param application: pvc (size = seams) or tsp (size = nodes)
        """
        if application == "pvc":
            inst = pvc_app.generate_instance(size, 1, 1, seed)
            q, idx = pvc_map.map_to_qubo(inst)
            bits, energy = brute_force_optimum(q)
            tour = pvc_map.decode(bits, idx)
            qubo_cost = None
            if tour is not None and pvc_app.validate_tour(inst, tour):
                qubo_cost = pvc_app.evaluate_tour(inst, tour)
            costs = [
                pvc_app.evaluate_tour(inst, t) for t in pvc_map.feasible_tours(inst)
            ]
        elif application == "tsp":
            inst = tsp_app.random_instance(size, seed)
            q, idx = tsp_map.map_to_qubo(inst)
            bits, energy = brute_force_optimum(q)
            tour = tsp_map.decode(bits, idx)
            qubo_cost = tsp_app.evaluate_tour(inst, tour) if tour is not None else None
            costs = [
                tsp_app.evaluate_tour(inst, TspTour((0, *rest)))
                for rest in itertools.permutations(range(1, size))
            ]
        else:
            raise ParameterError(
                f"tour equivalence applies to pvc and tsp, not '{application}'"
            )
        exhaustive_cost = min(costs, default=None)
        if qubo_cost is None or exhaustive_cost is None:
            match = qubo_cost == exhaustive_cost
        else:
            match = math.isclose(qubo_cost, exhaustive_cost, abs_tol=1e-9)
        if not match:
            logger.warning(
                "%s size=%s seed=%s: QUBO optimum %s, exhaustive %s",
                application,
                size,
                seed,
                qubo_cost,
                exhaustive_cost,
            )
        return {
            "application": application,
            "size": size,
            "seed": seed,
            "n_variables": q.n_vars,
            "qubo_energy": energy,
            "qubo_cost": qubo_cost,
            "exhaustive_cost": exhaustive_cost,
            "match": match,
        }

    @staticmethod
    def maxsat_dominance(n_f: int, seed: int, lagrange: float | None = None) -> dict:
        """
        With the default lagrange the QUBO argmax never trades a hard clause
        for soft ones: on a satisfiable instance it satisfies every hard clause
        and reaches the exact soft optimum.
        """
        inst = maxsat_app.generate_random(n_f, seed)
        q, idx = maxsat_map.map_to_qubo_dinneen(inst, lagrange)
        bits, _ = maxsat_map.dinneen_optimum(q, inst, idx)
        v = maxsat_map.reverse_map_dinneen(bits, idx)
        exact = exact_maxsat(inst, seed=seed)
        hard_violations = sum(not c.is_satisfied(v) for c in inst.hard)
        qubo_weight = maxsat_app.satisfied_soft_weight(inst, v)
        satisfiable = exact is not None
        match = not satisfiable or (
            hard_violations == 0 and qubo_weight == exact[1]
        )
        return {
            "n_f": n_f,
            "seed": seed,
            "satisfiable": satisfiable,
            "hard_violations": hard_violations,
            "qubo_soft_weight": qubo_weight,
            "exact_soft_weight": exact[1] if satisfiable else None,
            "match": match,
        }

    @staticmethod
    def gadget_check() -> dict:
        """
        Every polarity pattern and assignment of a 3-literal clause: the best
        ancilla value makes the gadget equal the clause truth value.
        """
        failures = []
        for polarity in itertools.product((False, True), repeat=3):
            clause = Clause(tuple(Literal(i, neg) for i, neg in enumerate(polarity)))
            q = maxsat_map.clause_qubo_terms(clause, 3).build(4)
            for x in itertools.product((0, 1), repeat=3):
                best = max(evaluate(q, (*x, z)) for z in (0, 1))
                if best != int(clause.is_satisfied(x)):
                    failures.append({"polarity": polarity, "assignment": x})
        return {"cases": 64, "failures": failures, "match": not failures}
