"""QUBO/Ising core: evaluation, conversion, brute-force oracle and JSON codec."""

import json
from collections import defaultdict
from collections.abc import Sequence

import numpy as np

from optibench.config import settings
from optibench.exceptions import CapacityError, DimensionError, FormatError
from optibench.models import Assignment, IsingInstance, QuboInstance, Sense

_BLOCK_BITS = 16


class QuboBuilder:
    """
    Accumulates polynomial terms of degree <= 2. Diagonal products fold into
    linear terms (x * x == x); pairs are normalised to i < j.
    """

    def __init__(self):
        self.constant = 0.0
        self.linear: dict[int, float] = defaultdict(float)
        self.quadratic: dict[tuple[int, int], float] = defaultdict(float)

    def add_constant(self, c: float) -> "QuboBuilder":
        self.constant += c
        return self

    def add_linear(self, i: int, c: float) -> "QuboBuilder":
        if c:
            self.linear[i] += c
        return self

    def add_quadratic(self, i: int, j: int, c: float) -> "QuboBuilder":
        if not c:
            return self
        if i == j:
            return self.add_linear(i, c)
        key = (i, j) if i < j else (j, i)
        self.quadratic[key] += c
        return self

    def add_squared_one_hot(
        self, variables: Sequence[int], weight: float
    ) -> "QuboBuilder":
        """
        Adds ``weight * (sum(x_v) - 1) ** 2`` expanded with x**2 == x.
        """
        self.add_constant(weight)
        for a, i in enumerate(variables):
            self.add_linear(i, -weight)
            for j in variables[a + 1 :]:
                self.add_quadratic(i, j, 2.0 * weight)
        return self

    def add_builder(self, other: "QuboBuilder", factor: float = 1.0) -> "QuboBuilder":
        self.add_constant(factor * other.constant)
        for i, c in other.linear.items():
            self.add_linear(i, factor * c)
        for (i, j), c in other.quadratic.items():
            self.add_quadratic(i, j, factor * c)
        return self

    def variables(self) -> set[int]:
        found = set(self.linear)
        for i, j in self.quadratic:
            found.update((i, j))
        return found

    def build(self, n_vars: int, sense: Sense = Sense.MINIMIZE) -> QuboInstance:
        return QuboInstance(
            n_vars=n_vars,
            linear={i: c for i, c in self.linear.items() if c != 0.0},
            quadratic={k: c for k, c in self.quadratic.items() if c != 0.0},
            offset=self.constant,
            sense=sense,
        )


def _check_length(q: QuboInstance, n: int) -> None:
    if n != q.n_vars:
        raise DimensionError(f"assignment has length {n}, instance has {q.n_vars}")


def evaluate(q: QuboInstance, a: Sequence[int]) -> float:
    """
    Objective value of one assignment.

    :param q: QUBO instance
    :param a: Bit vector of length ``q.n_vars``
    :return: offset + linear part + pairwise part
    """
    _check_length(q, len(a))
    value = q.offset
    for i, c in q.linear.items():
        if a[i]:
            value += c
    for (i, j), c in q.quadratic.items():
        if a[i] and a[j]:
            value += c
    return float(value)


def evaluate_many(q: QuboInstance, bits: np.ndarray) -> np.ndarray:
    """
    Vectorized objective over the rows of a 0/1 matrix.
    """
    bits = np.atleast_2d(np.asarray(bits, dtype=float))
    _check_length(q, bits.shape[1])
    lin, upper = q.to_arrays()
    return q.offset + bits @ lin + np.einsum("ri,ij,rj->r", bits, upper, bits)


def bits_of(index: int, n: int) -> Assignment:
    """Bit vector of a basis index; bit 0 is the most significant."""
    return tuple((index >> (n - 1 - i)) & 1 for i in range(n))


def index_of(bits: Sequence[int]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def bit_matrix(n: int, start: int = 0, count: int | None = None) -> np.ndarray:
    """
    Rows are the bit vectors of consecutive basis indices, lexicographic order.
    """
    count = (1 << n) - start if count is None else count
    idx = np.arange(start, start + count, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def qubo_to_ising(q: QuboInstance) -> IsingInstance:
    """
    Substitutes x = (1 - s) / 2, so x = 0 maps to s = +1 and x = 1 to s = -1.
    Energies agree exactly for every assignment and its spin image.
    """
    h: dict[int, float] = defaultdict(float)
    J: dict[tuple[int, int], float] = {}
    offset = q.offset
    for i, c in q.linear.items():
        offset += c / 2.0
        h[i] -= c / 2.0
    for (i, j), c in q.quadratic.items():
        offset += c / 4.0
        h[i] -= c / 4.0
        h[j] -= c / 4.0
        J[(i, j)] = c / 4.0
    return IsingInstance(
        n_spins=q.n_vars,
        h={i: c for i, c in h.items() if c != 0.0},
        J={k: c for k, c in J.items() if c != 0.0},
        offset=offset,
    )


def ising_energy(ising: IsingInstance, spins: Sequence[int]) -> float:
    if len(spins) != ising.n_spins:
        raise DimensionError(
            f"spin vector has length {len(spins)}, instance has {ising.n_spins}"
        )
    energy = ising.offset
    for i, c in ising.h.items():
        energy += c * spins[i]
    for (i, j), c in ising.J.items():
        energy += c * spins[i] * spins[j]
    return float(energy)


def spins_of(bits: Sequence[int]) -> tuple[int, ...]:
    return tuple(1 - 2 * int(b) for b in bits)


def brute_force_optimum(
    q: QuboInstance, max_vars: int | None = None
) -> tuple[Assignment, float]:
    """
    Exhaustive optimum with respect to ``q.sense``. Among equal values the
    lexicographically smallest bitstring wins.

    :param q: QUBO instance
    :param max_vars: Capacity cap, defaults to ``settings.BRUTE_FORCE_MAX_VARS``
    :return: (optimal assignment, optimal value)
    """
    cap = settings.BRUTE_FORCE_MAX_VARS if max_vars is None else max_vars
    n = q.n_vars
    if n > cap:
        raise CapacityError(f"brute force limited to {cap} variables, got {n}")
    if n == 0:
        return (), q.offset

    sign = 1.0 if q.sense is Sense.MINIMIZE else -1.0
    lin, upper = q.to_arrays()
    sym = upper + upper.T

    low = min(n, _BLOCK_BITS)
    low_bits = bit_matrix(low).astype(float)
    # energy of the low block, independent of the prefix
    low_energy = low_bits @ lin[n - low :] + np.einsum(
        "ri,ij,rj->r", low_bits, upper[n - low :, n - low :], low_bits
    )

    best_value = np.inf
    best_index = 0
    n_high = n - low
    for prefix in range(1 << n_high):
        high = np.array(bits_of(prefix, n_high), dtype=float)
        high_energy = high @ lin[:n_high] + high @ upper[:n_high, :n_high] @ high
        cross = high @ sym[:n_high, n_high:]
        values = sign * (high_energy + low_energy + low_bits @ cross)
        k = int(np.argmin(values))
        if values[k] < best_value:
            best_value = values[k]
            best_index = (prefix << low) | k

    best = bits_of(best_index, n)
    return best, evaluate(q, best)


def to_json(q: QuboInstance) -> str:
    return json.dumps(
        {
            "n_vars": q.n_vars,
            "sense": q.sense.value,
            "offset": q.offset,
            "linear": [[i, c] for i, c in sorted(q.linear.items())],
            "quadratic": [[i, j, c] for (i, j), c in sorted(q.quadratic.items())],
        }
    )


def from_json(text: str) -> QuboInstance:
    try:
        doc = json.loads(text)
        return QuboInstance(
            n_vars=int(doc["n_vars"]),
            sense=Sense(doc.get("sense", "minimize")),
            offset=float(doc.get("offset", 0.0)),
            linear={int(i): float(c) for i, c in doc.get("linear", [])},
            quadratic={
                (int(i), int(j)): float(c) for i, j, c in doc.get("quadratic", [])
            },
        )
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed QUBO document: {e}") from e
