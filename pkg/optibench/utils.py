import hashlib
import json
import logging
import time
from contextlib import contextmanager
from datetime import datetime, timezone

import numpy as np

from optibench.config import settings

LOGGER_NAME = "optibench"

BIT_GENERATORS = {
    "PCG64": np.random.PCG64,
    "Philox": np.random.Philox,
    "SFC64": np.random.SFC64,
}


def get_logger(name: str = LOGGER_NAME) -> logging.Logger:
    """
    Returns the package logger, attaching the console handler only once.

    :param name: Logger name, children of ``optibench`` share its handler
    :return: Configured logger
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(settings.LOG_LEVEL.upper())
    if not logger.hasHandlers():
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        )
        logger.addHandler(console_handler)
    return logging.getLogger(name)


def canonical_params(params: dict) -> str:
    """Sorted-key JSON of a parameter block, its identity in plans and results."""
    return json.dumps(params, sort_keys=True, separators=(",", ":"), default=str)


def derive_seed(*parts) -> int:
    """
    Derives a 63-bit seed from arbitrary coordinates. Stable across processes
    and Python versions (no reliance on ``hash()``).

    :param parts: Values identifying the seed consumer, e.g. (run_seed, cell coords)
    :return: Non-negative integer seed
    """
    text = "|".join(repr(p) for p in parts)
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def make_rng(
    seed: int | np.random.SeedSequence, bit_generator: str = "PCG64"
) -> np.random.Generator:
    """
    Builds a numpy Generator on the requested bit generator.
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(BIT_GENERATORS[bit_generator](seed))


class StageTimer:
    """
    Collects monotonic wall-clock durations, in milliseconds, per named stage.
    """

    def __init__(self):
        self.durations_ms: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter_ns()
        try:
            yield
        finally:
            elapsed = (time.perf_counter_ns() - start) / 1e6
            self.durations_ms[name] = self.durations_ms.get(name, 0.0) + elapsed

    def get(self, name: str) -> float:
        return self.durations_ms.get(name, 0.0)


def current_timestamp() -> str:
    """
    Returns the current timestamp in ISO 8601 format.

    :return: String with the current timestamp
    """
    return datetime.now(timezone.utc).isoformat()
