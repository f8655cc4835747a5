from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

BASE_DIR = Path(__file__).resolve().parent.parent


class Settings(BaseSettings):
    LOG_LEVEL: str = "WARNING"
    RESULTS_DIR: Path = BASE_DIR / "results"

    # capacity caps; above these the oracle/simulators refuse to run
    BRUTE_FORCE_MAX_VARS: int = 26
    QAOA_MAX_QUBITS: int = 25
    EXACT_MAXSAT_MAX_VARS: int = 40
    EXACT_MAXSAT_TIME_BUDGET_S: float = 60.0

    # floats of pre-drawn randomness held at once by simulated annealing
    SA_MEMORY_BUDGET_FLOATS: int = 4_000_000

    model_config = SettingsConfigDict(
        env_file=BASE_DIR / ".env",
        env_prefix="OPTIBENCH_",
        extra="ignore",  # ignore undeclared variables
    )


settings = Settings()
