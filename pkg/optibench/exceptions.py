class BenchError(Exception):
    """
    Base error of the framework. Carries an HTTP-like status code so the API
    layer can answer with it directly.
    """

    status_code = 500

    def __init__(self, detail: str, status_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if status_code is not None:
            self.status_code = status_code


class DimensionError(BenchError):
    status_code = 422


class CapacityError(BenchError):
    status_code = 413


class ParameterError(BenchError):
    status_code = 422


class FormatError(BenchError):
    status_code = 400


class ShapeError(BenchError):
    status_code = 422


class InfeasibleError(BenchError):
    status_code = 409


class SolverTimeoutError(BenchError):
    status_code = 408


class ConfigError(BenchError):
    status_code = 400

    def __init__(self, detail: str, errors: list[dict] | None = None):
        super().__init__(detail)
        self.errors = errors or []

    @classmethod
    def at(cls, field: str, message: str) -> "ConfigError":
        return cls(f"{field}: {message}", [{"field": field, "message": message}])


class StorageError(BenchError):
    status_code = 500
