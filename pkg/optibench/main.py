import json

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import ValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException

from optibench import __version__
from optibench.exceptions import BenchError, ConfigError
from optibench.routers.oracle import router as oracle_router
from optibench.routers.runs import router as runs_router
from optibench.utils import get_logger

logger = get_logger(__name__)

app = FastAPI(title="optibench", version=__version__)


@app.exception_handler(StarletteHTTPException)
async def http_exception_handler(request, exc):
    return JSONResponse(
        status_code=exc.status_code,
        content={"detail": exc.detail},
    )


@app.exception_handler(BenchError)
async def bench_exception_handler(request: Request, exc: BenchError):
    content = {"detail": exc.detail}
    if isinstance(exc, ConfigError):
        content["errors"] = exc.errors
    return JSONResponse(status_code=exc.status_code, content=content)


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    # malformed JSON bodies get the offending line instead of a field list
    if hasattr(exc, "body") and isinstance(exc.body, str):
        try:
            json.loads(exc.body)
        except json.JSONDecodeError as json_exc:
            error_line = json_exc.lineno
            lines = exc.body.split("\n")
            error_line_content = lines[error_line - 1]
            return JSONResponse(
                status_code=400,
                content={
                    "detail": [
                        {
                            "field": "body",
                            "message": f"JSON format error on line {error_line}:"
                            f" {error_line_content}",
                        }
                    ]
                },
            )

    formatted_errors = [
        {"field": ".".join(str(x) for x in error["loc"]), "message": error["msg"]}
        for error in exc.errors()
    ]
    return JSONResponse(status_code=400, content={"detail": formatted_errors})


@app.exception_handler(ValidationError)
async def pydantic_validation_exception_handler(request: Request, exc: ValidationError):
    return JSONResponse(
        status_code=400,
        content={"detail": json.loads(exc.json())},
    )


@app.exception_handler(Exception)
async def generic_exception_handler(request, exc):
    logger.error("Unhandled error on %s: %s", request.url.path, exc)
    return JSONResponse(
        status_code=500,
        content={
            "detail": "An unexpected error occurred. Please try again later.",
            "error": str(exc),
        },
    )


app.include_router(runs_router, prefix="/api/v1", tags=["runs"])
app.include_router(oracle_router, prefix="/api/v1", tags=["oracle"])
