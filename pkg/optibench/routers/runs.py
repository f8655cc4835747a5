from typing import Any

from fastapi import APIRouter, Body, HTTPException, Path

from optibench.config import settings
from optibench.exceptions import BenchError
from optibench.schemas import RunRequest, RunResponse
from optibench.services.benchmark import BenchmarkService
from optibench.services.results import RESULTS_FILE, ResultsService
from optibench.validators.config_validator import ConfigValidator

router = APIRouter()

RUN_ID_PATTERN = r"^[A-Za-z0-9_.-]+$"


@router.post("/configs/validate")
async def validate_config(document: dict[str, Any] = Body(...)):
    try:
        cfg = BenchmarkService.parse_document(document)
        plan = BenchmarkService.build_plan(cfg)
        return {"valid": True, "n_cells": len(plan)}
    except (HTTPException, BenchError) as e:
        raise e
    except Exception as e:
        raise HTTPException(
            status_code=500, detail=f"Error validating configuration: {str(e)}"
        )


@router.post("/runs", response_model=RunResponse, status_code=201)
async def create_run(request: RunRequest):
    try:
        ConfigValidator.validate_config(request.config)
        run_id, records, out = await BenchmarkService.run_async(
            request.config, request.out_dir
        )
        return RunResponse(
            run_id=run_id,
            n_records=len(records),
            n_valid=sum(record.validity for record in records),
            out_dir=str(out),
        )
    except (HTTPException, BenchError) as e:
        raise e
    except Exception as e:
        raise HTTPException(
            status_code=500, detail=f"Error running benchmark: {str(e)}"
        )


@router.get("/runs/{run_id}/summary")
async def get_run_summary(run_id: str = Path(..., pattern=RUN_ID_PATTERN)):
    run_dir = settings.RESULTS_DIR / run_id
    if not (run_dir / RESULTS_FILE).is_file():
        raise HTTPException(status_code=404, detail="Run not found")
    try:
        summary = ResultsService.summarize(ResultsService.load_records(run_dir))
        rows = summary.astype(object).where(summary.notna(), None)
        return {"run_id": run_id, "groups": rows.to_dict(orient="records")}
    except (HTTPException, BenchError) as e:
        raise e
    except Exception as e:
        raise HTTPException(
            status_code=500, detail=f"Error summarizing run: {str(e)}"
        )
