from fastapi import APIRouter, HTTPException, Query

from optibench.exceptions import BenchError
from optibench.schemas import QubitCountResponse
from optibench.services.oracle import OracleService

router = APIRouter()


@router.get("/oracle/qubits/{application}", response_model=QubitCountResponse)
async def get_qubit_count(
    application: str,
    n_seams: int | None = Query(None, ge=0),
    n_configs: int | None = Query(None, ge=1),
    n_tools: int | None = Query(None, ge=1),
    n_nodes: int | None = Query(None, ge=0),
    n_f: int | None = Query(None, ge=0),
    n_h: int | None = Query(None, ge=0),
    n_s: int | None = Query(None, ge=0),
):
    dims = {
        "n_seams": n_seams,
        "n_configs": n_configs,
        "n_tools": n_tools,
        "n_nodes": n_nodes,
        "n_f": n_f,
        "n_h": n_h,
        "n_s": n_s,
    }
    try:
        return OracleService.qubit_count(
            application, **{k: v for k, v in dims.items() if v is not None}
        )
    except BenchError as e:
        raise HTTPException(status_code=e.status_code, detail=e.detail)
