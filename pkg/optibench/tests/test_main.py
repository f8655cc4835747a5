import pytest
from fastapi import HTTPException
from fastapi.testclient import TestClient

from optibench.config import settings
from optibench.exceptions import CapacityError, ConfigError
from optibench.main import app

client = TestClient(app, raise_server_exceptions=False)

CONFIG = {
    "repetitions": 2,
    "applications": [
        {
            "name": "tsp",
            "sizes": [4],
            "mappings": [
                {"name": "direct", "solvers": [{"name": "greedy"}, {"name": "random"}]}
            ],
        }
    ],
}


@pytest.fixture
def results_dir(tmp_path, mocker):
    mocker.patch.object(settings, "RESULTS_DIR", tmp_path)
    return tmp_path


def test_http_exception_handler():
    @app.get("/http_exception")
    async def http_exception_route():
        raise HTTPException(status_code=404, detail="Not found")

    response = client.get("/http_exception")
    assert response.status_code == 404
    assert response.json() == {"detail": "Not found"}


def test_bench_error_handler_uses_error_status():
    @app.get("/capacity_error")
    async def capacity_error_route():
        raise CapacityError("too many qubits")

    response = client.get("/capacity_error")
    assert response.status_code == 413
    assert response.json() == {"detail": "too many qubits"}


def test_config_error_handler_lists_fields():
    @app.get("/config_error")
    async def config_error_route():
        raise ConfigError.at("repetitions", "must be positive")

    response = client.get("/config_error")
    assert response.status_code == 400
    assert response.json()["errors"] == [
        {"field": "repetitions", "message": "must be positive"}
    ]


def test_generic_exception_handler():
    @app.get("/generic_exception")
    async def generic_exception_route():
        raise RuntimeError("Generic error")

    response = client.get("/generic_exception")
    assert response.status_code == 500
    assert response.json() == {
        "detail": "An unexpected error occurred. Please try again later.",
        "error": "Generic error",
    }


def test_malformed_json_body_reports_line():
    response = client.post(
        "/api/v1/configs/validate",
        content='{\n"applications": [\n}',
        headers={"Content-Type": "application/json"},
    )
    assert response.status_code == 400
    assert "line" in response.json()["detail"][0]["message"]


def test_validate_config_counts_cells():
    response = client.post("/api/v1/configs/validate", json=CONFIG)
    assert response.status_code == 200
    assert response.json() == {"valid": True, "n_cells": 4}


def test_validate_config_reports_unknown_solver():
    bad = {
        "applications": [
            {
                "name": "tsp",
                "sizes": [4],
                "mappings": [{"name": "direct", "solvers": [{"name": "nope"}]}],
            }
        ]
    }
    response = client.post("/api/v1/configs/validate", json=bad)
    assert response.status_code == 400
    assert response.json()["errors"][0]["field"] == (
        "applications.0.mappings.0.solvers.0.name"
    )


def test_create_run_and_read_summary(results_dir):
    # Act
    response = client.post("/api/v1/runs", json={"config": CONFIG})

    # Assert
    assert response.status_code == 201
    body = response.json()
    assert body["n_records"] == 4
    assert body["n_valid"] == 4

    summary = client.get(f"/api/v1/runs/{body['run_id']}/summary")
    assert summary.status_code == 200
    groups = summary.json()["groups"]
    assert [g["solver"] for g in groups] == ["greedy", "random"]
    assert all(g["valid_ratio"] == 1.0 for g in groups)


def test_create_run_rejects_invalid_config():
    config = dict(CONFIG, repetitions=0)
    response = client.post("/api/v1/runs", json={"config": config})
    assert response.status_code == 400


def test_summary_of_unknown_run(results_dir):
    response = client.get("/api/v1/runs/missing-run/summary")
    assert response.status_code == 404
    assert response.json() == {"detail": "Run not found"}


def test_summary_rejects_unsafe_run_id(results_dir):
    response = client.get("/api/v1/runs/bad$id/summary")
    assert response.status_code == 400


def test_qubit_count_endpoint():
    response = client.get("/api/v1/oracle/qubits/pvc?n_seams=2&n_configs=2&n_tools=2")
    assert response.status_code == 200
    assert response.json()["n_variables"] == 60


def test_qubit_count_endpoint_missing_dimension():
    response = client.get("/api/v1/oracle/qubits/tsp")
    assert response.status_code == 422
