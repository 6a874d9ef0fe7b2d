from datetime import datetime

import pytest


def test_root_endpoint(client):
    response = client.get("/")
    assert response.status_code == 200
    data = response.json()
    assert data["message"] == "Dependence-Corrected Multiple Testing API"
    assert data["docs"] == "/docs"
    # Validate timestamp is ISO format
    datetime.fromisoformat(data["timestamp"])  # should not raise


def test_health_endpoint(client):
    response = client.get("/health")
    assert response.status_code == 200
    data = response.json()
    assert data["status"] == "healthy"
    assert "bh-k" in data["procedures"]
    assert 0 < data["defaults"]["alpha"] < 1
    datetime.fromisoformat(data["timestamp"])  # should not raise


def test_startup_warms_the_harmonic_cache():
    from fastapi.testclient import TestClient
    from app.main import HARMONIC_WARM_START, app
    from app.services import correction_service

    with TestClient(app) as client:
        assert client.get("/health").status_code == 200
    assert len(correction_service._harmonic_prefix) >= HARMONIC_WARM_START


def test_analysis_endpoint(client):
    response = client.post("/api/v1/analysis", json={"pvalues": [0.001, 0.01, 0.04, 0.9], "procedure": "bh"})
    assert response.status_code == 200
    data = response.json()
    assert data["R"] == 2
    assert data["rejected"] == [1, 2]
    assert data["mode"] == "step-up"
    assert data["bounds"][0]["source"] == "bh-bi"


def test_analysis_step_down(client):
    response = client.post(
        "/api/v1/analysis",
        json={"pvalues": [0.001, 0.01, 0.04, 0.9], "procedure": "bh", "mode": "sd"},
    )
    assert response.status_code == 200
    assert response.json()["mode"] == "step-down"


def test_analysis_rejects_out_of_range_pvalues(client):
    response = client.post("/api/v1/analysis", json={"pvalues": [0.1, 1.5]})
    assert response.status_code == 400


def test_analysis_rejects_bad_truncation(client):
    response = client.post("/api/v1/analysis", json={"pvalues": [0.1, 0.2], "procedure": "bh-k", "k": 5})
    assert response.status_code == 400


def test_analysis_unknown_procedure(client):
    response = client.post("/api/v1/analysis", json={"pvalues": [0.1], "procedure": "holm"})
    assert response.status_code == 422


def test_sweep_endpoint(client):
    pvalues = [1e-6] * 3 + [(i - 0.5) / 97 for i in range(1, 98)]
    response = client.post("/api/v1/sweep", json={"pvalues": pvalues, "k_max": 10})
    assert response.status_code == 200
    data = response.json()
    assert [row["k"] for row in data["rows"]] == list(range(1, 11))
    assert data["R_BY"] == 3


def test_sweep_endpoint_range_error(client):
    response = client.post("/api/v1/sweep", json={"pvalues": [0.1, 0.2], "k_min": 3})
    assert response.status_code == 400


def test_bounds_endpoint(client):
    response = client.post("/api/v1/bounds", json={"procedure": "w4", "m": 10})
    assert response.status_code == 200
    data = response.json()
    assert data["m0"] == 10
    w4 = data["bounds"][0]
    assert w4["source"] == "w4-bi"
    assert w4["applicable"] is False


def test_bounds_endpoint_counts(client):
    response = client.post("/api/v1/bounds", json={"procedure": "bh", "m": 10, "m0": 11})
    assert response.status_code == 400


def test_simulation_endpoint_single_replication(client):
    response = client.post(
        "/api/v1/simulation",
        json={
            "scenario": {"model": "BI", "m": 10, "m0": 8, "replications": 1, "seed": 1},
            "procedures": [{"procedure": "bh"}],
        },
    )
    assert response.status_code == 200
    row = response.json()["rows"][0]
    assert row["fdr_se"] is None
    assert row["level_verdict"] == "insufficient"


def test_simulation_endpoint_extreme_dependence(client):
    response = client.post(
        "/api/v1/simulation",
        json={
            "scenario": {"model": "extreme_dependence", "m": 100, "m0": 90, "replications": 2000, "seed": 7},
            "procedures": [{"procedure": "adaptive-bh", "lam": 0.5, "clamp": "natural"}],
        },
    )
    assert response.status_code == 200
    row = response.json()["rows"][0]
    assert row["fdr_hat"] == pytest.approx(0.45, abs=0.06)
    assert row["level_verdict"] == "FAIL"
    assert row["bound_source"] == "extreme-storey"
    assert row["bound_verdict"] == "PASS"


def test_bounds_endpoint_by_identifier(client):
    response = client.post("/api/v1/bounds", json={"procedure": "sp-k", "m": 100, "m0": 80, "k": 5,
                                                   "bound": ["sp-dependence"]})
    assert response.status_code == 200
    bounds = response.json()["bounds"]
    assert [b["source"] for b in bounds] == ["sp-dependence"]
    assert bounds[0]["value"] == pytest.approx(0.04)


def test_bounds_endpoint_unknown_identifier(client):
    response = client.post("/api/v1/bounds", json={"procedure": "bh", "m": 10, "bound": ["holm-bi"]})
    assert response.status_code == 400


def test_simulation_scenario_lambda_feeds_adaptive_procedures(client):
    response = client.post(
        "/api/v1/simulation",
        json={
            "scenario": {"model": "extreme_dependence", "m": 100, "m0": 90, "lam": 0.2, "replications": 10, "seed": 1},
            "procedures": [{"procedure": "adaptive-bh", "clamp": "natural"}],
        },
    )
    assert response.status_code == 200
    row = response.json()["rows"][0]
    assert row["bound_source"] == "extreme-storey"
    assert row["bound_value"] == pytest.approx(0.9 * 0.2)
