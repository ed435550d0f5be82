import warnings
from fractions import Fraction

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from coranklab.service.app import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def test_health_and_version(client):
    assert client.get("/health").json() == {"status": "ok"}
    body = client.get("/version").json()
    assert body["tool_version"] and body["generator_version"]


def test_rank_endpoint(client):
    text = "3 3\n110\n011\n101\n"
    body = client.post("/rank", json={"matrix": text}).json()
    assert body["rank"] == 3 and body["corank"] == 0
    body = client.post(
        "/rank", json={"matrix": text, "method": "modular", "prime": 2}
    ).json()
    assert body["rank"] == 2 and body["prime"] == 2
    resp = client.post("/rank", json={"matrix": text, "method": "modular", "prime": 10})
    assert resp.status_code == 400
    assert resp.json()["error"] == "invalid-input"


def test_levy_and_threshold_endpoints(client):
    body = client.post("/levy", json={"weights": [1, 1], "p": "1/2", "r": 0.5}).json()
    assert body["value"] == "3/4" and body["method"] == "sliding-window"
    body = client.post("/threshold", json={"weights": [1], "p": "1/2", "L": 4}).json()
    assert body["value"] == 0.125
    resp = client.post("/levy", json={"weights": [1], "p": "3/4", "r": 0.5})
    assert resp.status_code == 400  # p out of (0, 1/2]


def test_levy_bracket_and_lkr_endpoints(client):
    body = client.post(
        "/levy-bracket", json={"rows": [[1.0, 0.0, 0.0, 0.0]], "p": "1/2", "r": 0.01}
    ).json()
    assert body["lower"] == "1/2" and body["upper"] == "1/2"
    body = client.post(
        "/lkr",
        json={"weights": [1, 1, 1, 1], "p": "1/2", "r_i": [0.4] * 4, "r": 0.4, "C": 2.0},
    ).json()
    assert body["lhs"] == "3/8" and body["ok"] is True


def test_theta_endpoint(client):
    body = client.post(
        "/theta",
        json={"rows": [[1.0, 0.0, 0.0, 0.0]], "p": "1/2", "C": 2.0, "verify": True},
    ).json()
    assert body["case"] == "II"
    assert body["caseII_subset"] == [0]
    assert body["verification"]["ok"] is True
    resp = client.post("/theta", json={"rows": [[1.0, 1.0]], "p": "1/2"})
    assert resp.status_code == 400


def test_rinv_and_classify_endpoints(client):
    body = client.post(
        "/rinv", json={"rows": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]}
    ).json()
    assert body["subset"] == [0, 1] and body["hs_inv_sq"] == 2.0
    body = client.post(
        "/classify", json={"vector": [1.0, 0.0, 0.0], "delta": 0.4, "rho": 0.2}
    ).json()
    assert body["label"] == "comp" and body["distance"] == 0.0


def test_enumerate_mc_bounds_endpoints(client):
    body = client.post("/enumerate", json={"n": 2, "p": "1/2"}).json()
    assert body["prob_at_least"]["1"] == "5/8"
    assert body["prob_at_least"]["2"] == "1/16"
    assert body["matrix_count"] == 16

    resp = client.post("/enumerate", json={"n": 9, "p": "1/2"})
    assert resp.status_code == 409
    assert resp.json()["error"] == "resource-refusal"

    body = client.post(
        "/mc", json={"n": 2, "k": 1, "p": "1/2", "trials": 4000, "seed": 5}
    ).json()
    assert body["ci_low"] <= 0.625 <= body["ci_high"]
    again = client.post(
        "/mc", json={"n": 2, "k": 1, "p": "1/2", "trials": 4000, "seed": 5}
    ).json()
    assert body == again

    body = client.post(
        "/bounds", json={"n_values": [2, 3], "k": 1, "p": "1/2", "epsilon": 0}
    ).json()
    assert [row["n"] for row in body["rows"]] == [2, 3]
    assert body["rows"][0]["conjecture_rhs"] == "1/2"


def test_fixed_vector_endpoint(client):
    v = [[1.0], [0.0], [0.0], [0.0]]
    body = client.post(
        "/fixed-vector", json={"v_columns": v, "p": "1/2", "c": 5.0, "trials": 200, "seed": 1}
    ).json()
    assert body["estimate"] == 1.0 and body["event"] == "hs_norm_below"


def test_validation_maps_to_422(client):
    resp = client.post("/mc", json={"n": 2, "k": 1, "p": "1/2", "trials": 0, "seed": 1})
    assert resp.status_code == 422
