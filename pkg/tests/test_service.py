import numpy as np
import pytest
from fastapi.testclient import TestClient

from optionspan.service import app

client = TestClient(app)

DEMO_MARKET = {"probs": [1 / 3, 1 / 3, 1 / 3], "underlying": [0, 1, 2]}
TIED_MARKET = {"probs": [0.25, 0.25, 0.25, 0.25], "underlying": [0, 1, 1, 2]}
DEMO_PRICING = {
    "bond": 1.0,
    "calls": [{"k": 0.0, "price": 1.0}, {"k": 1.0, "price": 1 / 3}],
}


def test_health():
    data = client.get("/health").json()
    assert data["status"] == "ok"


def test_replicate_measurable():
    resp = client.post(
        "/replicate",
        json={"market": DEMO_MARKET, "target": "square", "n_max": 8},
    )
    assert resp.status_code == 200
    data = resp.json()
    assert data["measurable"] is True
    assert data["portfolio"] == {
        "cash": 0.0,
        "legs": [
            {"strike": 0.0, "weight": 1.0},
            {"strike": 1.0, "weight": 2.0},
        ],
    }
    assert data["converged"]["sup"] is True
    header = [
        line
        for line in data["report_csv"].splitlines()
        if not line.startswith("#")
    ][0]
    assert header.startswith("n,sup_err,")
    assert header.endswith("converged_flags")
    assert data["seed"] == 0
    assert data["tool_version"]


def test_replicate_non_measurable():
    resp = client.post(
        "/replicate",
        json={"market": TIED_MARKET, "target": [0, 1, 2, 2], "n_max": 6},
    )
    data = resp.json()
    assert data["measurable"] is False
    assert data["certificate"]["cell"] == [1, 2]
    assert data["projection"] == [0.0, 1.5, 1.5, 2.0]
    assert data["converged"]["sup"] is False


def test_replicate_validation_error_names_field():
    resp = client.post("/replicate", json={"market": {"probs": [1.0]}, "target": "square"})
    assert resp.status_code == 422
    assert "underlying" in resp.text


def test_replicate_domain_error():
    bad = {"probs": [0.5, 0.5], "underlying": [1, -1]}
    resp = client.post("/replicate", json={"market": bad, "target": "identity"})
    assert resp.status_code == 400
    assert resp.json()["error"] == "NegativeUnderlying"


def test_price_unique():
    resp = client.post(
        "/price",
        json={"market": DEMO_MARKET, "pricing": DEMO_PRICING, "claim": "square"},
    )
    data = resp.json()
    assert data["status"] == "unique"
    assert data["p_min"] == pytest.approx(5 / 3, abs=1e-9)
    assert data["witness_price"] == pytest.approx(5 / 3, abs=1e-9)
    assert data["lower_certificate"]["strict"] is True


def test_price_non_unique():
    pricing = {"bond": 1.0, "calls": [{"k": 0.0, "price": 1.0}, {"k": 1.0, "price": 0.25}]}
    resp = client.post(
        "/price",
        json={"market": TIED_MARKET, "pricing": pricing, "claim": [0, 1, 2, 2]},
    )
    data = resp.json()
    assert data["status"] == "non_unique"
    assert data["p_max"] - data["p_min"] > 1e-6


def test_price_free_lunch():
    pricing = {"bond": 1.0, "calls": [{"k": 0.0, "price": 1.0}, {"k": 1.0, "price": -0.1}]}
    resp = client.post(
        "/price",
        json={"market": DEMO_MARKET, "pricing": pricing, "claim": "one"},
    )
    data = resp.json()
    assert data["status"] == "free_lunch"
    cert = data["free_lunch"]
    assert abs(cert["price"]) < 1e-8
    assert min(cert["claim"]) >= -1e-12
    assert max(cert["claim"]) > 1e-8


def test_verify_lemmas_pass():
    for lemma in ("green-jarrow", "z-identity", "mode-agreement"):
        resp = client.post(
            "/verify",
            json={"market": DEMO_MARKET, "lemma": lemma, "trials": 10},
        )
        assert resp.status_code == 200, resp.text
        assert resp.json()["passed"] is True
    resp = client.post(
        "/verify", json={"market": TIED_MARKET, "lemma": "o-closed", "trials": 10}
    )
    assert resp.json()["passed"] is True


def test_verify_mutation_self_test():
    resp = client.post(
        "/verify",
        json={"market": TIED_MARKET, "lemma": "o-closed", "trials": 5, "mutate": True},
    )
    data = resp.json()
    assert data["passed"] is False
    assert data["counterexample"]["cell"] == [1, 2]


def test_verify_unknown_lemma():
    resp = client.post("/verify", json={"market": DEMO_MARKET, "lemma": "nope"})
    assert resp.status_code == 400
    assert "valid names" in resp.json()["message"]


def test_verify_z_identity_custom_strikes():
    resp = client.post(
        "/verify",
        json={
            "market": DEMO_MARKET,
            "lemma": "z-identity",
            "strikes": [-1.0, 0.0, 0.5, 1.0, 2.0],
        },
    )
    data = resp.json()
    assert data["passed"] is True
    assert data["trials"] == 5


def test_norms_endpoint():
    resp = client.post(
        "/norms",
        json={"market": DEMO_MARKET, "claim": "identity", "specs": ["L1", "L2", "Linf"]},
    )
    values = resp.json()["values"]
    assert values["L1"] == pytest.approx(1.0, abs=1e-12)
    assert values["Linf"] == pytest.approx(2.0, abs=1e-12)
    assert values["L2"] == pytest.approx(np.sqrt(5 / 3), abs=1e-12)


def test_replicate_deterministic_given_seed():
    req = {"market": TIED_MARKET, "target": [0, 1, 1, 3], "n_max": 10, "seed": 7}
    a = client.post("/replicate", json=req).json()
    b = client.post("/replicate", json=req).json()
    assert a == b
