import inspect

import numpy as np
import pytest
from fastapi.testclient import TestClient

from app.main import app
from app.routers.asymptotics import get_exponent, get_profile
from app.routers.scattering import get_coefficients
from app.routers.validation import run_validation
from app.schemas import ExponentRequest

client = TestClient(app)


def test_root_and_health():
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["docs"] == "/docs"
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"
    assert response.json()["config"]["ode_method"] == "DOP853"


def test_phase():
    response = client.get("/phase", params={"xi": -8})
    assert response.status_code == 200
    body = response.json()
    assert body["region"] == "I"
    assert len(body["points"]) == 6
    assert abs(body["points"][0][0] * body["points"][4][0] - 1) < 1e-12


def test_signature():
    response = client.get("/phase/signature", params={"xi": -8, "nx": 5, "ny": 3})
    assert response.status_code == 200
    body = response.json()
    assert len(body["re"]) == len(body["sign"]) == 15
    assert set(body["sign"]) <= {-1, 0, 1}
    response = client.get("/phase/signature", params={"xi": -8, "x0": 1, "x1": -1})
    assert response.status_code == 400
    response = client.get("/phase/signature", params={"xi": -8, "nx": 1000})
    assert response.status_code == 422


def test_exponent():
    response = client.post("/asymptotics/exponent", json={"im_nu": [0.1, 0.05]})
    assert response.status_code == 200
    assert response.json()["branch"] == 1
    assert abs(response.json()["value"] + 0.8) < 1e-12


@pytest.mark.asyncio
async def test_exponent_handler_directly():
    result = await get_exponent(ExponentRequest(im_nu=[0.0, 0.0]))
    assert result.value == -0.75
    assert result.boundary


def test_numerical_handlers_leave_the_event_loop():
    # plain functions are dispatched to the threadpool instead of blocking the loop
    for handler in (get_profile, get_coefficients, run_validation):
        assert not inspect.iscoroutinefunction(handler)
    assert inspect.iscoroutinefunction(get_exponent)


def test_soliton_field_and_residual():
    x = [-2.0, 0.0, 2.0]
    response = client.post("/soliton/field", json={"seed": {"omega": 2.0}, "x": x, "t": 0.0})
    assert response.status_code == 200
    q = response.json()["q"]
    assert len(q) == 3
    assert abs(q[1][0] - 1.5) < 1e-10
    assert all(abs(value[1]) < 1e-10 for value in q)

    response = client.post("/soliton/residual", json={"seed": {"omega": 2.0}, "x": x, "t": 0.1, "h": 0.01})
    assert response.status_code == 200
    assert response.json()["max_residual"] < 0.1


def test_soliton_bad_omega():
    response = client.post("/soliton/field", json={"seed": {"omega": 0.5}, "x": [0.0]})
    assert response.status_code == 400


def test_profile_region_three():
    response = client.post("/asymptotics/profile", json={"xi": 10.0, "t": [5.0, 10.0], "profile_phase": None})
    assert response.status_code == 200
    body = response.json()
    assert body["region"] == "III"
    assert body["exponent"] == -1.0
    assert [row["x"] for row in body["rows"]] == [50.0, 100.0]
    for row in body["rows"]:
        assert abs(row["q"][0] - 1) < 1e-3


def test_profile_out_of_scope():
    response = client.post("/asymptotics/profile", json={"xi": 0.0, "t": [5.0]})
    assert response.status_code == 400


def test_validation_unknown_mode():
    response = client.post("/validation/bogus")
    assert response.status_code == 422


def test_scattering_coefficients():
    x = np.linspace(-8, 8, 321)
    datum = {"x": x.tolist(), "q": (1 + 0.2 * np.exp(-x ** 2)).tolist(), "sigma": -1, "q_minus": 1.0}
    response = client.post("/scattering/coefficients", json={"datum": datum, "z": [[2.0, 0.0], [-0.5, 0.0]]})
    assert response.status_code == 200
    rows = response.json()
    assert len(rows) == 2
    for row in rows:
        assert row["s11"] is not None
        assert np.all(np.isfinite(row["rho"]))
    response = client.post("/scattering/coefficients", json={"datum": {**datum, "sigma": 0}, "z": [[2.0, 0.0]]})
    assert response.status_code == 422
