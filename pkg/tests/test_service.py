import pytest

from nvzfs.cli import _InProcessClient
from nvzfs.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return _InProcessClient(create_app())


class TestHealthAndPresets:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        payload = response.json()
        assert payload["status"] == "ok"
        assert payload["version"]

    def test_presets_listing(self, client):
        response = client.get("/presets")
        assert response.status_code == 200
        names = {p["name"] for p in response.json()["presets"]}
        assert names == {
            "boron_nqr",
            "water_pair",
            "polarization_check",
            "conventional_bias_comparison",
        }

    def test_preset_defaults_included(self, client):
        payload = client.get("/presets").json()
        boron = next(p for p in payload["presets"] if p["name"] == "boron_nqr")
        assert boron["defaults"]["boron.qbar"] == "2.9921"


class TestValidateEndpoint:
    def test_valid_config(self, client):
        response = client.post(
            "/validate", json={"config_text": "preset = water_pair\n"}
        )
        assert response.status_code == 200
        payload = response.json()
        assert payload["ok"]
        assert any(p["key"] == "water.d" for p in payload["parameters"])

    def test_invalid_config_reported(self, client):
        response = client.post(
            "/validate", json={"config_text": "preset = water_pair\nwater.d = -1\n"}
        )
        assert response.status_code == 200
        payload = response.json()
        assert not payload["ok"]
        assert payload["checks"][0]["level"] == "error"


class TestRunEndpoint:
    CONFIG = (
        "preset = boron_nqr\nboron.eta = 0\nsweep.points = 21\n"
        "trace.samples = 21\nemit = sweep\n"
    )

    def test_run_returns_files(self, client):
        response = client.post("/run", json={"config_text": self.CONFIG, "jobs": 2})
        assert response.status_code == 200
        payload = response.json()
        assert payload["preset"] == "boron_nqr"
        assert set(payload["files"]) == {"fig2c.csv", "manifest.txt"}

    def test_identical_requests_identical_bytes(self, client):
        first = client.post("/run", json={"config_text": self.CONFIG, "jobs": 1})
        second = client.post("/run", json={"config_text": self.CONFIG, "jobs": 3})
        assert first.json()["files"] == second.json()["files"]

    def test_config_error_maps_to_400_with_field(self, client):
        response = client.post(
            "/run", json={"config_text": "preset = boron_nqr\nboron.qbar = -1\n"}
        )
        assert response.status_code == 400
        detail = response.json()["detail"]
        assert detail["kind"] == "config"
        assert detail["field"] == "boron.qbar"

    def test_malformed_body_rejected(self, client):
        response = client.post("/run", json={"config": "nope"})
        assert response.status_code == 422
