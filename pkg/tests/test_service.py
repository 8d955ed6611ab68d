"""HTTP endpoints: payload contracts and error mapping."""

import httpx
import pytest

from hs2.cli import _InProcessTransport
from hs2.examples import example
from hs2.service import create_app
from hs2.stateio import parse_state, print_state


@pytest.fixture(scope="module")
def client():
    return httpx.Client(transport=_InProcessTransport(create_app()),
                        base_url="http://testserver")


def ex26_text():
    return print_state(example("ex26"))


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["version"]


class TestEvolve:
    def test_eulerian_atom_oracle(self, client):
        response = client.post("/evolve", json={"state": ex26_text(),
                                                "t": 2.0})
        assert response.status_code == 200
        body = response.json()
        assert body["kind"] == "eulerian"
        state = parse_state(body["state"])
        assert state.energy.atom_mass_at(-0.25) == pytest.approx(
            1.0, abs=1e-12)

    def test_lagrangian_state_stays_lagrangian(self, client):
        text = print_state(example("ex34", 0.0))
        body = client.post("/evolve", json={"state": text, "t": 1.0}).json()
        assert body["kind"] == "lagrangian"
        want = example("ex34", 1.0)
        got = parse_state(body["state"])
        assert (got.pos - want.pos).sup_norm() <= 1e-13

    def test_zero_time_round_trips_text(self, client):
        text = ex26_text()
        body = client.post("/evolve", json={"state": text, "t": 0.0}).json()
        assert body["state"] == text

    def test_negative_time_is_bad_request(self, client):
        response = client.post("/evolve", json={"state": ex26_text(),
                                                "t": -1.0})
        assert response.status_code == 400

    def test_malformed_state_is_bad_request(self, client):
        response = client.post("/evolve", json={"state": "[u]\n0 zero\n",
                                                "t": 1.0})
        assert response.status_code == 400
        assert "non-numeric" in response.json()["detail"]

    def test_invalid_state_carries_violations(self, client):
        bad = ("[u]\n-1 1\n0 0\n[rho]\n[mu.density]\n-1 0 7\n[mu.atoms]\n")
        response = client.post("/evolve", json={"state": bad, "t": 1.0})
        assert response.status_code == 422
        body = response.json()
        assert body["violations"]
        assert body["violations"][0]["code"] == "energy-compatibility"

    def test_relabeling_is_not_evolvable(self, client):
        text = print_state(example("ex47", 0.25))
        response = client.post("/evolve", json={"state": text, "t": 1.0})
        assert response.status_code == 400


class TestTransform:
    def test_both_directions_compose_to_identity(self, client):
        text = ex26_text()
        lag = client.post("/transform", json={
            "state": text, "direction": "to-lagrangian"}).json()
        assert lag["kind"] == "lagrangian"
        back = client.post("/transform", json={
            "state": lag["state"], "direction": "to-eulerian"}).json()
        state = parse_state(back["state"])
        want = example("ex26")
        assert (state.vel - want.vel).sup_norm() <= 1e-13

    def test_wrong_direction_is_bad_request(self, client):
        response = client.post("/transform", json={
            "state": ex26_text(), "direction": "to-eulerian"})
        assert response.status_code == 400
        assert "already Eulerian" in response.json()["detail"]

    def test_unknown_direction_is_bad_request(self, client):
        response = client.post("/transform", json={
            "state": ex26_text(), "direction": "sideways"})
        assert response.status_code == 400


class TestBreaking:
    def test_report(self, client):
        body = client.post("/breaking", json={"state": ex26_text()}).json()
        assert body["first_time"] == 2.0
        assert body["first_location"] == -0.25
        assert any(cell["times"] for cell in body["cells"])

    def test_accepts_lagrangian(self, client):
        text = print_state(example("ex34", 0.0))
        body = client.post("/breaking", json={"state": text}).json()
        assert body["first_time"] == 2.0


class TestMetric:
    def test_bracket_and_stability(self, client):
        a = print_state(example("ex36", 0.0))
        b = print_state(example("ex36", 0.5))
        body = client.post("/metric", json={
            "state_a": a, "state_b": b, "times": [0.0, 1.0]}).json()
        assert 0.0 < body["bracket"]["lower"] <= body["bracket"]["upper"]
        assert len(body["stability"]) == 2
        assert all(row["satisfied"] for row in body["stability"])

    def test_negative_time_is_bad_request(self, client):
        a = ex26_text()
        response = client.post("/metric", json={
            "state_a": a, "state_b": a, "times": [-1.0]})
        assert response.status_code == 400


class TestExample:
    def test_returns_state(self, client):
        body = client.post("/example", json={"name": "ex11", "t": 1.0}).json()
        state = parse_state(body["state"])
        assert state.rho(0.5) == 0.8

    def test_unknown_name_is_bad_request(self, client):
        response = client.post("/example", json={"name": "ex99"})
        assert response.status_code == 400

    def test_unsupported_time_is_bad_request(self, client):
        response = client.post("/example", json={"name": "ex26", "t": 1.0})
        assert response.status_code == 400


class TestValidate:
    def test_ok_state(self, client):
        body = client.post("/validate", json={"state": ex26_text()}).json()
        assert body["ok"] and body["kind"] == "eulerian"

    def test_normalized_flag_for_lagrangian(self, client):
        text = print_state(example("ex34", 0.0))
        body = client.post("/validate", json={"state": text}).json()
        assert body["ok"] and body["normalized"]
        assert body["slope_floor"] == pytest.approx(1.0)

    def test_violations_reported_with_ok_false(self, client):
        bad = "[u]\n-1 1\n0 0\n[rho]\n[mu.density]\n-1 0 7\n[mu.atoms]\n"
        response = client.post("/validate", json={"state": bad})
        assert response.status_code == 200  # validation reports, not errors
        body = response.json()
        assert not body["ok"]
        assert body["violations"][0]["code"] == "energy-compatibility"

    def test_relabeling(self, client):
        text = print_state(example("ex47", 0.25))
        body = client.post("/validate", json={"state": text}).json()
        assert body["ok"] and body["kind"] == "relabeling"

    def test_tolerance_override(self, client):
        near = ("[u]\n0 0\n1 1\n[rho]\n[mu.density]\n0 1 1.0000000005\n"
                "[mu.atoms]\n")
        assert client.post("/validate",
                           json={"state": near}).json()["ok"]
        strict = client.post("/validate",
                             json={"state": near, "tol": 1e-12}).json()
        assert not strict["ok"]


class TestResidual:
    def test_three_rows(self, client):
        body = client.post("/residual", json={
            "state": ex26_text(), "t_max": 1.0, "time_nodes": 32}).json()
        names = [row["name"] for row in body["residuals"]]
        assert names == ["bump", "tent", "gaussian"]
        for row in body["residuals"]:
            assert row["max_abs"] <= 5e-3

    def test_accepts_lagrangian_input(self, client):
        text = print_state(example("ex34", 0.0))
        body = client.post("/residual", json={
            "state": text, "t_max": 0.5, "time_nodes": 16}).json()
        assert len(body["residuals"]) == 3

    def test_zero_horizon_is_bad_request(self, client):
        response = client.post("/residual", json={
            "state": ex26_text(), "t_max": 0.0})
        assert response.status_code == 400


def test_missing_fields_are_bad_request(client):
    assert client.post("/evolve", json={"t": 1.0}).status_code == 400
    assert client.post("/metric", json={}).status_code == 400
