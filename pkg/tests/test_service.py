from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from histif.service import create_app
from histif.store import VersionedStore

from conftest import FINAL_ROWS, ORDER_ROWS, U1, U1P, U2, U3

U1P_MOD = [{
    "op": "replace", "pos": 1,
    "statement": {"kind": "update", "relation": "Order",
                  "set": [{"attr": "ShippingFee",
                           "expr": {"kind": "const", "value": {"t": "int", "v": 0}}}],
                  "cond": {"kind": "cmp", "op": ">=",
                           "left": {"kind": "attr", "name": "Price"},
                           "right": {"kind": "const", "value": {"t": "int", "v": 60}}}},
}]


@pytest.fixture
def client(order_db, shipping_history):
    store = VersionedStore(order_db)
    store.append_history(shipping_history)
    return TestClient(create_app(store))


class TestHistoryEndpoints:
    def test_get_log_history(self, client):
        res = client.get("/api/history/log")
        assert res.status_code == 200
        body = res.json()
        assert len(body["statements"]) == 3
        assert body["statements"][0]["pos"] == 1
        assert "UPDATE Order" in body["statements"][0]["sql"]

    def test_unknown_history_404(self, client):
        assert client.get("/api/history/nope").status_code == 404

    def test_post_then_get_round_trip(self, client):
        text = "\n".join([U1, U2])
        posted = client.post("/api/history", json={"id": "h2", "text": text})
        assert posted.status_code == 200
        got = client.get("/api/history/h2").json()
        assert got["statements"] == posted.json()["statements"]

    def test_post_ast_round_trip(self, client):
        first = client.get("/api/history/log").json()
        asts = [s["ast"] for s in first["statements"]]
        posted = client.post("/api/history", json={"id": "copy", "statements": asts})
        assert posted.status_code == 200
        assert [s["ast"] for s in posted.json()["statements"]] == asts

    def test_parse_endpoint(self, client):
        ok = client.post("/api/parse", json={"text": U1}).json()
        assert ok["ok"] and ok["ast"]["kind"] == "update"
        bad = client.post("/api/parse", json={"text": "UPDATE SET"}).json()
        assert not bad["ok"] and bad["line"] == 1


class TestWhatIf:
    def test_running_example(self, client):
        res = client.post("/api/whatif", json={
            "history_id": "log", "modifications": U1P_MOD, "method": "r+ps+ds"})
        assert res.status_code == 200
        body = res.json()
        assert body["delta"] == [
            {"relation": "Order", "sign": "+", "values": ["12", "Alex", "UK", "50", "10"]},
            {"relation": "Order", "sign": "-", "values": ["12", "Alex", "UK", "50", "5"]},
        ]
        assert body["report"]["slices"]["Order"]["kept"] == [1, 2]

    def test_empty_modifications(self, client):
        res = client.post("/api/whatif", json={"history_id": "log"})
        assert res.status_code == 200
        assert res.json()["delta"] == []

    def test_methods_agree(self, client):
        deltas = set()
        for method in ("naive", "r", "r+ds", "r+ps", "r+ps+ds"):
            res = client.post("/api/whatif", json={
                "history_id": "log", "modifications": U1P_MOD, "method": method})
            assert res.status_code == 200
            deltas.add(str(res.json()["delta"]))
        assert len(deltas) == 1

    def test_identical_requests_identical_answers(self, client):
        payload = {"history_id": "log", "modifications": U1P_MOD}
        a = client.post("/api/whatif", json=payload).json()
        b = client.post("/api/whatif", json=payload).json()
        assert a["delta"] == b["delta"]
        assert a["request_id"] == b["request_id"]

    def test_invalid_mods_400(self, client):
        res = client.post("/api/whatif", json={
            "history_id": "log", "modifications": [{"op": "nope"}]})
        assert res.status_code == 400

    def test_report_cache(self, client):
        body = client.post("/api/whatif", json={
            "history_id": "log", "modifications": U1P_MOD}).json()
        res = client.get(f"/api/report/{body['request_id']}")
        assert res.status_code == 200
        assert res.json() == body["report"]


class TestRelationEndpoint:
    def test_version_zero_is_fig1(self, client):
        res = client.get("/api/relation/Order", params={"at": 0})
        body = res.json()
        assert body["at"] == 0 and body["total"] == 4
        assert ["11", "Susan", "UK", "20", "5"] in body["rows"]

    def test_latest_is_fig3(self, client):
        res = client.get("/api/relation/Order").json()
        assert ["11", "Susan", "UK", "20", "8"] in res["rows"]

    def test_version_one_matches_prefix_replay(self, client, order_db,
                                               shipping_history):
        from histif.statements import run_history
        from histif.values import render_value

        res = client.get("/api/relation/Order", params={"at": 1}).json()
        expect = run_history(shipping_history.prefix(1), order_db).relation("Order")
        assert sorted(res["rows"]) == sorted(
            [render_value(v) for v in row] for row in expect)

    def test_unknown_relation_404(self, client):
        assert client.get("/api/relation/Nope").status_code == 404

    def test_out_of_range_416(self, client):
        assert client.get("/api/relation/Order", params={"at": 9}).status_code == 416
