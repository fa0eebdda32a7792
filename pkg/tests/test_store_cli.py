from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from histif.cli import main, run_bench
from histif.store import (
    VersionedStore,
    dump_store,
    dump_version,
    load_store,
    rows_from_csv,
    rows_to_csv,
)
from histif.errors import SchemaError

from conftest import ORDER_ROWS, ORDER_SCHEMA, U1, U1P, U2, U3

FIG1_CSV = """ID,Customer,Country,Price,ShippingFee
11,Susan,UK,20,5
12,Alex,UK,50,5
13,Jack,US,60,3
14,Mark,US,30,4
"""


class TestCsvRoundTrip:
    def test_parse_fig1(self):
        rows = rows_from_csv(FIG1_CSV, ORDER_SCHEMA)
        assert set(rows) == set(ORDER_ROWS)

    def test_round_trip_bytes(self):
        rows = rows_from_csv(FIG1_CSV, ORDER_SCHEMA)
        assert rows_to_csv(rows, ORDER_SCHEMA) == FIG1_CSV

    def test_empty_csv(self):
        assert rows_from_csv("ID,Customer,Country,Price,ShippingFee\n", ORDER_SCHEMA) == []

    def test_bad_header(self):
        with pytest.raises(SchemaError):
            rows_from_csv("a,b\n1,2\n", ORDER_SCHEMA)

    def test_row_error_carries_line(self):
        bad = FIG1_CSV + "15,Zoe,DE,abc,1\n"
        with pytest.raises(SchemaError) as e:
            rows_from_csv(bad, ORDER_SCHEMA)
        assert "row 6" in str(e.value)


class TestStorePersistence:
    def test_dump_and_load(self, tmp_path, order_db, shipping_history):
        store = VersionedStore(order_db)
        store.append_history(shipping_history)
        dump_store(store, tmp_path / "s")
        again = load_store(tmp_path / "s")
        assert again.current.relation("Order") == store.current.relation("Order")
        assert len(again.log) == 3

    def test_dump_version_layout(self, tmp_path, order_db, shipping_history):
        store = VersionedStore(order_db)
        store.append_history(shipping_history)
        dump_version(store, 1, tmp_path)
        text = (tmp_path / "ver_1" / "Order.csv").read_text()
        assert "12,Alex,UK,50,0" in text


def _write_inputs(tmp: Path):
    (tmp / "schema.json").write_text(json.dumps(ORDER_SCHEMA.to_json()))
    (tmp / "order.csv").write_text(FIG1_CSV)
    (tmp / "history.sql").write_text("\n".join([U1, U2, U3]) + "\n")
    (tmp / "mods.json").write_text(json.dumps([{
        "op": "replace", "pos": 1,
        "statement": {"kind": "update", "relation": "Order",
                      "set": [{"attr": "ShippingFee",
                               "expr": {"kind": "const", "value": {"t": "int", "v": 0}}}],
                      "cond": {"kind": "cmp", "op": ">=",
                               "left": {"kind": "attr", "name": "Price"},
                               "right": {"kind": "const", "value": {"t": "int", "v": 60}}}},
    }]))


class TestCli:
    def test_load_whatif_end_to_end(self, tmp_path):
        _write_inputs(tmp_path)
        runner = CliRunner()
        store_dir = str(tmp_path / "store")
        res = runner.invoke(main, ["load", "--store", store_dir,
                                   "--schema", str(tmp_path / "schema.json"),
                                   "--data", str(tmp_path / "order.csv")])
        assert res.exit_code == 0, res.output
        res = runner.invoke(main, [
            "whatif", "--store", store_dir,
            "--history", str(tmp_path / "history.sql"),
            "--mods", str(tmp_path / "mods.json"),
            "--report", str(tmp_path / "report.json"),
        ])
        assert res.exit_code == 0, res.output
        assert "-,12,Alex,UK,50,5" in res.output
        assert "+,12,Alex,UK,50,10" in res.output
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["method"] == "r+ps+ds"
        assert report["slices"]["Order"]["kept"] == [1, 2]

    def test_methods_identical_bytes(self, tmp_path):
        _write_inputs(tmp_path)
        runner = CliRunner()
        store_dir = str(tmp_path / "store")
        runner.invoke(main, ["load", "--store", store_dir,
                             "--schema", str(tmp_path / "schema.json"),
                             "--data", str(tmp_path / "order.csv")])
        outputs = set()
        for method in ("naive", "r", "r+ds", "r+ps", "r+ps+ds"):
            res = runner.invoke(main, [
                "whatif", "--store", store_dir,
                "--history", str(tmp_path / "history.sql"),
                "--mods", str(tmp_path / "mods.json"),
                "--method", method,
            ])
            assert res.exit_code == 0, res.output
            outputs.add(res.output)
        assert len(outputs) == 1

    def test_empty_mods_empty_delta(self, tmp_path):
        _write_inputs(tmp_path)
        (tmp_path / "mods.json").write_text("[]")
        runner = CliRunner()
        store_dir = str(tmp_path / "store")
        runner.invoke(main, ["load", "--store", store_dir,
                             "--schema", str(tmp_path / "schema.json"),
                             "--data", str(tmp_path / "order.csv")])
        res = runner.invoke(main, [
            "whatif", "--store", store_dir,
            "--history", str(tmp_path / "history.sql"),
            "--mods", str(tmp_path / "mods.json"),
        ])
        assert res.exit_code == 0
        assert res.output.strip() == ""

    def test_relation_at_version(self, tmp_path):
        _write_inputs(tmp_path)
        runner = CliRunner()
        store_dir = str(tmp_path / "store")
        runner.invoke(main, ["load", "--store", store_dir,
                             "--schema", str(tmp_path / "schema.json"),
                             "--data", str(tmp_path / "order.csv")])
        res = runner.invoke(main, ["relation", "--store", store_dir,
                                   "--history", str(tmp_path / "history.sql"),
                                   "Order", "--at", "0"])
        assert res.exit_code == 0
        assert res.output == FIG1_CSV

    def test_solver_budget_exit_code_4_with_answer(self, tmp_path):
        # budget 0 forces every slice check to unknown: conservative answer,
        # exit code 4, delta still correct
        _write_inputs(tmp_path)
        runner = CliRunner()
        store_dir = str(tmp_path / "store")
        runner.invoke(main, ["load", "--store", store_dir,
                             "--schema", str(tmp_path / "schema.json"),
                             "--data", str(tmp_path / "order.csv")])
        res = runner.invoke(main, [
            "whatif", "--store", store_dir,
            "--history", str(tmp_path / "history.sql"),
            "--mods", str(tmp_path / "mods.json"),
            "--method", "r+ps", "--solver-budget", "0",
        ])
        assert res.exit_code == 4, res.output
        assert "-,12,Alex,UK,50,5" in res.output

    def test_json_history_file(self, tmp_path):
        _write_inputs(tmp_path)
        from histif.dsl import parse_statement
        from histif.statements import statement_to_json

        stmts = [statement_to_json(parse_statement(s)) for s in (U1, U2, U3)]
        (tmp_path / "history.json").write_text(json.dumps(stmts))
        runner = CliRunner()
        store_dir = str(tmp_path / "store")
        runner.invoke(main, ["load", "--store", store_dir,
                             "--schema", str(tmp_path / "schema.json"),
                             "--data", str(tmp_path / "order.csv")])
        res = runner.invoke(main, [
            "whatif", "--store", store_dir,
            "--history", str(tmp_path / "history.json"),
            "--mods", str(tmp_path / "mods.json"),
        ])
        assert res.exit_code == 0, res.output
        assert "+,12,Alex,UK,50,10" in res.output

    def test_data_error_exit_code(self, tmp_path):
        runner = CliRunner()
        (tmp_path / "schema.json").write_text(json.dumps(ORDER_SCHEMA.to_json()))
        (tmp_path / "bad.csv").write_text("nope\n")
        res = runner.invoke(main, ["load", "--store", str(tmp_path / "s"),
                                   "--schema", str(tmp_path / "schema.json"),
                                   "--data", str(tmp_path / "bad.csv")])
        assert res.exit_code == 3

    def test_usage_error_exit_code(self, tmp_path, monkeypatch):
        monkeypatch.delenv("HISTIF_DATA_DIR", raising=False)
        runner = CliRunner()
        res = runner.invoke(main, ["relation", "Order"])
        assert res.exit_code == 2

    def test_env_var_store_dir(self, tmp_path, monkeypatch):
        _write_inputs(tmp_path)
        runner = CliRunner()
        monkeypatch.setenv("HISTIF_DATA_DIR", str(tmp_path / "store"))
        res = runner.invoke(main, ["load",
                                   "--schema", str(tmp_path / "schema.json"),
                                   "--data", str(tmp_path / "order.csv")])
        assert res.exit_code == 0


class TestBench:
    def test_single_cell_single_row(self):
        rows = run_bench({"U": [5], "size": [200], "methods": ["r"], "seed": 3},
                         repetitions=1)
        assert len(rows) == 1
        assert rows[0]["method"] == "r" and rows[0]["U"] == 5

    def test_grid_row_count(self):
        rows = run_bench({"U": [5, 10, 15], "size": [200],
                          "methods": ["naive", "r", "r+ds", "r+ps+ds"], "seed": 3},
                         repetitions=1)
        assert len(rows) == 12
