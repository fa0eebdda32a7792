"""Command-line front end.

    histif load --store DIR --schema schema.json --data table.csv
    histif whatif --store DIR --history h.sql --mods m.json [--method ...]
    histif relation --store DIR --history h.sql NAME [--at N]
    histif bench --spec bench.json --out results.csv
    histif serve --store DIR [--port 8010]

Exit codes: 0 success, 2 usage error, 3 data error, 4 solver budget
exhausted (a degraded but correct answer was still emitted).
"""
from __future__ import annotations

import csv
import io
import json
import os
import statistics
import sys
import time
from pathlib import Path

import click

from .algebra import sorted_delta_rows
from .data import Database
from .dsl import parse_history
from .engine import HWQAnswer, HWQRequest, METHODS, answer
from .errors import EngineError, ParseError, SchemaError
from .statements import modification_from_json
from .store import (
    VersionedStore,
    dump_store,
    load_store,
    load_table,
    rows_to_csv,
)
from .values import render_value
from .workload import WorkloadSpec, generate_workload

DATA_DIR_ENV = "HISTIF_DATA_DIR"


def _store_dir(option_value) -> Path:
    if option_value:
        return Path(option_value)
    env = os.environ.get(DATA_DIR_ENV)
    if env:
        return Path(env)
    raise click.UsageError(f"--store or ${DATA_DIR_ENV} required")


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Historical what-if query engine."""


@main.command()
@click.option("--store", "store_dir", type=click.Path(), default=None)
@click.option("--schema", "schema_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
def load(store_dir, schema_path, data_path):
    """Load one relation (schema JSON + CSV) into the store directory."""
    directory = _store_dir(store_dir)
    try:
        if (directory / "schema.json").exists():
            store = load_store(directory)
            db = load_table(Path(schema_path), Path(data_path), into=store.base)
        else:
            db = load_table(Path(schema_path), Path(data_path))
        dump_store(VersionedStore(db), directory)
    except (SchemaError, ValueError) as e:
        _fail(3, str(e))
    click.echo(f"loaded {Path(data_path).name} into {directory}")


def delta_csv(ans: HWQAnswer, db: Database) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    multi = len([r for r, d in ans.deltas.items() if not d.is_empty()]) > 1
    for rel in sorted(ans.deltas):
        d = ans.deltas[rel]
        if multi:
            out.write(f"# relation {rel}\n")
        writer.writerow(("sign",) + db.schema(rel).names)
        for sign, row in sorted_delta_rows(d):
            writer.writerow((sign,) + tuple(render_value(v) for v in row))
    return out.getvalue()


def delta_jsonl(ans: HWQAnswer) -> str:
    lines = []
    for rel in sorted(ans.deltas):
        for sign, row in sorted_delta_rows(ans.deltas[rel]):
            lines.append(json.dumps(
                {"relation": rel, "sign": sign,
                 "values": [render_value(v) for v in row]}))
    return "\n".join(lines) + ("\n" if lines else "")


def _read_mods(path: Path):
    return tuple(modification_from_json(obj)
                 for obj in json.loads(Path(path).read_text()))


def _read_history(path: Path):
    """History file: DSL lines, or a JSON array of statement ASTs."""
    from .statements import History, statement_from_json

    if path.suffix == ".json":
        stmts = tuple(statement_from_json(obj)
                      for obj in json.loads(path.read_text()))
        return History(stmts, path.stem)
    return parse_history(path.read_text(), path.stem)


@main.command()
@click.option("--store", "store_dir", type=click.Path(), default=None)
@click.option("--history", "history_path", type=click.Path(exists=True), required=True)
@click.option("--mods", "mods_path", type=click.Path(exists=True), required=True)
@click.option("--method", type=click.Choice(METHODS), default="r+ps+ds")
@click.option("--groups", type=int, default=8)
@click.option("--group-by", "group_attr", default=None)
@click.option("--big-m", "big_m_floor", type=int, default=0)
@click.option("--solver-budget", type=int, default=10 ** 6)
@click.option("--seed", type=int, default=0)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.option("--dump-ds-conditions", is_flag=True, default=False)
def whatif(store_dir, history_path, mods_path, method, groups, group_attr,
           big_m_floor, solver_budget, seed, fmt, out_path, report_path,
           dump_ds_conditions):
    """Answer a historical what-if query: delta file plus run report."""
    directory = _store_dir(store_dir)
    try:
        store = load_store(directory)
        store.append_history(_read_history(Path(history_path)))
        req = HWQRequest(
            mods=_read_mods(Path(mods_path)),
            method=method,
            group_attr=group_attr,
            groups=groups,
            solver_budget=solver_budget,
            big_m_floor=big_m_floor,
        )
        ans = answer(store, req)
    except ParseError as e:
        _fail(3, f"parse error: {e}")
    except (SchemaError, EngineError) as e:
        _fail(3, str(e))

    text = delta_csv(ans, store.base) if fmt == "csv" else delta_jsonl(ans)
    if out_path:
        Path(out_path).write_text(text)
    else:
        click.echo(text, nl=False)
    if report_path:
        Path(report_path).write_text(json.dumps(ans.report.to_json(), indent=2))
    if dump_ds_conditions:
        for rel, sides in ans.report.ds_conditions.items():
            click.echo(f"-- data slicing for {rel}", err=True)
            for side, conds in sides.items():
                for base_rel, cond in conds.items():
                    click.echo(f"--   {side}[{base_rel}]: {cond}", err=True)
    if ans.report.solver_unknown:
        sys.exit(4)


@main.command()
@click.option("--store", "store_dir", type=click.Path(), default=None)
@click.option("--history", "history_path", type=click.Path(exists=True), default=None)
@click.option("--at", type=int, default=None)
@click.argument("name")
def relation(store_dir, history_path, at, name):
    """Print a relation at a version (default: latest)."""
    directory = _store_dir(store_dir)
    try:
        store = load_store(directory)
        if history_path:
            store.append_history(parse_history(Path(history_path).read_text()))
        i = len(store.log) if at is None else at
        db = store.reconstruct(i)
        click.echo(rows_to_csv(db.relation(name), db.schema(name)), nl=False)
    except (SchemaError, EngineError) as e:
        _fail(3, str(e))


def _bench_cells(spec: dict):
    grid = {
        "updates": spec.get("U", [10]),
        "mods": spec.get("M", [1]),
        "dependent_pct": spec.get("D", [10]),
        "affected_pct": spec.get("T", [10]),
        "inserts_pct": spec.get("I", [0]),
        "deletes_pct": spec.get("X", [0]),
        "size": spec.get("size", [1000]),
    }
    keys = list(grid)
    def rec(i, acc):
        if i == len(keys):
            yield dict(acc)
            return
        for v in grid[keys[i]]:
            acc[keys[i]] = v
            yield from rec(i + 1, acc)
    yield from rec(0, {})


def run_bench(spec: dict, repetitions: int = 3) -> list[dict]:
    """One row per (method, cell): median wall time per phase over
    `repetitions` runs after a discarded warm-up iteration."""
    methods = spec.get("methods", list(METHODS))
    seed = spec.get("seed", 0)
    rows = []
    for cell in _bench_cells(spec):
        db, history, mods = generate_workload(WorkloadSpec(seed=seed, **cell))
        store = VersionedStore(db)
        store.append_history(history)
        for method in methods:
            req = HWQRequest(tuple(mods), method=method)
            answer(store, req)  # warm-up, discarded
            samples = []
            for _ in range(repetitions):
                t0 = time.perf_counter()
                ans = answer(store, req)
                samples.append((time.perf_counter() - t0) * 1000)
            med = statistics.median(samples)
            phases = ans.report.phases_ms
            rows.append({
                "method": method, "U": cell["updates"], "M": cell["mods"],
                "D": cell["dependent_pct"], "T": cell["affected_pct"],
                "I": cell["inserts_pct"], "X": cell["deletes_pct"],
                "size": cell["size"],
                "wall_ms": round(med, 3),
                "ps_ms": round(phases.get("ps", 0.0), 3),
                "exe_ms": round(phases.get("exe", 0.0) + phases.get("ds", 0.0), 3),
                "delta_rows": ans.total_changes(),
            })
    return rows


@main.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--repetitions", type=int, default=3)
def bench(spec_path, out_path, repetitions):
    """Run the benchmark grid from a JSON spec; emit CSV."""
    try:
        spec = json.loads(Path(spec_path).read_text())
        rows = run_bench(spec, repetitions)
    except (EngineError, ValueError) as e:
        _fail(3, str(e))
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=list(rows[0]) if rows else ["method"],
                            lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if out_path:
        Path(out_path).write_text(out.getvalue())
    else:
        click.echo(out.getvalue(), nl=False)


@main.command()
@click.option("--store", "store_dir", type=click.Path(), default=None)
@click.option("--history", "history_path", type=click.Path(exists=True), default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8010)
def serve(store_dir, history_path, host, port):
    """Start the what-if HTTP service over a store directory."""
    import uvicorn

    from .service import create_app

    directory = _store_dir(store_dir)
    store = load_store(directory)
    if history_path:
        store.append_history(parse_history(Path(history_path).read_text()))
    uvicorn.run(create_app(store), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
