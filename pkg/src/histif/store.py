"""Versioned snapshot store: time travel over an append-only statement log.

The store keeps the base snapshot, the statement log, and checkpoint
snapshots every `checkpoint_every` statements; any version reconstructs
from the nearest earlier checkpoint by replay.  Data files are CSV with a
header row, typed by a schema JSON document; snapshot dumps use the same
format under a versioned directory layout.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Optional

from .data import Database, check_row
from .errors import EngineError, SchemaError
from .expressions import Schema
from .statements import History, Statement, apply_statement
from .values import parse_value, render_value

DEFAULT_CHECKPOINT_EVERY = 10


class VersionedStore:
    def __init__(self, base: Database, checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY):
        if checkpoint_every < 1:
            raise ValueError("checkpoint interval must be >= 1")
        self.base = base
        self.checkpoint_every = checkpoint_every
        self.log: list[Statement] = []
        self._checkpoints: dict[int, Database] = {0: base}
        self._current = base

    def __len__(self) -> int:
        return len(self.log)

    @property
    def current(self) -> Database:
        return self._current

    def history(self, ident: str = "log") -> History:
        return History(tuple(self.log), ident)

    def append(self, stmt: Statement) -> Database:
        self._current = apply_statement(stmt, self._current)
        self.log.append(stmt)
        if len(self.log) % self.checkpoint_every == 0:
            self._checkpoints[len(self.log)] = self._current
        return self._current

    def append_history(self, h: History) -> Database:
        for u in h.statements:
            self.append(u)
        return self._current

    def reconstruct(self, i: int) -> Database:
        """Database state after the first i statements (i=0 is the base)."""
        if not 0 <= i <= len(self.log):
            raise EngineError(f"version {i} out of range [0,{len(self.log)}]")
        at = max(k for k in self._checkpoints if k <= i)
        db = self._checkpoints[at]
        for stmt in self.log[at:i]:
            db = apply_statement(stmt, db)
        return db


# ---------------------------------------------------------------------------
# CSV and schema files


def schema_from_file(path: Path) -> Schema:
    return Schema.from_json(json.loads(Path(path).read_text()))


def rows_from_csv(text: str, schema: Schema) -> list[tuple]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return []
    if tuple(header) != schema.names:
        raise SchemaError(
            f"CSV header {header} does not match schema {list(schema.names)}")
    rows = []
    for lineno, raw in enumerate(reader, start=2):
        if not raw:
            continue
        if len(raw) != schema.arity():
            raise SchemaError(f"row {lineno}: expected {schema.arity()} fields")
        try:
            rows.append(check_row(
                tuple(parse_value(cell, t) for cell, t in zip(raw, schema.types)),
                schema))
        except (ValueError, SchemaError) as e:
            raise SchemaError(f"row {lineno}: {e}") from e
    return rows


def rows_to_csv(rows, schema: Schema) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(schema.names)
    rendered = sorted([render_value(v) for v in row] for row in rows)
    writer.writerows(rendered)
    return out.getvalue()


def load_table(schema_path: Path, csv_path: Path,
               into: Optional[Database] = None) -> Database:
    schema = schema_from_file(schema_path)
    rows = rows_from_csv(Path(csv_path).read_text(), schema)
    db = into if into is not None else Database()
    return db.with_new_relation(schema, rows)


def dump_store(store: VersionedStore, directory: Path) -> None:
    """Persist the base snapshot, schemas, and log under `directory`."""
    directory = Path(directory)
    base_dir = directory / "base"
    base_dir.mkdir(parents=True, exist_ok=True)
    schemas = [store.base.schema(name).to_json() for name in store.base.relation_names()]
    (directory / "schema.json").write_text(json.dumps({"relations": schemas}, indent=2))
    for name in store.base.relation_names():
        (base_dir / f"{name}.csv").write_text(
            rows_to_csv(store.base.relation(name), store.base.schema(name)))
    from .dsl import print_history

    (directory / "history.sql").write_text(print_history(store.history()))


def dump_version(store: VersionedStore, i: int, directory: Path) -> None:
    directory = Path(directory) / f"ver_{i}"
    directory.mkdir(parents=True, exist_ok=True)
    db = store.reconstruct(i)
    for name in db.relation_names():
        (directory / f"{name}.csv").write_text(
            rows_to_csv(db.relation(name), db.schema(name)))


def load_store(directory: Path,
               checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY) -> VersionedStore:
    directory = Path(directory)
    spec = json.loads((directory / "schema.json").read_text())
    db = Database()
    for schema_json in spec["relations"]:
        schema = Schema.from_json(schema_json)
        csv_path = directory / "base" / f"{schema.relation}.csv"
        rows = rows_from_csv(csv_path.read_text(), schema) if csv_path.exists() else []
        db = db.with_new_relation(schema, rows)
    store = VersionedStore(db, checkpoint_every)
    history_path = directory / "history.sql"
    if history_path.exists():
        from .dsl import parse_history

        store.append_history(parse_history(history_path.read_text()))
    return store
