"""Databases: named set-semantics relations plus their schemas.

Relations are frozensets of value tuples; every mutation helper returns a
new Database that shares unchanged relations.  A per-instance text
dictionary assigns dense integer codes to text values on demand (used by
the constraint compiler).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SchemaError
from .expressions import Schema
from .values import TextDict, value_conforms

Row = tuple


@dataclass(frozen=True)
class Database:
    schemas: dict[str, Schema] = field(default_factory=dict)
    relations: dict[str, frozenset] = field(default_factory=dict)
    text_dict: TextDict = field(default_factory=TextDict)

    def schema(self, name: str) -> Schema:
        try:
            return self.schemas[name]
        except KeyError:
            raise SchemaError(f"unknown relation {name!r}") from None

    def relation(self, name: str) -> frozenset:
        self.schema(name)
        return self.relations.get(name, frozenset())

    def relation_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.schemas))

    def with_relation(self, name: str, rows: frozenset) -> "Database":
        self.schema(name)
        rels = dict(self.relations)
        rels[name] = frozenset(rows)
        return Database(self.schemas, rels, self.text_dict)

    def with_new_relation(self, schema: Schema, rows=()) -> "Database":
        schemas = dict(self.schemas)
        schemas[schema.relation] = schema
        rels = dict(self.relations)
        rels[schema.relation] = frozenset(tuple(r) for r in rows)
        return Database(schemas, rels, self.text_dict)


def check_row(row: Row, schema: Schema) -> Row:
    if len(row) != schema.arity():
        raise SchemaError(
            f"row arity {len(row)} does not match {schema.relation}({schema.arity()})"
        )
    for v, (name, t) in zip(row, schema.attrs):
        if not value_conforms(v, t):
            raise SchemaError(f"value {v!r} does not conform to {name}:{t}")
    return tuple(row)


def make_database(*tables: tuple[Schema, list]) -> Database:
    """Convenience constructor from (schema, rows) pairs."""
    db = Database()
    for schema, rows in tables:
        db = db.with_new_relation(schema, [check_row(r, schema) for r in rows])
    return db
