"""Relational algebra: query plans, a set-semantics evaluator, and deltas.

The operator set is deliberately small: base relations, constant
singletons, selection, generalized projection (arbitrary scalar
expressions per output column), union, difference, and an equi-join (the
join form needed by insert-query push-down).  Evaluation is a
tuple-at-a-time interpreter over frozensets; per-operator row functions
are compiled once per plan node, which keeps replay of long histories
affordable at benchmark sizes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union as TUnion

from .data import Database
from .errors import SchemaError
from .expressions import (
    Cond,
    Expr,
    Schema,
    compile_predicate,
    compile_projector,
    infer_type,
)


@dataclass(frozen=True)
class BaseRelation:
    name: str


@dataclass(frozen=True)
class SingletonConst:
    """One-tuple constant relation."""

    schema: Schema
    row: tuple


@dataclass(frozen=True)
class Selection:
    cond: Cond
    input: "Query"


@dataclass(frozen=True)
class Projection:
    columns: tuple[tuple[str, Expr], ...]  # (output name, expression)
    input: "Query"


@dataclass(frozen=True)
class Union:
    left: "Query"
    right: "Query"


@dataclass(frozen=True)
class Difference:
    left: "Query"
    right: "Query"


@dataclass(frozen=True)
class Join:
    """Equi-join on pairs of (left attribute, right attribute)."""

    left: "Query"
    right: "Query"
    pairs: tuple[tuple[str, str], ...]


Query = TUnion[BaseRelation, SingletonConst, Selection, Projection, Union, Difference, Join]


def output_schema(q: Query, db: Database) -> Schema:
    """Derive the output schema of a query bottom-up."""
    if isinstance(q, BaseRelation):
        return db.schema(q.name)
    if isinstance(q, SingletonConst):
        return q.schema
    if isinstance(q, Selection):
        return output_schema(q.input, db)
    if isinstance(q, Projection):
        child = output_schema(q.input, db)
        attrs = []
        for name, expr in q.columns:
            t = infer_type(expr, child)
            attrs.append((name, t if t is not None else child.type_of(name)
                          if name in child.names else "int"))
        return Schema(child.relation, tuple(attrs))
    if isinstance(q, (Union, Difference)):
        ls = output_schema(q.left, db)
        rs = output_schema(q.right, db)
        if ls.types != rs.types:
            raise SchemaError(
                f"schema mismatch in {'union' if isinstance(q, Union) else 'difference'}:"
                f" {ls.attrs} vs {rs.attrs}"
            )
        return ls
    if isinstance(q, Join):
        ls = output_schema(q.left, db)
        rs = output_schema(q.right, db)
        if set(ls.names) & set(rs.names):
            raise SchemaError("join operands must have disjoint attribute names")
        return Schema(ls.relation, ls.attrs + rs.attrs)
    raise SchemaError(f"not a query node: {q!r}")


def eval_query(q: Query, db: Database) -> frozenset:
    """Evaluate a query plan; the result is a deduplicated set of tuples."""
    if isinstance(q, BaseRelation):
        return db.relation(q.name)
    if isinstance(q, SingletonConst):
        return frozenset((q.row,))
    if isinstance(q, Selection):
        child = eval_query(q.input, db)
        pred = compile_predicate(q.cond, output_schema(q.input, db))
        return frozenset(t for t in child if pred(t))
    if isinstance(q, Projection):
        child = eval_query(q.input, db)
        schema = output_schema(q.input, db)
        for _, e in q.columns:
            infer_type(e, schema)
        proj = compile_projector(tuple(e for _, e in q.columns), schema)
        return frozenset(proj(t) for t in child)
    if isinstance(q, Union):
        output_schema(q, db)
        return eval_query(q.left, db) | eval_query(q.right, db)
    if isinstance(q, Difference):
        output_schema(q, db)
        return eval_query(q.left, db) - eval_query(q.right, db)
    if isinstance(q, Join):
        ls = output_schema(q.left, db)
        rs = output_schema(q.right, db)
        left = eval_query(q.left, db)
        right = eval_query(q.right, db)
        li = [ls.position(a) for a, _ in q.pairs]
        ri = [rs.position(b) for _, b in q.pairs]
        table: dict = {}
        for rrow in right:
            table.setdefault(tuple(rrow[i] for i in ri), []).append(rrow)
        out = []
        for lrow in left:
            key = tuple(lrow[i] for i in li)
            for rrow in table.get(key, ()):
                out.append(lrow + rrow)
        return frozenset(out)
    raise SchemaError(f"not a query node: {q!r}")


def query_base_relations(q: Query) -> set[str]:
    if isinstance(q, BaseRelation):
        return {q.name}
    if isinstance(q, SingletonConst):
        return set()
    if isinstance(q, Selection):
        return query_base_relations(q.input)
    if isinstance(q, Projection):
        return query_base_relations(q.input)
    if isinstance(q, (Union, Difference, Join)):
        return query_base_relations(q.left) | query_base_relations(q.right)
    raise SchemaError(f"not a query node: {q!r}")


def rewrite_base_relations(q: Query, mapping: dict[str, Query]) -> Query:
    """Replace each BaseRelation leaf by the query it maps to (if any)."""
    if isinstance(q, BaseRelation):
        return mapping.get(q.name, q)
    if isinstance(q, SingletonConst):
        return q
    if isinstance(q, Selection):
        return Selection(q.cond, rewrite_base_relations(q.input, mapping))
    if isinstance(q, Projection):
        return Projection(q.columns, rewrite_base_relations(q.input, mapping))
    if isinstance(q, Union):
        return Union(rewrite_base_relations(q.left, mapping),
                     rewrite_base_relations(q.right, mapping))
    if isinstance(q, Difference):
        return Difference(rewrite_base_relations(q.left, mapping),
                          rewrite_base_relations(q.right, mapping))
    if isinstance(q, Join):
        return Join(rewrite_base_relations(q.left, mapping),
                    rewrite_base_relations(q.right, mapping), q.pairs)
    raise SchemaError(f"not a query node: {q!r}")


# ---------------------------------------------------------------------------
# Signed deltas


@dataclass(frozen=True)
class SignedDelta:
    """Signed symmetric difference: minus-rows only in the first operand,
    plus-rows only in the second."""

    minus: frozenset
    plus: frozenset

    def is_empty(self) -> bool:
        return not self.minus and not self.plus

    def negate(self) -> "SignedDelta":
        return SignedDelta(self.plus, self.minus)

    def __len__(self) -> int:
        return len(self.minus) + len(self.plus)


def delta(r1: frozenset, r2: frozenset) -> SignedDelta:
    """Delta of two relation states (native set implementation)."""
    return SignedDelta(minus=frozenset(r1 - r2), plus=frozenset(r2 - r1))


def delta_query(r1: frozenset, r2: frozenset, schema: Schema, db: Database) -> SignedDelta:
    """Delta computed as a relational-algebra query: sign columns appended
    by projections over the two differences.  Cross-checks `delta`."""
    from .expressions import Attr, Const

    tmp = db
    s1 = Schema("__delta_left", schema.attrs)
    s2 = Schema("__delta_right", schema.attrs)
    tmp = tmp.with_new_relation(s1, list(r1)).with_new_relation(s2, list(r2))
    cols = tuple((a, Attr(a)) for a in schema.names)
    minus_q = Projection(cols + (("__sign", Const("-")),),
                         Difference(BaseRelation("__delta_left"), BaseRelation("__delta_right")))
    plus_q = Projection(cols + (("__sign", Const("+")),),
                        Difference(BaseRelation("__delta_right"), BaseRelation("__delta_left")))
    rows = eval_query(Union(minus_q, plus_q), tmp)
    minus = frozenset(r[:-1] for r in rows if r[-1] == "-")
    plus = frozenset(r[:-1] for r in rows if r[-1] == "+")
    return SignedDelta(minus=minus, plus=plus)


def _row_key(row: tuple) -> tuple:
    from .values import render_value

    return tuple(render_value(v) for v in row)


def sorted_delta_rows(d: SignedDelta) -> list[tuple[str, tuple]]:
    """Deterministic row ordering: sign ('+' before '-'), then rendered bytes."""
    out = [("+", r) for r in d.plus] + [("-", r) for r in d.minus]
    out.sort(key=lambda sr: (sr[0], _row_key(sr[1])))
    return out
