"""Reenactment: simulate update histories as relational-algebra queries.

A single statement over relation R reenacts as:

    update(Set, c)  ->  project each attribute Ai to CASE WHEN c THEN ei ELSE Ai
    delete(c)       ->  select NOT c
    insert tuple t  ->  R union {t}
    insert query Q  ->  R union Q
    noop            ->  R unchanged

A history reenacts per relation by substituting each statement's input
reference with the query built so far; statements over other relations
contribute to their own relation's query only.  Insert-query statements
read the other relations at the version current when they ran, so their
base references are rewritten to those relations' queries at that point.
"""
from __future__ import annotations

from .algebra import (
    BaseRelation,
    Projection,
    Query,
    Selection,
    SingletonConst,
    Union,
    rewrite_base_relations,
)
from .data import Database
from .errors import SchemaError
from .expressions import Attr, Case, Not, Schema
from .statements import (
    Delete,
    History,
    InsertQuery,
    InsertTuple,
    NoOp,
    Statement,
    Update,
)


def reenact_statement(u: Statement, schema: Schema) -> Query:
    """Reenactment query for one statement, reading its target relation."""
    base = BaseRelation(u.relation)
    if isinstance(u, Update):
        cols = tuple(
            (name, Attr(name) if e == Attr(name) else Case(u.cond, e, Attr(name)))
            for (name, _), e in zip(schema.attrs, u.set_list(schema))
        )
        return Projection(cols, base)
    if isinstance(u, Delete):
        return Selection(Not(u.cond), base)
    if isinstance(u, InsertTuple):
        return Union(base, SingletonConst(schema, tuple(u.values)))
    if isinstance(u, InsertQuery):
        return Union(base, u.query)
    if isinstance(u, NoOp):
        return base
    raise SchemaError(f"not a statement: {u!r}")


def _apply_over(u: Statement, schema: Schema, current: Query,
                snapshots: dict[str, Query]) -> Query:
    """Statement query with its inputs replaced by the current per-relation
    queries."""
    q = reenact_statement(u, schema)
    mapping = dict(snapshots)
    mapping[u.relation] = current
    return rewrite_base_relations(q, mapping)


def reenact_history(h: History, rel: str, db: Database) -> Query:
    """Per-relation reenactment query for a whole history."""
    current: dict[str, Query] = {}

    def cur(name: str) -> Query:
        return current.get(name, BaseRelation(name))

    for u in h.statements:
        schema = db.schema(u.relation)
        snapshots = {name: cur(name) for name in db.relation_names()}
        current[u.relation] = _apply_over(u, schema, cur(u.relation), snapshots)
    return cur(rel)


def split_inserts(h: History, rel: str, db: Database) -> tuple[Query, Query | None]:
    """Split a reenactment query into a part over the stored relation and a
    part over constant inserted tuples.

    The left query reenacts the history with InsertTuple statements on
    `rel` removed; the right query is the union, over each such insert, of
    the remaining suffix machinery applied to the inserted singleton.
    Union(left, right) evaluates identically to reenact_history(h, rel).
    """
    schema = db.schema(rel)
    if not can_split(h, rel):
        return reenact_history(h, rel, db), None
    kept = [u for u in h.statements
            if not (isinstance(u, InsertTuple) and u.relation == rel)]
    left = reenact_history(History(tuple(kept), h.ident), rel, db)
    return left, insert_branches(h, rel, db)


def can_split(h: History, rel: str) -> bool:
    """Whether constant inserts on `rel` may be pulled out of the plan.

    An insert-query observing `rel` (even transitively through relations it
    previously fed) would see the inserted tuples; pulling them out of the
    shared plan would lose that, so such histories stay in one piece.
    """
    from .algebra import query_base_relations

    tainted = {rel}
    for u in h.statements:
        if isinstance(u, InsertQuery) and (query_base_relations(u.query) & tainted):
            if u.relation == rel:
                return False
            tainted.add(u.relation)
    return True


def insert_branches(h: History, rel: str, db: Database) -> Query | None:
    """Union of per-insert branches: each inserted singleton run through the
    update/delete machinery of its suffix.  None when `rel` has no constant
    inserts."""
    schema = db.schema(rel)
    branches: list[Query] = []
    stmts = h.statements
    for i, u in enumerate(stmts):
        if not (isinstance(u, InsertTuple) and u.relation == rel):
            continue
        q: Query = SingletonConst(schema, tuple(u.values))
        for v in stmts[i + 1:]:
            if v.relation != rel or isinstance(v, (InsertTuple, InsertQuery, NoOp)):
                continue  # later inserts are covered by their own branch / left part
            if isinstance(v, Update):
                cols = tuple(
                    (name, Attr(name) if e == Attr(name) else Case(v.cond, e, Attr(name)))
                    for (name, _), e in zip(schema.attrs, v.set_list(schema))
                )
                q = Projection(cols, q)
            elif isinstance(v, Delete):
                q = Selection(Not(v.cond), q)
        branches.append(q)

    if not branches:
        return None
    right = branches[0]
    for b in branches[1:]:
        right = Union(right, b)
    return right
