"""Random instance generators shared by the property-test suites."""
from __future__ import annotations

import random

from histif import algebra
from histif.data import Database, make_database
from histif.expressions import (
    And,
    Arith,
    Attr,
    Case,
    Cmp,
    Cond,
    Const,
    Expr,
    Not,
    Or,
    Schema,
    TRUE,
)
from histif.statements import (
    Delete,
    History,
    InsertQuery,
    InsertTuple,
    NoOp,
    Statement,
    Update,
)

R_SCHEMA = Schema("R", (("A", "int"), ("B", "int")))
S_SCHEMA = Schema("S", (("X", "int"), ("Y", "int")))
KEYED_SCHEMA = Schema("R", (("ID", "int"), ("A", "int"), ("B", "int")))

DOMAIN = [0, 1, 2, 3, 4]
CMPS = ["=", "!=", "<", "<=", ">", ">="]


def gen_db(rng: random.Random, max_rows: int = 8) -> Database:
    r_rows = {(rng.choice(DOMAIN), rng.choice(DOMAIN))
              for _ in range(rng.randint(0, max_rows))}
    s_rows = {(rng.choice(DOMAIN), rng.choice(DOMAIN))
              for _ in range(rng.randint(0, max_rows))}
    return make_database((R_SCHEMA, list(r_rows)), (S_SCHEMA, list(s_rows)))


def gen_keyed_db(rng: random.Random, max_rows: int = 8) -> Database:
    n = rng.randint(1, max_rows)
    rows = [(i + 1, rng.choice(DOMAIN), rng.choice(DOMAIN)) for i in range(n)]
    return make_database((KEYED_SCHEMA, rows))


def gen_cond(rng: random.Random, attrs: tuple[str, ...], depth: int = 1) -> Cond:
    if depth > 0 and rng.random() < 0.4:
        kind = rng.choice(["and", "or", "not"])
        if kind == "not":
            return Not(gen_cond(rng, attrs, depth - 1))
        a, b = gen_cond(rng, attrs, depth - 1), gen_cond(rng, attrs, depth - 1)
        return And(a, b) if kind == "and" else Or(a, b)
    return Cmp(rng.choice(CMPS), Attr(rng.choice(attrs)), Const(rng.choice(DOMAIN)))


def gen_expr(rng: random.Random, attrs: tuple[str, ...], depth: int = 1) -> Expr:
    roll = rng.random()
    if roll < 0.35:
        return Const(rng.choice(DOMAIN))
    if roll < 0.7 or depth == 0:
        return Attr(rng.choice(attrs))
    if roll < 0.9:
        return Arith(rng.choice(["+", "-"]),
                     gen_expr(rng, attrs, 0), gen_expr(rng, attrs, 0))
    return Case(gen_cond(rng, attrs, 0), gen_expr(rng, attrs, 0), gen_expr(rng, attrs, 0))


def gen_insert_query(rng: random.Random, target: Schema, source: Schema) -> InsertQuery:
    cols = tuple(
        (name, gen_expr(rng, source.names, depth=1))
        for name, _ in target.attrs
    )
    q: algebra.Query = algebra.BaseRelation(source.relation)
    if rng.random() < 0.6:
        q = algebra.Selection(gen_cond(rng, source.names), q)
    out: algebra.Query = algebra.Projection(cols, q)
    if rng.random() < 0.25:
        other = tuple((name, gen_expr(rng, source.names, depth=0)) for name, _ in target.attrs)
        out = algebra.Union(out, algebra.Projection(other, algebra.BaseRelation(source.relation)))
    return InsertQuery(target.relation, out)


def gen_statement(rng: random.Random, schema: Schema,
                  kinds: tuple[str, ...] = ("update", "delete", "insert", "noop"),
                  keyed: bool = False, fresh_ids=None) -> Statement:
    attrs = schema.names
    writable = tuple(a for a in attrs if not (keyed and a == "ID"))
    kind = rng.choice(kinds)
    if kind == "update":
        n_assign = rng.randint(1, 2)
        assigns = []
        for a in rng.sample(writable, min(n_assign, len(writable))):
            assigns.append((a, gen_expr(rng, attrs)))
        return Update(schema.relation, tuple(assigns), gen_cond(rng, attrs))
    if kind == "delete":
        return Delete(schema.relation, gen_cond(rng, attrs))
    if kind == "insert":
        vals = [rng.choice(DOMAIN) for _ in attrs]
        if keyed:
            vals[0] = next(fresh_ids)
        return InsertTuple(schema.relation, tuple(vals))
    return NoOp(schema.relation)


def gen_history(rng: random.Random, n: int,
                kinds: tuple[str, ...] = ("update", "delete", "insert", "noop"),
                with_insert_query: bool = False, keyed: bool = False) -> History:
    schema = KEYED_SCHEMA if keyed else R_SCHEMA
    fresh = iter(range(100, 100 + n + 1))
    stmts: list[Statement] = []
    for _ in range(n):
        if with_insert_query and rng.random() < 0.2:
            stmts.append(gen_insert_query(rng, R_SCHEMA, S_SCHEMA))
        else:
            stmts.append(gen_statement(rng, schema, kinds, keyed, fresh))
    return History(tuple(stmts))
