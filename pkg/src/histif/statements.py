"""Update statements, histories, and modifications.

Statement semantics over set-semantics relations:

    upd(Set, c)(R) = { Set(t) | t in R, c(t) } | { t | t in R, not c(t) }
    del(c)(R)      = { t | t in R, not c(t) }
    ins(t)(R)      = R | { t }
    ins(Q)(R)      = R | Q(D)

A no-op statement behaves exactly like del(false).  Histories are 1-based
sequences of statements; modifications edit a history and are normalized
into same-position replacements by padding both histories with no-ops.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union as TUnion

from . import algebra
from .data import Database, check_row
from .errors import EngineError, ExprTypeError, SchemaError
from .expressions import (
    Attr,
    Cond,
    Const,
    Expr,
    FALSE,
    Schema,
    compile_predicate,
    compile_projector,
    infer_type,
    node_from_json,
    node_to_json,
)
from .values import Dec, T_DEC, T_INT, value_from_json, value_to_json


class ModificationError(EngineError):
    """Modification list refers to an invalid position."""


@dataclass(frozen=True)
class Update:
    relation: str
    assignments: tuple[tuple[str, Expr], ...]
    cond: Cond

    def set_list(self, schema: Schema) -> tuple[Expr, ...]:
        """Expand sparse assignments to the full arity of the schema,
        filling unmentioned attributes with identity references."""
        by_name = dict(self.assignments)
        if len(by_name) != len(self.assignments):
            raise SchemaError(f"attribute assigned twice in update on {self.relation}")
        out = []
        for name, t in schema.attrs:
            e = by_name.pop(name, None)
            if e is None:
                out.append(Attr(name))
            elif t == T_DEC and isinstance(e, Const) and isinstance(e.value, int) \
                    and not isinstance(e.value, bool):
                out.append(Const(Dec.from_int(e.value)))
            else:
                out.append(e)
        if by_name:
            raise SchemaError(f"unknown attributes in update: {sorted(by_name)}")
        return tuple(out)


@dataclass(frozen=True)
class Delete:
    relation: str
    cond: Cond


@dataclass(frozen=True)
class InsertTuple:
    relation: str
    values: tuple


@dataclass(frozen=True)
class InsertQuery:
    relation: str
    query: "algebra.Query"


@dataclass(frozen=True)
class NoOp:
    relation: str


Statement = TUnion[Update, Delete, InsertTuple, InsertQuery, NoOp]


def condition_of(u: Statement) -> Optional[Cond]:
    if isinstance(u, (Update, Delete)):
        return u.cond
    if isinstance(u, NoOp):
        return FALSE
    return None


def is_tuple_independent(u: Statement) -> bool:
    """Statements that process each input tuple individually; everything
    except inserts with queries."""
    return not isinstance(u, InsertQuery)


def target_relation(u: Statement) -> str:
    return u.relation


def relations_read(u: Statement) -> set[str]:
    out = {u.relation}
    if isinstance(u, InsertQuery):
        out |= algebra.query_base_relations(u.query)
    return out


def check_statement(u: Statement, db: Database) -> None:
    """Bind-time validation: relations exist, expressions are well-typed."""
    schema = db.schema(u.relation)
    if isinstance(u, Update):
        infer_type(u.cond, schema)
        for e, (name, t) in zip(u.set_list(schema), schema.attrs):
            et = infer_type(e, schema)
            if et is not None and et != t and not (t == T_DEC and et == T_INT):
                raise ExprTypeError(
                    f"update writes {et} into {u.relation}.{name}:{t}"
                )
    elif isinstance(u, Delete):
        infer_type(u.cond, schema)
    elif isinstance(u, InsertTuple):
        check_row(u.values, schema)
    elif isinstance(u, InsertQuery):
        qs = algebra.output_schema(u.query, db)
        if qs.types != schema.types:
            raise SchemaError(
                f"insert query schema {qs.attrs} does not match {schema.attrs}"
            )


def apply_statement(u: Statement, db: Database) -> Database:
    """Execute one statement, returning the new database state."""
    check_statement(u, db)
    schema = db.schema(u.relation)
    rel = db.relation(u.relation)
    if isinstance(u, Update):
        pred = compile_predicate(u.cond, schema)
        proj = compile_projector(u.set_list(schema), schema)
        rows = frozenset(proj(t) if pred(t) else t for t in rel)
        return db.with_relation(u.relation, rows)
    if isinstance(u, Delete):
        pred = compile_predicate(u.cond, schema)
        return db.with_relation(u.relation, frozenset(t for t in rel if not pred(t)))
    if isinstance(u, InsertTuple):
        return db.with_relation(u.relation, rel | {tuple(u.values)})
    if isinstance(u, InsertQuery):
        return db.with_relation(u.relation, rel | algebra.eval_query(u.query, db))
    if isinstance(u, NoOp):
        return db
    raise SchemaError(f"not a statement: {u!r}")


@dataclass(frozen=True)
class History:
    statements: tuple[Statement, ...]
    ident: str = "history"

    def __len__(self) -> int:
        return len(self.statements)

    def at(self, pos: int) -> Statement:
        """1-based access."""
        return self.statements[pos - 1]

    def prefix(self, i: int) -> "History":
        return History(self.statements[:i], self.ident)

    def slice(self, positions: Sequence[int]) -> "History":
        """Restrict to a sorted set of 1-based positions, preserving order."""
        keep = sorted(set(positions))
        return History(tuple(self.statements[p - 1] for p in keep), self.ident)


def run_history(h: History, db: Database, collect: bool = False):
    """Evaluate a history; with collect=True also return every intermediate
    version D_1 .. D_n (D_0 is the input)."""
    versions = [db]
    cur = db
    for u in h.statements:
        cur = apply_statement(u, cur)
        if collect:
            versions.append(cur)
    return (cur, versions) if collect else cur


# ---------------------------------------------------------------------------
# Modifications


@dataclass(frozen=True)
class Replace:
    pos: int
    stmt: Statement


@dataclass(frozen=True)
class InsertStmt:
    pos: int
    stmt: Statement


@dataclass(frozen=True)
class DeleteStmt:
    pos: int


Modification = TUnion[Replace, InsertStmt, DeleteStmt]


@dataclass(frozen=True)
class NormalizedReplace:
    """Same-position pair after padding: `old` runs in H, `new` in H[M]."""

    pos: int
    old: Statement
    new: Statement


def _compatible(a: Statement, b: Statement) -> bool:
    if a.relation != b.relation:
        return False
    if isinstance(a, NoOp) or isinstance(b, NoOp):
        return True
    pairs = ((Update, Update), (Delete, Delete), (InsertTuple, InsertTuple),
             (InsertQuery, InsertQuery))
    return any(isinstance(a, ta) and isinstance(b, tb) for ta, tb in pairs)


def normalize_mods(h: History, mods: Sequence[Modification]
                   ) -> tuple[History, History, list[NormalizedReplace]]:
    """Rewrite a modification list into same-position replacements.

    Inserted statements become NoOp->u replacements against a padded
    original; deleted statements become u->NoOp; a replacement that changes
    statement type or target relation is split into a delete plus an insert
    at two adjacent padded positions.  Positions refer to the history state
    after all earlier modifications in the list have been applied.
    """
    orig: list[Statement] = list(h.statements)
    mod: list[Statement] = list(h.statements)

    def check_pos(pos: int, insert: bool = False) -> None:
        limit = len(mod) + 1 if insert else len(mod)
        if not 1 <= pos <= limit:
            raise ModificationError(f"position {pos} out of range [1,{limit}]")

    for m in mods:
        if isinstance(m, InsertStmt):
            check_pos(m.pos, insert=True)
            orig.insert(m.pos - 1, NoOp(m.stmt.relation))
            mod.insert(m.pos - 1, m.stmt)
        elif isinstance(m, DeleteStmt):
            check_pos(m.pos)
            mod[m.pos - 1] = NoOp(mod[m.pos - 1].relation)
        elif isinstance(m, Replace):
            check_pos(m.pos)
            if _compatible(mod[m.pos - 1], m.stmt):
                mod[m.pos - 1] = m.stmt
            else:
                old_rel = mod[m.pos - 1].relation
                mod[m.pos - 1] = NoOp(old_rel)
                orig.insert(m.pos, NoOp(m.stmt.relation))
                mod.insert(m.pos, m.stmt)
        else:
            raise ModificationError(f"not a modification: {m!r}")

    replaces = [
        NormalizedReplace(i + 1, o, n)
        for i, (o, n) in enumerate(zip(orig, mod))
        if o != n
    ]
    return (History(tuple(orig), h.ident),
            History(tuple(mod), h.ident + "[M]"),
            replaces)


# ---------------------------------------------------------------------------
# JSON serialization


def statement_to_json(u: Statement) -> dict:
    if isinstance(u, Update):
        return {"kind": "update", "relation": u.relation,
                "set": [{"attr": a, "expr": node_to_json(e)} for a, e in u.assignments],
                "cond": node_to_json(u.cond)}
    if isinstance(u, Delete):
        return {"kind": "delete", "relation": u.relation, "cond": node_to_json(u.cond)}
    if isinstance(u, InsertTuple):
        return {"kind": "insert", "relation": u.relation,
                "values": [value_to_json(v) for v in u.values]}
    if isinstance(u, InsertQuery):
        return {"kind": "insert_query", "relation": u.relation,
                "query": _query_to_json(u.query)}
    if isinstance(u, NoOp):
        return {"kind": "noop", "relation": u.relation}
    raise SchemaError(f"not a statement: {u!r}")


def statement_from_json(obj: dict) -> Statement:
    kind = obj["kind"]
    if kind == "update":
        return Update(obj["relation"],
                      tuple((s["attr"], node_from_json(s["expr"])) for s in obj["set"]),
                      node_from_json(obj["cond"]))
    if kind == "delete":
        return Delete(obj["relation"], node_from_json(obj["cond"]))
    if kind == "insert":
        return InsertTuple(obj["relation"],
                           tuple(value_from_json(v) for v in obj["values"]))
    if kind == "insert_query":
        return InsertQuery(obj["relation"], _query_from_json(obj["query"]))
    if kind == "noop":
        return NoOp(obj["relation"])
    raise ValueError(f"unknown statement kind {kind!r}")


def _query_to_json(q: "algebra.Query") -> dict:
    if isinstance(q, algebra.BaseRelation):
        return {"kind": "base", "name": q.name}
    if isinstance(q, algebra.SingletonConst):
        return {"kind": "singleton", "schema": q.schema.to_json(),
                "row": [value_to_json(v) for v in q.row]}
    if isinstance(q, algebra.Selection):
        return {"kind": "select", "cond": node_to_json(q.cond),
                "input": _query_to_json(q.input)}
    if isinstance(q, algebra.Projection):
        return {"kind": "project",
                "columns": [{"name": n, "expr": node_to_json(e)} for n, e in q.columns],
                "input": _query_to_json(q.input)}
    if isinstance(q, algebra.Union):
        return {"kind": "union", "left": _query_to_json(q.left),
                "right": _query_to_json(q.right)}
    if isinstance(q, algebra.Difference):
        return {"kind": "difference", "left": _query_to_json(q.left),
                "right": _query_to_json(q.right)}
    if isinstance(q, algebra.Join):
        return {"kind": "join", "left": _query_to_json(q.left),
                "right": _query_to_json(q.right), "pairs": [list(p) for p in q.pairs]}
    raise SchemaError(f"not a query node: {q!r}")


def _query_from_json(obj: dict) -> "algebra.Query":
    kind = obj["kind"]
    if kind == "base":
        return algebra.BaseRelation(obj["name"])
    if kind == "singleton":
        return algebra.SingletonConst(Schema.from_json(obj["schema"]),
                                      tuple(value_from_json(v) for v in obj["row"]))
    if kind == "select":
        return algebra.Selection(node_from_json(obj["cond"]), _query_from_json(obj["input"]))
    if kind == "project":
        return algebra.Projection(
            tuple((c["name"], node_from_json(c["expr"])) for c in obj["columns"]),
            _query_from_json(obj["input"]))
    if kind == "union":
        return algebra.Union(_query_from_json(obj["left"]), _query_from_json(obj["right"]))
    if kind == "difference":
        return algebra.Difference(_query_from_json(obj["left"]), _query_from_json(obj["right"]))
    if kind == "join":
        return algebra.Join(_query_from_json(obj["left"]), _query_from_json(obj["right"]),
                            tuple((p[0], p[1]) for p in obj["pairs"]))
    raise ValueError(f"unknown query kind {kind!r}")


def modification_to_json(m: Modification) -> dict:
    if isinstance(m, Replace):
        return {"op": "replace", "pos": m.pos, "statement": statement_to_json(m.stmt)}
    if isinstance(m, InsertStmt):
        return {"op": "insert", "pos": m.pos, "statement": statement_to_json(m.stmt)}
    if isinstance(m, DeleteStmt):
        return {"op": "delete", "pos": m.pos}
    raise ModificationError(f"not a modification: {m!r}")


def modification_from_json(obj: dict) -> Modification:
    op = obj["op"]
    if op == "replace":
        return Replace(int(obj["pos"]), statement_from_json(obj["statement"]))
    if op == "insert":
        return InsertStmt(int(obj["pos"]), statement_from_json(obj["statement"]))
    if op == "delete":
        return DeleteStmt(int(obj["pos"]))
    raise ValueError(f"unknown modification op {op!r}")
