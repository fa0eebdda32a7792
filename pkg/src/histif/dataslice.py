"""Data slicing: filter reenactment inputs down to tuples that can matter.

Every tuple in the answer of a what-if query descends from a tuple that
some modified statement treats differently in the two histories.  Each
modification therefore yields a condition at its position; pushing that
condition down through the preceding statements produces a filter over the
base relations.  Filters from multiple modifications combine by
disjunction, separately for the original-history side and the
modified-history side.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from . import algebra
from .data import Database
from .errors import EngineError
from .expressions import (
    And,
    Attr,
    Bool,
    Case,
    Cmp,
    Cond,
    FALSE,
    IsNull,
    Not,
    Or,
    Schema,
    TRUE,
    attributes_of,
    node_count,
    or_all,
    simplify,
    substitute,
)
from .statements import (
    Delete,
    History,
    InsertQuery,
    InsertTuple,
    NoOp,
    NormalizedReplace,
    Statement,
    Update,
)

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 10_000


class PushdownError(EngineError):
    """Condition push-down hit an unsupported query operator."""


@dataclass(frozen=True)
class SlicingCondition:
    """Fully pushed per-relation filters for both history sides."""

    h_side: dict[str, Cond]
    hm_side: dict[str, Cond]
    degraded: tuple[str, ...] = ()  # relations where the node budget tripped

    def for_side(self, side: str) -> dict[str, Cond]:
        return self.h_side if side == "h" else self.hm_side


# ---------------------------------------------------------------------------
# Condition push-down through queries (qpush)


def _to_nnf(c: Cond, negate: bool = False) -> Cond:
    if isinstance(c, Not):
        return _to_nnf(c.cond, not negate)
    if isinstance(c, And):
        l, r = _to_nnf(c.left, negate), _to_nnf(c.right, negate)
        return Or(l, r) if negate else And(l, r)
    if isinstance(c, Or):
        l, r = _to_nnf(c.left, negate), _to_nnf(c.right, negate)
        return And(l, r) if negate else Or(l, r)
    if isinstance(c, Bool):
        return Bool(not c.value) if negate else c
    return Not(c) if negate else c


def _restrict_to_attrs(c: Cond, known: set[str], renames: dict[str, str]) -> Cond:
    """Over-approximate a condition by the attributes of one join side.

    Attributes are first renamed along the equi-join pairs; any remaining
    atom that still references an unknown attribute is weakened to TRUE.
    Works on negation normal form so weakening atoms stays sound.
    """
    c = substitute(c, [(Attr(a), Attr(b)) for a, b in renames.items()])
    c = _to_nnf(c)

    def walk(n: Cond) -> Cond:
        if isinstance(n, And):
            return And(walk(n.left), walk(n.right))
        if isinstance(n, Or):
            return Or(walk(n.left), walk(n.right))
        if attributes_of(n) - known:
            return TRUE
        return n

    return walk(c)


def qpush(c: Cond, q: algebra.Query, rel: str, db: Database) -> Cond:
    """Push a selection condition through a query down to base relation `rel`.

    The result holds for every `rel` tuple that can contribute to a query
    answer satisfying `c` (an over-approximation for join inputs).
    """
    if isinstance(q, algebra.BaseRelation):
        return c if q.name == rel else TRUE
    if isinstance(q, algebra.SingletonConst):
        return FALSE  # constant relations have no base tuples
    if isinstance(q, algebra.Selection):
        return qpush(simplify(And(c, q.cond)), q.input, rel, db)
    if isinstance(q, algebra.Projection):
        pairs = [(Attr(name), e) for name, e in q.columns]
        return qpush(simplify(substitute(c, pairs)), q.input, rel, db)
    if isinstance(q, algebra.Union):
        ls = algebra.output_schema(q.left, db)
        rs = algebra.output_schema(q.right, db)
        renamed = substitute(
            c, [(Attr(a), Attr(b)) for a, b in zip(ls.names, rs.names)]
        )
        branches = []
        if rel in algebra.query_base_relations(q.left):
            branches.append(qpush(c, q.left, rel, db))
        if rel in algebra.query_base_relations(q.right):
            branches.append(qpush(renamed, q.right, rel, db))
        return simplify(or_all(branches)) if branches else TRUE
    if isinstance(q, algebra.Join):
        ls = algebra.output_schema(q.left, db)
        rs = algebra.output_schema(q.right, db)
        branches = []
        if rel in algebra.query_base_relations(q.left):
            renames = {b: a for a, b in q.pairs}
            restricted = _restrict_to_attrs(c, set(ls.names), renames)
            branches.append(qpush(simplify(restricted), q.left, rel, db))
        if rel in algebra.query_base_relations(q.right):
            renames = {a: b for a, b in q.pairs}
            restricted = _restrict_to_attrs(c, set(rs.names), renames)
            branches.append(qpush(simplify(restricted), q.right, rel, db))
        return simplify(or_all(branches)) if branches else TRUE
    raise PushdownError(f"unsupported operator in insert query: {type(q).__name__}")


# ---------------------------------------------------------------------------
# Per-modification conditions (at the modification's position)


def _insert_tuple_match(u: InsertTuple, schema: Schema) -> Cond:
    parts = []
    for (name, _), v in zip(schema.attrs, u.values):
        parts.append(IsNull(Attr(name)) if v is None else Cmp("=", Attr(name), _const(v)))
    out: Cond = TRUE
    for p in parts:
        out = p if out == TRUE else And(out, p)
    return out


def _const(v):
    from .expressions import Const

    return Const(v)


def _history_reads_via_insert_query(histories: tuple[History, ...], rel: str) -> bool:
    for h in histories:
        for u in h.statements:
            if isinstance(u, InsertQuery) and rel in algebra.query_base_relations(u.query):
                return True
    return False


def mod_condition(m: NormalizedReplace, db: Database,
                  histories: tuple[History, ...] = ()) -> SlicingCondition:
    """Unpushed slicing conditions for one normalized replacement.

    A no-op partner contributes FALSE for its own component.  Delete pairs
    use the simplified asymmetric forms unless some insert-query in the
    histories reads the relation, in which case the filters must agree on
    both sides and the symmetric form is used.
    """
    old, new = m.old, m.new
    rel = old.relation
    if old.relation != new.relation:
        raise EngineError(f"modification at {m.pos} is not normalized")

    def cond_of(u: Statement) -> Cond:
        if isinstance(u, (Update, Delete)):
            return u.cond
        return FALSE  # NoOp partner

    rep = new if isinstance(old, NoOp) else old
    if isinstance(rep, Update):
        both = simplify(Or(cond_of(old), cond_of(new)))
        return SlicingCondition({rel: both}, {rel: both})
    if isinstance(rep, Delete):
        theta_old, theta_new = cond_of(old), cond_of(new)
        if _history_reads_via_insert_query(histories, rel):
            sym = simplify(Or(And(theta_old, Not(theta_new)),
                              And(Not(theta_old), theta_new)))
            return SlicingCondition({rel: sym}, {rel: sym})
        return SlicingCondition({rel: simplify(theta_new)}, {rel: simplify(theta_old)})
    if isinstance(rep, InsertTuple):
        schema = db.schema(rel)
        match = []
        for u in (old, new):
            if isinstance(u, InsertTuple):
                match.append(_insert_tuple_match(u, schema))
        both = simplify(or_all(match))
        # inserted tuples flow through the insert branch; base tuples only
        # matter where they could coincide with one of the inserted rows
        return SlicingCondition({rel: both}, {rel: both})
    if isinstance(rep, InsertQuery):
        conds: dict[str, Cond] = {}
        for u in (old, new):
            if not isinstance(u, InsertQuery):
                continue
            for src in sorted(algebra.query_base_relations(u.query)):
                pushed = qpush(TRUE, u.query, src, db)
                conds[src] = simplify(Or(conds[src], pushed)) if src in conds else pushed
        return SlicingCondition(dict(conds), dict(conds))
    raise EngineError(f"modification pair not supported: {old!r} / {new!r}")


# ---------------------------------------------------------------------------
# Push-down through history prefixes


def push_through_statement(c: Cond, u: Statement, rel: str, db: Database) -> Cond:
    """Push a condition for relation `rel` backwards through one statement.

    Updates substitute each written attribute with its conditional value;
    deletes, constant inserts, and no-ops leave the condition unchanged;
    an insert-query on `rel` weakens the condition with the tuples the
    query may have produced.  Statements over other relations never change
    the condition for `rel`.
    """
    if u.relation != rel:
        return c
    if isinstance(u, Update):
        schema = db.schema(rel)
        pairs = []
        for (name, _), e in zip(schema.attrs, u.set_list(schema)):
            if e == Attr(name):
                continue
            pairs.append((Attr(name), Case(u.cond, e, Attr(name))))
        return simplify(substitute(c, pairs)) if pairs else c
    if isinstance(u, (Delete, NoOp, InsertTuple)):
        return c
    if isinstance(u, InsertQuery):
        if rel in algebra.query_base_relations(u.query):
            return simplify(Or(c, qpush(c, u.query, rel, db)))
        return c
    raise EngineError(f"not a statement: {u!r}")


def _push_step(conds: dict[str, Cond], u: Statement, db: Database) -> dict[str, Cond]:
    out = dict(conds)
    if u.relation in conds:
        out[u.relation] = push_through_statement(conds[u.relation], u, u.relation, db)
        if isinstance(u, InsertQuery):
            # source relations of the query inherit the target's condition
            for src in sorted(algebra.query_base_relations(u.query)):
                if src == u.relation:
                    continue
                pushed = qpush(conds[u.relation], u.query, src, db)
                out[src] = simplify(Or(out[src], pushed)) if src in out else pushed
    return out


def data_slice(h: History, hm: History, replaces: list[NormalizedReplace],
               db: Database, node_budget: int = DEFAULT_NODE_BUDGET) -> SlicingCondition:
    """Fully pushed per-relation filters for both sides.

    For each side, each modification's condition is pushed through that
    side's prefix and the results are combined by disjunction.  A relation
    whose condition grows past `node_budget` AST nodes degrades to TRUE
    (no filtering) and is reported in `degraded`.
    """
    sides = {"h": h, "hm": hm}
    totals: dict[str, dict[str, Cond]] = {"h": {}, "hm": {}}
    degraded: set[str] = set()

    for side, hist in sides.items():
        for m in replaces:
            conds = dict(mod_condition(m, db, (h, hm)).for_side(side))
            for pos in range(m.pos - 1, 0, -1):
                conds = _push_step(conds, hist.at(pos), db)
                for rel, c in conds.items():
                    if node_count(c) > node_budget:
                        conds[rel] = TRUE
                        degraded.add(rel)
                        log.warning(
                            "data slicing condition for %s exceeded %d nodes; "
                            "disabled for that relation", rel, node_budget,
                        )
            acc = totals[side]
            for rel, c in conds.items():
                acc[rel] = simplify(Or(acc[rel], c)) if rel in acc else c

    all_rels = set(totals["h"]) | set(totals["hm"])
    for side in ("h", "hm"):
        for rel in all_rels:
            totals[side].setdefault(rel, FALSE)
    return SlicingCondition(totals["h"], totals["hm"], tuple(sorted(degraded)))


def apply_filters(q: algebra.Query, conds: dict[str, Cond]) -> algebra.Query:
    """Inject selection filters beneath every base relation of a plan.

    Relations without a condition get FALSE: no modification can make any
    of their tuples relevant to the delta.
    """
    mapping = {
        name: algebra.Selection(conds.get(name, FALSE), algebra.BaseRelation(name))
        for name in algebra.query_base_relations(q)
    }
    return algebra.rewrite_base_relations(q, mapping)
