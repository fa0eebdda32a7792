"""Virtual C-tables: symbolic databases with possible-world semantics.

A VC-table holds tuples whose attribute values are symbolic expressions
over variables, each tuple guarded by a local condition; the database
carries a global condition.  An assignment of values to variables yields a
possible world when the global condition holds: the world contains the
evaluated tuples whose local conditions hold.

Executing a statement symbolically keeps the table the same size: updates
introduce one fresh variable per written attribute whose value is pinned
by a conditional equation added to the global condition (attributes with
identity set-expressions keep their variable); deletes strengthen local
conditions; constant inserts add a concrete tuple.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .data import Database, make_database
from .errors import EngineError
from .expressions import (
    And,
    Attr,
    Case,
    Cmp,
    Cond,
    Const,
    Expr,
    FALSE,
    Not,
    Schema,
    Sym,
    TRUE,
    and_all,
    eval_cond_env,
    eval_expr_env,
    or_all,
    simplify,
    substitute,
)
from .statements import Delete, InsertQuery, InsertTuple, NoOp, Statement, Update
from .values import T_DEC, T_INT, T_TEXT, Value


class SymbolicError(EngineError):
    """Statement not supported by symbolic execution."""


@dataclass(frozen=True)
class SymVar:
    name: str
    type: str


@dataclass(frozen=True)
class VCTuple:
    exprs: tuple[Expr, ...]
    local: Cond = TRUE


@dataclass(frozen=True)
class VCTable:
    schema: Schema
    tuples: tuple[VCTuple, ...]


@dataclass(frozen=True)
class VCDatabase:
    tables: dict[str, VCTable]
    global_cond: Cond = TRUE
    variables: dict[str, SymVar] = field(default_factory=dict)

    def table(self, rel: str) -> VCTable:
        return self.tables[rel]


def version0_name(attr: str) -> str:
    return f"x0_{attr}"


def fresh_name(side: str, attr: str, index: int, tuple_idx: int = 0) -> str:
    base = f"x_{side}_{attr}_{index}"
    return base if tuple_idx == 0 else f"{base}_t{tuple_idx}"


def initial_vc(schema: Schema) -> VCDatabase:
    """Single-tuple symbolic instance: one version-0 variable per attribute."""
    variables = {version0_name(a): SymVar(version0_name(a), t) for a, t in schema.attrs}
    row = VCTuple(tuple(Sym(version0_name(a)) for a in schema.names), TRUE)
    return VCDatabase({schema.relation: VCTable(schema, (row,))}, TRUE, variables)


def _subst_attrs(node, row: VCTuple, schema: Schema):
    pairs = [(Attr(a), e) for a, e in zip(schema.names, row.exprs)]
    return substitute(node, pairs)


def sym_apply(u: Statement, vdb: VCDatabase, side: str, index: int) -> VCDatabase:
    """Execute one statement over a VC-database.

    `side` and `index` determine fresh-variable names, making the result
    reproducible byte-for-byte across runs.
    """
    if isinstance(u, InsertQuery):
        raise SymbolicError("insert-from-query is not supported symbolically")
    if isinstance(u, NoOp):
        return vdb
    table = vdb.tables[u.relation]
    schema = table.schema
    variables = dict(vdb.variables)
    global_cond = vdb.global_cond

    if isinstance(u, Update):
        set_list = u.set_list(schema)
        new_tuples = []
        conjuncts = []
        for j, row in enumerate(table.tuples):
            theta = simplify(_subst_attrs(u.cond, row, schema))
            exprs = []
            for (attr, attr_type), e, old in zip(schema.attrs, set_list, row.exprs):
                if e == Attr(attr):
                    exprs.append(old)  # identity: reuse the previous variable
                    continue
                name = fresh_name(side, attr, index, j)
                if name in variables:
                    raise SymbolicError(f"variable clash: {name}")
                variables[name] = SymVar(name, attr_type)
                rhs = simplify(Case(theta, _subst_attrs(e, row, schema), old))
                conjuncts.append(Cmp("=", Sym(name), rhs))
                exprs.append(Sym(name))
            new_tuples.append(VCTuple(tuple(exprs), row.local))
        global_cond = and_all([global_cond] + conjuncts) if conjuncts else global_cond
        tables = dict(vdb.tables)
        tables[u.relation] = VCTable(schema, tuple(new_tuples))
        return VCDatabase(tables, global_cond, variables)

    if isinstance(u, Delete):
        new_tuples = []
        for row in table.tuples:
            theta = simplify(_subst_attrs(u.cond, row, schema))
            new_tuples.append(VCTuple(row.exprs, simplify(And(row.local, Not(theta)))))
        tables = dict(vdb.tables)
        tables[u.relation] = VCTable(schema, tuple(new_tuples))
        return VCDatabase(tables, global_cond, variables)

    if isinstance(u, InsertTuple):
        row = VCTuple(tuple(Const(v) for v in u.values), TRUE)
        tables = dict(vdb.tables)
        tables[u.relation] = VCTable(schema, table.tuples + (row,))
        return VCDatabase(tables, global_cond, variables)

    raise SymbolicError(f"not a statement: {u!r}")


def sym_run(statements, vdb: VCDatabase, side: str) -> VCDatabase:
    for i, u in enumerate(statements, start=1):
        vdb = sym_apply(u, vdb, side, i)
    return vdb


def instantiate(vdb: VCDatabase, assignment: dict[str, Value]):
    """Apply a total assignment; returns the concrete database, or None when
    the global condition fails (the assignment denotes no world)."""
    if not eval_cond_env(vdb.global_cond, assignment):
        return None
    tables = []
    for rel, table in vdb.tables.items():
        rows = []
        for row in table.tuples:
            if eval_cond_env(row.local, assignment):
                rows.append(tuple(eval_expr_env(e, assignment) for e in row.exprs))
        tables.append((table.schema, rows))
    return make_database(*tables)


def _definition_order(vdb: VCDatabase, base: set[str]):
    """Split the global condition into defining equations for fresh
    variables (in introduction order) and residual constraints."""
    defs: list[tuple[str, Expr]] = []
    residual: list[Cond] = []
    stack = [vdb.global_cond]
    flat: list[Cond] = []
    while stack:
        c = stack.pop()
        if isinstance(c, And):
            stack.extend((c.right, c.left))
        else:
            flat.append(c)
    defined = set(base)
    for c in flat:
        if (isinstance(c, Cmp) and c.op == "=" and isinstance(c.left, Sym)
                and c.left.name not in defined):
            defs.append((c.left.name, c.right))
            defined.add(c.left.name)
        elif c != TRUE:
            residual.append(c)
    return defs, residual


def enumerate_worlds(vdb: VCDatabase, base_domains: dict[str, list[Value]]):
    """All possible worlds over finite domains for the base variables.

    Fresh variables introduced by updates are pinned by their defining
    equations, so each base assignment extends uniquely; assignments
    violating residual global constraints denote no world.
    """
    defs, residual = _definition_order(vdb, set(base_domains))
    names = sorted(base_domains)
    worlds = []
    for combo in itertools.product(*(base_domains[n] for n in names)):
        env: dict[str, Value] = dict(zip(names, combo))
        for name, rhs in defs:
            env[name] = eval_expr_env(rhs, env)
        if all(eval_cond_env(c, env) for c in residual):
            db = instantiate(vdb, env)
            if db is not None:
                worlds.append((env, db))
    return worlds


def freeze_db(db: Database) -> tuple:
    return tuple(sorted((name, db.relation(name)) for name in db.relation_names()))


def dump_vcdb(vdb: VCDatabase) -> str:
    """Readable dump of a VC-database: tuple expressions, local conditions,
    and the global condition (used in debugging and golden tests)."""
    from .expressions import to_sql

    lines = []
    for rel in sorted(vdb.tables):
        table = vdb.tables[rel]
        lines.append(f"table {rel}({', '.join(table.schema.names)})")
        for i, row in enumerate(table.tuples):
            cells = ", ".join(to_sql(e) for e in row.exprs)
            lines.append(f"  t{i}: ({cells})  phi: {to_sql(row.local)}")
    lines.append(f"Phi: {to_sql(vdb.global_cond)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Database compression into range constraints


def _stable_bucket(value: Value, k: int) -> int:
    text = repr(value)
    h = 2166136261
    for ch in text.encode():
        h = ((h ^ ch) * 16777619) & 0xFFFFFFFF
    return h % k


def compress(db: Database, rel: str, group_attr: str, k: int,
              membership_cap: int = 16) -> Cond:
    """Compress a relation into a disjunction of per-group constraints over
    the version-0 variables.

    Rows are grouped by `group_attr` (hash-folded into at most k buckets
    when there are more distinct values).  Ordered attributes contribute
    min/max range constraints; unordered ones contribute membership sets
    capped at `membership_cap` distinct values, beyond which the attribute
    is unconstrained.  Every row of the relation satisfies the result.
    """
    schema = db.schema(rel)
    if k < 1:
        raise ValueError("group count must be >= 1")
    gpos = schema.position(group_attr)
    rows = db.relation(rel)
    if not rows:
        return FALSE

    values = sorted({row[gpos] for row in rows}, key=repr)
    if len(values) <= k:
        bucket_of = {v: i for i, v in enumerate(values)}
    else:
        bucket_of = {v: _stable_bucket(v, k) for v in values}
    groups: dict[int, list] = {}
    for row in rows:
        groups.setdefault(bucket_of[row[gpos]], []).append(row)

    disjuncts = []
    for bucket in sorted(groups):
        grows = groups[bucket]
        parts: list[Cond] = []
        for i, (attr, attr_type) in enumerate(schema.attrs):
            vals = [r[i] for r in grows]
            if any(v is None for v in vals):
                continue  # null present: leave the attribute unconstrained
            var = Sym(version0_name(attr))
            if attr_type in (T_INT, T_DEC):
                lo, hi = min(vals), max(vals)
                if lo == hi:
                    parts.append(Cmp("=", var, Const(lo)))
                else:
                    parts.append(And(Cmp(">=", var, Const(lo)), Cmp("<=", var, Const(hi))))
            else:
                distinct = sorted(set(vals), key=repr)
                if len(distinct) > membership_cap:
                    continue
                parts.append(or_all([Cmp("=", var, Const(v)) for v in distinct]))
        disjuncts.append(and_all(parts))
    return or_all(disjuncts)


def attribute_bounds(db: Database, rel: str, slack: int = 1) -> dict[str, tuple]:
    """Per-attribute (lo, hi) over the version-0 variables, widened by
    `slack`; text maps onto dictionary-code ranges, booleans onto 0/1.

    Text values of the relation are entered into the instance dictionary in
    sorted order so codes are reproducible across runs.
    """
    schema = db.schema(rel)
    rows = db.relation(rel)
    bounds: dict[str, tuple] = {}
    for i, (attr, attr_type) in enumerate(schema.attrs):
        name = version0_name(attr)
        if attr_type in (T_INT, T_DEC):
            vals = [r[i] for r in rows if r[i] is not None]
            if not vals:
                bounds[name] = (-slack, slack)
            else:
                bounds[name] = (min(vals) - slack, max(vals) + slack)
        elif attr_type == "bool":
            bounds[name] = (0, 1)
        else:
            for v in sorted({r[i] for r in rows if r[i] is not None}):
                db.text_dict.encode(v)
            bounds[name] = (0, max(len(db.text_dict), 1))
    return bounds


def patch_text_bounds(bounds: dict[str, tuple], types: dict[str, str],
                      text_dict) -> dict[str, tuple]:
    """Widen text-variable bounds to the current dictionary size (constants
    encoded after the bounds were first derived may have grown it)."""
    out = dict(bounds)
    hi = max(len(text_dict), 1)
    for name, t in types.items():
        if t == T_TEXT and name in out:
            out[name] = (0, hi)
    return out
