"""Program slicing: prove statements removable via symbolic execution.

A candidate index set I is certified as a slice by building a slice-test
formula over four symbolic runs (original, modified, and both restricted
to I) that share only the version-0 input variables: under the compressed
database constraint and the runs' defining equations, either all four runs
agree, or the full pair differs exactly as the sliced pair does.  The
negation goes to the MILP solver; unsatisfiability certifies the slice.
The method is sufficient, not necessary: a satisfiable negation (or an
exhausted solver budget) only means "not proven".

For single-modification queries a cheaper per-statement dependency test
asks whether any world lets both the modified statement and the examined
statement fire on the same tuple trajectory.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .data import Database
from .errors import EngineError
from .expressions import (
    And,
    Attr,
    Cmp,
    Cond,
    Expr,
    FALSE,
    Not,
    Or,
    Sym,
    TRUE,
    and_all,
    simplify,
    substitute,
    symbols_of,
)
from .milp import compile_condition, encode_text_constants, interval_of
from .solver import DEFAULT_NODE_BUDGET, FEASIBLE, INFEASIBLE, UNKNOWN, solve
from .statements import (
    Delete,
    History,
    InsertQuery,
    InsertTuple,
    NoOp,
    NormalizedReplace,
    Statement,
    Update,
    condition_of,
)
from .symbolic import attribute_bounds, initial_vc, patch_text_bounds, sym_apply, version0_name
from .values import T_TEXT

IS_SLICE = "is_slice"
NOT_PROVEN = "not_proven"


class SliceNotApplicable(EngineError):
    """History contains statements the symbolic machinery cannot handle."""


@dataclass(frozen=True)
class SolverCall:
    purpose: str
    status: str
    nodes: int


@dataclass(frozen=True)
class SliceCheck:
    status: str  # is_slice | not_proven
    solver_status: str
    nodes: int = 0


@dataclass(frozen=True)
class SliceReport:
    kept: tuple[int, ...]
    removed: tuple[int, ...]
    calls: tuple[SolverCall, ...]
    method: str

    def to_json(self) -> dict:
        return {
            "kept": list(self.kept),
            "removed": list(self.removed),
            "solver_calls": len(self.calls),
            "solver_status": [
                {"purpose": c.purpose, "status": c.status, "nodes": c.nodes}
                for c in self.calls
            ],
            "method": self.method,
        }


@dataclass(frozen=True)
class SliceTestFormula:
    premise: Cond
    cases: Cond
    bounds: dict[str, tuple]
    types: dict[str, str]
    full_slice: bool  # I = [1, n]: both restricted runs mirror the full runs

    def negated_body(self) -> Cond:
        return simplify(And(self.premise, Not(self.cases)))


def _check_applicable(statements: Sequence[Statement]) -> None:
    for u in statements:
        if isinstance(u, InsertQuery):
            raise SliceNotApplicable("insert-from-query statements cannot be sliced")
        if isinstance(u, InsertTuple):
            raise SliceNotApplicable(
                "constant inserts must be split off before program slicing")


def _written_attributes(statements: Sequence[Statement], schema) -> list[str]:
    written: set[str] = set()
    for u in statements:
        if isinstance(u, Update):
            for (name, _t), e in zip(schema.attrs, u.set_list(schema)):
                if e != Attr(name):
                    written.add(name)
    return [a for a in schema.names if a in written]


@dataclass
class _Run:
    """One symbolic run: final tuple expressions, local condition, and the
    defining conjuncts of its global condition."""

    exprs: dict[str, Expr]
    local: Cond
    conjuncts: list[Cond]
    snapshots: list  # per prefix: (exprs per attr, local)
    var_types: dict[str, str]


def _symbolic_run(statements: Sequence[Statement], positions: Sequence[int],
                  schema, side: str) -> _Run:
    vdb = initial_vc(schema)
    rel = schema.relation
    snapshots = []
    row = vdb.table(rel).tuples[0]
    snapshots.append((dict(zip(schema.names, row.exprs)), row.local))
    for pos, u in zip(positions, statements):
        vdb = sym_apply(u, vdb, side, pos)
        row = vdb.table(rel).tuples[0]
        snapshots.append((dict(zip(schema.names, row.exprs)), row.local))
    conjuncts = _flatten_and(vdb.global_cond)
    row = vdb.table(rel).tuples[0]
    var_types = {name: sv.type for name, sv in vdb.variables.items()}
    return _Run(dict(zip(schema.names, row.exprs)), row.local, conjuncts, snapshots,
                var_types)


def _flatten_and(c: Cond) -> list[Cond]:
    out: list[Cond] = []
    stack = [c]
    while stack:
        x = stack.pop()
        if isinstance(x, And):
            stack.extend((x.right, x.left))
        else:
            if x != TRUE:
                out.append(x)
    return out


def _prune_definitions(conjuncts: list[Cond], needed: set[str]) -> list[Cond]:
    """Drop defining equations for variables nothing depends on.

    Definitions pin fresh variables as functions of earlier ones, so
    removing unreferenced ones preserves satisfiability exactly.
    """
    keep: list[Cond] = []
    for c in reversed(conjuncts):
        if (isinstance(c, Cmp) and c.op == "=" and isinstance(c.left, Sym)
                and c.left.name.startswith("x_")):
            if c.left.name in needed:
                keep.append(c)
                needed |= symbols_of(c.right)
        else:
            keep.append(c)
            needed |= symbols_of(c)
    keep.reverse()
    return keep


def _derive_bounds(conjuncts: Sequence[Cond], bounds: dict[str, tuple],
                   types: dict[str, str]) -> None:
    for c in conjuncts:
        if (isinstance(c, Cmp) and c.op == "=" and isinstance(c.left, Sym)
                and c.left.name not in bounds):
            name = c.left.name
            if types.get(name) == T_TEXT:
                bounds[name] = (0, 10 ** 6)  # dictionary codes; equality only
            else:
                bounds[name] = interval_of(c.right, bounds)


def _eq_runs(a: _Run, b: _Run, written: Sequence[str]) -> Cond:
    vals = and_all([Cmp("=", a.exprs[w], b.exprs[w]) for w in written])
    both = and_all([vals, a.local, b.local])
    neither = And(Not(a.local), Not(b.local))
    return simplify(Or(both, neither))


def build_slice_test(h: History, hm: History, index_set: Sequence[int],
                     chi: Cond, db: Database, rel: str) -> SliceTestFormula:
    """Assemble the universally-quantified slice-test body for candidate I.

    Requires equal-length histories of tuple-independent update/delete
    statements over `rel` (constant inserts are split off upstream).
    """
    if len(h) != len(hm):
        raise SliceNotApplicable("histories must be padded to equal length")
    _check_applicable(h.statements)
    _check_applicable(hm.statements)
    schema = db.schema(rel)
    n = len(h)
    keep = sorted(set(index_set))
    if any(p < 1 or p > n for p in keep):
        raise SliceNotApplicable(f"slice positions out of range: {keep}")

    runs = {
        "h": _symbolic_run(h.statements, range(1, n + 1), schema, "h"),
        "m": _symbolic_run(hm.statements, range(1, n + 1), schema, "m"),
        "hs": _symbolic_run([h.at(p) for p in keep], keep, schema, "hs"),
        "ms": _symbolic_run([hm.at(p) for p in keep], keep, schema, "ms"),
    }
    written = _written_attributes(h.statements + hm.statements, schema)

    eq_full = _eq_runs(runs["h"], runs["m"], written)
    eq_slice = _eq_runs(runs["hs"], runs["ms"], written)
    eq_hh = _eq_runs(runs["h"], runs["hs"], written)
    eq_mm = _eq_runs(runs["m"], runs["ms"], written)
    eq_hm = _eq_runs(runs["h"], runs["ms"], written)
    eq_mh = _eq_runs(runs["m"], runs["hs"], written)
    cases = simplify(Or(
        And(eq_full, eq_slice),
        And(Not(eq_full), Or(And(eq_hh, eq_mm), And(eq_hm, eq_mh))),
    ))

    all_conjuncts: list[Cond] = []
    for side in ("h", "m", "hs", "ms"):
        all_conjuncts.extend(runs[side].conjuncts)
    needed = symbols_of(cases) | symbols_of(chi)
    pruned = _prune_definitions(all_conjuncts, set(needed))

    types = {version0_name(a): t for a, t in schema.attrs}
    for side in ("h", "m", "hs", "ms"):
        types.update(runs[side].var_types)
    bounds = dict(attribute_bounds(db, rel))
    _derive_bounds(pruned, bounds, types)

    premise = simplify(and_all([chi] + pruned))
    return SliceTestFormula(premise, cases, bounds, types,
                            full_slice=(keep == list(range(1, n + 1))))


def check_slice(f: SliceTestFormula, db: Database,
                node_budget: int = DEFAULT_NODE_BUDGET,
                big_m_floor: int = 0,
                time_budget_s: Optional[float] = None) -> SliceCheck:
    """Certify a candidate: IsSlice iff the negated body is unsatisfiable.

    Feasible or budget-exhausted solves yield NOT_PROVEN (the check is a
    sufficient condition only, and unknown must stay conservative).
    """
    if f.full_slice:
        return SliceCheck(IS_SLICE, "syntactic", 0)
    body = encode_text_constants(f.negated_body(), db.text_dict)
    bounds = patch_text_bounds(f.bounds, f.types, db.text_dict)
    program = compile_condition(body, bounds, f.types, big_m_floor)
    result = solve(program, node_budget, time_budget_s)
    if result.status == INFEASIBLE:
        return SliceCheck(IS_SLICE, result.status, result.nodes)
    return SliceCheck(NOT_PROVEN, result.status, result.nodes)


def _is_noop_pair(h: History, hm: History, pos: int) -> bool:
    def noopish(u: Statement) -> bool:
        return isinstance(u, NoOp) or (isinstance(u, Delete) and u.cond == FALSE)

    return noopish(h.at(pos)) and noopish(hm.at(pos))


def greedy_slice(h: History, hm: History, replaces: Sequence[NormalizedReplace],
                 chi: Cond, db: Database, rel: str,
                 node_budget: int = DEFAULT_NODE_BUDGET,
                 big_m_floor: int = 0,
                 time_budget_s: Optional[float] = None) -> SliceReport:
    """Greedy slice computation: try removing each position in ascending
    order, keeping a removal only when the slice test certifies it.

    Modified positions are pinned; statements that are no-ops in both
    histories drop without a solver call.
    """
    n = len(h)
    pinned = {m.pos for m in replaces}
    current = list(range(1, n + 1))
    calls: list[SolverCall] = []
    for pos in range(1, n + 1):
        if pos in pinned:
            continue
        if _is_noop_pair(h, hm, pos):
            current.remove(pos)
            continue
        candidate = [p for p in current if p != pos]
        formula = build_slice_test(h, hm, candidate, chi, db, rel)
        check = check_slice(formula, db, node_budget, big_m_floor, time_budget_s)
        calls.append(SolverCall(f"remove@{pos}", check.solver_status, check.nodes))
        if check.status == IS_SLICE:
            current = candidate
    removed = tuple(p for p in range(1, n + 1) if p not in current)
    return SliceReport(tuple(current), removed, tuple(calls), "greedy")


def single_mod_dependency(h: History, hm: History, m: NormalizedReplace,
                          chi: Cond, db: Database, rel: str,
                          node_budget: int = DEFAULT_NODE_BUDGET,
                          big_m_floor: int = 0,
                          time_budget_s: Optional[float] = None) -> SliceReport:
    """Per-statement dependency test for single-modification queries.

    Statement i stays in the slice iff some world within the compressed
    constraint lets a tuple both be touched by the old or new statement at
    the modification's position and satisfy statement i's condition at its
    own position (on the respective history side).  The modified position
    is always kept.
    """
    if len(h) != len(hm):
        raise SliceNotApplicable("histories must be padded to equal length")
    _check_applicable(h.statements)
    _check_applicable(hm.statements)
    schema = db.schema(rel)
    n = len(h)
    p = m.pos

    run_h = _symbolic_run(h.statements, range(1, n + 1), schema, "h")
    run_m = _symbolic_run(hm.statements, range(1, n + 1), schema, "m")

    def fires(cond: Optional[Cond], run: _Run, before_pos: int) -> Cond:
        if cond is None:
            return FALSE
        exprs, local = run.snapshots[before_pos - 1]
        pairs = [(Attr(a), exprs[a]) for a in schema.names]
        return simplify(And(local, substitute(cond, pairs)))

    mod_fires = simplify(Or(fires(condition_of(m.old), run_h, p),
                            fires(condition_of(m.new), run_m, p)))

    types = {version0_name(a): t for a, t in schema.attrs}
    base_bounds = attribute_bounds(db, rel)

    kept = []
    calls: list[SolverCall] = []
    for i in range(1, n + 1):
        if i <= p:
            # exclusion only certifies statements after the modification;
            # the prefix is absorbed by the snapshot the engine reenacts from
            kept.append(i)
            continue
        cond_i = condition_of(h.at(i))
        stmt_fires = simplify(Or(fires(cond_i, run_h, i),
                                 fires(cond_i, run_m, i)))
        payload = simplify(And(mod_fires, stmt_fires))
        if payload == FALSE:
            calls.append(SolverCall(f"dep@{i}", "trivial", 0))
            continue
        conjuncts = run_h.conjuncts + run_m.conjuncts
        needed = symbols_of(payload) | symbols_of(chi)
        pruned = _prune_definitions(conjuncts, set(needed))
        local_types = dict(types)
        local_types.update(run_h.var_types)
        local_types.update(run_m.var_types)
        bounds = dict(base_bounds)
        _derive_bounds(pruned, bounds, local_types)
        body = encode_text_constants(
            simplify(and_all([chi] + pruned + [payload])), db.text_dict)
        bounds = patch_text_bounds(bounds, local_types, db.text_dict)
        program = compile_condition(body, bounds, local_types, big_m_floor)
        result = solve(program, node_budget, time_budget_s)
        calls.append(SolverCall(f"dep@{i}", result.status, result.nodes))
        if result.status in (FEASIBLE, UNKNOWN):
            kept.append(i)  # unknown stays conservative: keep the statement
    removed = tuple(i for i in range(1, n + 1) if i not in kept)
    return SliceReport(tuple(kept), removed, tuple(calls), "single_mod")
