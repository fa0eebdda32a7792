"""End-to-end answering of historical what-if queries.

Two algorithms answer a request (history modifications + method):

  * naive: copy the relations the modified suffix touches, execute the
    modified suffix over the snapshot before the first modified statement,
    and diff against the current state.
  * optimized: reenact both suffixes as queries over that same snapshot,
    after splitting constant inserts into their own cheap branches,
    optionally program-slicing the update/delete part and injecting
    data-slicing filters beneath the base relations.

Methods: naive | r | r+ds | r+ps | r+ps+ds.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .algebra import SignedDelta, Union, delta, eval_query
from .data import Database
from .dataslice import DEFAULT_NODE_BUDGET as DS_NODE_BUDGET
from .dataslice import PushdownError, apply_filters, data_slice
from .errors import EngineError
from .expressions import Cond, to_sql
from .reenact import can_split, insert_branches, reenact_history
from .slicing import (
    SliceNotApplicable,
    greedy_slice,
    single_mod_dependency,
)
from .solver import DEFAULT_NODE_BUDGET as SOLVER_NODE_BUDGET
from .statements import (
    History,
    InsertQuery,
    InsertTuple,
    Modification,
    NormalizedReplace,
    NoOp,
    normalize_mods,
)
from .store import VersionedStore
from .symbolic import compress
from .values import T_TEXT

METHODS = ("naive", "r", "r+ds", "r+ps", "r+ps+ds")
DEFAULT_GROUPS = 8


@dataclass(frozen=True)
class HWQRequest:
    mods: tuple[Modification, ...]
    method: str = "r+ps+ds"
    group_attr: Optional[str] = None
    groups: int = DEFAULT_GROUPS
    solver_budget: int = SOLVER_NODE_BUDGET
    solver_time_s: Optional[float] = 5.0  # per solver call; None disables
    big_m_floor: int = 0
    ds_node_budget: int = DS_NODE_BUDGET

    def __post_init__(self):
        if self.method not in METHODS:
            raise EngineError(f"unknown method {self.method!r}; choose from {METHODS}")


@dataclass
class RunReport:
    method: str
    phases_ms: dict[str, float] = field(default_factory=dict)
    slices: dict[str, dict] = field(default_factory=dict)
    ds_conditions: dict[str, dict[str, str]] = field(default_factory=dict)
    degraded: list[str] = field(default_factory=list)
    solver_unknown: bool = False

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "phases_ms": {k: round(v, 3) for k, v in self.phases_ms.items()},
            "slices": self.slices,
            "ds_conditions": self.ds_conditions,
            "degraded": self.degraded,
            "solver_unknown": self.solver_unknown,
        }


@dataclass
class HWQAnswer:
    deltas: dict[str, SignedDelta]
    report: RunReport

    def total_changes(self) -> int:
        return sum(len(d) for d in self.deltas.values())


def choose_group_attr(db: Database, rel: str, cap: int = 64) -> str:
    """Default compression grouping: first low-cardinality text attribute,
    else the first attribute."""
    schema = db.schema(rel)
    rows = db.relation(rel)
    for i, (name, t) in enumerate(schema.attrs):
        if t == T_TEXT and len({r[i] for r in rows}) <= cap:
            return name
    return schema.attrs[0][0]


def _normalized_suffix(store: VersionedStore, mods) -> Optional[tuple]:
    """Pad and truncate to the suffix from the first modified position."""
    h = store.history()
    hp, hmp, reps = normalize_mods(h, list(mods))
    if not reps:
        return None
    m1 = min(r.pos for r in reps)
    base = store.reconstruct(m1 - 1)
    shift = m1 - 1
    hs = History(hp.statements[shift:], hp.ident + "-suffix")
    hms = History(hmp.statements[shift:], hmp.ident + "-suffix")
    sreps = [NormalizedReplace(r.pos - shift, r.old, r.new) for r in reps]
    return base, hs, hms, sreps, shift


def _written_relations(*histories: History) -> list[str]:
    out = []
    for h in histories:
        for u in h.statements:
            if not isinstance(u, NoOp) and u.relation not in out:
                out.append(u.relation)
    return sorted(out)


def answer_naive(store: VersionedStore, req: HWQRequest) -> HWQAnswer:
    report = RunReport(method="naive")
    t0 = time.perf_counter()
    norm = _normalized_suffix(store, req.mods)
    if norm is None:
        report.phases_ms["total"] = (time.perf_counter() - t0) * 1000
        return HWQAnswer({}, report)
    base, hs, hms, _, _ = norm
    touched = _written_relations(hs, hms)

    t1 = time.perf_counter()
    copied = base  # relations are immutable sets; the copy is implicit
    from .statements import run_history

    modified = run_history(hms, copied)
    report.phases_ms["exe"] = (time.perf_counter() - t1) * 1000

    t2 = time.perf_counter()
    current = store.current
    deltas = {
        rel: delta(current.relation(rel), modified.relation(rel))
        for rel in touched
    }
    report.phases_ms["delta"] = (time.perf_counter() - t2) * 1000
    report.phases_ms["total"] = (time.perf_counter() - t0) * 1000
    return HWQAnswer(deltas, report)


def _strip_positions(hs: History, hms: History, rel: str) -> list[int]:
    out = []
    for pos in range(1, len(hs) + 1):
        if any(isinstance(h.at(pos), InsertTuple) and h.at(pos).relation == rel
               for h in (hs, hms)):
            out.append(pos)
    return out


def _program_slice(hs: History, hms: History, sreps, rel: str, base: Database,
                   req: HWQRequest, report: RunReport,
                   shift: int = 0) -> Optional[list[int]]:
    """Kept positions (in suffix coordinates) for statements on `rel`, or
    None when slicing is not applicable and must be skipped."""
    positions = [p for p in range(1, len(hs) + 1)
                 if hs.at(p).relation == rel or hms.at(p).relation == rel]
    strip = set(_strip_positions(hs, hms, rel))
    cand_positions = [p for p in positions if p not in strip]
    if not cand_positions:
        return None
    sub_h = History(tuple(hs.at(p) for p in cand_positions))
    sub_hm = History(tuple(hms.at(p) for p in cand_positions))
    pos_of = {i + 1: p for i, p in enumerate(cand_positions)}
    sub_reps = [
        NormalizedReplace(i + 1, hs.at(p), hms.at(p))
        for i, p in enumerate(cand_positions)
        if hs.at(p) != hms.at(p)
    ]
    if not sub_reps:
        return None
    group_attr = req.group_attr or choose_group_attr(base, rel)
    chi = compress(base, rel, group_attr, req.groups)
    try:
        if len(sub_reps) == 1 and len({r.pos for r in sreps}) == 1:
            rep = single_mod_dependency(sub_h, sub_hm, sub_reps[0], chi, base, rel,
                                        req.solver_budget, req.big_m_floor,
                                        req.solver_time_s)
        else:
            rep = greedy_slice(sub_h, sub_hm, sub_reps, chi, base, rel,
                               req.solver_budget, req.big_m_floor,
                               req.solver_time_s)
    except SliceNotApplicable as e:
        report.degraded.append(f"program slicing for {rel}: {e}")
        return None
    report.slices[rel] = {
        "kept": [pos_of[p] + shift for p in rep.kept],
        "removed": [pos_of[p] + shift for p in rep.removed],
        "suffix_start": shift + 1,
        **{k: v for k, v in rep.to_json().items() if k not in ("kept", "removed")},
    }
    if any(c.status == "unknown" for c in rep.calls):
        report.solver_unknown = True
    removed = {pos_of[p] for p in rep.removed}
    return [p for p in range(1, len(hs) + 1) if p not in removed]


def answer_optimized(store: VersionedStore, req: HWQRequest) -> HWQAnswer:
    report = RunReport(method=req.method)
    t0 = time.perf_counter()
    norm = _normalized_suffix(store, req.mods)
    if norm is None:
        report.phases_ms["total"] = (time.perf_counter() - t0) * 1000
        return HWQAnswer({}, report)
    base, hs, hms, sreps, shift = norm
    use_ps = req.method in ("r+ps", "r+ps+ds")
    use_ds = req.method in ("r+ds", "r+ps+ds")
    touched = _written_relations(hs, hms)

    kept_by_rel: dict[str, list[int]] = {}
    t_ps = time.perf_counter()
    if use_ps:
        for rel in touched:
            has_iq = any(isinstance(h.at(p), InsertQuery) and h.at(p).relation == rel
                         for h in (hs, hms) for p in range(1, len(h) + 1))
            if has_iq:
                report.degraded.append(
                    f"program slicing for {rel}: insert-from-query in scope")
                continue
            kept = _program_slice(hs, hms, sreps, rel, base, req, report, shift)
            if kept is not None:
                kept_by_rel[rel] = kept
    report.phases_ms["ps"] = (time.perf_counter() - t_ps) * 1000

    deltas: dict[str, SignedDelta] = {}
    ds_ms = 0.0
    exe_ms = 0.0
    for rel in touched:
        keep = kept_by_rel.get(rel)
        if keep is None:
            sl_h, sl_hm = hs, hms
        else:
            sl_h, sl_hm = hs.slice(keep), hms.slice(keep)
        # constant inserts are split off: the left part reenacts the sliced
        # histories without them, the right part runs full-suffix machinery
        # over just the inserted rows; stripping works by position so both
        # sides stay aligned
        splittable = can_split(hs, rel) and can_split(hms, rel)
        strip = set(_strip_positions(sl_h, sl_hm, rel)) if splittable else set()
        stripped_h = History(tuple(
            sl_h.at(p) for p in range(1, len(sl_h) + 1) if p not in strip))
        stripped_hm = History(tuple(
            sl_hm.at(p) for p in range(1, len(sl_hm) + 1) if p not in strip))

        t_ds = time.perf_counter()
        filters_h: dict[str, Cond] = {}
        filters_hm: dict[str, Cond] = {}
        apply_ds = use_ds
        if use_ds:
            ds_reps = [
                NormalizedReplace(i + 1, o, n)
                for i, (o, n) in enumerate(zip(stripped_h.statements,
                                               stripped_hm.statements))
                if o != n
            ]
            try:
                sc = data_slice(stripped_h, stripped_hm, ds_reps, base,
                                req.ds_node_budget)
            except PushdownError as e:
                apply_ds = False
                report.degraded.append(f"data slicing for {rel}: {e}")
            else:
                filters_h, filters_hm = sc.h_side, sc.hm_side
                report.ds_conditions[rel] = {
                    "h": {r: to_sql(c) for r, c in filters_h.items()},
                    "hm": {r: to_sql(c) for r, c in filters_hm.items()},
                }
                report.degraded.extend(
                    f"data slicing condition for {r} exceeded the node budget"
                    for r in sc.degraded)
        ds_ms += (time.perf_counter() - t_ds) * 1000

        t_exe = time.perf_counter()
        q_h = reenact_history(stripped_h, rel, base)
        q_hm = reenact_history(stripped_hm, rel, base)
        if apply_ds:
            q_h = apply_filters(q_h, filters_h)
            q_hm = apply_filters(q_hm, filters_hm)
        right_h = insert_branches(hs, rel, base) if splittable else None
        right_hm = insert_branches(hms, rel, base) if splittable else None
        if right_h is not None:
            q_h = Union(q_h, right_h)
        if right_hm is not None:
            q_hm = Union(q_hm, right_hm)
        res_h = eval_query(q_h, base)
        res_hm = eval_query(q_hm, base)
        deltas[rel] = delta(res_h, res_hm)
        exe_ms += (time.perf_counter() - t_exe) * 1000

    report.phases_ms["ds"] = ds_ms
    report.phases_ms["exe"] = exe_ms
    report.phases_ms["total"] = (time.perf_counter() - t0) * 1000
    return HWQAnswer(deltas, report)


def answer(store: VersionedStore, req: HWQRequest) -> HWQAnswer:
    if req.method == "naive":
        return answer_naive(store, req)
    return answer_optimized(store, req)
