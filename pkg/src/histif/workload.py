"""Synthetic workload generator for benchmarks and method-agreement tests.

Parameters mirror the benchmark dimensions: U statements, M modifications,
D percent of updates dependent on the modified ones, T percent of rows
affected per dependent statement, I/X percent inserts/deletes.  Rows carry
a unique ID key that statements never write; dependent statements share
the modified statements' ID range, independent ones get disjoint ranges.
Generation is deterministic per seed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .data import Database, make_database
from .errors import WorkloadError
from .expressions import And, Arith, Attr, Cmp, Const, Schema
from .statements import (
    Delete,
    History,
    InsertTuple,
    Modification,
    Replace,
    Statement,
    Update,
)

WORKLOAD_SCHEMA = Schema(
    "R",
    (("ID", "int"), ("Cat", "text"), ("A", "int"), ("B", "int")),
)

CATEGORIES = tuple(f"c{i}" for i in range(8))


@dataclass(frozen=True)
class WorkloadSpec:
    updates: int  # U
    mods: int = 1  # M
    dependent_pct: int = 10  # D
    affected_pct: int = 10  # T
    inserts_pct: int = 0  # I
    deletes_pct: int = 0  # X
    size: int = 1000
    seed: int = 0

    def validate(self) -> None:
        for name in ("dependent_pct", "affected_pct", "inserts_pct", "deletes_pct"):
            v = getattr(self, name)
            if not 0 <= v <= 100:
                raise WorkloadError(f"{name}={v} outside [0,100]")
        if self.inserts_pct + self.deletes_pct > 100:
            raise WorkloadError("inserts_pct + deletes_pct must be <= 100")
        if self.updates < 0 or self.size < 0 or self.mods < 0:
            raise WorkloadError("counts must be non-negative")
        n_upd = self.updates - round(self.updates * self.inserts_pct / 100) \
            - round(self.updates * self.deletes_pct / 100)
        if self.mods > max(n_upd, 0):
            raise WorkloadError("more modifications than update statements")


def _id_range_cond(lo: int, hi: int):
    return And(Cmp(">=", Attr("ID"), Const(lo)), Cmp("<=", Attr("ID"), Const(hi)))


def _bump(attr: str, k: int):
    return (attr, Arith("+", Attr(attr), Const(k)))


def generate_workload(spec: WorkloadSpec) -> tuple[Database, History, list[Modification]]:
    spec.validate()
    rng = random.Random(spec.seed)
    rows = [
        (i + 1, CATEGORIES[i % len(CATEGORIES)], rng.randrange(1000), rng.randrange(1000))
        for i in range(spec.size)
    ]
    db = make_database((WORKLOAD_SCHEMA, rows))

    n_ins = round(spec.updates * spec.inserts_pct / 100)
    n_del = round(spec.updates * spec.deletes_pct / 100)
    n_upd = spec.updates - n_ins - n_del
    n_dep = min(round(spec.dependent_pct / 100 * n_upd), max(n_upd - spec.mods, 0))

    width = max(1, spec.size * spec.affected_pct // 100) if spec.size else 1
    hot_lo, hot_hi = 1, width  # range shared by modified and dependent updates

    def disjoint_range(k: int) -> tuple[int, int]:
        # rotate through the ID space above the hot range
        pool_lo = hot_hi + 1
        pool = max(spec.size - width - hot_hi, 1)
        start = pool_lo + (k * width) % pool
        return start, min(start + width - 1, spec.size)

    statements: list[Statement] = []
    modified: list[Statement] = []
    for j in range(spec.mods):
        statements.append(Update("R", (_bump("B", 1),), _id_range_cond(hot_lo, hot_hi)))
        modified.append(Update("R", (_bump("B", 2 + j),), _id_range_cond(hot_lo, hot_hi)))

    tail: list[Statement] = []
    for _ in range(n_dep):
        shift = rng.randrange(max(width // 2, 1))
        tail.append(Update("R", (_bump("B", 1),),
                           _id_range_cond(hot_lo + shift, hot_hi + shift)))
    for k in range(n_upd - spec.mods - n_dep):
        lo, hi = disjoint_range(k)
        tail.append(Update("R", (_bump("A", 1),), _id_range_cond(lo, hi)))
    del_width = max(spec.size // 200, 1)
    for k in range(n_del):
        lo = hot_hi + 1 + (k * del_width) % max(spec.size - hot_hi - del_width, 1)
        tail.append(Delete("R", _id_range_cond(lo, lo + del_width - 1)))
    for k in range(n_ins):
        tail.append(InsertTuple("R", (spec.size + k + 1, CATEGORIES[k % len(CATEGORIES)],
                                      rng.randrange(1000), rng.randrange(1000))))
    rng.shuffle(tail)
    statements.extend(tail)

    history = History(tuple(statements), f"workload-{spec.seed}")
    mods = [Replace(j + 1, modified[j]) for j in range(spec.mods)]
    return db, history, mods
