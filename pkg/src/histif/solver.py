"""Self-contained exact MILP feasibility solver.

Search is depth-first branch and bound over the integer variables with
interval propagation at every node and a phase-1 simplex feasibility check
on the linear relaxation.  The relaxation runs in floating point as a
filter; any pruning decision it suggests is confirmed by an exact
rational simplex, and any returned assignment is verified against every
constraint by exact substitution before it leaves the solver.  Exhausting
the node budget yields UNKNOWN, never a definite answer.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .milp import BOOL, LinCon, MILPProgram

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNKNOWN = "unknown"

DEFAULT_NODE_BUDGET = 10 ** 6
_EPS = 1e-7


def _phase1_float(rows, names) -> tuple[bool, Optional[dict]]:
    """Dense float phase-1 simplex (numpy).  Filter only: the caller
    confirms any infeasibility exactly before acting on it."""
    import numpy as np

    index = {v: k for k, v in enumerate(names)}
    n = len(names)
    m = len(rows)
    neg = [i for i, (_, rhs) in enumerate(rows) if rhs < 0]
    n_art = len(neg)
    cols = n + m + n_art
    tab = np.zeros((m, cols + 1))
    basis = np.empty(m, dtype=np.int64)
    art_start = n + m
    ai = 0
    for i, (coeffs, rhs) in enumerate(rows):
        for v, c in coeffs:
            tab[i, index[v]] += c
        tab[i, n + i] = 1.0
        tab[i, cols] = rhs
        if rhs < 0:
            tab[i] = -tab[i]
            tab[i, art_start + ai] = 1.0
            basis[i] = art_start + ai
            ai += 1
        else:
            basis[i] = n + i
    if n_art == 0:
        return True, {v: 0.0 for v in names}
    obj = np.zeros(cols + 1)
    art_rows = basis >= art_start
    obj -= tab[art_rows].sum(axis=0)
    obj[art_start:cols] = 0.0
    for _ in range(50 * (m + n + 20)):
        body = obj[:art_start]
        enter = int(np.argmin(body))
        if body[enter] >= -_EPS:
            break
        col = tab[:, enter]
        mask = col > _EPS
        if not mask.any():
            return True, None
        ratios = np.full(m, np.inf)
        ratios[mask] = tab[mask, cols] / col[mask]
        pr = int(np.argmin(ratios))
        pivot = tab[pr, enter]
        tab[pr] /= pivot
        factors = tab[:, enter].copy()
        factors[pr] = 0.0
        tab -= np.outer(factors, tab[pr])
        obj -= obj[enter] * tab[pr]
        basis[pr] = enter
    else:
        return True, None
    z = tab[basis >= art_start, cols].sum()
    if z > _EPS:
        return False, None
    sol = {v: 0.0 for v in names}
    for i, b in enumerate(basis):
        if b < n:
            sol[names[int(b)]] = float(tab[i, cols])
    return True, sol


@dataclass(frozen=True)
class SolveResult:
    status: str
    assignment: Optional[dict[str, int]] = None
    nodes: int = 0


def _discharged(con: LinCon):
    """Strict inequalities become non-strict: every term is integral."""
    if con.op == "<":
        return con.coeffs, "<=", con.rhs - 1
    if con.op == ">":
        return con.coeffs, ">=", con.rhs + 1
    return con.coeffs, con.op, con.rhs


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _ceil_step(x, step: int) -> int:
    return math.ceil(Fraction(x) / step) * step


def _floor_step(x, step: int) -> int:
    return math.floor(Fraction(x) / step) * step


class _Box:
    __slots__ = ("lo", "hi")

    def __init__(self, lo: dict[str, int], hi: dict[str, int]):
        self.lo = lo
        self.hi = hi

    def copy(self) -> "_Box":
        return _Box(dict(self.lo), dict(self.hi))


class _Solver:
    def __init__(self, program: MILPProgram, node_budget: int,
                 deadline: Optional[float] = None):
        self.program = program
        self.node_budget = node_budget
        self.deadline = deadline
        self.nodes = 0
        self.rows = []
        self.all_int = True
        for con in program.constraints:
            coeffs, op, rhs = _discharged(con)
            if any(c.denominator != 1 for _, c in coeffs) or rhs.denominator != 1:
                self.all_int = False
                self.rows.append((tuple(coeffs), op, rhs))
            else:
                self.rows.append((tuple((v, int(c)) for v, c in coeffs), op, int(rhs)))
        self.steps = {v.name: v.step for v in program.variables.values()}
        self.var_rows: dict[str, list[int]] = {v: [] for v in program.variables}
        for i, (coeffs, _, _) in enumerate(self.rows):
            for v, _c in coeffs:
                self.var_rows[v].append(i)

    # -- propagation (integer arithmetic on the hot path) -------------------

    def propagate(self, box: _Box) -> bool:
        """Activity-based interval tightening to a fixpoint; False on empty."""
        lo, hi = box.lo, box.hi
        steps = self.steps
        queue = list(range(len(self.rows)))
        in_queue = set(queue)
        work = 0
        limit = 60 * (len(self.rows) + 8)
        while queue:
            work += 1
            if work > limit:
                return True  # diminishing returns; the search handles the rest
            i = queue.pop()
            in_queue.discard(i)
            coeffs, op, rhs = self.rows[i]
            lo_act = 0
            hi_act = 0
            for v, c in coeffs:
                if c > 0:
                    lo_act += c * lo[v]
                    hi_act += c * hi[v]
                else:
                    lo_act += c * hi[v]
                    hi_act += c * lo[v]
            le = op != ">="  # row constrains from above
            ge = op != "<="  # row constrains from below
            if le and lo_act > rhs:
                return False
            if ge and hi_act < rhs:
                return False
            for v, c in coeffs:
                step = steps[v]
                lo_v, hi_v = lo[v], hi[v]
                new_lo, new_hi = lo_v, hi_v
                if le:
                    rest = lo_act - c * (lo_v if c > 0 else hi_v)
                    num = rhs - rest
                    if c > 0:
                        new_hi = min(new_hi, (num // c) // step * step)
                    else:
                        new_lo = max(new_lo, _ceil_div(_ceil_div(num, c), step) * step)
                if ge:
                    rest = hi_act - c * (hi_v if c > 0 else lo_v)
                    num = rhs - rest
                    if c > 0:
                        new_lo = max(new_lo, _ceil_div(_ceil_div(num, c), step) * step)
                    else:
                        new_hi = min(new_hi, (num // c) // step * step)
                if new_lo > new_hi:
                    return False
                if new_lo != lo_v or new_hi != hi_v:
                    if c > 0:
                        lo_act += c * (new_lo - lo_v)
                        hi_act += c * (new_hi - hi_v)
                    else:
                        lo_act += c * (new_hi - hi_v)
                        hi_act += c * (new_lo - lo_v)
                    lo[v], hi[v] = new_lo, new_hi
                    for j in self.var_rows[v]:
                        if j != i and j not in in_queue:
                            queue.append(j)
                            in_queue.add(j)
                    if le and lo_act > rhs:
                        return False
                    if ge and hi_act < rhs:
                        return False
        return True

    # -- phase-1 simplex: float filter + exact confirmation -----------------

    def _build_rows_le(self, box: _Box, numeric):
        """System as sum <= rhs rows over the unfixed variables shifted to
        x' = x - lo >= 0; variables pinned by propagation substitute out.
        Returns (rows, names, trivially_infeasible)."""
        names = [v for v in self.program.variables if box.lo[v] != box.hi[v]]
        free = set(names)
        rows = []
        for coeffs, op, rhs in self.rows:
            shifted = rhs - sum(c * box.lo[v] for v, c in coeffs)
            as_idx = [(v, c) for v, c in coeffs if v in free]
            if not as_idx:
                if op != ">=" and shifted < 0:
                    return [], names, True
                if op != "<=" and shifted > 0:
                    return [], names, True
                continue
            if op != ">=":
                rows.append(([(v, numeric(c)) for v, c in as_idx], numeric(shifted)))
            if op != "<=":
                rows.append(([(v, numeric(-c)) for v, c in as_idx], numeric(-shifted)))
        for v in names:
            rows.append(([(v, numeric(1))], numeric(box.hi[v] - box.lo[v])))
        return rows, names, False

    def _phase1(self, rows, names, zero, one, is_neg, lt):
        """Generic phase-1 simplex over <=-rows with rhs possibly negative.

        Returns (optimum_is_zero, solution or None, certified).  The
        arithmetic comes from the caller: exact Fractions or floats.
        """
        index = {v: k for k, v in enumerate(names)}
        n = len(names)
        m = len(rows)
        tab: list[dict[int, object]] = []
        rhs_col = []
        basis: list[int] = []
        art_set: set[int] = set()
        col = n + m
        for i, (coeffs, rhs) in enumerate(rows):
            row = {}
            for v, c in coeffs:
                if c != zero:
                    row[index[v]] = row.get(index[v], zero) + c
            row[n + i] = one
            if is_neg(rhs):
                row = {k: -c for k, c in row.items()}
                rhs = -rhs
                art_set.add(col)
                row[col] = one
                basis.append(col)
                col += 1
            else:
                basis.append(n + i)
            tab.append(row)
            rhs_col.append(rhs)
        if not art_set:
            return True, {v: zero for v in names}, True
        obj: dict[int, object] = {}
        for i, b in enumerate(basis):
            if b in art_set:
                for k, c in tab[i].items():
                    if k not in art_set:
                        obj[k] = obj.get(k, zero) - c
        max_pivots = 50 * (m + n + 20)
        pivots = 0
        while True:
            enter = None
            for k in sorted(obj):
                if lt(obj[k], zero) and k not in art_set:
                    enter = k
                    break
            if enter is None:
                break
            best = None
            for i, row in enumerate(tab):
                a = row.get(enter, zero)
                if lt(zero, a):
                    ratio = rhs_col[i] / a
                    if best is None or lt(ratio, best[0]) or (
                            not lt(best[0], ratio) and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return True, None, False
            pivots += 1
            if pivots > max_pivots:
                return True, None, False
            _, pr = best
            row = tab[pr]
            a = row[enter]
            if a != one:
                row = {k: c / a for k, c in row.items()}
                tab[pr] = row
                rhs_col[pr] = rhs_col[pr] / a
            for i in range(m):
                if i == pr:
                    continue
                f = tab[i].get(enter)
                if f is None or f == zero:
                    continue
                new = dict(tab[i])
                for k, c in row.items():
                    val = new.get(k, zero) - f * c
                    if val == zero:
                        new.pop(k, None)
                    else:
                        new[k] = val
                tab[i] = new
                rhs_col[i] = rhs_col[i] - f * rhs_col[pr]
            f = obj.get(enter)
            if f is not None and f != zero:
                for k, c in row.items():
                    val = obj.get(k, zero) - f * c
                    if val == zero:
                        obj.pop(k, None)
                    else:
                        obj[k] = val
            basis[pr] = enter
        z = zero
        for i, b in enumerate(basis):
            if b in art_set:
                z = z + rhs_col[i]
        sol = {v: zero for v in names}
        for i, b in enumerate(basis):
            if b < n:
                sol[names[b]] = rhs_col[i]
        return not lt(zero, z), (sol if not lt(zero, z) else None), True

    def lp_feasible(self, box: _Box) -> tuple[bool, Optional[dict[str, Fraction]]]:
        """Relaxation check.  A float run filters; infeasibility is only
        reported after exact rational confirmation."""
        frows, names, trivially_bad = self._build_rows_le(box, float)
        if trivially_bad:
            return False, None
        if not names:
            return True, None
        feasible, fsol = _phase1_float(frows, names)
        if feasible and fsol is not None:
            return True, {v: Fraction(box.lo[v]) + Fraction(round(fsol[v] * 2 ** 20), 2 ** 20)
                          for v in names}
        if feasible:
            return True, None  # float run inconclusive; do not prune
        # float run claims infeasible: confirm exactly before pruning
        erows, names, trivially_bad = self._build_rows_le(box, Fraction)
        if trivially_bad:
            return False, None
        efeasible, esol, certified = self._phase1(
            erows, names, Fraction(0), Fraction(1),
            lambda x: x < 0, lambda a, b: a < b)
        if not certified:
            return True, None
        if efeasible:
            sol = None
            if esol is not None:
                sol = {v: Fraction(box.lo[v]) + esol[v] for v in names}
            return True, sol
        return False, None

    # -- search --------------------------------------------------------------

    def run(self, root: _Box) -> SolveResult:
        stack = [root]
        while stack:
            self.nodes += 1
            if self.nodes > self.node_budget:
                return SolveResult(UNKNOWN, nodes=self.nodes)
            box = stack.pop()
            if not self.propagate(box):
                continue
            unfixed = [v for v in self.program.variables if box.lo[v] != box.hi[v]]
            if not unfixed:
                cand = {v: box.lo[v] for v in self.program.variables}
                if self.program.check(cand):
                    return SolveResult(FEASIBLE, cand, self.nodes)
                continue
            point = None
            if all(self.program.variables[v].kind != BOOL for v in unfixed):
                # with the big-M gates fixed the system is plain linear and
                # (after substituting pinned variables) small
                ok, point = self.lp_feasible(box)
                if not ok:
                    continue
            if point is not None:
                cand = {}
                for v in self.program.variables:
                    step = self.steps[v]
                    x = point.get(v, Fraction(box.lo[v]))
                    r = round(x / step) * step
                    cand[v] = min(max(int(r), box.lo[v]), box.hi[v])
                if self.program.check(cand):
                    return SolveResult(FEASIBLE, cand, self.nodes)
            v, split = self._pick_branch(box, unfixed, point)
            step = self.steps[v]
            left = box.copy()
            left.hi[v] = split
            right = box.copy()
            right.lo[v] = split + step
            if point is not None and point.get(v, Fraction(box.lo[v])) > split:
                stack.extend((left, right))  # explore right first
            else:
                stack.extend((right, left))
        return SolveResult(INFEASIBLE, nodes=self.nodes)

    def _pick_branch(self, box: _Box, unfixed: list[str],
                     point) -> tuple[str, int]:
        # booleans gate the big-M structure: fix them first
        for v in unfixed:
            if self.program.variables[v].kind == BOOL:
                return v, box.lo[v]
        if point is not None:
            for v in unfixed:
                x = point.get(v)
                step = self.steps[v]
                if x is not None and not (x.denominator == 1 and x.numerator % step == 0):
                    split = _floor_step(x, step)
                    return v, max(box.lo[v], min(split, box.hi[v] - step))
        v = max(unfixed, key=lambda w: box.hi[w] - box.lo[w])
        step = self.steps[v]
        width_steps = (box.hi[v] - box.lo[v]) // step
        return v, box.lo[v] + (width_steps // 2) * step


def solve(program: MILPProgram, node_budget: int = DEFAULT_NODE_BUDGET,
          time_budget_s: Optional[float] = None) -> SolveResult:
    """Decide feasibility; a FEASIBLE assignment satisfies every constraint
    exactly (checked by substitution before returning).

    `time_budget_s` adds a wall-clock cap on top of the node budget; hitting
    either yields UNKNOWN, which callers must treat conservatively.
    """
    lo: dict[str, int] = {}
    hi: dict[str, int] = {}
    for var in program.variables.values():
        a = _ceil_step(var.lo, var.step)
        b = _floor_step(var.hi, var.step)
        if a > b:
            return SolveResult(INFEASIBLE)
        lo[var.name], hi[var.name] = a, b
    deadline = None if time_budget_s is None else time.monotonic() + time_budget_s
    solver = _Solver(program, node_budget, deadline)
    return solver.run(_Box(lo, hi))
