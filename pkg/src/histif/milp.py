"""Compile quantifier-free conditions over symbolic variables into MILPs.

Everything numeric is scaled to integers (decimals by 10**scale, integers
likewise so that mixed comparisons stay exact); text must already be
dictionary-encoded.  Each subexpression owns one result variable.  The
comparison, boolean, and CASE rules use per-constraint big-M constants
derived from the operand bounds; strict inequalities are carried
explicitly and discharged as >= rhs+1 at solve time (exact, because every
term is an integer after scaling).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import CompileError, DomainSizeError
from .expressions import (
    And,
    Arith,
    Bool,
    Case,
    Cmp,
    Cond,
    Const,
    Expr,
    IsNull,
    Node,
    Not,
    Or,
    Sym,
    eval_cond_env,
)
from .values import Dec, T_DEC, T_INT, Value, decimal_scale

BOOL = "bool"
INT = "int"


@dataclass(frozen=True)
class LinVar:
    name: str
    kind: str  # bool | int
    lo: int
    hi: int
    step: int = 1  # integer-typed engine values step by the decimal scale


@dataclass(frozen=True)
class LinCon:
    """sum(coeffs) (<=|>=|=|<|>) rhs, exact rational coefficients."""

    coeffs: tuple[tuple[str, Fraction], ...]
    op: str
    rhs: Fraction

    def pretty(self) -> str:
        terms = " + ".join(f"{c}*{v}" for v, c in self.coeffs)
        return f"{terms} {self.op} {self.rhs}"


@dataclass
class MILPProgram:
    variables: dict[str, LinVar]
    constraints: list[LinCon]
    root: str
    scale: int
    origin: Optional[Cond] = None

    def check(self, assignment: dict[str, int]) -> bool:
        """Exact substitution check of every constraint."""
        for con in self.constraints:
            total = sum(c * assignment[v] for v, c in con.coeffs)
            ok = {
                "<=": total <= con.rhs,
                ">=": total >= con.rhs,
                "=": total == con.rhs,
                "<": total < con.rhs,
                ">": total > con.rhs,
            }[con.op]
            if not ok:
                return False
        for var in self.variables.values():
            v = assignment[var.name]
            if not (var.lo <= v <= var.hi) or v % var.step != 0:
                return False
        return True


def _scaled(v: Value, scale_factor: int) -> int:
    if isinstance(v, bool):
        return scale_factor if v else 0
    if isinstance(v, int):
        return v * scale_factor
    if isinstance(v, Dec):
        return v.units
    raise CompileError(f"value {v!r} cannot enter a linear program")


def _int_multiplier(v: Value, scale_factor: int) -> Optional[int]:
    """The integer k such that multiplying by v multiplies scaled units by k;
    None when v is not integer-valued."""
    if isinstance(v, bool) or v is None:
        return None
    if isinstance(v, int):
        return v
    if isinstance(v, Dec):
        if v.units % scale_factor == 0:
            return v.units // scale_factor
        return None
    return None


class _Compiler:
    def __init__(self, bounds: dict[str, tuple], types: dict[str, str],
                 big_m_floor: int = 0):
        self.scale = decimal_scale()
        self.sf = 10 ** self.scale
        self.bounds = bounds
        self.types = types
        self.big_m_floor = big_m_floor
        self.variables: dict[str, LinVar] = {}
        self.constraints: list[LinCon] = []
        self.num_memo: dict[Expr, tuple[str, int, int]] = {}
        self.bool_memo: dict[Cond, str] = {}
        self.counter = itertools.count(1)

    # -- variable helpers ---------------------------------------------------

    def new_num(self, lo: int, hi: int, step: int = 1) -> str:
        name = f"v{next(self.counter)}"
        self.variables[name] = LinVar(name, INT, lo, hi, step)
        return name

    def new_bool(self) -> str:
        name = f"b{next(self.counter)}"
        self.variables[name] = LinVar(name, BOOL, 0, 1)
        return name

    def add(self, coeffs, op: str, rhs) -> None:
        """Accepts (var, coeff) pairs; repeated variables sum up."""
        total: dict[str, Fraction] = {}
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        for v, c in items:
            total[v] = total.get(v, Fraction(0)) + Fraction(c)
        self.constraints.append(LinCon(
            tuple(sorted((v, c) for v, c in total.items() if c != 0)),
            op, Fraction(rhs),
        ))

    def big_m(self, *values: int) -> int:
        return max(self.big_m_floor, max(abs(v) for v in values) + 1)

    # -- numeric expressions -------------------------------------------------

    def numeric(self, e: Expr) -> tuple[str, int, int]:
        if e in self.num_memo:
            return self.num_memo[e]
        out = self._numeric(e)
        self.num_memo[e] = out
        return out

    def _numeric(self, e: Expr) -> tuple[str, int, int]:
        if isinstance(e, Sym):
            if e.name not in self.bounds:
                raise CompileError(f"unbounded variable {e.name}")
            lo_v, hi_v = self.bounds[e.name]
            lo, hi = _scaled(lo_v, self.sf), _scaled(hi_v, self.sf)
            if e.name not in self.variables:
                step = self.sf if self.types.get(e.name, T_INT) != T_DEC else 1
                self.variables[e.name] = LinVar(e.name, INT, lo, hi, step)
            var = self.variables[e.name]
            return e.name, var.lo, var.hi
        if isinstance(e, Const):
            if e.value is None:
                raise CompileError("null constant in linear context")
            c = _scaled(e.value, self.sf)
            name = self.new_num(c, c, step=1)
            self.add([(name, 1)], "=", c)
            return name, c, c
        if isinstance(e, Arith):
            if e.op == "/":
                raise CompileError("division is not linear over scaled integers")
            if e.op == "*":
                for const_side, other in ((e.left, e.right), (e.right, e.left)):
                    if isinstance(const_side, Const):
                        k = _int_multiplier(const_side.value, self.sf)
                        if k is None:
                            raise CompileError(
                                f"multiplier {const_side.value!r} is not integer-valued")
                        v1, lo1, hi1 = self.numeric(other)
                        lo, hi = sorted((k * lo1, k * hi1))
                        v = self.new_num(lo, hi)
                        self.add([(v1, k), (v, -1)], "=", 0)
                        return v, lo, hi
                raise CompileError("product of two non-constant expressions")
            v1, lo1, hi1 = self.numeric(e.left)
            v2, lo2, hi2 = self.numeric(e.right)
            if e.op == "+":
                lo, hi = lo1 + lo2, hi1 + hi2
                v = self.new_num(lo, hi)
                self.add([(v1, 1), (v2, 1), (v, -1)], "=", 0)
            else:
                lo, hi = lo1 - hi2, hi1 - lo2
                v = self.new_num(lo, hi)
                self.add([(v1, 1), (v2, -1), (v, -1)], "=", 0)
            return v, lo, hi
        if isinstance(e, Case):
            b = self.boolean(e.cond)
            v1, lo1, hi1 = self.numeric(e.then)
            v2, lo2, hi2 = self.numeric(e.other)
            m = self.big_m(lo1, hi1, lo2, hi2)
            lo, hi = min(lo1, lo2), max(hi1, hi2)
            v = self.new_num(lo, hi)
            vif = self.new_num(min(lo1, 0), max(hi1, 0))
            velse = self.new_num(min(lo2, 0), max(hi2, 0))
            self.add([(vif, 1), (velse, 1), (v, -1)], "=", 0)
            self.add([(vif, 1), (v1, -1), (b, m)], "<=", m)
            self.add([(vif, 1), (v1, -1), (b, -m)], ">=", -m)
            self.add([(vif, 1), (b, -m)], "<=", 0)
            self.add([(vif, 1), (b, m)], ">=", 0)
            self.add([(velse, 1), (v2, -1), (b, -m)], "<=", 0)
            self.add([(velse, 1), (v2, -1), (b, m)], ">=", 0)
            self.add([(velse, 1), (b, m)], "<=", m)
            self.add([(velse, 1), (b, -m)], ">=", -m)
            return v, lo, hi
        raise CompileError(f"not a numeric expression: {e!r}")

    # -- boolean conditions ----------------------------------------------------

    def boolean(self, c: Cond) -> str:
        if c in self.bool_memo:
            return self.bool_memo[c]
        out = self._boolean(c)
        self.bool_memo[c] = out
        return out

    def _boolean(self, c: Cond) -> str:
        if isinstance(c, Bool):
            b = self.new_bool()
            self.add([(b, 1)], "=", 1 if c.value else 0)
            return b
        if isinstance(c, Not):
            b1 = self.boolean(c.cond)
            b = self.new_bool()
            self.add([(b, 1), (b1, 1)], "=", 1)
            return b
        if isinstance(c, And):
            b1, b2 = self.boolean(c.left), self.boolean(c.right)
            b = self.new_bool()
            self.add([(b1, 1), (b2, 1), (b, -2)], "<=", 1)
            self.add([(b1, 1), (b2, 1), (b, -2)], ">=", 0)
            return b
        if isinstance(c, Or):
            b1, b2 = self.boolean(c.left), self.boolean(c.right)
            b = self.new_bool()
            self.add([(b1, 1), (b2, 1), (b, -2)], "<=", 0)
            self.add([(b1, 1), (b2, 1), (b, -1)], ">=", 0)
            return b
        if isinstance(c, IsNull):
            if isinstance(c.expr, Const):
                b = self.new_bool()
                self.add([(b, 1)], "=", 1 if c.expr.value is None else 0)
                return b
            raise CompileError("IS NULL over symbolic values is not linearizable")
        if isinstance(c, Cmp):
            if c.op == "<":
                return self.strict_less(c.left, c.right)
            if c.op == "<=":
                return self.less_equal(c.left, c.right)
            if c.op == ">":
                return self.boolean(Not(Cmp("<=", c.left, c.right)))
            if c.op == ">=":
                return self.boolean(Not(Cmp("<", c.left, c.right)))
            if c.op == "=":
                return self.boolean(And(Cmp("<=", c.left, c.right),
                                        Cmp("<=", c.right, c.left)))
            if c.op == "!=":
                return self.boolean(Not(Cmp("=", c.left, c.right)))
        raise CompileError(f"not a boolean condition: {c!r}")

    def strict_less(self, e1: Expr, e2: Expr) -> str:
        v1, lo1, hi1 = self.numeric(e1)
        v2, lo2, hi2 = self.numeric(e2)
        b = self.new_bool()
        m = self.big_m(hi2 - lo1, hi1 - lo2 + 1)
        self.add([(v1, 1), (v2, -1), (b, m)], ">=", 0)
        self.add([(v2, 1), (v1, -1), (b, -m)], ">", -m)
        return b

    def less_equal(self, e1: Expr, e2: Expr) -> str:
        v1, lo1, hi1 = self.numeric(e1)
        v2, lo2, hi2 = self.numeric(e2)
        b = self.new_bool()
        m = self.big_m(hi2 - lo1 + 1, hi1 - lo2)
        self.add([(v1, 1), (v2, -1), (b, m)], ">", 0)
        self.add([(v2, 1), (v1, -1), (b, -m)], ">=", -m)
        return b


def compile_condition(f: Cond, bounds: dict[str, tuple],
                      types: Optional[dict[str, str]] = None,
                      big_m_floor: int = 0) -> MILPProgram:
    """Translate a condition into a feasibility MILP with b_root = 1.

    `bounds` gives (lo, hi) engine values for every free variable; bounds
    for intermediate results are derived structurally.  Raises CompileError
    for non-linear shapes (division, products of variables, symbolic null
    tests, text that was not dictionary-encoded).
    """
    comp = _Compiler(bounds, types or {}, big_m_floor)
    root = comp.boolean(f)
    comp.add([(root, 1)], "=", 1)
    return MILPProgram(comp.variables, comp.constraints, root, comp.scale, origin=f)


def encode_text_constants(node: Node, text_dict) -> Node:
    """Replace text constants with their dictionary codes for compilation."""
    if isinstance(node, Const) and isinstance(node.value, str):
        return Const(text_dict.encode(node.value))
    from .expressions import children, _rebuild

    kids = children(node)
    if not kids:
        return node
    return _rebuild(node, tuple(encode_text_constants(k, text_dict) for k in kids))


def interval_of(e: Expr, bounds: dict[str, tuple]) -> tuple:
    """Structural (lo, hi) bounds of an expression in engine-value space."""
    if isinstance(e, Sym):
        if e.name not in bounds:
            raise CompileError(f"unbounded variable {e.name}")
        return bounds[e.name]
    if isinstance(e, Const):
        if e.value is None or isinstance(e.value, str):
            raise CompileError(f"value {e.value!r} has no numeric interval")
        v = 1 if e.value is True else 0 if e.value is False else e.value
        return (v, v)
    if isinstance(e, Arith):
        lo1, hi1 = interval_of(e.left, bounds)
        lo2, hi2 = interval_of(e.right, bounds)
        if e.op == "+":
            return (lo1 + lo2, hi1 + hi2)
        if e.op == "-":
            return (lo1 - hi2, hi1 - lo2)
        if e.op == "*":
            corners = (lo1 * lo2, lo1 * hi2, hi1 * lo2, hi1 * hi2)
            return (min(corners), max(corners))
        raise CompileError("division has no exact interval over scaled integers")
    if isinstance(e, Case):
        lo1, hi1 = interval_of(e.then, bounds)
        lo2, hi2 = interval_of(e.other, bounds)
        return (min(lo1, lo2), max(hi1, hi2))
    raise CompileError(f"not a numeric expression: {e!r}")


# ---------------------------------------------------------------------------
# Finite-domain brute force (independent test oracle)

BRUTE_FORCE_CAP = 10 ** 6


def brute_force_sat(f: Cond, domains: dict[str, list]) -> Optional[dict[str, Value]]:
    """Exhaustively search finite domains; the first satisfying assignment,
    or None when the condition is unsatisfiable over the grid."""
    size = math.prod(len(d) for d in domains.values()) if domains else 1
    if size > BRUTE_FORCE_CAP:
        raise DomainSizeError(f"domain grid of {size} assignments exceeds cap")
    names = sorted(domains)
    for combo in itertools.product(*(domains[n] for n in names)):
        env = dict(zip(names, combo))
        if eval_cond_env(f, env):
            return env
    return None


# ---------------------------------------------------------------------------
# Optional LP-format export


def to_lp_format(p: MILPProgram) -> str:
    lines = ["\\ feasibility program", "Minimize", " obj: 0", "Subject To"]
    for i, con in enumerate(p.constraints):
        op = {"<=": "<=", ">=": ">=", "=": "=", "<": "<=", ">": ">="}[con.op]
        rhs = con.rhs
        if con.op == "<":
            rhs -= 1
        elif con.op == ">":
            rhs += 1
        terms = " ".join(
            f"{'+' if c >= 0 else '-'} {abs(c)} {v}" for v, c in con.coeffs
        )
        lines.append(f" c{i}: {terms} {op} {rhs}")
    lines.append("Bounds")
    for var in p.variables.values():
        lines.append(f" {var.lo} <= {var.name} <= {var.hi}")
    lines.append("Generals")
    lines.append(" " + " ".join(sorted(p.variables)))
    lines.append("End")
    return "\n".join(lines) + "\n"
