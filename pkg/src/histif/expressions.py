"""Expression and condition ASTs: evaluation, substitution, simplification.

Scalar expressions range over attribute references, constants, the four
arithmetic operators, and CASE.  Conditions are comparisons, boolean
connectives, null tests, and the constants true/false.  Both kinds are
immutable trees; every transformation returns a new tree.

Evaluation follows two-valued logic: any comparison with a Null operand is
false (IS NULL is the explicit null test), arithmetic over Null yields
Null, and division by zero yields Null.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .errors import ExprTypeError, SchemaError
from .values import (
    Dec,
    T_BOOL,
    T_DEC,
    T_INT,
    T_TEXT,
    Value,
    type_of_value,
    value_from_json,
    value_to_json,
)

ARITH_OPS = ("+", "-", "*", "/")
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Attr:
    name: str


@dataclass(frozen=True)
class Const:
    value: Value


@dataclass(frozen=True)
class Sym:
    """Reference to a symbolic variable (used by the VC-table machinery)."""

    name: str


@dataclass(frozen=True)
class Arith:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Case:
    cond: "Cond"
    then: "Expr"
    other: "Expr"


@dataclass(frozen=True)
class Cmp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class And:
    left: "Cond"
    right: "Cond"


@dataclass(frozen=True)
class Or:
    left: "Cond"
    right: "Cond"


@dataclass(frozen=True)
class Not:
    cond: "Cond"


@dataclass(frozen=True)
class IsNull:
    expr: "Expr"


@dataclass(frozen=True)
class Bool:
    value: bool


TRUE = Bool(True)
FALSE = Bool(False)

Expr = Union[Attr, Const, Sym, Arith, Case]
Cond = Union[Cmp, And, Or, Not, IsNull, Bool]
Node = Union[Expr, Cond]


def and_all(conds: Sequence[Cond]) -> Cond:
    out: Cond = TRUE
    for c in conds:
        out = c if out == TRUE else And(out, c)
    return out


def or_all(conds: Sequence[Cond]) -> Cond:
    out: Cond = FALSE
    for c in conds:
        out = c if out == FALSE else Or(out, c)
    return out


# ---------------------------------------------------------------------------
# Schema


@dataclass(frozen=True)
class Schema:
    relation: str
    attrs: tuple[tuple[str, str], ...]  # (name, type tag)

    def __post_init__(self):
        names = [a for a, _ in self.attrs]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate attribute names in {self.relation}: {names}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.attrs)

    @property
    def types(self) -> tuple[str, ...]:
        return tuple(t for _, t in self.attrs)

    def position(self, name: str) -> int:
        for i, (a, _) in enumerate(self.attrs):
            if a == name:
                return i
        raise SchemaError(f"unknown attribute {name!r} in relation {self.relation}")

    def type_of(self, name: str) -> str:
        return self.attrs[self.position(name)][1]

    def arity(self) -> int:
        return len(self.attrs)

    def renamed(self, relation: str) -> "Schema":
        return Schema(relation, self.attrs)

    def to_json(self) -> dict:
        return {
            "relation": self.relation,
            "attributes": [{"name": a, "type": t} for a, t in self.attrs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Schema":
        return cls(
            obj["relation"],
            tuple((a["name"], a["type"]) for a in obj["attributes"]),
        )


# ---------------------------------------------------------------------------
# Null-aware primitive operations (shared by the interpreter and the
# compiled row functions)


def _arith(op: str, a: Value, b: Value) -> Value:
    if a is None or b is None:
        return None
    ta, tb = type_of_value(a), type_of_value(b)
    if ta not in (T_INT, T_DEC) or tb not in (T_INT, T_DEC):
        raise ExprTypeError(f"arithmetic {op} over {ta} and {tb}")
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        try:
            if isinstance(a, Dec) or isinstance(b, Dec):
                return a / b
            if b == 0:
                return None
            if a % b == 0:
                return a // b
            return Dec.from_int(a) / b
        except ZeroDivisionError:
            return None
    raise ExprTypeError(f"unknown arithmetic operator {op!r}")


def _compare(op: str, a: Value, b: Value) -> bool:
    if a is None or b is None:
        return False
    ta, tb = type_of_value(a), type_of_value(b)
    numeric = (T_INT, T_DEC)
    if ta in numeric and tb in numeric:
        pass
    elif ta == tb and ta in (T_TEXT, T_BOOL):
        if op not in ("=", "!="):
            raise ExprTypeError(f"ordering comparison {op} over {ta}")
    else:
        raise ExprTypeError(f"comparison {op} over {ta} and {tb}")
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise ExprTypeError(f"unknown comparison operator {op!r}")


# ---------------------------------------------------------------------------
# Evaluation


def eval_expr(e: Expr, t: Sequence[Value], s: Schema) -> Value:
    """Evaluate a scalar expression over a tuple conforming to schema s."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Attr):
        return t[s.position(e.name)]
    if isinstance(e, Arith):
        return _arith(e.op, eval_expr(e.left, t, s), eval_expr(e.right, t, s))
    if isinstance(e, Case):
        if eval_cond(e.cond, t, s):
            return eval_expr(e.then, t, s)
        return eval_expr(e.other, t, s)
    if isinstance(e, Sym):
        raise SchemaError(f"symbolic variable {e.name} in concrete evaluation")
    raise ExprTypeError(f"not an expression: {e!r}")


def eval_cond(c: Cond, t: Sequence[Value], s: Schema) -> bool:
    """Evaluate a condition over a tuple; total on Null inputs."""
    if isinstance(c, Bool):
        return c.value
    if isinstance(c, Cmp):
        return _compare(c.op, eval_expr(c.left, t, s), eval_expr(c.right, t, s))
    if isinstance(c, And):
        return eval_cond(c.left, t, s) and eval_cond(c.right, t, s)
    if isinstance(c, Or):
        return eval_cond(c.left, t, s) or eval_cond(c.right, t, s)
    if isinstance(c, Not):
        return not eval_cond(c.cond, t, s)
    if isinstance(c, IsNull):
        return eval_expr(c.expr, t, s) is None
    raise ExprTypeError(f"not a condition: {c!r}")


def eval_expr_env(e: Expr, env: Mapping[str, Value]) -> Value:
    """Evaluate an expression whose leaves are Sym references and constants."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Sym):
        return env[e.name]
    if isinstance(e, Arith):
        return _arith(e.op, eval_expr_env(e.left, env), eval_expr_env(e.right, env))
    if isinstance(e, Case):
        if eval_cond_env(e.cond, env):
            return eval_expr_env(e.then, env)
        return eval_expr_env(e.other, env)
    if isinstance(e, Attr):
        raise SchemaError(f"attribute {e.name} in symbolic evaluation")
    raise ExprTypeError(f"not an expression: {e!r}")


def eval_cond_env(c: Cond, env: Mapping[str, Value]) -> bool:
    if isinstance(c, Bool):
        return c.value
    if isinstance(c, Cmp):
        return _compare(c.op, eval_expr_env(c.left, env), eval_expr_env(c.right, env))
    if isinstance(c, And):
        return eval_cond_env(c.left, env) and eval_cond_env(c.right, env)
    if isinstance(c, Or):
        return eval_cond_env(c.left, env) or eval_cond_env(c.right, env)
    if isinstance(c, Not):
        return not eval_cond_env(c.cond, env)
    if isinstance(c, IsNull):
        return eval_expr_env(c.expr, env) is None
    raise ExprTypeError(f"not a condition: {c!r}")


# ---------------------------------------------------------------------------
# Structural helpers


def children(node: Node) -> tuple[Node, ...]:
    if isinstance(node, (Attr, Const, Sym, Bool)):
        return ()
    if isinstance(node, (Arith, Cmp)):
        return (node.left, node.right)
    if isinstance(node, (And, Or)):
        return (node.left, node.right)
    if isinstance(node, Case):
        return (node.cond, node.then, node.other)
    if isinstance(node, Not):
        return (node.cond,)
    if isinstance(node, IsNull):
        return (node.expr,)
    raise ExprTypeError(f"not an AST node: {node!r}")


def _rebuild(node: Node, kids: tuple[Node, ...]) -> Node:
    if isinstance(node, Arith):
        return Arith(node.op, kids[0], kids[1])
    if isinstance(node, Cmp):
        return Cmp(node.op, kids[0], kids[1])
    if isinstance(node, And):
        return And(kids[0], kids[1])
    if isinstance(node, Or):
        return Or(kids[0], kids[1])
    if isinstance(node, Case):
        return Case(kids[0], kids[1], kids[2])
    if isinstance(node, Not):
        return Not(kids[0])
    if isinstance(node, IsNull):
        return IsNull(kids[0])
    return node


def node_count(node: Node) -> int:
    return 1 + sum(node_count(k) for k in children(node))


def attributes_of(node: Node) -> set[str]:
    if isinstance(node, Attr):
        return {node.name}
    out: set[str] = set()
    for k in children(node):
        out |= attributes_of(k)
    return out


def symbols_of(node: Node) -> set[str]:
    if isinstance(node, Sym):
        return {node.name}
    out: set[str] = set()
    for k in children(node):
        out |= symbols_of(k)
    return out


def substitute(node: Node, pairs: Union[tuple, Iterable[tuple]]) -> Node:
    """Simultaneously replace every occurrence of each target subtree.

    `pairs` is either a single (target, replacement) pair or an iterable of
    pairs.  Substitution is simultaneous: replacements are not re-scanned.
    """
    if (
        isinstance(pairs, tuple)
        and len(pairs) == 2
        and not isinstance(pairs[0], tuple)
    ):
        pairs = [pairs]
    pair_list = list(pairs)

    def walk(n: Node) -> Node:
        for target, replacement in pair_list:
            if n == target:
                return replacement
        kids = children(n)
        if not kids:
            return n
        new_kids = tuple(walk(k) for k in kids)
        if new_kids == kids:
            return n
        return _rebuild(n, new_kids)

    return walk(node)


# ---------------------------------------------------------------------------
# Type inference


def infer_type(node: Node, s: Optional[Schema] = None,
               sym_types: Optional[Mapping[str, str]] = None) -> Optional[str]:
    """Infer the semantic type of an expression (None means "null of any type"),
    or check well-formedness of a condition (returns "bool").
    """
    if isinstance(node, Const):
        return type_of_value(node.value)
    if isinstance(node, Attr):
        if s is None:
            raise SchemaError(f"attribute {node.name} without schema")
        return s.type_of(node.name)
    if isinstance(node, Sym):
        if sym_types is None or node.name not in sym_types:
            raise SchemaError(f"untyped symbolic variable {node.name}")
        return sym_types[node.name]
    if isinstance(node, Arith):
        lt = infer_type(node.left, s, sym_types)
        rt = infer_type(node.right, s, sym_types)
        for t in (lt, rt):
            if t not in (None, T_INT, T_DEC):
                raise ExprTypeError(f"arithmetic over {t}")
        if node.op == "/":
            if lt == T_INT and rt == T_INT:
                return T_INT  # exact when divisible, widened to dec otherwise
            return T_DEC
        if T_DEC in (lt, rt):
            return T_DEC
        return T_INT if T_INT in (lt, rt) else None
    if isinstance(node, Case):
        infer_type(node.cond, s, sym_types)
        tt = infer_type(node.then, s, sym_types)
        ot = infer_type(node.other, s, sym_types)
        if tt is None:
            return ot
        if ot is None or tt == ot:
            return tt
        if {tt, ot} == {T_INT, T_DEC}:
            return T_DEC
        raise ExprTypeError(f"case branches have types {tt} and {ot}")
    if isinstance(node, Cmp):
        lt = infer_type(node.left, s, sym_types)
        rt = infer_type(node.right, s, sym_types)
        numeric = (T_INT, T_DEC, None)
        if lt in numeric and rt in numeric:
            return T_BOOL
        if lt == rt or lt is None or rt is None:
            if node.op not in ("=", "!=") and (lt in (T_TEXT, T_BOOL) or rt in (T_TEXT, T_BOOL)):
                raise ExprTypeError(f"ordering comparison {node.op} over {lt}")
            return T_BOOL
        raise ExprTypeError(f"comparison over {lt} and {rt}")
    if isinstance(node, (And, Or)):
        infer_type(node.left, s, sym_types)
        infer_type(node.right, s, sym_types)
        return T_BOOL
    if isinstance(node, Not):
        infer_type(node.cond, s, sym_types)
        return T_BOOL
    if isinstance(node, IsNull):
        infer_type(node.expr, s, sym_types)
        return T_BOOL
    if isinstance(node, Bool):
        return T_BOOL
    raise ExprTypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Simplification

_NEGATION = {"=": "!=", "!=": "=", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}


def _const_of(node: Node) -> Optional[Value]:
    if isinstance(node, Const):
        return node.value
    return None


def _atom_interval(c: Cond) -> Optional[tuple[str, Optional[Value], bool, Optional[Value], bool]]:
    """Decompose an atomic numeric comparison `attr op const` into
    (attr, lo, lo_strict, hi, hi_strict); None when not of that shape."""
    if not isinstance(c, Cmp):
        return None
    if isinstance(c.left, Attr) and isinstance(c.right, Const):
        attr, op, v = c.left.name, c.op, c.right.value
    elif isinstance(c.right, Attr) and isinstance(c.left, Const):
        flip = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "=": "=", "!=": "!="}
        attr, op, v = c.right.name, flip[c.op], c.left.value
    else:
        return None
    if v is None or type_of_value(v) not in (T_INT, T_DEC):
        return None
    if op == "=":
        return (attr, v, False, v, False)
    if op == "<":
        return (attr, None, False, v, True)
    if op == "<=":
        return (attr, None, False, v, False)
    if op == ">":
        return (attr, v, True, None, False)
    if op == ">=":
        return (attr, v, False, None, False)
    return None


def _conj_atoms(c: Cond) -> Optional[list]:
    if isinstance(c, And):
        left = _conj_atoms(c.left)
        right = _conj_atoms(c.right)
        if left is None or right is None:
            return None
        return left + right
    atom = _atom_interval(c)
    return [atom] if atom is not None else None


def _intervals_of(atoms: list) -> dict:
    box: dict = {}
    for attr, lo, los, hi, his in atoms:
        cur = box.get(attr, (None, False, None, False))
        clo, clos, chi, chis = cur
        if lo is not None and (clo is None or lo > clo or (lo == clo and los)):
            clo, clos = lo, los
        if hi is not None and (chi is None or hi < chi or (hi == chi and his)):
            chi, chis = hi, his
        box[attr] = (clo, clos, chi, chis)
    return box


def _implies(a: Cond, b: Cond) -> bool:
    """Sound, incomplete implication test over conjunctions of numeric
    attribute/constant comparisons.  Used for boolean absorption."""
    aa, bb = _conj_atoms(a), _conj_atoms(b)
    if aa is None or bb is None:
        return False
    box = _intervals_of(aa)
    for attr, lo, los, hi, his in bb:
        if attr not in box:
            return False
        clo, clos, chi, chis = box[attr]
        if lo is not None:
            if clo is None or clo < lo or (clo == lo and los and not clos):
                return False
        if hi is not None:
            if chi is None or chi > hi or (chi == hi and his and not chis):
                return False
    return True


def simplify(node: Node) -> Node:
    """Semantics-preserving simplification: constant folding, boolean
    absorption, double-negation removal, and case collapsing."""
    kids = children(node)
    if kids:
        node = _rebuild(node, tuple(simplify(k) for k in kids))

    if isinstance(node, Arith):
        lv, rv = _const_of(node.left), _const_of(node.right)
        if isinstance(node.left, Const) and isinstance(node.right, Const):
            return Const(_arith(node.op, lv, rv))
        # identity elements preserve Null propagation
        if node.op == "+" and rv == 0 and not isinstance(rv, bool):
            return node.left
        if node.op == "+" and lv == 0 and not isinstance(lv, bool):
            return node.right
        if node.op == "-" and rv == 0 and not isinstance(rv, bool):
            return node.left
        if node.op == "*" and rv == 1:
            return node.left
        if node.op == "*" and lv == 1:
            return node.right
        return node

    if isinstance(node, Case):
        if node.cond == TRUE:
            return node.then
        if node.cond == FALSE:
            return node.other
        if node.then == node.other:
            return node.then
        return node

    if isinstance(node, Cmp):
        if isinstance(node.left, Const) and isinstance(node.right, Const):
            return Bool(_compare(node.op, node.left.value, node.right.value))
        return node

    if isinstance(node, IsNull):
        if isinstance(node.expr, Const):
            return Bool(node.expr.value is None)
        return node

    if isinstance(node, Not):
        inner = node.cond
        if isinstance(inner, Bool):
            return Bool(not inner.value)
        if isinstance(inner, Not):
            return inner.cond
        return node

    if isinstance(node, And):
        a, b = node.left, node.right
        if a == FALSE or b == FALSE:
            return FALSE
        if a == TRUE:
            return b
        if b == TRUE:
            return a
        if a == b:
            return a
        if _implies(a, b):
            return a
        if _implies(b, a):
            return b
        return node

    if isinstance(node, Or):
        a, b = node.left, node.right
        if a == TRUE or b == TRUE:
            return TRUE
        if a == FALSE:
            return b
        if b == FALSE:
            return a
        if a == b:
            return a
        if _implies(a, b):
            return b
        if _implies(b, a):
            return a
        return node

    return node


# ---------------------------------------------------------------------------
# JSON serialization (canonical tagged-variant encoding)


def node_to_json(node: Node) -> dict:
    if isinstance(node, Attr):
        return {"kind": "attr", "name": node.name}
    if isinstance(node, Const):
        return {"kind": "const", "value": value_to_json(node.value)}
    if isinstance(node, Sym):
        return {"kind": "sym", "name": node.name}
    if isinstance(node, Arith):
        return {"kind": "arith", "op": node.op,
                "left": node_to_json(node.left), "right": node_to_json(node.right)}
    if isinstance(node, Case):
        return {"kind": "case", "cond": node_to_json(node.cond),
                "then": node_to_json(node.then), "else": node_to_json(node.other)}
    if isinstance(node, Cmp):
        return {"kind": "cmp", "op": node.op,
                "left": node_to_json(node.left), "right": node_to_json(node.right)}
    if isinstance(node, And):
        return {"kind": "and", "left": node_to_json(node.left), "right": node_to_json(node.right)}
    if isinstance(node, Or):
        return {"kind": "or", "left": node_to_json(node.left), "right": node_to_json(node.right)}
    if isinstance(node, Not):
        return {"kind": "not", "cond": node_to_json(node.cond)}
    if isinstance(node, IsNull):
        return {"kind": "isnull", "expr": node_to_json(node.expr)}
    if isinstance(node, Bool):
        return {"kind": "bool", "value": node.value}
    raise ExprTypeError(f"not an AST node: {node!r}")


def node_from_json(obj: dict) -> Node:
    kind = obj["kind"]
    if kind == "attr":
        return Attr(obj["name"])
    if kind == "const":
        return Const(value_from_json(obj["value"]))
    if kind == "sym":
        return Sym(obj["name"])
    if kind == "arith":
        return Arith(obj["op"], node_from_json(obj["left"]), node_from_json(obj["right"]))
    if kind == "case":
        return Case(node_from_json(obj["cond"]), node_from_json(obj["then"]),
                    node_from_json(obj["else"]))
    if kind == "cmp":
        return Cmp(obj["op"], node_from_json(obj["left"]), node_from_json(obj["right"]))
    if kind == "and":
        return And(node_from_json(obj["left"]), node_from_json(obj["right"]))
    if kind == "or":
        return Or(node_from_json(obj["left"]), node_from_json(obj["right"]))
    if kind == "not":
        return Not(node_from_json(obj["cond"]))
    if kind == "isnull":
        return IsNull(node_from_json(obj["expr"]))
    if kind == "bool":
        return Bool(bool(obj["value"]))
    raise ValueError(f"unknown AST kind {kind!r}")


# ---------------------------------------------------------------------------
# SQL-ish pretty printer


def _sql_value(v: Value) -> str:
    if v is None:
        return "NULL"
    if isinstance(v, bool):
        return "TRUE" if v else "FALSE"
    if isinstance(v, str):
        return "'" + v.replace("'", "''") + "'"
    return str(v)


def to_sql(node: Node) -> str:
    if isinstance(node, Attr):
        return node.name
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Const):
        return _sql_value(node.value)
    if isinstance(node, Arith):
        return f"({to_sql(node.left)} {node.op} {to_sql(node.right)})"
    if isinstance(node, Case):
        return (f"CASE WHEN {to_sql(node.cond)} THEN {to_sql(node.then)}"
                f" ELSE {to_sql(node.other)} END")
    if isinstance(node, Cmp):
        op = "<>" if node.op == "!=" else node.op
        return f"({to_sql(node.left)} {op} {to_sql(node.right)})"
    if isinstance(node, And):
        return f"({to_sql(node.left)} AND {to_sql(node.right)})"
    if isinstance(node, Or):
        return f"({to_sql(node.left)} OR {to_sql(node.right)})"
    if isinstance(node, Not):
        return f"(NOT {to_sql(node.cond)})"
    if isinstance(node, IsNull):
        return f"({to_sql(node.expr)} IS NULL)"
    if isinstance(node, Bool):
        return "TRUE" if node.value else "FALSE"
    raise ExprTypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# Compiled row functions.  The interpreter above is the reference
# implementation; these compiled closures make history replay and query
# evaluation fast enough for benchmark-sized relations.


def _gen(node: Node, s: Schema, consts: list) -> str:
    if isinstance(node, Attr):
        return f"t[{s.position(node.name)}]"
    if isinstance(node, Const):
        v = node.value
        if v is None:
            return "None"
        if isinstance(v, (bool, int)):
            return repr(v)
        consts.append(v)
        return f"_c[{len(consts) - 1}]"
    if isinstance(node, Arith):
        fn = {"+": "_add", "-": "_sub", "*": "_mul", "/": "_divv"}[node.op]
        return f"{fn}({_gen(node.left, s, consts)}, {_gen(node.right, s, consts)})"
    if isinstance(node, Case):
        return (f"({_gen(node.then, s, consts)} if {_gen(node.cond, s, consts)}"
                f" else {_gen(node.other, s, consts)})")
    if isinstance(node, Cmp):
        fn = {"=": "_eq", "!=": "_ne", "<": "_lt", "<=": "_le", ">": "_gt", ">=": "_ge"}[node.op]
        return f"{fn}({_gen(node.left, s, consts)}, {_gen(node.right, s, consts)})"
    if isinstance(node, And):
        return f"({_gen(node.left, s, consts)} and {_gen(node.right, s, consts)})"
    if isinstance(node, Or):
        return f"({_gen(node.left, s, consts)} or {_gen(node.right, s, consts)})"
    if isinstance(node, Not):
        return f"(not {_gen(node.cond, s, consts)})"
    if isinstance(node, IsNull):
        return f"({_gen(node.expr, s, consts)} is None)"
    if isinstance(node, Bool):
        return repr(node.value)
    if isinstance(node, Sym):
        raise SchemaError(f"symbolic variable {node.name} in concrete evaluation")
    raise ExprTypeError(f"not an AST node: {node!r}")


def _rt_add(a, b):
    return None if a is None or b is None else a + b


def _rt_sub(a, b):
    return None if a is None or b is None else a - b


def _rt_mul(a, b):
    return None if a is None or b is None else a * b


def _rt_div(a, b):
    return _arith("/", a, b)


def _rt_eq(a, b):
    return False if a is None or b is None else a == b


def _rt_ne(a, b):
    return False if a is None or b is None else a != b


def _rt_lt(a, b):
    return False if a is None or b is None else a < b


def _rt_le(a, b):
    return False if a is None or b is None else a <= b


def _rt_gt(a, b):
    return False if a is None or b is None else a > b


def _rt_ge(a, b):
    return False if a is None or b is None else a >= b


_RUNTIME = {
    "_add": _rt_add, "_sub": _rt_sub, "_mul": _rt_mul, "_divv": _rt_div,
    "_eq": _rt_eq, "_ne": _rt_ne, "_lt": _rt_lt, "_le": _rt_le,
    "_gt": _rt_gt, "_ge": _rt_ge,
}


def compile_predicate(c: Cond, s: Schema) -> Callable[[tuple], bool]:
    infer_type(c, s)
    consts: list = []
    src = f"def _pred(t, _c=_c):\n    return {_gen(c, s, consts)}\n"
    ns = dict(_RUNTIME)
    ns["_c"] = tuple(consts)
    exec(src, ns)  # noqa: S102 - generated from our own AST
    return ns["_pred"]


def compile_projector(exprs: Sequence[Expr], s: Schema) -> Callable[[tuple], tuple]:
    consts: list = []
    parts = [_gen(e, s, consts) for e in exprs]
    src = f"def _proj(t, _c=_c):\n    return ({', '.join(parts)}{',' if len(parts) == 1 else ''})\n"
    ns = dict(_RUNTIME)
    ns["_c"] = tuple(consts)
    exec(src, ns)  # noqa: S102
    return ns["_proj"]
