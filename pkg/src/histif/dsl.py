"""Tiny SQL-like surface syntax for statements and history files.

One statement per line; `--` starts a comment.  The grammar covers exactly
the statement class the engine supports: UPDATE/DELETE without subqueries
or joins in WHERE, INSERT ... VALUES, INSERT ... SELECT with an optional
equi-join, and an explicit NOOP statement.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import algebra
from .errors import ParseError
from .expressions import (
    And,
    Arith,
    Attr,
    Case,
    Cmp,
    Cond,
    Const,
    Expr,
    FALSE,
    IsNull,
    Not,
    Or,
    TRUE,
    to_sql,
)
from .statements import (
    Delete,
    History,
    InsertQuery,
    InsertTuple,
    NoOp,
    Statement,
    Update,
)
from .values import Dec, Value

_KEYWORDS = {
    "UPDATE", "SET", "WHERE", "DELETE", "FROM", "INSERT", "INTO", "VALUES",
    "SELECT", "AS", "JOIN", "ON", "UNION", "CASE", "WHEN", "THEN", "ELSE",
    "END", "AND", "OR", "NOT", "IS", "NULL", "TRUE", "FALSE", "NOOP",
}

_PUNCT = ("<=", ">=", "<>", "!=", "=", "<", ">", "(", ")", ",", "+", "-", "*", "/")


@dataclass(frozen=True)
class _Tok:
    kind: str  # kw | name | int | dec | str | punct | end
    text: str
    line: int
    col: int


def _tokenize(text: str, line0: int = 1) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col, i = line0, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch == "'":
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise ParseError("unterminated string literal", line, start_col)
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            toks.append(_Tok("str", "".join(buf), line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            lit = text[i:j]
            toks.append(_Tok("dec" if seen_dot else "int", lit, line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "kw" if word.upper() in _KEYWORDS else "name"
            toks.append(_Tok(kind, word.upper() if kind == "kw" else word, line, start_col))
            col += j - i
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(_Tok("punct", p, line, start_col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, start_col)
    toks.append(_Tok("end", "", line, col))
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str) -> ParseError:
        t = self.peek()
        return ParseError(f"{msg} (got {t.text or 'end of input'!r})", t.line, t.col)

    def expect_kw(self, word: str) -> None:
        t = self.next()
        if t.kind != "kw" or t.text != word:
            self.i -= 1
            raise self.error(f"expected {word}")

    def expect_punct(self, sym: str) -> None:
        t = self.next()
        if t.kind != "punct" or t.text != sym:
            self.i -= 1
            raise self.error(f"expected {sym!r}")

    def accept_kw(self, word: str) -> bool:
        t = self.peek()
        if t.kind == "kw" and t.text == word:
            self.i += 1
            return True
        return False

    def accept_punct(self, sym: str) -> bool:
        t = self.peek()
        if t.kind == "punct" and t.text == sym:
            self.i += 1
            return True
        return False

    def name(self) -> str:
        t = self.next()
        if t.kind != "name":
            self.i -= 1
            raise self.error("expected identifier")
        return t.text

    # -- literals and expressions ------------------------------------------

    def literal(self) -> Value:
        t = self.next()
        neg = False
        if t.kind == "punct" and t.text == "-":
            neg = True
            t = self.next()
        if t.kind == "int":
            return -int(t.text) if neg else int(t.text)
        if t.kind == "dec":
            d = Dec.from_string(t.text)
            return Dec(-d.units) if neg else d
        if neg:
            self.i -= 1
            raise self.error("expected numeric literal after '-'")
        if t.kind == "str":
            return t.text
        if t.kind == "kw" and t.text == "TRUE":
            return True
        if t.kind == "kw" and t.text == "FALSE":
            return False
        if t.kind == "kw" and t.text == "NULL":
            return None
        self.i -= 1
        raise self.error("expected literal")

    def expr(self) -> Expr:
        e = self.term()
        while True:
            t = self.peek()
            if t.kind == "punct" and t.text in ("+", "-"):
                self.next()
                e = Arith(t.text, e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            t = self.peek()
            if t.kind == "punct" and t.text in ("*", "/"):
                self.next()
                e = Arith(t.text, e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        t = self.peek()
        if t.kind == "kw" and t.text == "CASE":
            self.next()
            self.expect_kw("WHEN")
            cond = self.cond()
            self.expect_kw("THEN")
            then = self.expr()
            self.expect_kw("ELSE")
            other = self.expr()
            self.expect_kw("END")
            return Case(cond, then, other)
        if t.kind == "name":
            return Attr(self.name())
        if t.kind == "punct" and t.text == "(":
            self.next()
            e = self.expr()
            self.expect_punct(")")
            return e
        return Const(self.literal())

    # -- conditions --------------------------------------------------------

    def cond(self) -> Cond:
        c = self.and_cond()
        while self.accept_kw("OR"):
            c = Or(c, self.and_cond())
        return c

    def and_cond(self) -> Cond:
        c = self.not_cond()
        while self.accept_kw("AND"):
            c = And(c, self.not_cond())
        return c

    def not_cond(self) -> Cond:
        if self.accept_kw("NOT"):
            return Not(self.not_cond())
        return self.primary_cond()

    def primary_cond(self) -> Cond:
        t = self.peek()
        if t.kind == "kw" and t.text == "TRUE":
            self.next()
            return TRUE
        if t.kind == "kw" and t.text == "FALSE":
            self.next()
            return FALSE
        if t.kind == "punct" and t.text == "(":
            save = self.i
            self.next()
            try:
                c = self.cond()
                self.expect_punct(")")
                return c
            except ParseError:
                self.i = save
        left = self.expr()
        t = self.peek()
        if t.kind == "kw" and t.text == "IS":
            self.next()
            negated = self.accept_kw("NOT")
            self.expect_kw("NULL")
            test = IsNull(left)
            return Not(test) if negated else test
        if t.kind == "punct" and t.text in ("=", "<>", "!=", "<", "<=", ">", ">="):
            self.next()
            op = "!=" if t.text in ("<>", "!=") else t.text
            return Cmp(op, left, self.expr())
        raise self.error("expected comparison operator or IS NULL")

    # -- queries -----------------------------------------------------------

    def select_query(self) -> algebra.Query:
        self.expect_kw("SELECT")
        columns: list[tuple[Optional[str], Expr]] = []
        while True:
            e = self.expr()
            alias = self.name() if self.accept_kw("AS") else None
            columns.append((alias, e))
            if not self.accept_punct(","):
                break
        self.expect_kw("FROM")
        q: algebra.Query = algebra.BaseRelation(self.name())
        while self.accept_kw("JOIN"):
            right = algebra.BaseRelation(self.name())
            self.expect_kw("ON")
            pairs = []
            while True:
                a = self.name()
                self.expect_punct("=")
                b = self.name()
                pairs.append((a, b))
                if not self.accept_kw("AND"):
                    break
            q = algebra.Join(q, right, tuple(pairs))
        if self.accept_kw("WHERE"):
            q = algebra.Selection(self.cond(), q)
        named = tuple(
            (alias if alias else (e.name if isinstance(e, Attr) else f"col{i + 1}"), e)
            for i, (alias, e) in enumerate(columns)
        )
        out: algebra.Query = algebra.Projection(named, q)
        if self.accept_kw("UNION"):
            out = algebra.Union(out, self.select_query())
        return out

    # -- statements --------------------------------------------------------

    def statement(self) -> Statement:
        t = self.peek()
        if t.kind != "kw":
            raise self.error("expected statement keyword")
        if t.text == "UPDATE":
            self.next()
            rel = self.name()
            self.expect_kw("SET")
            assigns = []
            while True:
                attr = self.name()
                self.expect_punct("=")
                assigns.append((attr, self.expr()))
                if not self.accept_punct(","):
                    break
            cond = self.cond() if self.accept_kw("WHERE") else TRUE
            return Update(rel, tuple(assigns), cond)
        if t.text == "DELETE":
            self.next()
            self.expect_kw("FROM")
            rel = self.name()
            cond = self.cond() if self.accept_kw("WHERE") else TRUE
            return Delete(rel, cond)
        if t.text == "INSERT":
            self.next()
            self.expect_kw("INTO")
            rel = self.name()
            if self.accept_kw("VALUES"):
                self.expect_punct("(")
                values = [self.literal()]
                while self.accept_punct(","):
                    values.append(self.literal())
                self.expect_punct(")")
                return InsertTuple(rel, tuple(values))
            return InsertQuery(rel, self.select_query())
        if t.text == "NOOP":
            self.next()
            return NoOp(self.name())
        raise self.error("expected UPDATE, DELETE, INSERT, or NOOP")


def parse_statement(text: str, line: int = 1) -> Statement:
    """Parse one DSL statement; raises ParseError with line/column."""
    p = _Parser(_tokenize(text.rstrip().rstrip(";"), line))
    stmt = p.statement()
    t = p.peek()
    if t.kind != "end":
        raise p.error("trailing input after statement")
    return stmt


def parse_history(text: str, ident: str = "history") -> History:
    """Parse a history file: one statement per line, `--` comments."""
    statements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("--", 1)[0].strip().rstrip(";")
        if not line:
            continue
        statements.append(parse_statement(line, lineno))
    return History(tuple(statements), ident)


def print_statement(u: Statement) -> str:
    if isinstance(u, Update):
        sets = ", ".join(f"{a} = {to_sql(e)}" for a, e in u.assignments)
        where = "" if u.cond == TRUE else f" WHERE {to_sql(u.cond)}"
        return f"UPDATE {u.relation} SET {sets}{where}"
    if isinstance(u, Delete):
        where = "" if u.cond == TRUE else f" WHERE {to_sql(u.cond)}"
        return f"DELETE FROM {u.relation}{where}"
    if isinstance(u, InsertTuple):
        from .expressions import _sql_value

        vals = ", ".join(_sql_value(v) for v in u.values)
        return f"INSERT INTO {u.relation} VALUES ({vals})"
    if isinstance(u, InsertQuery):
        return f"INSERT INTO {u.relation} {print_query(u.query)}"
    if isinstance(u, NoOp):
        return f"NOOP {u.relation}"
    raise ParseError(f"not a statement: {u!r}")


def print_query(q: algebra.Query) -> str:
    if isinstance(q, algebra.Projection):
        cols = ", ".join(
            to_sql(e) if isinstance(e, Attr) and e.name == name else f"{to_sql(e)} AS {name}"
            for name, e in q.columns
        )
        return f"SELECT {cols} {_print_from(q.input)}"
    if isinstance(q, algebra.Union):
        return f"{print_query(q.left)} UNION {print_query(q.right)}"
    return f"SELECT * {_print_from(q)}"


def _print_from(q: algebra.Query) -> str:
    if isinstance(q, algebra.Selection):
        return f"{_print_from(q.input)} WHERE {to_sql(q.cond)}"
    if isinstance(q, algebra.BaseRelation):
        return f"FROM {q.name}"
    if isinstance(q, algebra.Join):
        on = " AND ".join(f"{a} = {b}" for a, b in q.pairs)
        return f"{_print_from(q.left)} JOIN {_print_from(q.right)[5:]} ON {on}"
    raise ParseError(f"query not printable: {q!r}")


def print_history(h: History) -> str:
    return "\n".join(print_statement(u) for u in h.statements) + "\n"
