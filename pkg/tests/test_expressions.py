from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from histif.errors import ExprTypeError, SchemaError
from histif.expressions import (
    And,
    Arith,
    Attr,
    Bool,
    Case,
    Cmp,
    Const,
    FALSE,
    IsNull,
    Not,
    Or,
    Schema,
    TRUE,
    compile_predicate,
    compile_projector,
    eval_cond,
    eval_expr,
    node_from_json,
    node_to_json,
    simplify,
    substitute,
)
from histif.values import Dec

from conftest import ORDER_SCHEMA, ORDER_ROWS

P = Attr("Price")
F = Attr("ShippingFee")
C = Attr("Country")


def c(v):
    return Const(v)


class TestEval:
    def test_attribute_of_row(self):
        # o_2 = (12, Alex, UK, 50, 5)
        assert eval_expr(P, ORDER_ROWS[1], ORDER_SCHEMA) == 50

    def test_constant(self):
        assert eval_expr(c(7), ORDER_ROWS[0], ORDER_SCHEMA) == 7

    def test_case_projection_of_u1(self):
        # u_1's fee expression over o_1 = (11, Susan, UK, 20, 5)
        e = Case(Cmp(">=", P, c(50)), c(0), F)
        assert eval_expr(e, ORDER_ROWS[0], ORDER_SCHEMA) == 5

    def test_u1_condition_on_o3(self):
        assert eval_cond(Cmp(">=", P, c(50)), ORDER_ROWS[2], ORDER_SCHEMA) is True

    def test_true_on_any_tuple(self):
        assert eval_cond(TRUE, ORDER_ROWS[3], ORDER_SCHEMA) is True

    def test_u2_condition_on_o4(self):
        cond = And(Cmp("=", C, c("UK")), Cmp("<=", P, c(100)))
        assert eval_cond(cond, ORDER_ROWS[3], ORDER_SCHEMA) is False

    def test_unknown_attribute(self):
        with pytest.raises(SchemaError):
            eval_expr(Attr("Nope"), ORDER_ROWS[0], ORDER_SCHEMA)

    def test_type_mismatch(self):
        with pytest.raises(ExprTypeError):
            eval_expr(Arith("+", C, P), ORDER_ROWS[0], ORDER_SCHEMA)

    def test_null_arithmetic_and_comparisons(self):
        row = (None, None, None, None, None)
        assert eval_expr(Arith("+", P, c(1)), row, ORDER_SCHEMA) is None
        assert eval_cond(Cmp("<", P, c(10)), row, ORDER_SCHEMA) is False
        assert eval_cond(Cmp("=", P, P), row, ORDER_SCHEMA) is False
        assert eval_cond(IsNull(P), row, ORDER_SCHEMA) is True

    def test_division_by_zero_is_null(self):
        assert eval_expr(Arith("/", c(4), c(0)), ORDER_ROWS[0], ORDER_SCHEMA) is None

    def test_decimal_arithmetic_is_exact(self):
        e = Arith("+", c(Dec.from_string("0.10")), c(Dec.from_string("0.20")))
        assert eval_expr(e, ORDER_ROWS[0], ORDER_SCHEMA) == Dec.from_string("0.30")


class TestSubstitute:
    def test_paper_pushdown_step(self):
        # substitute(A < 4, A, CASE WHEN C=5 THEN 3 ELSE A END)
        a, ccol = Attr("A"), Attr("C")
        rep = Case(Cmp("=", ccol, c(5)), c(3), a)
        out = substitute(Cmp("<", a, c(4)), (a, rep))
        assert out == Cmp("<", rep, c(4))

    def test_identity_substitution(self):
        e = Arith("+", P, c(1))
        assert substitute(e, (P, P)) == e

    def test_fee_pushdown_through_u1(self):
        rep = Case(Cmp(">=", P, c(50)), c(0), F)
        out = substitute(Cmp(">=", F, c(10)), (F, rep))
        assert out == Cmp(">=", rep, c(10))

    def test_simultaneous(self):
        a, b = Attr("A"), Attr("B")
        out = substitute(Arith("+", a, b), [(a, b), (b, a)])
        assert out == Arith("+", b, a)


ROW_STRAT = st.tuples(
    st.integers(0, 99), st.sampled_from(["x", "y"]), st.sampled_from(["UK", "US"]),
    st.one_of(st.none(), st.integers(0, 100)), st.integers(0, 20),
)


def cond_strat(depth=2):
    atoms = st.builds(
        Cmp,
        st.sampled_from(["=", "!=", "<", "<=", ">", ">="]),
        st.sampled_from([P, F, Attr("ID")]),
        st.builds(Const, st.one_of(st.integers(0, 60), st.none())),
    )
    if depth == 0:
        return atoms
    sub = cond_strat(depth - 1)
    return st.one_of(
        atoms,
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
        st.builds(Not, sub),
        st.builds(IsNull, st.sampled_from([P, F])),
        st.sampled_from([TRUE, FALSE]),
    )


class TestSimplify:
    def test_paper_absorption(self):
        # (P <= 30 AND F >= 10) OR (P <= 40 AND F >= 10)  ->  P <= 40 AND F >= 10
        left = And(Cmp("<=", P, c(30)), Cmp(">=", F, c(10)))
        right = And(Cmp("<=", P, c(40)), Cmp(">=", F, c(10)))
        assert simplify(Or(left, right)) == right

    def test_and_true(self):
        cond = Cmp("<", P, c(9))
        assert simplify(And(TRUE, cond)) == cond

    def test_constant_fold(self):
        assert simplify(Cmp("=", c(3), c(3))) == TRUE

    def test_double_negation(self):
        cond = Cmp("<", P, c(9))
        assert simplify(Not(Not(cond))) == cond

    @settings(max_examples=200, deadline=None)
    @given(cond_strat(), ROW_STRAT)
    def test_simplify_preserves_semantics(self, cond, row):
        assert eval_cond(simplify(cond), row, ORDER_SCHEMA) == eval_cond(cond, row, ORDER_SCHEMA)

    @settings(max_examples=200, deadline=None)
    @given(cond_strat(), ROW_STRAT)
    def test_eval_total_on_nulls(self, cond, row):
        assert eval_cond(cond, row, ORDER_SCHEMA) in (True, False)


class TestSubstitutionSoundness:
    @settings(max_examples=200, deadline=None)
    @given(ROW_STRAT, st.integers(0, 50))
    def test_substitution_soundness(self, row, k):
        # if t.Price = eval(r, t) then eval(e[Price <- r], t) = eval(e, t)
        r = Arith("+", Const(row[3]), c(0)) if row[3] is not None else Const(None)
        e = Case(Cmp(">=", P, c(k)), Arith("+", P, F), F)
        subbed = substitute(e, (P, r))
        assert eval_expr(subbed, row, ORDER_SCHEMA) == eval_expr(e, row, ORDER_SCHEMA)


class TestCompiled:
    @settings(max_examples=200, deadline=None)
    @given(cond_strat(), ROW_STRAT)
    def test_compiled_predicate_matches_interpreter(self, cond, row):
        pred = compile_predicate(cond, ORDER_SCHEMA)
        assert pred(row) == eval_cond(cond, row, ORDER_SCHEMA)

    def test_compiled_projector(self):
        exprs = (Attr("ID"), Case(Cmp(">=", P, c(50)), c(0), F))
        proj = compile_projector(exprs, ORDER_SCHEMA)
        assert proj(ORDER_ROWS[1]) == (12, 0)


class TestJson:
    @settings(max_examples=100, deadline=None)
    @given(cond_strat())
    def test_round_trip(self, cond):
        assert node_from_json(node_to_json(cond)) == cond

    def test_value_shapes(self):
        e = Case(Cmp("=", C, c("UK")), c(Dec.from_string("1.50")), c(None))
        assert node_from_json(node_to_json(e)) == e
