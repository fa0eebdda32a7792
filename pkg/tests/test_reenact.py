from __future__ import annotations

import random

from histif import algebra
from histif.algebra import (
    BaseRelation,
    Projection,
    Selection,
    Union,
    delta,
    delta_query,
    eval_query,
    sorted_delta_rows,
)
from histif.data import make_database
from histif.dsl import parse_statement
from histif.expressions import Attr, Case, Cmp, Const, Not
from histif.reenact import reenact_history, reenact_statement, split_inserts
from histif.statements import History, NoOp, apply_statement, run_history

from conftest import FINAL_ROWS, MODIFIED_ROWS, ORDER_SCHEMA
import genlib


class TestEvalQuery:
    def test_selection_on_price(self, order_db):
        q = Selection(Cmp(">=", Attr("Price"), Const(50)), BaseRelation("Order"))
        assert eval_query(q, order_db) == {
            (12, "Alex", "UK", 50, 5), (13, "Jack", "US", 60, 3)}

    def test_union_with_empty(self, order_db):
        from histif.algebra import SingletonConst, Difference

        base = BaseRelation("Order")
        empty = Difference(base, base)
        assert eval_query(Union(base, empty), order_db) == eval_query(base, order_db)

    def test_projection_of_u1_cases(self, order_db):
        u1 = parse_statement("UPDATE Order SET ShippingFee=0 WHERE Price>=50")
        q = reenact_statement(u1, ORDER_SCHEMA)
        fees = {row[0]: row[4] for row in eval_query(q, order_db)}
        assert fees == {11: 5, 12: 0, 13: 0, 14: 4}


class TestReenactStatement:
    def test_update_becomes_case_projection(self, order_db):
        u1 = parse_statement("UPDATE Order SET ShippingFee=0 WHERE Price>=50")
        q = reenact_statement(u1, ORDER_SCHEMA)
        assert isinstance(q, Projection)
        # untouched attributes project through unchanged
        assert q.columns[0] == ("ID", Attr("ID"))
        assert q.columns[4] == (
            "ShippingFee",
            Case(Cmp(">=", Attr("Price"), Const(50)), Const(0), Attr("ShippingFee")),
        )
        assert eval_query(q, order_db) == apply_statement(u1, order_db).relation("Order")

    def test_noop_is_identity(self, order_db):
        q = reenact_statement(NoOp("Order"), ORDER_SCHEMA)
        assert q == BaseRelation("Order")

    def test_delete_becomes_negated_selection(self):
        rng = random.Random(11)
        d = parse_statement("DELETE FROM R WHERE A <= 3")
        q = reenact_statement(d, genlib.R_SCHEMA)
        assert isinstance(q, Selection) and isinstance(q.cond, Not)
        for _ in range(30):
            db = genlib.gen_db(rng)
            assert eval_query(q, db) == apply_statement(d, db).relation("R")


class TestReenactHistory:
    def test_three_level_nesting(self, order_db, shipping_history):
        q = reenact_history(shipping_history, "Order", order_db)
        assert isinstance(q, Projection)
        assert isinstance(q.input, Projection)
        assert isinstance(q.input.input, Projection)
        assert q.input.input.input == BaseRelation("Order")
        assert eval_query(q, order_db) == frozenset(FINAL_ROWS)

    def test_empty_history(self, order_db):
        q = reenact_history(History(()), "Order", order_db)
        assert q == BaseRelation("Order")

    def test_modified_history_gives_fig4(self, order_db, modified_history):
        q = reenact_history(modified_history, "Order", order_db)
        assert eval_query(q, order_db) == frozenset(MODIFIED_ROWS)

    def test_equivalence_on_random_histories(self):
        rng = random.Random(23)
        for _ in range(200):
            db = genlib.gen_db(rng)
            h = genlib.gen_history(rng, rng.randint(0, 8), with_insert_query=True)
            executed = run_history(h, db)
            for rel in ("R", "S"):
                q = reenact_history(h, rel, db)
                assert eval_query(q, db) == executed.relation(rel)


class TestDelta:
    def test_running_example(self, order_db, shipping_history, modified_history):
        cur = run_history(shipping_history, order_db).relation("Order")
        mod = run_history(modified_history, order_db).relation("Order")
        d = delta(cur, mod)
        assert d.minus == {(12, "Alex", "UK", 50, 5)}
        assert d.plus == {(12, "Alex", "UK", 50, 10)}

    def test_delta_of_equal_relations_is_empty(self, order_db):
        rel = order_db.relation("Order")
        assert delta(rel, rel).is_empty()

    def test_antisymmetry(self):
        rng = random.Random(5)
        for _ in range(100):
            r1 = frozenset((rng.randint(0, 3), rng.randint(0, 3)) for _ in range(5))
            r2 = frozenset((rng.randint(0, 3), rng.randint(0, 3)) for _ in range(5))
            d = delta(r1, r2)
            assert d.negate() == delta(r2, r1)
            assert d.is_empty() == (r1 == r2)

    def test_query_form_agrees_with_native(self):
        rng = random.Random(6)
        schema = genlib.R_SCHEMA
        for _ in range(50):
            db = genlib.gen_db(rng)
            r1 = frozenset((rng.randint(0, 3), rng.randint(0, 3)) for _ in range(4))
            r2 = frozenset((rng.randint(0, 3), rng.randint(0, 3)) for _ in range(4))
            assert delta_query(r1, r2, schema, db) == delta(r1, r2)

    def test_sorted_rows_are_deterministic(self):
        d = delta(frozenset({(2, 1), (1, 1)}), frozenset({(3, 9)}))
        rows = sorted_delta_rows(d)
        assert rows == [("+", (3, 9)), ("-", (1, 1)), ("-", (2, 1))]


class TestSplitInserts:
    def test_no_inserts_returns_left_only(self, order_db, shipping_history):
        left, right = split_inserts(shipping_history, "Order", order_db)
        assert right is None
        assert eval_query(left, order_db) == frozenset(FINAL_ROWS)

    def test_structure_insert_then_updates(self):
        rng = random.Random(1)
        db = genlib.gen_db(rng)
        h = History((
            parse_statement("INSERT INTO R VALUES (1, 2)"),
            parse_statement("UPDATE R SET B=B+1 WHERE A>=1"),
            parse_statement("UPDATE R SET A=0 WHERE B>=3"),
        ))
        left, right = split_inserts(h, "R", db)
        # left reenacts the history without the insert; right applies the
        # update machinery to the inserted singleton only
        assert isinstance(left, Projection)
        assert isinstance(right, Projection)
        assert algebra.query_base_relations(right) == set()
        merged = eval_query(Union(left, right), db)
        assert merged == eval_query(reenact_history(h, "R", db), db)

    def test_equivalence_on_random_histories(self):
        rng = random.Random(37)
        for _ in range(150):
            db = genlib.gen_db(rng)
            h = genlib.gen_history(rng, rng.randint(1, 8), with_insert_query=True)
            left, right = split_inserts(h, "R", db)
            combined = left if right is None else Union(left, right)
            assert eval_query(combined, db) == eval_query(reenact_history(h, "R", db), db)
