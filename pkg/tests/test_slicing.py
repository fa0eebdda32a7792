from __future__ import annotations

import random

import pytest

from histif.algebra import delta, eval_query
from histif.data import make_database
from histif.dsl import parse_statement
from histif.expressions import And, Attr, Cmp, Cond, Const, Not, Or, Schema, Sym, TRUE
from histif.reenact import reenact_history
from histif.slicing import (
    IS_SLICE,
    NOT_PROVEN,
    SliceNotApplicable,
    build_slice_test,
    check_slice,
    greedy_slice,
    single_mod_dependency,
)
from histif.statements import (
    History,
    NormalizedReplace,
    Replace,
    normalize_mods,
    run_history,
)
from histif.symbolic import compress
from histif.milp import brute_force_sat

from conftest import ORDER_SCHEMA, U1, U1P, U2, U3
import genlib


@pytest.fixture
def chi(order_db):
    return compress(order_db, "Order", "Country", 2)


def replace_first(h, text):
    _, hm, reps = normalize_mods(h, [Replace(1, parse_statement(text))])
    return hm, reps[0]


class TestBuildSliceTest:
    def test_two_update_example_structure(self, order_db, chi):
        h = History((parse_statement(U1), parse_statement(U2)))
        hm, rep = replace_first(h, U1P)
        f = build_slice_test(h, hm, [1], chi, order_db, "Order")
        # locals are TRUE for update-only histories, so the cases reduce to
        # fee-variable equalities across the four runs
        full_eq = Cmp("=", Sym("x_h_ShippingFee_2"), Sym("x_m_ShippingFee_2"))
        slice_eq = Cmp("=", Sym("x_hs_ShippingFee_1"), Sym("x_ms_ShippingFee_1"))
        assert f.cases == Or(
            And(full_eq, slice_eq),
            And(Not(full_eq), Or(
                And(Cmp("=", Sym("x_h_ShippingFee_2"), Sym("x_hs_ShippingFee_1")),
                    Cmp("=", Sym("x_m_ShippingFee_2"), Sym("x_ms_ShippingFee_1"))),
                And(Cmp("=", Sym("x_h_ShippingFee_2"), Sym("x_ms_ShippingFee_1")),
                    Cmp("=", Sym("x_m_ShippingFee_2"), Sym("x_hs_ShippingFee_1"))),
            )),
        )

    def test_full_index_set_is_trivial(self, order_db, chi, shipping_history,
                                       modified_history):
        f = build_slice_test(shipping_history, modified_history, [1, 2, 3],
                             chi, order_db, "Order")
        assert f.full_slice
        assert check_slice(f, order_db).status == IS_SLICE

    def test_rejects_insert_query(self, order_db, chi):
        h = History((parse_statement("INSERT INTO Order SELECT ID, Customer, Country,"
                                     " Price, ShippingFee FROM Order"),))
        with pytest.raises(SliceNotApplicable):
            build_slice_test(h, h, [1], chi, order_db, "Order")


class TestCheckSlice:
    def test_dropping_u2_is_rejected(self, order_db, chi):
        h = History((parse_statement(U1), parse_statement(U2)))
        hm, rep = replace_first(h, U1P)
        f = build_slice_test(h, hm, [1], chi, order_db, "Order")
        assert check_slice(f, order_db).status == NOT_PROVEN

    def test_dropping_u3_is_certified(self, order_db, chi, shipping_history,
                                      modified_history):
        f = build_slice_test(shipping_history, modified_history, [1, 2],
                             chi, order_db, "Order")
        assert check_slice(f, order_db).status == IS_SLICE

    def test_delete_only_history_against_brute_force(self, order_db):
        # formula verdicts agree with enumerating a small grid
        rng = random.Random(3)
        schema = Schema("R", (("ID", "int"), ("A", "int")))
        for _ in range(25):
            rows = [(i + 1, rng.randint(0, 3)) for i in range(4)]
            db = make_database((schema, rows))
            stmts = tuple(
                parse_statement(f"DELETE FROM R WHERE A {rng.choice(['<=', '>=', '='])}"
                                f" {rng.randint(0, 3)}")
                for _ in range(3)
            )
            h = History(stmts)
            _, hm, reps = normalize_mods(
                h, [Replace(1, parse_statement(f"DELETE FROM R WHERE A >= {rng.randint(0, 3)}"))])
            if not reps:
                continue
            chi_r = compress(db, "R", "ID", 2)
            candidate = [1, 2]
            f = build_slice_test(h, hm, candidate, chi_r, db, "R")
            verdict = check_slice(f, db).status
            witness = brute_force_sat(f.negated_body(), {
                "x0_ID": [1, 2, 3, 4], "x0_A": [0, 1, 2, 3]})
            if verdict == IS_SLICE:
                assert witness is None
            else:
                assert witness is not None


def preserved_delta(h, hm, keep, db, rel):
    full = delta(run_history(h, db).relation(rel), run_history(hm, db).relation(rel))
    sliced = delta(run_history(h.slice(keep), db).relation(rel),
                   run_history(hm.slice(keep), db).relation(rel))
    return full == sliced


class TestGreedy:
    def test_running_example_keeps_u1_u2(self, order_db, chi, shipping_history):
        hm, rep = replace_first(shipping_history, U1P)
        report = greedy_slice(shipping_history, hm, [rep], chi, order_db, "Order")
        assert report.kept == (1, 2)
        assert report.removed == (3,)
        assert preserved_delta(shipping_history, hm, report.kept, order_db, "Order")

    def test_single_statement_history(self, order_db, chi):
        h = History((parse_statement(U1),))
        hm, rep = replace_first(h, U1P)
        report = greedy_slice(h, hm, [rep], chi, order_db, "Order")
        assert report.kept == (1,)

    def test_disjoint_later_statement_removed(self, order_db, chi):
        h = History((
            parse_statement(U1),
            parse_statement("UPDATE Order SET Price=Price+1 WHERE ID>=1000"),
        ))
        hm, rep = replace_first(h, U1P)
        report = greedy_slice(h, hm, [rep], chi, order_db, "Order")
        assert report.kept == (1,)
        assert report.removed == (2,)

    def test_budget_one_keeps_everything(self, order_db, chi, shipping_history):
        hm, rep = replace_first(shipping_history, U1P)
        report = greedy_slice(shipping_history, hm, [rep], chi, order_db, "Order",
                              node_budget=0)
        assert report.kept == (1, 2, 3)
        assert preserved_delta(shipping_history, hm, report.kept, order_db, "Order")

    def test_greedy_output_passes_check_slice(self, order_db, chi, shipping_history):
        hm, rep = replace_first(shipping_history, U1P)
        report = greedy_slice(shipping_history, hm, [rep], chi, order_db, "Order")
        f = build_slice_test(shipping_history, hm, list(report.kept), chi,
                             order_db, "Order")
        assert check_slice(f, order_db).status == IS_SLICE


class TestSingleModDependency:
    def test_running_example(self, order_db, chi, shipping_history):
        hm, rep = replace_first(shipping_history, U1P)
        report = single_mod_dependency(shipping_history, hm, rep, chi,
                                       order_db, "Order")
        assert report.kept == (1, 2)
        assert report.removed == (3,)

    def test_u2_dependent_with_witness(self, order_db, chi):
        h = History((parse_statement(U1), parse_statement(U2)))
        hm, rep = replace_first(h, U1P)
        report = single_mod_dependency(h, hm, rep, chi, order_db, "Order")
        assert report.kept == (1, 2)

    def test_false_condition_always_excluded(self, order_db, chi):
        h = History((
            parse_statement(U1),
            parse_statement("UPDATE Order SET Price=1 WHERE FALSE"),
        ))
        hm, rep = replace_first(h, U1P)
        report = single_mod_dependency(h, hm, rep, chi, order_db, "Order")
        assert report.kept == (1,)
        assert report.calls[-1].status == "trivial"

    def test_agrees_with_greedy_on_running_example(self, order_db, chi,
                                                   shipping_history):
        hm, rep = replace_first(shipping_history, U1P)
        a = single_mod_dependency(shipping_history, hm, rep, chi, order_db, "Order")
        b = greedy_slice(shipping_history, hm, [rep], chi, order_db, "Order")
        assert a.kept == b.kept


class TestSoundnessProperty:
    def test_random_histories_preserve_delta(self):
        rng = random.Random(424)
        done = 0
        for _ in range(40):
            db = genlib.gen_keyed_db(rng, max_rows=6)
            h0 = genlib.gen_history(rng, rng.randint(1, 5),
                                    kinds=("update", "delete"), keyed=True)
            pos = rng.randint(1, len(h0))
            new = genlib.gen_statement(
                rng, genlib.KEYED_SCHEMA,
                kinds=("update",) if h0.at(pos).__class__.__name__ == "Update"
                else ("delete",),
                keyed=True, fresh_ids=iter(range(900, 999)))
            h, hm, reps = normalize_mods(h0, [Replace(pos, new)])
            if not reps:
                continue
            chi_r = compress(db, "R", "ID", 2)
            for method in ("greedy", "single"):
                if method == "greedy":
                    report = greedy_slice(h, hm, reps, chi_r, db, "R",
                                          node_budget=40_000)
                else:
                    report = single_mod_dependency(h, hm, reps[0], chi_r, db, "R",
                                                   node_budget=40_000)
                assert set(report.kept) | set(report.removed) == set(
                    range(1, len(h) + 1))
                assert preserved_delta(h, hm, report.kept, db, "R"), (
                    f"{method}: {h0} / {new} @ {pos} kept {report.kept}")
            done += 1
        assert done >= 25
