"""Shared fixtures: the shipping-fee running example."""
from __future__ import annotations

import pytest

from histif.data import Database, make_database
from histif.dsl import parse_statement
from histif.expressions import Schema
from histif.statements import History

ORDER_SCHEMA = Schema(
    "Order",
    (
        ("ID", "int"),
        ("Customer", "text"),
        ("Country", "text"),
        ("Price", "int"),
        ("ShippingFee", "int"),
    ),
)

ORDER_ROWS = [
    (11, "Susan", "UK", 20, 5),
    (12, "Alex", "UK", 50, 5),
    (13, "Jack", "US", 60, 3),
    (14, "Mark", "US", 30, 4),
]

U1 = "UPDATE Order SET ShippingFee=0 WHERE Price>=50"
U1P = "UPDATE Order SET ShippingFee=0 WHERE Price>=60"
U2 = "UPDATE Order SET ShippingFee=ShippingFee+5 WHERE Country='UK' AND Price<=100"
U3 = "UPDATE Order SET ShippingFee=ShippingFee-2 WHERE Price<=30 AND ShippingFee>=10"

FINAL_ROWS = [
    (11, "Susan", "UK", 20, 8),
    (12, "Alex", "UK", 50, 5),
    (13, "Jack", "US", 60, 0),
    (14, "Mark", "US", 30, 4),
]

MODIFIED_ROWS = [
    (11, "Susan", "UK", 20, 8),
    (12, "Alex", "UK", 50, 10),
    (13, "Jack", "US", 60, 0),
    (14, "Mark", "US", 30, 4),
]


@pytest.fixture
def order_db() -> Database:
    return make_database((ORDER_SCHEMA, ORDER_ROWS))


@pytest.fixture
def shipping_history() -> History:
    return History(tuple(parse_statement(s) for s in (U1, U2, U3)), "shipping")


@pytest.fixture
def modified_history() -> History:
    return History(tuple(parse_statement(s) for s in (U1P, U2, U3)), "shipping[M]")
