"""Start a what-if service over the shipping-fee example (integration tests)."""
import sys

import uvicorn

from histif.data import make_database
from histif.dsl import parse_statement
from histif.expressions import Schema
from histif.service import create_app
from histif.statements import History
from histif.store import VersionedStore

SCHEMA = Schema(
    "Order",
    (("ID", "int"), ("Customer", "text"), ("Country", "text"),
     ("Price", "int"), ("ShippingFee", "int")),
)
ROWS = [
    (11, "Susan", "UK", 20, 5),
    (12, "Alex", "UK", 50, 5),
    (13, "Jack", "US", 60, 3),
    (14, "Mark", "US", 30, 4),
]
STATEMENTS = [
    "UPDATE Order SET ShippingFee=0 WHERE Price>=50",
    "UPDATE Order SET ShippingFee=ShippingFee+5 WHERE Country='UK' AND Price<=100",
    "UPDATE Order SET ShippingFee=ShippingFee-2 WHERE Price<=30 AND ShippingFee>=10",
]


def main() -> None:
    port = int(sys.argv[1]) if len(sys.argv) > 1 else 8010
    store = VersionedStore(make_database((SCHEMA, ROWS)))
    store.append_history(History(tuple(parse_statement(s) for s in STATEMENTS)))
    uvicorn.run(create_app(store), host="127.0.0.1", port=port, log_level="error")


if __name__ == "__main__":
    main()
