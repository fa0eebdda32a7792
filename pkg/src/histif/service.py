"""HTTP JSON API for the what-if engine (consumed by the workbench UI).

Endpoints (all application/json):

    GET  /api/history/{id}            statements with positions + DSL text
    POST /api/history                 register a history (DSL text or ASTs)
    POST /api/whatif                  answer a what-if request
    GET  /api/relation/{name}?at=i    rows of a reconstructed version
    POST /api/parse                   parse one DSL statement (diagnostics)
    GET  /api/report/{request_id}     a cached run report

Responses are pure functions of (store state, request); repeated identical
what-if posts return identical delta arrays.  A request whose slicing
degraded still answers, with HTTP 422 and the degradation detail attached.
"""
from __future__ import annotations

import hashlib
import json
import threading
from collections import OrderedDict
from typing import Optional

from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .algebra import sorted_delta_rows
from .dsl import parse_history, parse_statement, print_statement
from .engine import HWQRequest, METHODS, answer
from .errors import EngineError, ParseError, SchemaError
from .statements import (
    History,
    modification_from_json,
    statement_from_json,
    statement_to_json,
)
from .store import VersionedStore
from .values import render_value

REPORT_CACHE_SIZE = 100


class HistoryIn(BaseModel):
    id: str
    text: Optional[str] = None
    statements: Optional[list[dict]] = None


class WhatIfIn(BaseModel):
    history_id: str
    modifications: list[dict] = Field(default_factory=list)
    method: str = "r+ps+ds"
    group_attr: Optional[str] = None
    groups: int = 8
    solver_budget: int = 10 ** 6
    big_m_floor: int = 0


class ParseIn(BaseModel):
    text: str


class ApiSession:
    """Store handle plus registered histories and an LRU of run reports."""

    def __init__(self, store: VersionedStore):
        self.store = store
        self.histories: dict[str, History] = {}
        self.reports: OrderedDict[str, dict] = OrderedDict()
        self.write_gate = threading.Lock()

    def remember_report(self, request_id: str, report: dict) -> None:
        self.reports[request_id] = report
        self.reports.move_to_end(request_id)
        while len(self.reports) > REPORT_CACHE_SIZE:
            self.reports.popitem(last=False)


def _history_json(ident: str, h: History) -> dict:
    return {
        "id": ident,
        "statements": [
            {"pos": i + 1, "ast": statement_to_json(u), "sql": print_statement(u)}
            for i, u in enumerate(h.statements)
        ],
    }


def _delta_json(ans) -> list[dict]:
    out = []
    for rel in sorted(ans.deltas):
        for sign, row in sorted_delta_rows(ans.deltas[rel]):
            out.append({"relation": rel, "sign": sign,
                        "values": [render_value(v) for v in row]})
    return out


def create_app(store: VersionedStore) -> FastAPI:
    app = FastAPI(title="histif what-if service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],  # local tool; the workbench runs on another port
        allow_methods=["*"],
        allow_headers=["*"],
    )
    session = ApiSession(store)
    session.histories["log"] = store.history("log")

    @app.get("/api/history/{ident}")
    def get_history(ident: str, response: Response):
        h = session.histories.get(ident)
        if h is None:
            response.status_code = 404
            return {"error": f"unknown history {ident!r}"}
        return _history_json(ident, h)

    @app.post("/api/history")
    def post_history(body: HistoryIn, response: Response):
        try:
            if body.text is not None:
                h = parse_history(body.text, body.id)
            elif body.statements is not None:
                h = History(tuple(statement_from_json(s) for s in body.statements),
                            body.id)
            else:
                response.status_code = 400
                return {"error": "text or statements required"}
        except (ParseError, ValueError, KeyError) as e:
            response.status_code = 400
            return {"error": str(e)}
        with session.write_gate:
            session.histories[body.id] = h
        return _history_json(body.id, h)

    @app.post("/api/parse")
    def post_parse(body: ParseIn):
        try:
            stmt = parse_statement(body.text)
        except ParseError as e:
            return {"ok": False, "error": str(e), "line": e.line, "column": e.column}
        return {"ok": True, "ast": statement_to_json(stmt), "sql": print_statement(stmt)}

    @app.post("/api/whatif")
    def post_whatif(body: WhatIfIn, response: Response):
        h = session.histories.get(body.history_id)
        if h is None:
            response.status_code = 404
            return {"error": f"unknown history {body.history_id!r}"}
        if body.method not in METHODS:
            response.status_code = 400
            return {"error": f"unknown method {body.method!r}"}
        try:
            mods = tuple(modification_from_json(m) for m in body.modifications)
        except (ValueError, KeyError) as e:
            response.status_code = 400
            return {"error": f"invalid modifications: {e}"}
        run_store = VersionedStore(session.store.base)
        run_store.append_history(h)
        req = HWQRequest(mods, method=body.method, group_attr=body.group_attr,
                         groups=body.groups, solver_budget=body.solver_budget,
                         big_m_floor=body.big_m_floor)
        try:
            ans = answer(run_store, req)
        except (SchemaError, EngineError) as e:
            response.status_code = 500
            return {"error": str(e)}
        request_id = hashlib.sha256(
            json.dumps(body.model_dump(), sort_keys=True).encode()).hexdigest()[:16]
        payload = {
            "request_id": request_id,
            "delta": _delta_json(ans),
            "report": ans.report.to_json(),
        }
        session.remember_report(request_id, payload["report"])
        if ans.report.degraded:
            response.status_code = 422
            payload["detail"] = "; ".join(ans.report.degraded)
        return payload

    @app.get("/api/relation/{name}")
    def get_relation(name: str, response: Response, at: Optional[int] = None,
                     offset: int = 0, limit: int = 1000):
        try:
            session.store.base.schema(name)
        except SchemaError:
            response.status_code = 404
            return {"error": f"unknown relation {name!r}"}
        i = len(session.store.log) if at is None else at
        if not 0 <= i <= len(session.store.log):
            response.status_code = 416
            return {"error": f"version {i} out of range [0,{len(session.store.log)}]"}
        db = session.store.reconstruct(i)
        schema = db.schema(name)
        rows = sorted([render_value(v) for v in row] for row in db.relation(name))
        return {
            "relation": name,
            "at": i,
            "columns": list(schema.names),
            "types": list(schema.types),
            "total": len(rows),
            "offset": offset,
            "rows": rows[offset:offset + limit],
        }

    @app.get("/api/report/{request_id}")
    def get_report(request_id: str, response: Response):
        report = session.reports.get(request_id)
        if report is None:
            response.status_code = 404
            return {"error": "no such report"}
        return report

    return app
