"""HTTP facade over the library, backing the interactive console.

All endpoints live under ``/api/v1``. Network documents travel in the
same canonical format as files; every stored version is immutable, so
concurrent queries always answer against exactly one version. Each
session can register watch queries: after every applied change the
response reports, per watch, the guaranteed log-odds interval next to
the exact recomputed posterior.
"""

from __future__ import annotations

import json
import math
import secrets
import threading
from collections import OrderedDict
from dataclasses import replace

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import bounds
from .errors import (FormatError, NonTunableParameter, UnknownElement,
                     ValidationError, ZeroEvidenceProbability)
from .inference import posterior
from .network import (Event, MetaParameterRef, Network, apply_change,
                      parse_network, serialize_network)
from .querylang import parse_constraint, resolve_events
from .tuning import Recommendation, constraint_margin, solve

MAX_BODY_BYTES = 1 << 20
DEFAULT_MAX_VERSIONS = 100
DEFAULT_MAX_WATCHES = 8
DEFAULT_PORT = 8374


class _Session:
    def __init__(self, net: Network, max_versions: int):
        self.lock = threading.Lock()
        self.versions: OrderedDict[int, Network] = OrderedDict()
        self.max_versions = max_versions
        self.watches: list[dict] = []
        self.next_version = 0
        self.append(net)

    def append(self, net: Network) -> int:
        with self.lock:
            index = self.next_version
            self.next_version += 1
            if net.version != index:
                net = replace(net, version=index)
            self.versions[index] = net
            while len(self.versions) > self.max_versions:
                self.versions.popitem(last=False)
            return index

    def get(self, version: int | None = None) -> Network:
        with self.lock:
            if version is None:
                return next(reversed(self.versions.values()))
            if version not in self.versions:
                raise KeyError(version)
            return self.versions[version]

    def latest_index(self) -> int:
        with self.lock:
            return next(reversed(self.versions))


class ModelStore:
    """Versioned, in-memory sessions keyed by opaque ids."""

    def __init__(self, max_versions: int = DEFAULT_MAX_VERSIONS):
        self._lock = threading.Lock()
        self._sessions: dict[str, _Session] = {}
        self._max_versions = max_versions

    def create(self, net: Network) -> str:
        session_id = secrets.token_hex(8)
        with self._lock:
            self._sessions[session_id] = _Session(net, self._max_versions)
        return session_id

    def session(self, session_id: str) -> _Session:
        with self._lock:
            if session_id not in self._sessions:
                raise KeyError(session_id)
            return self._sessions[session_id]


class _HttpError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


async def _json_body(request: Request) -> dict:
    body = await request.body()
    if len(body) > MAX_BODY_BYTES:
        raise _HttpError(413, "request body exceeds 1 MiB")
    try:
        doc = json.loads(body)
    except Exception:
        raise _HttpError(400, "request body is not valid JSON") from None
    if not isinstance(doc, dict):
        raise _HttpError(400, "request body must be a JSON object")
    return doc


def _evidence_from(doc: dict) -> dict[str, str]:
    evidence = doc.get("evidence", {})
    if not isinstance(evidence, dict) or any(
            not isinstance(k, str) or not isinstance(v, str)
            for k, v in evidence.items()):
        raise _HttpError(400, "'evidence' must map variable names to states")
    return evidence


def _event_from(doc: dict, key: str = "target") -> Event:
    raw = doc.get(key)
    if (not isinstance(raw, dict) or not isinstance(raw.get("variable"), str)
            or not isinstance(raw.get("state"), str)):
        raise _HttpError(400, f"'{key}' must carry 'variable' and 'state'")
    return Event(raw["variable"], raw["state"])


def _version_from(doc: dict) -> int | None:
    version = doc.get("version")
    if version is None:
        return None
    if not isinstance(version, int) or isinstance(version, bool) or version < 0:
        raise _HttpError(400, "'version' must be a non-negative integer")
    return version


def _ref_from(doc: dict, net: Network) -> MetaParameterRef:
    raw = doc.get("param")
    if not isinstance(raw, dict) or not isinstance(raw.get("variable"), str):
        raise _HttpError(422, "'param' must carry at least 'variable'")
    variable = raw["variable"]
    if variable not in net:
        raise _HttpError(422, f"unknown variable {variable!r}")
    state = raw.get("state", net.variable(variable).states[0])
    parents = raw.get("parents", {})
    if not isinstance(state, str) or not isinstance(parents, dict):
        raise _HttpError(422, "'param' fields have the wrong types")
    return MetaParameterRef.make(variable, state, parents)


def _rec_payload(rec: Recommendation) -> dict:
    lodd = rec.log_odds_distance
    return {
        "param": {
            "variable": rec.param.variable,
            "state": rec.param.state,
            "parents": rec.param.parent_instantiation,
        },
        "label": rec.param.describe(),
        "current_tau": rec.current_tau,
        "minimal_delta": rec.minimal_delta,
        "new_tau": rec.new_tau,
        "log_odds_distance": None if math.isinf(lodd) else lodd,
        "feasible_interval": list(rec.feasible_interval),
        "saturates": rec.saturates,
    }


def _watch_payload(net: Network, watch: dict,
                   budget: float | None = None,
                   previous: Network | None = None) -> dict:
    event = Event(**watch["target"])
    payload = {"evidence": watch["evidence"], "target": dict(watch["target"])}
    try:
        exact = posterior(net, event, watch["evidence"])
        payload["exact"] = exact
    except ZeroEvidenceProbability:
        payload["exact"] = None
    if budget is not None and previous is not None:
        try:
            before = posterior(previous, event, watch["evidence"])
        except ZeroEvidenceProbability:
            before = None
        if before is None:
            payload["interval"] = None
        else:
            iv = bounds.query_interval(before, budget)
            # a change that binds exactly at the band edge can land one
            # float ulp outside it; pad by the bound's numerical slack
            payload["interval"] = [max(0.0, iv.low - 1e-9),
                                   min(1.0, iv.high + 1e-9)]
            payload["degenerate"] = iv.degenerate
    return payload


def create_app(max_versions: int = DEFAULT_MAX_VERSIONS,
               max_watches: int = DEFAULT_MAX_WATCHES) -> FastAPI:
    app = FastAPI(title="belief-tuner", docs_url=None, redoc_url=None)
    # the browser console is served from a different origin
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    store = ModelStore(max_versions)
    app.state.store = store

    @app.exception_handler(_HttpError)
    async def _on_http_error(request: Request, exc: _HttpError):
        return _error(exc.status, exc.message)

    def _session(session_id: str) -> _Session:
        try:
            return store.session(session_id)
        except KeyError:
            raise _HttpError(404, f"unknown network id {session_id!r}") from None

    @app.post("/api/v1/networks", status_code=201)
    async def upload(request: Request):
        body = await request.body()
        if len(body) > MAX_BODY_BYTES:
            return _error(413, "network document exceeds 1 MiB")
        try:
            net = parse_network(body.decode("utf-8"))
        except (FormatError, ValidationError, UnicodeDecodeError) as exc:
            return _error(400, str(exc))
        session_id = store.create(net)
        return {"id": session_id, "version": 0}

    @app.get("/api/v1/networks/{session_id}")
    async def describe(session_id: str, version: int | None = None):
        session = _session(session_id)
        try:
            net = session.get(version)
        except KeyError:
            return _error(404, f"version {version} is not stored")
        return {
            "id": session_id,
            "version": net.version,
            "latest": session.latest_index(),
            "document": json.loads(serialize_network(net)),
        }

    @app.get("/api/v1/networks/{session_id}/versions")
    async def versions(session_id: str):
        session = _session(session_id)
        with session.lock:
            stored = list(session.versions)
        return {"versions": stored}

    @app.post("/api/v1/networks/{session_id}/query")
    async def query(session_id: str, request: Request):
        session = _session(session_id)
        doc = await _json_body(request)
        try:
            net = session.get(_version_from(doc))
        except KeyError:
            return _error(404, "version is not stored")
        evidence = _evidence_from(doc)
        event = _event_from(doc)
        try:
            value = posterior(net, event, evidence)
        except ZeroEvidenceProbability as exc:
            return _error(409, str(exc))
        except (UnknownElement, ValidationError) as exc:
            return _error(400, str(exc))
        return {"posterior": value, "version": net.version}

    @app.post("/api/v1/networks/{session_id}/recommend")
    async def recommend(session_id: str, request: Request):
        session = _session(session_id)
        doc = await _json_body(request)
        try:
            net = session.get(_version_from(doc))
        except KeyError:
            return _error(404, "version is not stored")
        evidence = _evidence_from(doc)
        raw = doc.get("constraint")
        if not isinstance(raw, str):
            return _error(400, "'constraint' must be a string expression")
        try:
            constraint = parse_constraint(raw)
            resolve_events(net, constraint, evidence)
            margin = constraint_margin(net, evidence, constraint)
            recs = solve(net, evidence, constraint) if margin < 0 else []
        except ZeroEvidenceProbability as exc:
            return _error(409, str(exc))
        except (FormatError, UnknownElement, ValidationError) as exc:
            return _error(400, str(exc))
        return {
            "satisfied": margin >= 0,
            "recommendations": [_rec_payload(r) for r in recs],
            "version": net.version,
        }

    @app.post("/api/v1/networks/{session_id}/apply")
    async def apply(session_id: str, request: Request):
        session = _session(session_id)
        doc = await _json_body(request)
        new_tau = doc.get("new_tau")
        if isinstance(new_tau, bool) or not isinstance(new_tau, (int, float)):
            return _error(422, "'new_tau' must be a number")
        previous = session.get()
        ref = _ref_from(doc, previous)
        try:
            old_tau = previous.parameter_value(ref)
            changed = apply_change(previous, ref, float(new_tau))
        except (NonTunableParameter, ValidationError, UnknownElement) as exc:
            return _error(422, str(exc))
        index = session.append(changed)
        changed = session.get(index)
        if 0.0 < new_tau < 1.0:
            budget = bounds.log_odds_distance(old_tau, float(new_tau))
        else:
            budget = math.inf
        watches = [_watch_payload(changed, w, budget, previous)
                   for w in session.watches]
        return {"version": index, "watches": watches}

    @app.post("/api/v1/networks/{session_id}/revert")
    async def revert(session_id: str, request: Request):
        session = _session(session_id)
        doc = await _json_body(request)
        version = _version_from(doc)
        if version is None:
            return _error(400, "'version' is required")
        try:
            target = session.get(version)
        except KeyError:
            return _error(404, f"version {version} is not stored")
        index = session.append(target)
        net = session.get(index)
        watches = [_watch_payload(net, w) for w in session.watches]
        return {"version": index, "watches": watches}

    @app.post("/api/v1/networks/{session_id}/watches")
    async def add_watch(session_id: str, request: Request):
        session = _session(session_id)
        doc = await _json_body(request)
        evidence = _evidence_from(doc)
        event = _event_from(doc)
        net = session.get()
        try:
            net.state_index(event.variable, event.state)
            for name, state in evidence.items():
                net.state_index(name, state)
        except UnknownElement as exc:
            return _error(400, str(exc))
        with session.lock:
            if len(session.watches) >= max_watches:
                return _error(422, f"at most {max_watches} watch queries "
                                   "per session")
            session.watches.append({
                "evidence": evidence,
                "target": {"variable": event.variable, "state": event.state},
            })
            registered = list(session.watches)
        return {"watches": [_watch_payload(net, w) for w in registered]}

    @app.get("/api/v1/networks/{session_id}/watches")
    async def list_watches(session_id: str):
        session = _session(session_id)
        net = session.get()
        with session.lock:
            registered = list(session.watches)
        return {"watches": [_watch_payload(net, w) for w in registered]}

    @app.post("/api/v1/networks/{session_id}/export")
    async def export(session_id: str):
        session = _session(session_id)
        with session.lock:
            stored = list(session.versions.items())
        return {"versions": [
            {"version": index, "document": serialize_network(net)}
            for index, net in stored
        ]}

    @app.get("/api/v1/bounds/envelope")
    async def envelope_csv(q0: float, lo: float, hi: float, step: float = 0.01):
        if not (0.0 < step < 1.0):
            return _error(400, f"step {step!r} does not fit inside (0, 1)")
        grid = []
        k = 1
        while k * step < 1.0 - 1e-12:
            grid.append(round(k * step, 12))
            k += 1
        try:
            points = bounds.envelope(q0, lo, hi, grid)
        except ValidationError as exc:
            return _error(400, str(exc))
        lines = ["p,delta_plus_outer,delta_plus_inner,"
                 "delta_minus_outer,delta_minus_inner"]
        lines += [f"{p.p:.6f},{p.delta_plus_outer:.6f},{p.delta_plus_inner:.6f},"
                  f"{p.delta_minus_outer:.6f},{p.delta_minus_inner:.6f}"
                  for p in points]
        return PlainTextResponse("\n".join(lines) + "\n", media_type="text/csv")

    return app


def serve(port: int = DEFAULT_PORT, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")
