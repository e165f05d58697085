"""Read-only HTTP query service over a built catalogue.

Filters are conjunctive across facets; repeating a parameter ORs its
values within that facet. Entry listings are ordered by model_id and
paginated with a stable cursor (the last id of the previous page).
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, HTTPServer
from socketserver import ThreadingMixIn
from urllib.parse import parse_qs, unquote, urlparse

from .analytics import attribute_stats, classification_stats, quarterly_series
from .catalogue import Catalogue, CatalogueEntry
from .taxonomy import SeActivity

DEFAULT_LIMIT = 20
MAX_LIMIT = 200

FILTER_KEYS = {
    "activity",
    "task",
    "ml_task",
    "license",
    "base_model",
    "benchmark",
    "tag",
    "metadata_key",
    "created_from",
    "created_to",
    "has_benchmarks",
    "q",
}
PAGING_KEYS = {"cursor", "limit"}


class InvalidFilter(ValueError):
    pass


def _parse_date(value: str) -> datetime:
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError as exc:
        raise InvalidFilter(f"bad date {value!r}") from exc
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


class CatalogueIndex:
    """In-memory query engine; the HTTP layer is a thin wrapper around it."""

    def __init__(self, catalogue: Catalogue):
        self.catalogue = catalogue
        self.entries = sorted(catalogue.entries, key=lambda e: e.model_id)
        self.by_id = {e.model_id: e for e in self.entries}
        self.variants_of: dict[str, list[list]] = {}
        for cluster in catalogue.clusters:
            self.variants_of[cluster["original"]] = cluster.get("variants", [])

    def filter(self, params: dict[str, list[str]]) -> list[CatalogueEntry]:
        unknown = set(params) - FILTER_KEYS - PAGING_KEYS
        if unknown:
            raise InvalidFilter(f"unknown filter parameter(s): {sorted(unknown)}")
        preds = []
        if "activity" in params:
            try:
                wanted = {SeActivity.parse(v) for v in params["activity"]}
            except Exception as exc:
                raise InvalidFilter(str(exc)) from exc
            preds.append(lambda e: bool(e.activities & wanted))
        if "task" in params:
            tasks = {v.lower() for v in params["task"]}
            preds.append(lambda e: bool({t.lower() for t in e.tasks} & tasks))
        if "ml_task" in params:
            ml = {v.lower() for v in params["ml_task"]}
            preds.append(lambda e: (e.ml_task or "").lower() in ml)
        if "license" in params:
            lic = {v.lower() for v in params["license"]}
            preds.append(lambda e: (e.license or "").lower() in lic)
        if "base_model" in params:
            bases = {v.lower() for v in params["base_model"]}
            preds.append(lambda e: (e.base_model or "").lower() in bases)
        if "benchmark" in params:
            wanted_b = {v.lower() for v in params["benchmark"]}
            preds.append(lambda e: bool({b.lower() for b in e.benchmarks} & wanted_b))
        if "tag" in params:
            tags = {v.lower() for v in params["tag"]}
            preds.append(lambda e: bool({t.lower() for t in e.tags} & tags))
        if "metadata_key" in params:
            keys = {v.lower() for v in params["metadata_key"]}
            preds.append(lambda e: bool({k.lower() for k in e.metadata_keys} & keys))
        if "has_benchmarks" in params:
            flag = params["has_benchmarks"][-1].lower() in ("1", "true", "yes")
            preds.append((lambda e: bool(e.benchmarks)) if flag else (lambda e: not e.benchmarks))
        if "created_from" in params:
            lo = _parse_date(params["created_from"][-1])
            preds.append(lambda e: e.created_at is not None and e.created_at >= lo)
        if "created_to" in params:
            hi = _parse_date(params["created_to"][-1])
            preds.append(lambda e: e.created_at is not None and e.created_at <= hi)
        if "q" in params:
            needles = [v.lower() for v in params["q"] if v.strip()]
            if needles:
                preds.append(lambda e: all(n in e.model_id.lower() for n in needles))
        return [e for e in self.entries if all(p(e) for p in preds)]

    def page(self, matched: list[CatalogueEntry], cursor: str | None, limit: int) -> tuple[list[CatalogueEntry], str | None]:
        start = 0
        if cursor:
            start = next((i + 1 for i, e in enumerate(matched) if e.model_id == cursor), None)
            if start is None:
                # cursor entry may have been filtered out; resume after its sort position
                start = next((i for i, e in enumerate(matched) if e.model_id > cursor), len(matched))
        page = matched[start : start + limit]
        next_cursor = page[-1].model_id if start + limit < len(matched) else None
        return page, next_cursor

    def facet_counts(self, matched: list[CatalogueEntry]) -> dict[str, dict[str, int]]:
        """How many of the matched entries each next facet value would retain."""
        facets: dict[str, dict[str, int]] = {
            "activity": {},
            "task": {},
            "ml_task": {},
            "license": {},
            "base_model": {},
            "benchmark": {},
            "tag": {},
            "metadata_key": {},
        }

        def bump(facet: str, value: str):
            facets[facet][value] = facets[facet].get(value, 0) + 1

        for e in matched:
            for a in e.activities:
                bump("activity", a.value)
            for t in e.tasks:
                bump("task", t)
            if e.ml_task:
                bump("ml_task", e.ml_task)
            if e.license:
                bump("license", e.license)
            if e.base_model:
                bump("base_model", e.base_model)
            for b in e.benchmarks:
                bump("benchmark", b)
            for t in e.tags:
                bump("tag", t)
            for k in e.metadata_keys:
                bump("metadata_key", k)
        return {f: dict(sorted(vals.items())) for f, vals in facets.items()}

    def entry_detail(self, model_id: str) -> dict:
        entry = self.by_id.get(model_id)
        if entry is None:
            raise KeyError(model_id)
        detail = entry.to_json()
        detail["variants"] = self.variants_of.get(model_id, [])
        return detail

    def analytics_doc(self, name: str) -> dict:
        entries = self.entries
        if name == "quarterly":
            return quarterly_series(entries).to_json()
        if name == "classification":
            return classification_stats(entries, self.catalogue.task_activities).to_json()
        if name == "attributes":
            return attribute_stats(entries).to_json()
        raise KeyError(name)


class _ThreadingHTTPServer(ThreadingMixIn, HTTPServer):
    daemon_threads = True


def make_server(catalogue: Catalogue, host: str = "127.0.0.1", port: int = 8032) -> HTTPServer:
    index = CatalogueIndex(catalogue)

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def do_GET(self):
            parsed = urlparse(self.path)
            params = parse_qs(parsed.query, keep_blank_values=True)
            try:
                self._route(parsed.path, params)
            except InvalidFilter as exc:
                self._json({"error": str(exc)}, 400)
            except KeyError as exc:
                self._json({"error": f"not found: {exc}"}, 404)

        def _route(self, path: str, params):
            if path == "/health":
                self._json({"status": "ok", "entries": len(index.entries)})
            elif path == "/entries":
                matched = index.filter(params)
                limit = self._limit(params)
                cursor = params.get("cursor", [None])[-1]
                page, next_cursor = index.page(matched, cursor, limit)
                self._json(
                    {
                        "total": len(matched),
                        "entries": [e.to_json() for e in page],
                        "next_cursor": next_cursor,
                    }
                )
            elif path.startswith("/entries/"):
                model_id = unquote(path[len("/entries/") :])
                self._json(index.entry_detail(model_id))
            elif path == "/facets":
                matched = index.filter(params)
                self._json({"total": len(matched), "facets": index.facet_counts(matched)})
            elif path.startswith("/analytics/"):
                self._json(index.analytics_doc(path[len("/analytics/") :]))
            elif path == "/stats/stages":
                self._json(index.catalogue.stage_report.to_json())
            else:
                self._json({"error": "not found"}, 404)

        @staticmethod
        def _limit_value(raw: str) -> int:
            try:
                value = int(raw)
            except ValueError as exc:
                raise InvalidFilter(f"bad limit {raw!r}") from exc
            if value < 1:
                raise InvalidFilter("limit must be >= 1")
            return min(value, MAX_LIMIT)

        def _limit(self, params) -> int:
            raw = params.get("limit", [None])[-1]
            return DEFAULT_LIMIT if raw is None else self._limit_value(raw)

        def _json(self, payload, status: int = 200):
            body = json.dumps(payload, sort_keys=True).encode("utf-8")
            self.send_response(status)
            self.send_header("content-type", "application/json")
            self.send_header("content-length", str(len(body)))
            self.send_header("access-control-allow-origin", "*")
            self.end_headers()
            self.wfile.write(body)

    return _ThreadingHTTPServer((host, port), Handler)


def serve_catalogue(catalogue: Catalogue, host: str = "127.0.0.1", port: int = 8032) -> None:
    server = make_server(catalogue, host, port)
    try:
        server.serve_forever()
    finally:
        server.server_close()
