"""HTTP clients for the model hub and the arXiv metadata endpoint.

Network access goes through a swappable transport so tests replay recorded
responses offline. Live calls get retry with exponential backoff + jitter
and a per-host token-bucket rate limiter.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from urllib.parse import urlencode, urlsplit

from .cards import card_fields, extract_arxiv_ids, parse_card
from .records import ModelRecord, parse_timestamp

HUB_BASE = "https://huggingface.co"
ARXIV_BASE = "https://export.arxiv.org/api/query"
TOKEN_ENV_VAR = "HF_TOKEN"

MAX_ATTEMPTS = 5


class NetworkError(Exception):
    def __init__(self, message: str, retryable: bool = True):
        super().__init__(message)
        self.retryable = retryable


class RateLimited(NetworkError):
    def __init__(self, retry_after: float | None = None):
        super().__init__("rate limited", retryable=True)
        self.retry_after = retry_after


class AuthError(NetworkError):
    def __init__(self, message: str = "authentication failed"):
        super().__init__(message, retryable=False)


class NotFound(Exception):
    pass


@dataclass
class TransportResponse:
    status: int
    headers: dict[str, str]
    body: bytes


class RequestsTransport:
    """Live transport backed by `requests`."""

    def __init__(self, timeout: float = 30.0):
        import requests

        self._session = requests.Session()
        self._timeout = timeout

    def __call__(self, url: str, params: dict | None = None, headers: dict | None = None) -> TransportResponse:
        import requests

        try:
            resp = self._session.get(url, params=params, headers=headers, timeout=self._timeout)
        except requests.RequestException as exc:
            raise NetworkError(str(exc)) from exc
        return TransportResponse(
            status=resp.status_code,
            headers={k.lower(): v for k, v in resp.headers.items()},
            body=resp.content,
        )


class ReplayTransport:
    """Offline transport replaying recorded request -> response fixtures.

    The fixture file is a JSON list of entries with `url`, optional
    `params`, `status`, optional `headers`, and `body` (a string, or any
    JSON value which is then serialized).
    """

    def __init__(self, fixture_path: str | Path):
        entries = json.loads(Path(fixture_path).read_text("utf-8"))
        self._responses: dict[str, list] = {}
        for entry in entries:
            key = self._key(entry["url"], entry.get("params"))
            body = entry.get("body", "")
            if not isinstance(body, str):
                body = json.dumps(body)
            self._responses.setdefault(key, []).append(
                TransportResponse(
                    status=entry.get("status", 200),
                    headers={k.lower(): v for k, v in entry.get("headers", {}).items()},
                    body=body.encode("utf-8"),
                )
            )
        self.requests_served = 0

    @staticmethod
    def _key(url: str, params: dict | None) -> str:
        if params:
            url = url + "?" + urlencode(sorted((k, str(v)) for k, v in params.items()))
        return url

    def __call__(self, url: str, params: dict | None = None, headers: dict | None = None) -> TransportResponse:
        key = self._key(url, params)
        queue = self._responses.get(key)
        if not queue:
            raise NetworkError(f"no recorded response for {key}", retryable=False)
        self.requests_served += 1
        return queue.pop(0) if len(queue) > 1 else queue[0]


class TokenBucket:
    """Per-host rate limiter: `rate` requests/second, bursts up to `capacity`.

    Shared by all fetch workers, so acquisition is locked.
    """

    def __init__(self, rate: float = 5.0, capacity: int = 10, clock=time.monotonic, sleep=time.sleep):
        self.rate = rate
        self.capacity = capacity
        self._clock = clock
        self._sleep = sleep
        self._tokens: dict[str, float] = {}
        self._last: dict[str, float] = {}
        self._lock = threading.Lock()

    def acquire(self, host: str) -> None:
        with self._lock:
            now = self._clock()
            tokens = min(
                self.capacity,
                self._tokens.get(host, self.capacity) + (now - self._last.get(host, now)) * self.rate,
            )
            if tokens < 1.0:
                wait = (1.0 - tokens) / self.rate
            else:
                wait = 0.0
                self._tokens[host] = tokens - 1.0
                self._last[host] = now
        if wait:
            self._sleep(wait)
            with self._lock:
                now = self._clock() + wait
                self._tokens[host] = 0.0
                self._last[host] = now


class HttpClient:
    def __init__(self, transport=None, rate_limiter: TokenBucket | None = None, sleep=time.sleep, rng: random.Random | None = None):
        self._transport = transport or RequestsTransport()
        self._limiter = rate_limiter or TokenBucket(sleep=sleep)
        self._sleep = sleep
        self._rng = rng or random.Random()

    def get(self, url: str, params: dict | None = None, headers: dict | None = None) -> TransportResponse:
        host = urlsplit(url).netloc
        last_error: Exception | None = None
        for attempt in range(MAX_ATTEMPTS):
            self._limiter.acquire(host)
            try:
                resp = self._transport(url, params=params, headers=headers)
            except NetworkError as exc:
                if not exc.retryable:
                    raise
                last_error = exc
                self._backoff(attempt)
                continue
            if resp.status in (401, 403):
                raise AuthError(f"{resp.status} from {host}")
            if resp.status == 404:
                raise NotFound(url)
            if resp.status == 429:
                retry_after = _parse_retry_after(resp.headers.get("retry-after"))
                last_error = RateLimited(retry_after)
                self._sleep(retry_after if retry_after is not None else self._backoff_delay(attempt))
                continue
            if resp.status >= 500:
                last_error = NetworkError(f"{resp.status} from {host}")
                self._backoff(attempt)
                continue
            return resp
        raise last_error if last_error else NetworkError("request failed")

    def _backoff_delay(self, attempt: int) -> float:
        return 0.5 * (2**attempt) + self._rng.uniform(0, 0.25)

    def _backoff(self, attempt: int) -> None:
        if attempt < MAX_ATTEMPTS - 1:
            self._sleep(self._backoff_delay(attempt))


def _parse_retry_after(value: str | None) -> float | None:
    if value is None:
        return None
    try:
        return float(value)
    except ValueError:
        return None


class HubClient:
    """Read-only client for the model hub's index and raw card files."""

    def __init__(self, transport=None, base_url: str = HUB_BASE, token: str | None = None, page_size: int = 500, **http_kwargs):
        self._http = HttpClient(transport=transport, **http_kwargs)
        self._base = base_url.rstrip("/")
        self._token = token if token is not None else os.environ.get(TOKEN_ENV_VAR)
        self._page_size = page_size

    def _headers(self) -> dict[str, str]:
        return {"authorization": f"Bearer {self._token}"} if self._token else {}

    def fetch_model_index(self, since: datetime | None = None, limit: int | None = None) -> list[ModelRecord]:
        """List model stubs (no card body / abstracts), newest first.

        With `since`, only records created strictly after it are returned;
        pagination stops at the first fully-older page.
        """
        stubs: list[ModelRecord] = []
        seen: set[str] = set()
        url = f"{self._base}/api/models"
        params: dict | None = {
            "limit": self._page_size if limit is None else min(self._page_size, limit),
            "sort": "createdAt",
            "direction": -1,
            "full": "true",
        }
        while url:
            resp = self._http.get(url, params=params, headers=self._headers())
            page = json.loads(resp.body.decode("utf-8"))
            page_exhausted_since = False
            for item in page:
                stub = _stub_from_index_item(item)
                # the index can shift while paginating; ids stay unique
                if stub.model_id in seen:
                    continue
                if since is not None and stub.created_at is not None and stub.created_at <= since:
                    page_exhausted_since = True
                    continue
                seen.add(stub.model_id)
                stubs.append(stub)
                if limit is not None and len(stubs) >= limit:
                    return stubs
            if page_exhausted_since:
                break
            url = _next_link(resp.headers.get("link"))
            params = None  # the next link already carries its query string
        return stubs

    def fetch_card(self, model_id: str) -> str | None:
        """Raw card text, '' for an empty card file, None when absent."""
        if "/" not in model_id:
            raise ValueError(f"model id must be namespaced owner/name: {model_id!r}")
        url = f"{self._base}/{model_id}/raw/main/README.md"
        try:
            resp = self._http.get(url, headers=self._headers())
        except NotFound:
            return None
        return resp.body.decode("utf-8", errors="replace")

    def hydrate(self, stub: ModelRecord, arxiv: "ArxivClient | None" = None) -> ModelRecord:
        """Fill a stub with its card, parsed metadata, and linked abstracts."""
        raw = self.fetch_card(stub.model_id)
        if raw is None:
            return stub
        parsed = parse_card(raw)
        fields = card_fields(parsed.metadata)
        stub.card_body = parsed.body
        stub.metadata = parsed.metadata
        stub.license = stub.license or fields["license"]
        stub.base_model = stub.base_model or fields["base_model"]
        stub.ml_task = stub.ml_task or fields["ml_task"]
        if fields["tags"]:
            merged = list(stub.tags)
            merged.extend(t for t in fields["tags"] if t not in merged)
            stub.tags = merged
        if fields["declared_datasets"]:
            stub.declared_datasets = fields["declared_datasets"]
        stub.arxiv_ids = extract_arxiv_ids({"tags": stub.tags, **(parsed.metadata or {})}, parsed.body)
        if arxiv is not None:
            abstracts = []
            for arxiv_id in stub.arxiv_ids:
                text = arxiv.fetch_abstract(arxiv_id)
                if text:
                    abstracts.append((arxiv_id, text))
            stub.abstracts = abstracts
        return stub


def _stub_from_index_item(item: dict) -> ModelRecord:
    model_id = item.get("id") or item.get("modelId")
    created = item.get("createdAt")
    card_data = item.get("cardData") or {}
    datasets = card_data.get("datasets")
    if isinstance(datasets, str):
        datasets = [datasets]
    base_model = card_data.get("base_model")
    if isinstance(base_model, list):
        base_model = base_model[0] if base_model else None
    return ModelRecord(
        model_id=model_id,
        created_at=parse_timestamp(created) if created else None,
        tags=[str(t) for t in item.get("tags") or []],
        ml_task=item.get("pipeline_tag"),
        license=card_data.get("license"),
        base_model=str(base_model) if base_model else None,
        declared_datasets=[str(d) for d in datasets] if datasets else [],
        downloads=item.get("downloads"),
    )


def _next_link(link_header: str | None) -> str | None:
    if not link_header:
        return None
    for part in link_header.split(","):
        segments = part.split(";")
        if len(segments) >= 2 and segments[1].strip() == 'rel="next"':
            return segments[0].strip().strip("<>")
    return None


class ArxivClient:
    """Fetch paper abstracts by arXiv id, with an in-memory cache."""

    def __init__(self, transport=None, base_url: str = ARXIV_BASE, **http_kwargs):
        self._http = HttpClient(transport=transport, **http_kwargs)
        self._base = base_url
        self._cache: dict[str, str | None] = {}
        self._cache_lock = threading.Lock()

    def fetch_abstract(self, arxiv_id: str) -> str | None:
        with self._cache_lock:
            if arxiv_id in self._cache:
                return self._cache[arxiv_id]
        try:
            resp = self._http.get(self._base, params={"id_list": arxiv_id, "max_results": 1})
            abstract = _parse_atom_abstract(resp.body.decode("utf-8", errors="replace"))
        except NotFound:
            abstract = None
        with self._cache_lock:
            self._cache[arxiv_id] = abstract
        return abstract


def _parse_atom_abstract(xml_text: str) -> str | None:
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError:
        return None
    ns = {"atom": "http://www.w3.org/2005/Atom"}
    for entry in root.findall("atom:entry", ns):
        summary = entry.find("atom:summary", ns)
        title = entry.find("atom:title", ns)
        # the API reports unknown ids as an error entry with no summary
        if title is not None and (title.text or "").strip().lower() == "error":
            continue
        if summary is not None and summary.text and summary.text.strip():
            return " ".join(summary.text.split())
    return None
