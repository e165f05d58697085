"""Relevance judging with a pluggable text-completion provider.

Each surviving candidate is judged once per SE activity using a versioned
per-activity prompt. Responses follow a strict grammar (first line YES or
NO, rest is the rationale) and are cached by (model_id, activity,
prompt_version) so re-runs are free.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from ..ingest.records import ModelRecord
from ..taxonomy import SeActivity
from ..textprep import flatten_metadata

DEFAULT_PROMPT_VERSION = "v1"
MAX_REASKS = 3
_CONTEXT_CHARS = 2000


class ProviderError(Exception):
    def __init__(self, message: str, retryable: bool = True):
        super().__init__(message)
        self.retryable = retryable


class BudgetExceeded(Exception):
    pass


class MalformedResponse(Exception):
    pass


@dataclass(frozen=True)
class Judgment:
    model_id: str
    activity: SeActivity
    verdict: bool
    rationale: str
    provider: str
    prompt_version: str
    timestamp: str

    def to_json(self) -> dict:
        return {
            "model_id": self.model_id,
            "activity": self.activity.value,
            "verdict": self.verdict,
            "rationale": self.rationale,
            "provider": self.provider,
            "prompt_version": self.prompt_version,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Judgment":
        return cls(
            model_id=obj["model_id"],
            activity=SeActivity(obj["activity"]),
            verdict=bool(obj["verdict"]),
            rationale=obj.get("rationale", ""),
            provider=obj.get("provider", ""),
            prompt_version=obj.get("prompt_version", ""),
            timestamp=obj.get("timestamp", ""),
        )


class PromptLibrary:
    """Five per-activity prompt templates, versioned as a data directory."""

    def __init__(self, version: str = DEFAULT_PROMPT_VERSION, root: str | Path | None = None):
        self.version = version
        if root is None:
            base = resources.files("ptmcat.data").joinpath("prompts", version)
        else:
            base = Path(root) / version
        self._templates: dict[SeActivity, str] = {}
        for activity in SeActivity:
            path = base.joinpath(f"{activity.value}.txt") if root is None else base / f"{activity.value}.txt"
            self._templates[activity] = path.read_text("utf-8")

    def render(self, activity: SeActivity, record: ModelRecord, matched_tasks: list[str]) -> str:
        return self._templates[activity].format(
            model_id=record.model_id,
            matched_tasks=", ".join(sorted(matched_tasks)) or "(none)",
            context=_context_excerpt(record),
        )


def _context_excerpt(record: ModelRecord) -> str:
    parts = []
    if record.metadata:
        parts.append("[metadata]\n" + flatten_metadata(record.metadata)[:_CONTEXT_CHARS])
    if record.card_body:
        parts.append("[card]\n" + record.card_body[:_CONTEXT_CHARS])
    for arxiv_id, text in record.abstracts:
        parts.append(f"[abstract {arxiv_id}]\n" + text[:_CONTEXT_CHARS])
    return "\n\n".join(parts) if parts else "(no documentation)"


def parse_judgment_text(text: str) -> tuple[bool, str]:
    """Enforce the answer grammar: first line exactly YES or NO."""
    lines = text.strip().split("\n", 1)
    head = lines[0].strip()
    if head not in ("YES", "NO"):
        raise MalformedResponse(f"first line must be YES or NO, got {head!r}")
    rationale = lines[1].strip() if len(lines) > 1 else ""
    return head == "YES", rationale


class MockJudgeProvider:
    """Deterministic offline judge mirroring the documented ambiguity cues.

    Defaults to YES; answers NO when the documentation matches a known
    false-positive pattern for the activity being judged (the same
    patterns the prompt templates warn about).
    """

    name = "mock"

    CUES: dict[str, tuple[str, ...]] = {
        "requirements-engineering": (
            "minimum system requirements",
            "risks identified and mitigations",
            "hardware requirements",
        ),
        "software-design": (
            "interior design",
            "software designed to",
            "neural architecture search",
        ),
        "software-implementation": (
            "stable diffusion",
            "text-to-image",
        ),
        "software-quality-assurance": (
            "speaker verification",
            "face verification",
            "fact verification",
            "self-verification",
            "red teaming",
        ),
        "software-maintenance": (
            "dataset revision hash",
            "movie reviews",
            "product reviews",
        ),
    }

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.calls = 0

    def complete(self, prompt: str) -> str:
        self.calls += 1
        activity = _activity_from_prompt(prompt)
        context = prompt.lower()
        for cue in self.CUES.get(activity, ()):
            if cue in context:
                return f"NO\nThe documentation matches the pattern {cue!r}, which is unrelated to this software engineering activity."
        return "YES\nThe documentation describes capabilities that support this software engineering activity."


def _activity_from_prompt(prompt: str) -> str:
    for activity in SeActivity:
        marker = activity.label.upper()
        if marker in prompt:
            return activity.value
    return ""


class HttpJudgeProvider:
    """Minimal live provider: POST {prompt} to an endpoint returning {text}.

    The endpoint URL comes from configuration; the API key from an
    environment variable, never from files.
    """

    def __init__(self, endpoint: str, api_key_env: str = "PTMCAT_JUDGE_API_KEY", model: str = "", post=None, timeout: float = 60.0):
        self.name = f"http:{model or endpoint}"
        self._endpoint = endpoint
        self._model = model
        self._api_key = os.environ.get(api_key_env)
        self._timeout = timeout
        self._post = post or self._requests_post

    def _requests_post(self, url: str, payload: dict, headers: dict) -> dict:
        import requests

        try:
            resp = requests.post(url, json=payload, headers=headers, timeout=self._timeout)
        except requests.RequestException as exc:
            raise ProviderError(str(exc)) from exc
        if resp.status_code >= 500:
            raise ProviderError(f"{resp.status_code} from provider")
        if resp.status_code >= 400:
            raise ProviderError(f"{resp.status_code} from provider", retryable=False)
        return resp.json()

    def complete(self, prompt: str) -> str:
        headers = {"content-type": "application/json"}
        if self._api_key:
            headers["authorization"] = f"Bearer {self._api_key}"
        payload = {"prompt": prompt}
        if self._model:
            payload["model"] = self._model
        body = self._post(self._endpoint, payload, headers)
        if "text" not in body:
            raise ProviderError("provider response missing 'text'", retryable=False)
        return str(body["text"])


class JudgmentCache:
    """Append-only line-delimited judgment store keyed by (id, activity, version)."""

    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._entries: dict[tuple[str, str, str], Judgment] = {}
        if self._path.exists():
            for line in self._path.read_text("utf-8").splitlines():
                if not line.strip():
                    continue
                judgment = Judgment.from_json(json.loads(line))
                self._entries[self._key(judgment)] = judgment

    @staticmethod
    def _key(j: Judgment) -> tuple[str, str, str]:
        return (j.model_id, j.activity.value, j.prompt_version)

    def get(self, model_id: str, activity: SeActivity, prompt_version: str) -> Judgment | None:
        return self._entries.get((model_id, activity.value, prompt_version))

    def put(self, judgment: Judgment) -> None:
        key = self._key(judgment)
        if key in self._entries:
            return
        self._entries[key] = judgment
        self._path.parent.mkdir(parents=True, exist_ok=True)
        with open(self._path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(judgment.to_json(), sort_keys=True) + "\n")

    def __len__(self) -> int:
        return len(self._entries)


def judge_relevance(
    record: ModelRecord,
    activity: SeActivity,
    provider,
    prompts: PromptLibrary,
    cache: JudgmentCache | None = None,
    matched_tasks: list[str] | None = None,
    max_calls: int | None = None,
    calls_made: int = 0,
) -> Judgment:
    """Judge one (record, activity) pair, consulting the cache first."""
    if cache is not None:
        cached = cache.get(record.model_id, activity, prompts.version)
        if cached is not None:
            return cached
    if max_calls is not None and calls_made >= max_calls:
        raise BudgetExceeded(f"judge call budget of {max_calls} exhausted")
    prompt = prompts.render(activity, record, matched_tasks or [])
    last_error: MalformedResponse | None = None
    for _ in range(1 + MAX_REASKS):
        text = provider.complete(prompt)
        try:
            verdict, rationale = parse_judgment_text(text)
        except MalformedResponse as exc:
            last_error = exc
            continue
        judgment = Judgment(
            model_id=record.model_id,
            activity=activity,
            verdict=verdict,
            rationale=rationale,
            provider=provider.name,
            prompt_version=prompts.version,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        if cache is not None:
            cache.put(judgment)
        return judgment
    raise last_error if last_error else MalformedResponse("no response")
