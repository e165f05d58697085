"""Model-hub ingestion: API clients, card parsing, snapshots, doc status."""

from .cards import ParsedCard, extract_arxiv_ids, parse_card
from .client import (
    ArxivClient,
    AuthError,
    HubClient,
    NetworkError,
    NotFound,
    RateLimited,
    ReplayTransport,
    RequestsTransport,
)
from .records import (
    CardStatus,
    DocStatus,
    ModelRecord,
    Snapshot,
    SnapshotSource,
    documentation_status,
    load_snapshot,
    merge_snapshots,
    store_snapshot,
)

__all__ = [
    "ArxivClient",
    "AuthError",
    "CardStatus",
    "DocStatus",
    "HubClient",
    "ModelRecord",
    "NetworkError",
    "NotFound",
    "ParsedCard",
    "RateLimited",
    "ReplayTransport",
    "RequestsTransport",
    "Snapshot",
    "SnapshotSource",
    "documentation_status",
    "extract_arxiv_ids",
    "load_snapshot",
    "merge_snapshots",
    "parse_card",
    "store_snapshot",
]
