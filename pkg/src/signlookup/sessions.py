"""Lookup sessions and confirmation statistics.

A session is one upload's lifecycle: created pending with its candidate list,
then terminated exactly once by a rank confirmation, a "none of those"
rejection, or TTL expiry. Terminal outcomes feed a per-sign-type histogram of
which rank users confirm (1-5 or none), persisted as an append-only JSONL
event log that is replayed at startup.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import (
    NotFound,
    SelectionError,
    SessionConflict,
    SessionExpired,
)
from .matcher import CandidateList, QueryMode

DEFAULT_TTL_S = 3600.0
OUTCOMES = ("1", "2", "3", "4", "5", "none")


class SessionState(str, Enum):
    PENDING = "pending"
    CONFIRMED = "confirmed"
    REJECTED_NONE = "rejected_none"
    EXPIRED = "expired"


@dataclass
class LookupSession:
    token: str
    candidates: CandidateList
    sign_type: QueryMode
    created_at: float
    state: SessionState = SessionState.PENDING
    confirmed_variant: str | None = None
    confirmed_rank: int | None = None


class ConfirmationStats:
    """Histogram of confirmation ranks per sign type."""

    def __init__(self):
        self.counts: dict[str, dict[str, int]] = {
            mode.value: {o: 0 for o in OUTCOMES} for mode in QueryMode
        }

    def record(self, sign_type: QueryMode, outcome: str) -> None:
        if outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {outcome!r}")
        self.counts[sign_type.value][outcome] += 1

    def total(self, sign_type: QueryMode | None = None) -> int:
        if sign_type is not None:
            return sum(self.counts[sign_type.value].values())
        return sum(sum(c.values()) for c in self.counts.values())

    def snapshot(self) -> dict:
        out: dict = {}
        for mode, counts in self.counts.items():
            out[mode] = dict(counts)
            out[mode]["total"] = sum(counts.values())
        out["total"] = self.total()
        return out


class StatsLog:
    """Append-only event log backing ConfirmationStats across restarts.

    One record per terminal session: {"sign_type", "outcome", "token", "ts"}.
    Appends are flushed and fsynced so a crash loses at most the record being
    written; replay ignores a trailing partial line.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, sign_type: QueryMode, outcome: str, token: str) -> None:
        record = {
            "sign_type": sign_type.value,
            "outcome": outcome,
            "token": token,
            "ts": time.time(),
        }
        line = json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n"
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())

    def replay(self) -> ConfirmationStats:
        stats = ConfirmationStats()
        if not self.path.exists():
            return stats
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    stats.record(QueryMode(record["sign_type"]), record["outcome"])
                except (json.JSONDecodeError, KeyError, ValueError):
                    continue  # torn tail write; ignore
        return stats


@dataclass
class ConfirmOutcome:
    session: LookupSession
    outcome: str  # "1".."5" or "none"
    entry_id: str | None = None


class SessionStore:
    """Serialized, TTL-bounded session registry; confirm is linearizable per token."""

    def __init__(
        self,
        ttl_s: float = DEFAULT_TTL_S,
        stats: ConfirmationStats | None = None,
        stats_log: StatsLog | None = None,
        clock=time.time,
    ):
        self.ttl_s = ttl_s
        self.stats = stats if stats is not None else ConfirmationStats()
        self.stats_log = stats_log
        self.clock = clock
        self._sessions: dict[str, LookupSession] = {}
        self._lock = threading.Lock()

    def create(self, candidates: CandidateList, sign_type: QueryMode) -> LookupSession:
        session = LookupSession(
            token=secrets.token_urlsafe(16),  # 128-bit, URL-safe
            candidates=candidates,
            sign_type=sign_type,
            created_at=self.clock(),
        )
        with self._lock:
            self._sessions[session.token] = session
        return session

    def _get_locked(self, token: str) -> LookupSession:
        session = self._sessions.get(token)
        if session is None:
            raise NotFound(f"unknown session token {token!r}")
        if (
            session.state is SessionState.PENDING
            and self.clock() - session.created_at > self.ttl_s
        ):
            session.state = SessionState.EXPIRED  # expiry never touches stats
        return session

    def get(self, token: str) -> LookupSession:
        with self._lock:
            return self._get_locked(token)

    def _record(self, session: LookupSession, outcome: str) -> None:
        # Exactly one increment per terminal session, under the same lock as
        # the state transition.
        self.stats.record(session.sign_type, outcome)
        if self.stats_log is not None:
            self.stats_log.append(session.sign_type, outcome, session.token)

    def confirm(self, token: str, rank: int, variant_id: str) -> ConfirmOutcome:
        """Terminalize a session with a rank selection; the variant must belong
        to the rank-th candidate."""
        with self._lock:
            session = self._get_locked(token)
            if session.state is SessionState.EXPIRED:
                raise SessionExpired(f"session {token!r} expired before confirmation")
            if session.state is not SessionState.PENDING:
                raise SessionConflict(f"session {token!r} is already {session.state.value}")
            candidates = session.candidates.candidates
            if not isinstance(rank, int) or not 1 <= rank <= len(candidates):
                raise SelectionError(f"rank {rank!r} is not one of the presented candidates")
            candidate = candidates[rank - 1]
            if variant_id not in {v.variant_id for v in candidate.variants}:
                raise SelectionError(
                    f"variant {variant_id!r} does not belong to the rank-{rank} candidate"
                )
            session.state = SessionState.CONFIRMED
            session.confirmed_rank = rank
            session.confirmed_variant = variant_id
            self._record(session, str(rank))
            return ConfirmOutcome(session, str(rank), entry_id=candidate.entry_id)

    def reject_none(self, token: str) -> ConfirmOutcome:
        """Terminalize a session as "none of those"."""
        with self._lock:
            session = self._get_locked(token)
            if session.state is SessionState.EXPIRED:
                raise SessionExpired(f"session {token!r} expired before confirmation")
            if session.state is not SessionState.PENDING:
                raise SessionConflict(f"session {token!r} is already {session.state.value}")
            session.state = SessionState.REJECTED_NONE
            self._record(session, "none")
            return ConfirmOutcome(session, "none")
