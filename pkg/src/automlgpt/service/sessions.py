"""In-memory session store for the interactive tuning loop.

State machine: empty -> cards_set -> recommended, with recommended
absorbing. Sessions are isolated; within one session requests are
serialized by a non-blocking lock (a concurrent second request gets a
busy signal).
"""

from __future__ import annotations

import secrets
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

from ..cards import DataCard, ModelCard
from ..composer import PromptParagraph, UserRequest
from ..constraints import Constraint
from ..errors import SessionBusy, UnknownSession, WrongState
from ..training_log import TrainingLog
from ..transfer import Recommendation
from ..tuner import TuneResult

STATE_EMPTY = "empty"
STATE_CARDS_SET = "cards_set"
STATE_RECOMMENDED = "recommended"


@dataclass
class HistoryEntry:
    request: UserRequest | None
    recommendation: Recommendation
    predicted_log: TrainingLog
    tune_result: TuneResult | None = None


@dataclass
class Session:
    id: str
    created_at: int
    state: str = STATE_EMPTY
    data_card: DataCard | None = None
    model_card: ModelCard | None = None
    prompt: PromptParagraph | None = None
    constraints: list[Constraint] = field(default_factory=list)
    history: list[HistoryEntry] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def current(self) -> HistoryEntry | None:
        return self.history[-1] if self.history else None


class SessionStore:
    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._map_lock = threading.Lock()

    def create(self) -> Session:
        session = Session(id=secrets.token_hex(16), created_at=int(time.time()))
        with self._map_lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._map_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        return session

    @contextmanager
    def exclusive(self, session_id: str):
        """Acquire the per-session lock without blocking, or signal busy."""
        session = self.get(session_id)
        if not session.lock.acquire(blocking=False):
            raise SessionBusy(f"session {session_id!r} is handling another request")
        try:
            yield session
        finally:
            session.lock.release()

    def __len__(self) -> int:
        with self._map_lock:
            return len(self._sessions)


def require_state(session: Session, *allowed: str) -> None:
    if session.state not in allowed:
        raise WrongState(
            f"session is in state {session.state!r}; "
            f"this call requires {' or '.join(repr(a) for a in allowed)}")
