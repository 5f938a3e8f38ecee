"""Append-only session audit log.

One JSON line per session transition: timestamp, operation, inputs, and the
full session snapshot after the transition. Replaying the file recovers the
latest snapshot of every session, which is how the service survives a
restart without losing in-flight work.
"""

from __future__ import annotations

import json
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

from .errors import CaseBaseIOError
from .pipeline import DecisionSession, session_from_dict, session_to_dict


class AuditLog:
    """Serialized writer over one append-only JSONL file."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def record(self, op: str, session: DecisionSession, inputs: Optional[dict] = None):
        entry = {
            "ts": datetime.now(timezone.utc).isoformat(),
            "op": op,
            "session_id": session.id,
            "inputs": inputs or {},
            "session": session_to_dict(session),
        }
        line = json.dumps(entry, sort_keys=True)
        with self._lock:
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
            except OSError as exc:
                raise CaseBaseIOError(f"cannot append to audit log: {exc}") from None

    def replay(self) -> dict[str, DecisionSession]:
        """Latest snapshot per session id, in file order."""
        sessions: dict[str, DecisionSession] = {}
        if not self.path.exists():
            return sessions
        with open(self.path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                    sessions[entry["session_id"]] = session_from_dict(entry["session"])
                except (json.JSONDecodeError, KeyError) as exc:
                    raise CaseBaseIOError(
                        f"corrupt audit entry at line {line_no}: {exc}") from None
        return sessions
