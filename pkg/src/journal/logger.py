"""Run journal: append-only JSON Lines with a SHA-256 chain between entries."""

from __future__ import annotations

import fcntl
import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from src.models import RunEvent

logger = logging.getLogger(__name__)

DEFAULT_MAX_BYTES = 10_485_760
DEFAULT_BACKUP_COUNT = 5


class JournalError(Exception):
    """Journal file cannot be read or written."""

    def __init__(self, path: Path, reason: str) -> None:
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


@dataclass
class ChainValidationResult:
    valid: bool
    broken_at_line: int | None = None
    entries: int = 0


def _digest(line: str) -> str:
    return hashlib.sha256(line.encode()).hexdigest()


def validate_journal_chain(path: Path | str) -> ChainValidationResult:
    """Check that every entry names the hash of the entry before it.

    The first entry must carry prev_hash null. Lines that are not JSON count
    as breaks.
    """
    text = Path(path).read_text().strip()
    if not text:
        return ChainValidationResult(valid=True)
    lines = text.split("\n")
    for i, line in enumerate(lines):
        try:
            entry = json.loads(line)
        except json.JSONDecodeError:
            return ChainValidationResult(valid=False, broken_at_line=i + 1, entries=i)
        expected = None if i == 0 else _digest(lines[i - 1])
        if entry.get("prev_hash") != expected:
            return ChainValidationResult(valid=False, broken_at_line=i + 1, entries=i)
    return ChainValidationResult(valid=True, entries=len(lines))


class RunJournal:
    """Structured record of solver and analysis runs, rotated by size."""

    def __init__(
        self,
        path: Path | str,
        max_bytes: int = DEFAULT_MAX_BYTES,
        backup_count: int = DEFAULT_BACKUP_COUNT,
    ) -> None:
        self.path = Path(path)
        self._max_bytes = max_bytes
        self._backup_count = backup_count
        self._last_line: str | None = None
        if self.path.exists() and self.path.stat().st_size > 0:
            text = self.path.read_text().strip()
            if text:
                self._last_line = text.split("\n")[-1]

    @classmethod
    def from_env(cls, path: Path | str) -> RunJournal:
        """Rotation limits from BAND_JOURNAL_MAX_BYTES / BAND_JOURNAL_BACKUP_COUNT."""
        try:
            max_bytes = int(os.environ.get("BAND_JOURNAL_MAX_BYTES", str(DEFAULT_MAX_BYTES)))
            backups = int(os.environ.get("BAND_JOURNAL_BACKUP_COUNT", str(DEFAULT_BACKUP_COUNT)))
        except ValueError as exc:
            raise JournalError(Path(path), f"invalid rotation setting: {exc}") from exc
        return cls(path, max_bytes=max_bytes, backup_count=backups)

    def _backup(self, index: int) -> Path:
        return self.path.parent / f"{self.path.name}.{index}"

    def _maybe_rotate(self) -> None:
        if not self.path.exists() or self.path.stat().st_size < self._max_bytes:
            return
        oldest = self._backup(self._backup_count)
        if oldest.exists():
            oldest.unlink()
        for i in range(self._backup_count - 1, 0, -1):
            if self._backup(i).exists():
                self._backup(i).rename(self._backup(i + 1))
        self.path.rename(self._backup(1))
        logger.debug("Rotated journal %s", self.path)

    def log(self, event: RunEvent) -> None:
        data = json.loads(event.model_dump_json())
        data["prev_hash"] = None if self._last_line is None else _digest(self._last_line)
        line = json.dumps(data, separators=(",", ":"), sort_keys=True)

        lock_file = self.path.parent / f".{self.path.name}.lock"
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(lock_file, "w") as lf:
                fcntl.flock(lf, fcntl.LOCK_EX)
                try:
                    self._maybe_rotate()
                    with open(self.path, "a") as f:
                        f.write(line + "\n")
                finally:
                    fcntl.flock(lf, fcntl.LOCK_UN)
        except OSError as exc:
            raise JournalError(self.path, str(exc)) from exc
        self._last_line = line
