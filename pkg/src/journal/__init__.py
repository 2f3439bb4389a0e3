"""Hash-chained run journal."""

from src.journal.logger import (
    ChainValidationResult,
    JournalError,
    RunJournal,
    validate_journal_chain,
)

__all__ = [
    # Exceptions
    "JournalError",
    # Components
    "RunJournal",
    "validate_journal_chain",
    # Models
    "ChainValidationResult",
]
