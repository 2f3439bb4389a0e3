"""Property-check base class and the suite that runs the self-test battery."""

from __future__ import annotations

import logging
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from src.journal.logger import RunJournal
from src.models import RunEvent, RunEventType
from src.solver.constraints import worker_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.check_id}: {self.name} ({self.detail}; {self.seconds:.2f}s)"


class PropertyCheck(ABC):
    """One numerical property; `quick` checks make up the --quick subset."""

    id: str
    name: str
    quick: bool = True

    @abstractmethod
    def evaluate(self, rng: np.random.Generator) -> tuple[bool, str]:
        """(passed, one-line detail)."""
        ...

    def run(self, seed: int = 0) -> CheckResult:
        start = time.perf_counter()
        try:
            passed, detail = self.evaluate(np.random.default_rng(seed))
        except Exception as exc:  # a crashing check is a failed check
            logger.exception("Check %s raised", self.id)
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        return CheckResult(
            check_id=self.id,
            name=self.name,
            passed=bool(passed),
            detail=detail,
            seconds=time.perf_counter() - start,
        )


class ValidationSuite:
    """Runs checks serially, or on BAND_THREADS worker threads; results keep check order."""

    def __init__(
        self,
        checks: list[PropertyCheck],
        journal: RunJournal | None = None,
        seed: int = 0,
    ) -> None:
        self.checks = checks
        self.journal = journal
        self.seed = seed

    def select(self, quick: bool) -> list[PropertyCheck]:
        return [c for c in self.checks if c.quick] if quick else list(self.checks)

    def run(self, quick: bool = False, threads: int | None = None) -> list[CheckResult]:
        selected = self.select(quick)
        workers = worker_count() if threads is None else threads
        seeds = [self.seed + i for i in range(len(selected))]
        if workers > 0:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda c, s: c.run(s), selected, seeds))
        else:
            results = [c.run(s) for c, s in zip(selected, seeds, strict=True)]
        for result in results:
            log = logger.info if result.passed else logger.warning
            log("%s", result.line())
            if self.journal is not None:
                self.journal.log(RunEvent(
                    event_type=RunEventType.VALIDATION_CHECK,
                    action=result.check_id,
                    result="success" if result.passed else "failure",
                    details={"detail": result.detail, "seconds": round(result.seconds, 3)},
                ))
        return results
