"""Report models and writers for the command-line runner."""
import json
import logging
import math
import os
import tempfile
from pathlib import Path

import pandas as pd
from pydantic import BaseModel, Field

from app.config import settings

logger = logging.getLogger(__name__)


class CheckRecord(BaseModel):
    """One numeric claim with the residual or bound that backs it."""
    name: str
    value: float = Field(..., description="Measured quantity: residual, norm or left-hand side")
    bound: float | None = Field(None, description="Right-hand side of an inequality, if any")
    expected: float | None = Field(None, description="Exact target value, if any")
    tolerance: float
    passed: bool

    @classmethod
    def residual(cls, name: str, value: float, tolerance: float) -> "CheckRecord":
        return cls(name=name, value=value, tolerance=tolerance, passed=value <= tolerance)

    @classmethod
    def inequality(cls, name: str, lhs: float, bound: float, tolerance: float) -> "CheckRecord":
        return cls(name=name, value=lhs, bound=bound, tolerance=tolerance, passed=lhs <= bound + tolerance)

    @classmethod
    def at_least(cls, name: str, value: float, floor: float, tolerance: float) -> "CheckRecord":
        return cls(name=name, value=value, bound=floor, tolerance=tolerance, passed=value >= floor - tolerance)

    @classmethod
    def equals(cls, name: str, value: float, expected: float, tolerance: float) -> "CheckRecord":
        return cls(
            name=name,
            value=value,
            expected=expected,
            tolerance=tolerance,
            passed=math.isclose(value, expected, rel_tol=0.0, abs_tol=tolerance),
        )


class VerifyReport(BaseModel):
    """Response model for one verification suite."""
    schema_version: str = Field(default_factory=lambda: settings.report_schema, alias="schema")
    model: str
    window: str
    nmax: int
    seed: int
    tolerance: float
    checks: list[CheckRecord]

    model_config = {"populate_by_name": True}

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, by_alias=True) + "\n"


class ModelSummary(BaseModel):
    model: str
    reports: int
    checks: int
    failed: int


class SummaryReport(BaseModel):
    """Aggregate of several verification reports."""
    schema_version: str = Field(default_factory=lambda: settings.report_schema, alias="schema")
    files: list[str]
    models: list[ModelSummary]
    failed_checks: list[str]

    model_config = {"populate_by_name": True}

    @property
    def passed(self) -> bool:
        return not self.failed_checks

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, by_alias=True) + "\n"


def write_atomic(path: str | Path, text: str) -> Path:
    """Write text to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f"wrote {path}")
    return path


def load_report(path: str | Path) -> VerifyReport:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return VerifyReport.model_validate(data)


def summarize(paths: list[str | Path]) -> SummaryReport:
    """Count checks and failures per model across report files."""
    rows = []
    failed = []
    for path in paths:
        report = load_report(path)
        for check in report.checks:
            rows.append({"file": str(path), "model": report.model, "passed": check.passed})
            if not check.passed:
                failed.append(f"{Path(path).name}:{report.model}:{check.name}")
    frame = pd.DataFrame(rows, columns=["file", "model", "passed"])
    models = []
    if not frame.empty:
        grouped = frame.groupby("model", sort=True)
        for model, group in grouped:
            models.append(
                ModelSummary(
                    model=str(model),
                    reports=int(group["file"].nunique()),
                    checks=int(len(group)),
                    failed=int((~group["passed"]).sum()),
                )
            )
    return SummaryReport(files=[str(p) for p in paths], models=models, failed_checks=failed)
