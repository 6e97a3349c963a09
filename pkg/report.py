"""Pipeline reports: named certificate steps, JSON output and tabular summaries."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

import config
from certify import Certificate, Verdict

logger = logging.getLogger(__name__)


@dataclass
class ReportStep:
    """A certificate under a stable name; ``expected`` is None for informational steps."""

    name: str
    certificate: Certificate
    expected: Optional[Verdict]
    ms: float = 0.0

    @property
    def ok(self) -> bool:
        if self.expected is None:
            return True
        return self.certificate.verdict is self.expected


@dataclass
class Report:
    family: str
    p: int
    field: Dict
    steps: List[ReportStep] = field(default_factory=list)
    witnesses: Dict[str, str] = field(default_factory=dict)
    artifact_version: str = config.ARTIFACT_VERSION
    schema_version: str = config.REPORT_SCHEMA_VERSION

    def add(self, name: str, certificate: Certificate, expected: Optional[Verdict] = None, ms: float = 0.0):
        if any(step.name == name for step in self.steps):
            raise ValueError(f"duplicate report step {name!r}")
        self.steps.append(ReportStep(name, certificate, expected, ms))
        if certificate.witness is not None:
            self.witnesses[name] = certificate.witness_text()

    def step(self, name: str) -> ReportStep:
        for step in self.steps:
            if step.name == name:
                return step
        raise KeyError(name)

    @property
    def overall_pass(self) -> bool:
        return bool(self.steps) and all(step.ok for step in self.steps)

    def to_dict(self, include_timings: bool = True) -> dict:
        return {
            "schema_version": self.schema_version,
            "artifact_version": self.artifact_version,
            "family": self.family,
            "p": self.p,
            "field": self.field,
            "overall": "pass" if self.overall_pass else "fail",
            "certificates": [
                {
                    "name": step.name,
                    **step.certificate.to_dict(),
                    "expected": step.expected.value if step.expected else None,
                    "ok": step.ok,
                    "ms": round(step.ms, 3) if include_timings else 0,
                }
                for step in self.steps
            ],
            "witnesses": self.witnesses,
        }

    def to_json(self, include_timings: bool = True) -> str:
        """Deterministic byte stream once timings are excluded."""
        return json.dumps(self.to_dict(include_timings), indent=2, sort_keys=True, default=str) + "\n"

    def write_json(self, path: Union[str, Path], include_timings: bool = True):
        Path(path).write_text(self.to_json(include_timings), encoding="utf-8")
        logger.info(f"Report written to {path}")

    def summary_frame(self) -> pd.DataFrame:
        rows = [
            {
                "step": step.name,
                "kind": step.certificate.kind.value,
                "verdict": step.certificate.verdict.value,
                "expected": step.expected.value if step.expected else "-",
                "ok": step.ok,
                "ms": round(step.ms, 1),
            }
            for step in self.steps
        ]
        return pd.DataFrame(rows, columns=["step", "kind", "verdict", "expected", "ok", "ms"])

    def to_text(self, include_timings: bool = True) -> str:
        frame = self.summary_frame()
        if not include_timings:
            frame = frame.drop(columns=["ms"])
        header = f"family {self.family}, p = {self.p}: {'PASS' if self.overall_pass else 'FAIL'}"
        lines = [header, frame.to_string(index=False)]
        for name, text in self.witnesses.items():
            lines.append(f"{name}: {text}")
        return "\n".join(lines)
