"""Machine-readable verdict reports with a stable JSON schema."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

REPORT_VERSION = "1"


@dataclass
class TaskResult:
    task_id: str
    kind: str
    status: str
    witnesses: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    citation: str = ""
    expect: Optional[str] = None

    @property
    def expectation_met(self) -> bool:
        return self.expect is None or self.status == self.expect

    def to_entry(self) -> dict:
        # fixed key order; the witnesses block is omitted for inconclusive
        # results unless the diagnostics explicitly force it
        entry = {"task_id": self.task_id, "kind": self.kind, "status": self.status}
        force = bool(self.diagnostics.get("force_witnesses"))
        if self.witnesses and (self.status != "inconclusive" or force):
            entry["witnesses"] = self.witnesses
        entry["diagnostics"] = self.diagnostics
        entry["citation"] = self.citation
        return entry


def render_json(results: list[TaskResult], stamp: Optional[str] = None) -> str:
    doc = {"version": REPORT_VERSION}
    if stamp is not None:
        doc["generated_at"] = stamp
    doc["tasks"] = [r.to_entry() for r in results]
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=True)


def render_text(results: list[TaskResult], stamp: Optional[str] = None) -> str:
    blocks = [f"report version {REPORT_VERSION}" + (f" ({stamp})" if stamp else "")]
    for r in results:
        lines = [f"task {r.task_id} [{r.kind}]: {r.status}"]
        if r.citation:
            lines.append(f"  checks: {r.citation}")
        if r.witnesses and (r.status != "inconclusive"
                            or r.diagnostics.get("force_witnesses")):
            for k, v in r.witnesses.items():
                lines.append(f"  {k} = {v}")
        notes = r.diagnostics.get("notes") or []
        for n in notes:
            lines.append(f"  note: {n}")
        if r.expect is not None:
            lines.append(f"  expected {r.expect}: "
                         + ("ok" if r.expectation_met else "MISMATCH"))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
