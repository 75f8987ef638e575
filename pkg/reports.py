"""Command reports rendered as text or versioned JSON."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from errors import BglaError
from lattice import SupportResult, Verdict
from tree import Vertex

SCHEMA_VERSION = 1


class Status(enum.Enum):
    OK = "ok"
    FALSE = "false"
    INCONCLUSIVE = "inconclusive"
    ERROR = "error"

    @property
    def exit_code(self) -> int:
        return {Status.OK: 0, Status.FALSE: 1}.get(self, 2)


@dataclass(frozen=True)
class Report:
    """Outcome of one command: a status, JSON-able data and text lines."""

    command: str
    status: Status
    data: Mapping[str, Any] = field(default_factory=dict)
    lines: tuple[str, ...] = ()

    @property
    def exit_code(self) -> int:
        return self.status.exit_code

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"schema": SCHEMA_VERSION, "command": self.command, "status": self.status.value}
        if self.status is Status.ERROR:
            payload["error"] = dict(self.data)
        else:
            payload["result"] = dict(self.data)
        return payload

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)

    def to_text(self) -> str:
        return "\n".join(self.lines)

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_text()


def error_report(command: str, exc: BaseException) -> Report:
    data: dict[str, Any] = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, BglaError):
        data.update(exc.details())
    return Report(command, Status.ERROR, data, (f"error: {exc}",))


def support_report(command: str, result: SupportResult) -> Report:
    lines = [
        f"verdict: {result.verdict.value}",
        f"depth: {result.depth_used}",
        f"determined_in: {result.determined_in}",
        f"determined_out: {result.determined_out}",
    ]
    if result.frontier:
        lines.append("frontier:")
        lines.extend(f"  {f.vertex}  sections: {', '.join(f.sections)}" for f in result.frontier)
    if result.evidence_ray is not None:
        lines.append(f"repeating section pattern along {result.evidence_ray}")
    status = {
        Verdict.CLOPEN: Status.OK,
        Verdict.OPEN_NOT_CLOPEN_EVIDENCE: Status.FALSE,
    }.get(result.verdict, Status.INCONCLUSIVE)
    return Report(command, status, result.to_dict(), tuple(lines))


def format_cycles(mapping: Mapping[Vertex, Vertex]) -> str:
    """Cycle notation of a vertex permutation, fixed points omitted; ``()`` for the identity."""
    seen: set[Vertex] = set()
    cycles = []
    for start in sorted(mapping, key=Vertex.sort_key):
        if start in seen or mapping[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        nxt = mapping[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = mapping[nxt]
        cycles.append("(" + " ".join(str(v) for v in cycle) + ")")
    return "".join(cycles) or "()"
