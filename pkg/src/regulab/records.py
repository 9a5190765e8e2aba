"""Run records: the replayable event log of a run.

A record is one header (config + seed) followed by the ordered event stream:
state samples, applied interventions, rejected commands, forecast reports,
and a final metrics line.  Replaying the interventions against the same
config and seed must reproduce the state samples byte for byte; canonical
JSON encoding makes that comparison trivial.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .config import RunConfig

FORMAT = "regulab-run-v1"


def canonical(event: dict) -> str:
    return json.dumps(event, sort_keys=True, separators=(",", ":"))


class RecordError(ValueError):
    """Malformed record file; message names the offending line."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


@dataclass
class RunRecord:
    config: RunConfig
    seed: int
    events: list[dict] = field(default_factory=list)
    final: dict | None = None

    # -- building ---------------------------------------------------------

    def add(self, event: dict) -> None:
        self.events.append(event)

    def finish(self, metrics: dict) -> None:
        self.final = metrics

    # -- views ---------------------------------------------------------------

    def samples(self) -> list[dict]:
        return [e for e in self.events if e["t"] == "sample"]

    def interventions(self) -> list[dict]:
        return [e for e in self.events if e["t"] == "intervention"]

    def forecasts(self) -> list[dict]:
        return [e for e in self.events if e["t"] == "forecast"]

    def sample_lines(self) -> list[str]:
        return [canonical(e) for e in self.samples()]

    # -- persistence -----------------------------------------------------------

    def header(self) -> dict:
        return {"t": "header", "format": FORMAT, "seed": self.seed,
                "config": self.config.to_dict()}

    def write(self, path: str) -> None:
        with open(path, "w") as f:
            f.write(canonical(self.header()) + "\n")
            for event in self.events:
                f.write(canonical(event) + "\n")
            if self.final is not None:
                f.write(canonical({"t": "final", "metrics": self.final}) + "\n")

    @classmethod
    def read(cls, path: str) -> "RunRecord":
        events: list[dict] = []
        header: dict | None = None
        final: dict | None = None
        with open(path) as f:
            for line_no, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as e:
                    raise RecordError(line_no, f"not valid JSON: {e.msg}") from e
                if not isinstance(obj, dict) or "t" not in obj:
                    raise RecordError(line_no, "event without a 't' field")
                if line_no == 1:
                    if obj.get("t") != "header" or obj.get("format") != FORMAT:
                        raise RecordError(line_no, f"missing {FORMAT} header")
                    header = obj
                elif obj["t"] == "final":
                    final = obj["metrics"]
                else:
                    events.append(obj)
        if header is None:
            raise RecordError(1, "empty record")
        config = RunConfig.from_dict(header["config"])
        record = cls(config, int(header["seed"]), events, final)
        return record


@dataclass
class Divergence:
    tick: int
    expected: str
    actual: str

    def describe(self) -> str:
        return (f"first divergence at tick {self.tick}:\n"
                f"  recorded: {self.expected}\n  replayed: {self.actual}")


def compare_samples(original: RunRecord, replayed: RunRecord) -> Divergence | None:
    """Byte-wise comparison of the state-sample streams of two records."""
    a = original.samples()
    b = replayed.samples()
    for ev_a, ev_b in zip(a, b):
        line_a, line_b = canonical(ev_a), canonical(ev_b)
        if line_a != line_b:
            return Divergence(ev_a.get("tick", -1), line_a, line_b)
    if len(a) != len(b):
        longer = a[len(b):] if len(a) > len(b) else b[len(a):]
        return Divergence(longer[0].get("tick", -1),
                          f"{len(a)} samples", f"{len(b)} samples")
    return None
