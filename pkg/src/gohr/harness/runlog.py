"""Run logs: the complete record of one training run, JSONL on disk.

Every metric or statistic downstream is a pure function of this log. One
record per move and one per episode, plus phase markers and a config echo;
serialization is canonical (sorted keys, no whitespace) so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import gzip
import json
from dataclasses import dataclass, field


@dataclass
class RunLog:
    config: dict = field(default_factory=dict)
    phases: list = field(default_factory=list)    # {"phase","rule","episode_start"}
    moves: list = field(default_factory=list)     # per-attempt records
    episodes: list = field(default_factory=list)  # per-episode records
    events: list = field(default_factory=list)    # aborts, early stops

    def add_phase(self, phase: int, rule: str, episode_start: int):
        self.phases.append({"phase": phase, "rule": rule, "episode_start": episode_start})

    def error_series(self, phase: int | None = None) -> list[float]:
        return [e["error_rate"] for e in self.episodes if phase is None or e["phase"] == phase]

    def code_series(self, phase: int | None = None) -> list[str]:
        return [m["code"] for m in self.moves if phase is None or m["phase"] == phase]

    def verdict_series(self, tag: str, phase: int | None = None) -> list[tuple[bool, bool]]:
        """(applies, ok) per move for one property tag, for conditional m-star."""
        out = []
        for m in self.moves:
            if phase is not None and m["phase"] != phase:
                continue
            v = (m.get("verdicts") or {}).get(tag)
            out.append((v is not None and v != "na", v == "ok"))
        return out

    def phase_numbers(self) -> list[int]:
        return [p["phase"] for p in self.phases]

    def to_jsonl(self) -> str:
        lines = [_dump({"type": "config", **self.config})]
        lines += [_dump({"type": "phase", **p}) for p in self.phases]
        records = [("move", m) for m in self.moves] + [("episode", e) for e in self.episodes]
        # Interleave in true order: moves then the episode record that closed them.
        records.sort(key=lambda r: (r[1]["episode"], 0 if r[0] == "move" else 1, r[1].get("move", 0)))
        lines += [_dump({"type": kind, **rec}) for kind, rec in records]
        lines += [_dump({"type": "event", **e}) for e in self.events]
        return "\n".join(lines) + "\n"

    def write(self, path):
        data = self.to_jsonl().encode()
        if str(path).endswith(".gz"):
            # Fixed mtime keeps gzip output byte-stable for identical runs.
            with open(path, "wb") as raw, gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as fh:
                fh.write(data)
        else:
            with open(path, "wb") as fh:
                fh.write(data)

    @classmethod
    def from_jsonl(cls, text: str) -> "RunLog":
        log = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            kind = rec.pop("type")
            if kind == "config":
                log.config = rec
            elif kind == "phase":
                log.phases.append(rec)
            elif kind == "move":
                log.moves.append(rec)
            elif kind == "episode":
                log.episodes.append(rec)
            elif kind == "event":
                log.events.append(rec)
        return log

    @classmethod
    def read(cls, path) -> "RunLog":
        if str(path).endswith(".gz"):
            with gzip.open(path, "rt") as fh:
                return cls.from_jsonl(fh.read())
        with open(path, "r") as fh:
            return cls.from_jsonl(fh.read())


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
