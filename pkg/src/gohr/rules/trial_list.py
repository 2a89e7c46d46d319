"""Trial-list text format for transfer curricula.

One phase per line; a line is a ':'-joined chain of rule names recording
the curriculum so far. The rule trained during a phase is the last name of
its chain, so a file like::

    cm_RBKY
    cm_RBKY:ordL1
    cm_RBKY:ordL1:cm_ordL1

trains cm_RBKY, then ordL1, then the compound cm_ordL1, continuing the same
model across phases.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..board import ConfigError
from .registry import resolve_rule


class TrialListError(ConfigError):
    pass


@dataclass(frozen=True)
class TrialList:
    phases: tuple  # tuple of tuples of rule names

    @property
    def active_rules(self) -> tuple:
        """The rule actually trained in each phase (last of its chain)."""
        return tuple(chain[-1] for chain in self.phases)

    def to_text(self) -> str:
        return "\n".join(":".join(chain) for chain in self.phases)


def parse_trial_list(text: str) -> TrialList:
    phases = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        names = tuple(part.strip() for part in line.split(":"))
        for name in names:
            try:
                resolve_rule(name)
            except ConfigError as exc:
                raise TrialListError(f"line {lineno}: {exc}") from exc
        phases.append(names)
    return TrialList(tuple(phases))
