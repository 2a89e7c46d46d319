"""Rule registry: loads the declarative catalog and builds RuleSpec objects.

The catalog file carries 22 listed rules (18 used by the default experiment
sets plus 4 compounds) and one extra registry-only variant; new rules are
data, not code.
"""

from __future__ import annotations

import json
import random
from functools import lru_cache
from importlib import resources

from ..board import COLORS, SHAPES, BoardState, ConfigError, Piece
from . import clauses as cl


class UnknownRuleError(ConfigError):
    pass


def _parse_clause(d: dict):
    t = d["type"]
    if t == "feature_map":
        return cl.FeatureMap(d["kind"], dict(d["map"]))
    if t == "feature_cycle":
        return cl.FeatureCycle(
            d["kind"],
            tuple(d["order"]),
            tuple(d["buckets"]) if d.get("buckets") is not None else None,
            d.get("within", "any"),
        )
    if t == "all_of":
        return cl.AllOfFeature(d["kind"], tuple(d["order"]))
    if t == "reading_order":
        return cl.ReadingOrder(bool(d.get("reverse", False)))
    if t == "proximity":
        return cl.Proximity(d["mode"])
    if t == "quadrant_map":
        return cl.QuadrantMap({int(k): v for k, v in d["map"].items()})
    if t == "bucket_sequence":
        return cl.BucketSequence(d["direction"], d.get("start"))
    raise ConfigError(f"unknown clause type: {t}")


@lru_cache(maxsize=1)
def _catalog() -> dict:
    text = resources.files("gohr.rules").joinpath("catalog.json").read_text()
    entries = json.loads(text)["rules"]
    out = {}
    for e in entries:
        spec = cl.RuleSpec(
            name=e["name"],
            clauses=tuple(_parse_clause(c) for c in e["clauses"]),
            tags=frozenset(e["tags"]),
            description=e.get("description", ""),
            components=tuple(e.get("components", ())),
        )
        out[e["name"]] = {
            "spec": spec,
            "catalog": e.get("catalog", True),
            "default_experiment": e.get("default_experiment", False),
        }
    return out


def registry_names() -> list[str]:
    """Every resolvable rule name."""
    return list(_catalog())


def catalog_names() -> list[str]:
    """The 22 listed rules (shown by the game service)."""
    return [n for n, e in _catalog().items() if e["catalog"]]


def experiment_rules() -> list[str]:
    """The 18 rules of the default independent-rule experiment set."""
    return [n for n, e in _catalog().items() if e["default_experiment"]]


def resolve_rule(name: str) -> cl.RuleSpec:
    entry = _catalog().get(name)
    if entry is None:
        known = ", ".join(sorted(_catalog()))
        raise UnknownRuleError(f"unknown rule {name!r}; registry: {known}")
    return entry["spec"]


def property_tags(name: str) -> frozenset:
    return resolve_rule(name).tags


def rule_description(name: str) -> str:
    return resolve_rule(name).description


def _dedupe(clauses_seq):
    out = []
    for c in clauses_seq:
        if not any(c == o for o in out):
            out.append(c)
    return tuple(out)


def _random_board(rng: random.Random, n: int = 9) -> BoardState:
    cells = rng.sample(range(1, 37), n)
    pieces = [
        Piece(i + 1, rng.choice(COLORS), rng.choice(SHAPES), (c - 1) % 6 + 1, (c - 1) // 6 + 1)
        for i, c in enumerate(cells)
    ]
    return BoardState(pieces)


def compose(a: cl.RuleSpec, b: cl.RuleSpec, check_boards: int = 50) -> cl.RuleSpec:
    """Conjunction of two rules' clauses (idempotent; duplicates collapse).

    Rejects combinations whose cursors cannot share one RuleState, and
    probes random boards to ensure the conjunction admits moves at all.
    """
    merged = _dedupe(a.clauses + b.clauses)
    cycles = [c for c in merged if isinstance(c, cl.FeatureCycle)]
    if len(cycles) > 1:
        raise ConfigError("cannot compose two distinct feature cycles")
    allofs = [c for c in merged if isinstance(c, cl.AllOfFeature)]
    if len(allofs) > 1:
        raise ConfigError("cannot compose two distinct all-of-feature clauses")

    spec = cl.RuleSpec(
        name=f"{a.name}+{b.name}" if a.name != b.name else a.name,
        clauses=merged,
        tags=a.tags | b.tags,
        description=f"{a.description} Combined with: {b.description}".strip(),
        components=(a.name, b.name) if a.name != b.name else (a.name,),
    )
    if check_boards:
        rng = random.Random(0xC0115E)
        if not any(
            cl.clause_legal_moves(spec, cl.RuleState(), _random_board(rng))
            for _ in range(check_boards)
        ):
            raise ConfigError(f"composed rule {spec.name} admits no move on {check_boards} probe boards")
    return spec
