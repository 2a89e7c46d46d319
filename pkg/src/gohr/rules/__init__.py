from .clauses import (
    RuleSpec,
    RuleState,
    accepts,
    clause_legal_moves,
    clause_verdicts,
    initial_state,
    movable,
)
from .oracle import oracle_legal_moves
from .registry import (
    UnknownRuleError,
    catalog_names,
    compose,
    experiment_rules,
    property_tags,
    registry_names,
    resolve_rule,
    rule_description,
)
from .trial_list import TrialList, TrialListError, parse_trial_list

__all__ = [
    "RuleSpec",
    "RuleState",
    "TrialList",
    "TrialListError",
    "UnknownRuleError",
    "accepts",
    "catalog_names",
    "clause_legal_moves",
    "clause_verdicts",
    "compose",
    "experiment_rules",
    "initial_state",
    "movable",
    "oracle_legal_moves",
    "parse_trial_list",
    "property_tags",
    "registry_names",
    "resolve_rule",
    "rule_description",
]
