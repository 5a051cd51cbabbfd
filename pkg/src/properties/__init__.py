"""Trustless execution, update safety and state stability over reachability graphs."""

from src.properties.game import (
    Verdict,
    eval_policy,
    is_settled,
    passing_states,
    refine_safe,
    safe_states,
    trustless_execution,
)
from src.properties.policies import (
    BalancePolicy,
    PredicatePolicy,
    SafetyPolicy,
    SecretPolicy,
    owned_balance,
    parse_policy,
)
from src.properties.stability import StabilityReport, state_stability
from src.properties.update import UpdateReport, update_safety

__all__ = [
    "BalancePolicy",
    "PredicatePolicy",
    "SafetyPolicy",
    "SecretPolicy",
    "StabilityReport",
    "UpdateReport",
    "Verdict",
    "eval_policy",
    "is_settled",
    "owned_balance",
    "parse_policy",
    "passing_states",
    "refine_safe",
    "safe_states",
    "state_stability",
    "trustless_execution",
    "update_safety",
]
