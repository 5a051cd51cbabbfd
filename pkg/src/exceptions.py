"""Custom exceptions for the Trace-Net checker."""


class TraceNetError(Exception):
    """Base exception for Trace-Net errors."""

    pass


# Miniscript


class MiniscriptError(TraceNetError):
    """Base exception for Miniscript fragment errors."""

    pass


class MiniscriptSyntaxError(MiniscriptError):
    """Raised when an expression cannot be tokenized or parsed."""

    def __init__(self, position: int, expected: str, found: str | None = None):
        self.position = position
        self.expected = expected
        self.found = found
        detail = f"expected {expected} at position {position}"
        if found is not None:
            detail += f", found {found!r}"
        super().__init__(detail)


class MiniscriptArityError(MiniscriptError):
    """Raised when a fragment has the wrong number of children."""

    pass


class MiniscriptPayloadError(MiniscriptError):
    """Raised when a leaf payload is malformed (bad digest, non-positive lock)."""

    pass


class MiniscriptTypeError(MiniscriptError):
    """Raised when a composition is ill-typed."""

    def __init__(self, subterm: str, expected: str, actual: str):
        self.subterm = subterm
        self.expected = expected
        self.actual = actual
        super().__init__(f"{subterm} has type {actual}, expected {expected}")


class LiftError(MiniscriptError):
    """Raised when a script does not match any fragment template."""

    def __init__(self, position: int, detail: str):
        self.position = position
        super().__init__(f"cannot lift script at opcode {position}: {detail}")


class DsatUndefinedError(MiniscriptError):
    """Raised when asking for dissatisfactions of a V-typed fragment."""

    pass


# Transactions


class TransactionError(TraceNetError):
    """Base exception for transaction template errors."""

    pass


class DanglingPrevoutError(TransactionError):
    """Raised when an input references an unknown output."""

    pass


class MissingConfirmationError(TransactionError):
    """Raised when a prevout has no confirmation height."""

    pass


# Knowledge, net and semantics


class KnowledgeError(TraceNetError):
    """Raised when a deduction rule leaves the declared object universe."""

    pass


class NetConstructionError(TraceNetError):
    """Raised when the trace net cannot be built from the templates."""

    pass


class FiringError(TraceNetError):
    """Raised when a transition is fired without being fireable."""

    pass


class ReplayError(TraceNetError):
    """Raised when a snapshot trace step cannot be replayed."""

    pass


class BudgetExceededError(TraceNetError):
    """Raised when exploration exceeds the configured state budget."""

    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"State budget of {budget} nodes exceeded")


# Properties


class PolicyError(TraceNetError):
    """Raised for malformed policies or policy evaluation on open states."""

    pass


class UpdateProjectionError(TraceNetError):
    """Raised when old and new contract states disagree on shared places."""

    pass


# Contract files


class ContractValidationError(TraceNetError):
    """Raised when a contract description violates an invariant."""

    def __init__(self, invariant: str, detail: str):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}")
