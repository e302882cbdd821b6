"""Exception hierarchy shared by every part of the planner."""


class PlannerError(Exception):
    """Base class for all planner errors."""


class NotApplicable(PlannerError):
    pass


class ParseError(PlannerError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class UnsupportedFeature(ParseError):
    pass


class GroundingExplosion(PlannerError):
    pass


class SchemaError(PlannerError):
    pass


class DanglingStateReference(SchemaError):
    pass


class AlreadyMapped(PlannerError):
    pass


class GoalStateMapped(PlannerError):
    pass


class NotInDomain(PlannerError):
    pass


class InvalidInput(PlannerError, ValueError):
    pass


class InvalidWeight(PlannerError, ValueError):
    pass


class ResourceLimit(PlannerError):
    """Search stopped by a budget; ``kind`` is ``"time-limit"`` or ``"policy-limit"``."""

    def __init__(self, kind, stats=None):
        self.kind = kind
        self.stats = stats
        super().__init__(kind)


class OrbitBudgetExceeded(PlannerError):
    pass


class SolverBudgetExceeded(PlannerError):
    pass


class OracleTooLarge(PlannerError):
    pass
