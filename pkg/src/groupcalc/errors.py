"""Exception types shared across the package."""


class GroupCalcError(Exception):
    """Base class for all groupcalc errors."""


class DomainError(GroupCalcError):
    """Structural mismatch or a point outside the configured domain."""


class CapacityError(GroupCalcError):
    """Requested derivative order exceeds the generator cap."""


class EvaluationError(GroupCalcError):
    """A smooth primitive was evaluated outside its domain."""


class ConfigError(GroupCalcError):
    """Scenario configuration could not be parsed or validated."""
