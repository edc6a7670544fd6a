"""Exception types raised across ruinkit."""


class RuinkitError(Exception):
    """Base class for all library errors."""


class ParameterDomainError(RuinkitError, ValueError):
    """A parameter lies outside its admissible domain."""


class ConfigurationError(RuinkitError, ValueError):
    pass


class InsufficientTailDataError(RuinkitError):
    """Too few tail exceedances to estimate a ratio at ``x``."""

    def __init__(self, x: float, count: int, required: int):
        self.x = x
        self.count = count
        self.required = required
        super().__init__(
            f"insufficient tail data at x={x:g}: {count} exceedances, need {required}"
        )


class DegenerateInputError(RuinkitError, ValueError):
    pass


class AmbiguousClassificationError(RuinkitError):
    """Tail diagnostics disagree; ``candidates`` holds the competing labels."""

    def __init__(self, candidates: tuple[str, str], reason: str = ""):
        self.candidates = candidates
        msg = f"ambiguous tail classification: {candidates[0]} vs {candidates[1]}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class DivergentMomentError(RuinkitError):
    pass
