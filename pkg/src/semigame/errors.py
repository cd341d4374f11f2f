"""Exception hierarchy shared by every module."""


class SemigameError(Exception):
    """Base class for errors raised by this package."""


class InputError(SemigameError, ValueError):
    """Caller supplied something that violates a documented precondition."""


class InternalError(SemigameError, RuntimeError):
    """An invariant that should hold by construction was found broken."""
