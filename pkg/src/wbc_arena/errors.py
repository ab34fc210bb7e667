"""Exception hierarchy shared by every module."""


class WbcError(Exception):
    """Base class for framework errors."""


class KeyRejected(WbcError):
    pass


class InputLengthMismatch(WbcError):
    pass


class LengthMismatch(WbcError):
    pass


class MalformedProgram(WbcError):
    pass


class BudgetExceeded(WbcError):
    pass


class Unsamplable(WbcError):
    pass


class DomainTooLarge(WbcError):
    pass


class SizeBoundViolated(WbcError):
    pass


class NotObfuscatable(WbcError):
    pass


class EmptyCorpus(WbcError):
    pass


class InvalidElement(WbcError):
    pass


class UnknownId(WbcError, KeyError):
    """An id did not resolve in one of the registries."""

    def __init__(self, registry: str, name: str):
        super().__init__(f"unknown {registry} id {name!r}")
        self.registry = registry
        self.name = name

    def __str__(self) -> str:
        return self.args[0]
