from __future__ import annotations


class GfonlsError(Exception):
    """Base class for all library errors."""


class DomainError(GfonlsError, ValueError):
    pass


class BranchPointError(DomainError):
    pass


class PoleError(DomainError):
    pass


class NonCommutingError(GfonlsError):
    pass


class SpectrumError(GfonlsError, ValueError):
    """Raised with the full list of violated spectrum rules."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class SizeGuardError(GfonlsError, ValueError):
    pass


class IllConditionedError(GfonlsError):
    pass


class GridTooSmallError(GfonlsError, ValueError):
    pass


class InstabilityError(GfonlsError, RuntimeError):
    pass


class ConfigError(GfonlsError, ValueError):
    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("\n".join(self.messages))
