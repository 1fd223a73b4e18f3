"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class DykstraError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(DykstraError, ValueError):
    """Malformed argument: dimension mismatch, degenerate set, bad witness."""


class ResourceCapError(DykstraError, ArithmeticError):
    """A computation would exceed a configured iteration or magnitude cap.

    ``stage`` names the sub-formula that tripped the cap.  ``lower_bound``
    is a certified lower bound on the value that could not be computed, when
    one is known, and ``expression`` is a structural description of the rate
    that was being evaluated.
    """

    def __init__(self, message, *, stage=None, lower_bound=None, expression=None):
        super().__init__(message)
        self.stage = stage
        self.lower_bound = lower_bound
        self.expression = expression

    def with_context(self, *, stage=None, lower_bound=None, expression=None):
        """Return a copy carrying extra context.

        Stages nest as ``outer > inner``; the lower bound is the larger of
        the two and an existing expression is kept.
        """
        if stage and self.stage and not self.stage.startswith(stage):
            stage = f"{stage} > {self.stage}"
        err = ResourceCapError(
            str(self),
            stage=stage or self.stage,
            lower_bound=_larger(self.lower_bound, lower_bound),
            expression=self.expression or expression,
        )
        err.__cause__ = self.__cause__
        return err


class ConfigError(InvalidInputError):
    """Experiment configuration failed to parse or validate."""

    def __init__(self, message, *, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field


def _larger(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)
