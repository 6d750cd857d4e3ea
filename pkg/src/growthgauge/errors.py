"""Exception hierarchy.

Every error raised by the package derives from :class:`GrowthGaugeError`.
The two intermediate classes decide the CLI exit code: :class:`InputError`
maps to 65 (bad input data), :class:`LimitExceeded` to 70 (internal limit).
"""


class GrowthGaugeError(Exception):
    pass


class InputError(GrowthGaugeError):
    pass


class LimitExceeded(GrowthGaugeError):
    pass


class ExprSyntaxError(InputError):
    """Malformed expression text.

    ``offset`` is a byte offset into the UTF-8 encoded input and
    ``expected`` the set of token kinds that would have been accepted.
    """

    def __init__(self, message, offset=0, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = message
        if self.expected:
            detail += " (expected one of: %s)" % ", ".join(sorted(self.expected))
        super().__init__("%s at byte %d" % (detail, offset))


class UnknownFunction(ExprSyntaxError):
    pass


class ArityError(ExprSyntaxError):
    pass


class UnboundVariable(InputError):
    pass


class DomainError(InputError, ValueError):
    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message)


class NonUnivariate(InputError):
    pass


class NoVariables(InputError):
    pass


class SampleParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class NonPositiveValue(SampleParseError):
    pass


class TooFewSamples(InputError):
    pass


class InsufficientRange(InputError):
    pass


class NegativeM(GrowthGaugeError, ValueError):
    pass


class NoClosedForm(GrowthGaugeError, LookupError):
    pass


class OrderTooLarge(LimitExceeded):
    pass


class ExpressionTooLarge(LimitExceeded):
    pass
