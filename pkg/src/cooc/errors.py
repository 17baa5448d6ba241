"""Exception hierarchy shared by every module of the package."""


class CoocError(Exception):
    """Base class for all errors raised by this package."""


class GrammarError(CoocError):
    pass


class CyclicGrammar(GrammarError):
    pass


class MissingProduction(GrammarError):
    pass


class BadExponent(GrammarError):
    pass


class ExpansionTooLarge(GrammarError):
    pass


class OutOfBounds(CoocError, IndexError):
    pass


class EmptyText(CoocError, ValueError):
    pass


class EmptyPattern(CoocError, ValueError):
    pass


class NegativeBound(CoocError, ValueError):
    pass


class SeedExhausted(CoocError):
    pass


class LengthMismatch(CoocError, ValueError):
    pass


class ParamSearchExhausted(CoocError):
    pass


class EagerTooLarge(CoocError):
    pass


class IndexFormatError(CoocError):
    """Raised when a serialized index is corrupt or has the wrong version."""
