"""Exception hierarchy shared by all modules.

Three failure categories matter to callers: bad input, a resource cap
being hit, and an internal cross-check failing.  The CLI maps them to
distinct exit codes (2, 3 and 1 respectively).
"""


class FragcheckError(Exception):
    """Base class for all errors raised by this package."""


class InputError(FragcheckError):
    """Malformed or semantically invalid input (document, pattern, formula)."""


class CapError(FragcheckError):
    """A configurable resource cap (monoid size, automaton states) was exceeded."""


class ConsistencyError(FragcheckError):
    """An internal invariant failed.

    This signals a defect in the implementation, never in the input:
    the quantities involved are guaranteed to agree for every language.
    """
