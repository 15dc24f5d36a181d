"""Exception types shared across the toolkit.

Two broad classes matter to callers: configuration problems (bad
parameters, malformed rule files) and data problems (inputs that are
well-formed Python objects but violate a documented precondition).
The CLI maps them to distinct exit codes.
"""

from __future__ import annotations


class CorpusError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CorpusError):
    """Invalid configuration: bad parameter values, malformed rule or
    config files, contradictory options."""


class DataError(CorpusError):
    """Invalid input data: unsorted or overlapping regions, empty
    reference text, files whose content does not match the documented
    format."""


class NoCandidateError(DataError):
    """Raised by the span search when no candidate span fits, e.g. the
    hypothesis is longer than the whole document allows."""


class IncomparableError(DataError):
    """Raised when two metadata records share no scoreable field."""


class InconclusiveError(DataError):
    """Raised when a pair validation cannot produce a verdict, e.g.
    both token sets are empty."""


class SplitInfeasibleError(DataError):
    """Raised when a dataset split cannot satisfy its constraints,
    e.g. fewer distinct sessions than sides."""
