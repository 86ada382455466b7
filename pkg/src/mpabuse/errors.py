"""Exception types.  Everything a bad input file can trigger is a ``DataError``."""


class DataError(Exception):
    """Input data could not be used (exit code 2 at the command line)."""


class CorpusError(DataError):
    pass


class LexiconError(DataError):
    pass


class DegenerateError(ValueError):
    """A statistic is undefined for the given input."""
