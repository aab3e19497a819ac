"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`InfiniteBinError`. The CLI maps the three families to exit codes:
``ParseError``/``InvalidParams`` -> 2 (usage), ``DomainError`` -> 3,
``ResourceCapExceeded`` -> 4.
"""


class InfiniteBinError(Exception):
    pass


class ParseError(InfiniteBinError, ValueError):
    pass


class InvalidParams(InfiniteBinError, ValueError):
    pass


class DomainError(InfiniteBinError, ValueError):
    pass


class MoveTooLarge(DomainError):
    pass


class ProjectionTooLarge(DomainError):
    pass


class IndexOutOfRange(DomainError, IndexError):
    pass


class LetterTooLarge(DomainError):
    pass


class NotSynchronizable(DomainError):
    pass


class InvalidDistribution(InvalidParams):
    pass


class ResourceCapExceeded(InfiniteBinError):
    pass


class UniverseTooLarge(ResourceCapExceeded):
    pass


class SubsetSpaceTooLarge(ResourceCapExceeded):
    pass
