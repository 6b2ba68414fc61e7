"""Exception hierarchy shared by all modules.

Every domain failure raised by the library derives from :class:`BargmannError`,
which lets the command line map them to exit code 1.
"""

from __future__ import annotations


class BargmannError(ValueError):
    """Base class for domain errors."""


class LayoutMismatchError(BargmannError):
    """Wire layouts are incompatible (not a permutation, duplicates, unknown wires)."""


class WireKindError(BargmannError):
    """An operation needs wires of a kind the object does not have."""


class SingularContractionError(BargmannError):
    """The integration block of a Gaussian contraction is singular."""


class DivergentIntegralError(BargmannError):
    """The Gaussian integral of a contraction does not converge."""


class DomainError(BargmannError):
    """A parameter lies outside its documented domain."""


class UnknownNameError(BargmannError):
    """A catalog name does not exist."""


class DegenerateMarginalError(BargmannError):
    """A marginal needed by a decomposition is not normalizable."""


class NumericalDegeneracyError(BargmannError):
    """A linear-algebra identity failed beyond tolerance."""


class SchemaError(BargmannError):
    """A JSON document does not follow the expected schema."""
