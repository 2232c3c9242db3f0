"""Exception hierarchy shared by all bitprobe modules."""


class BitprobeError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(BitprobeError, ValueError):
    """A constructor or operation received a parameter outside its domain."""


class PreconditionError(BitprobeError, ValueError):
    """An input violates the documented precondition of an operation."""


class ConfigurationError(BitprobeError, ValueError):
    """A scheme cannot be built with the requested graph / universe / capacity."""


class CapacityError(ConfigurationError):
    """The stored set is larger than the scheme supports."""


class SubstrateError(BitprobeError, RuntimeError):
    """The substrate graph is unsuitable (e.g. not locally sparse enough).

    Callers are expected to regenerate the graph and retry.
    """


class NotLocallySparse(SubstrateError):
    """Dense-core growth exceeded the bound guaranteed by local sparsity."""


class NotTwoForests(SubstrateError):
    """An edge set cannot be partitioned into two forests."""


class DomainError(BitprobeError, ValueError):
    """A query element lies outside the universe."""


class AddressError(BitprobeError, IndexError):
    """A probe addressed a bit outside the store."""


class PhaseError(BitprobeError, RuntimeError):
    """A BitStore was written after being frozen, or read before."""


class InfeasibleCheck(BitprobeError, ValueError):
    """An exhaustive check was requested beyond its configured cap."""


class BudgetExceeded(BitprobeError, ValueError):
    """Exhaustive verification would exceed the enumeration budget."""
