"""Exception hierarchy shared by all lamopt modules."""


class LamoptError(ValueError):
    """Base class for every error raised by lamopt."""


class DegenerateLaminateError(LamoptError):
    """Raised when an operation receives zero plies."""


class MaterialError(LamoptError):
    """Raised for physically inadmissible elastic constants."""


class IllConditionedLaminateError(LamoptError):
    """Raised when a stiffness matrix cannot be inverted."""


class NotApplicableError(LamoptError):
    """Raised when a check does not apply to the given load case."""


class AngleSetError(LamoptError):
    """Raised for empty, oversized or duplicated angle sets."""


class EmptyInputError(LamoptError):
    """Raised when a geometric operation gets no points."""


class ContractError(LamoptError):
    """Raised when array dimensions do not agree."""


class CloudSizeError(LamoptError):
    """Raised when brute-force enumeration would exceed its guard.

    The offending sequence count is stored in ``count``.
    """

    def __init__(self, count, limit):
        self.count = count
        self.limit = limit
        super().__init__(
            f"{count} stacking sequences exceed the enumeration guard of {limit}")
