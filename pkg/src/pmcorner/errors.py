"""Exception hierarchy shared by all modules."""


class PMCError(Exception):
    """Base class for every error raised by :mod:`pmcorner`."""


class InfeasibleSeed(PMCError):
    """A parameter interval is empty; ``name`` is the violated inequality."""

    def __init__(self, name, detail=""):
        self.name = name
        super().__init__(f"{name}: {detail}" if detail else name)


class InfeasibleGeometry(PMCError):
    pass


class RegionEmpty(PMCError):
    pass


class MeshFailure(PMCError):
    pass


class DomainViolation(PMCError):
    """A field was evaluated outside the set where it is defined."""


class InfeasibleContact(PMCError):
    pass


class InfeasibleHelicoid(PMCError):
    pass


class NonMonotoneProfile(PMCError):
    pass


class RegionMismatch(PMCError):
    pass


class UnknownArc(PMCError):
    pass


class IncompleteEvidence(PMCError):
    pass


class ConfigError(PMCError):
    """Config parse failure; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
