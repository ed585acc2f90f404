"""Exception hierarchy shared by all modules."""


class PottsError(Exception):
    """Base class for library errors."""


class DimensionCapError(PottsError):
    """A dense operator would exceed the configured size cap."""


class DimensionMismatchError(PottsError, ValueError):
    pass


class NotMonomialError(PottsError, ValueError):
    """Spectral calculus was asked for an operator outside the clock/shift monomials."""


class DegenerateModulusError(PottsError, ValueError):
    pass


class BranchPointError(PottsError, ValueError):
    """A rapidity sits on a branch point of the curve (a radicand vanishes)."""


class NonGenericError(PottsError, ArithmeticError):
    """A product factor, weight or denominator vanishes."""


class SingularEvolutionError(PottsError, ArithmeticError):
    def __init__(self, site, message=None):
        self.site = site
        super().__init__(message or f"evolution hits a pole of f at site {site}")


class BranchDomainError(PottsError, ValueError):
    """Arguments outside the domain where the branch prescription is unambiguous."""


class SearchFailure(PottsError, RuntimeError):
    """A best-effort inverse construction found no admissible branch."""


class SamplingError(PottsError, RuntimeError):
    pass
