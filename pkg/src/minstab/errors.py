"""Exception hierarchy shared by all modules."""


class MinstabError(Exception):
    """Base class for library errors."""


class DomainError(MinstabError, ValueError):
    """An argument lies outside the domain of an operation."""


class ValidationError(MinstabError):
    """Weierstrass data failed validation.

    ``invariant`` names the violated condition, ``index`` the offending
    coordinate and ``detail`` carries a human readable diagnostic.
    """

    invariant = "validation"

    def __init__(self, message, index=None, detail=None):
        super().__init__(message)
        self.index = index
        self.detail = detail or {}

    def as_dict(self):
        return {
            "invariant": self.invariant,
            "message": str(self),
            "index": self.index,
            "detail": self.detail,
        }


class MinimalityViolation(ValidationError):
    invariant = "sum_of_squares"


class AdmissibilityViolation(ValidationError):
    invariant = "boundary_zero"


class NotQuasiconformal(MinstabError, ValueError):
    """A Beltrami coefficient reached sup-norm 1."""


class SeriesDivergenceRisk(MinstabError):
    """Neumann series requested outside its contraction margin."""


class Unsupported(MinstabError):
    """The input is outside what an operation supports (e.g. n != 3)."""


class ConvergenceError(MinstabError):
    """A numerical iteration failed to converge."""
