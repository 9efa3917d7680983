"""
Exception hierarchy. The CLI maps InputError (and its subclasses) to exit code 2,
SolverError to exit code 3.
"""


class NonphysError(Exception):
    pass


class InputError(NonphysError):
    """Malformed user data: unparsable channel sources, unknown builtins or keys."""


class DimensionError(InputError, ValueError):
    pass


class HermiticityError(InputError, ValueError):
    pass


class DomainError(InputError, ValueError):
    """A parameter lies outside the domain where a constructor or formula is defined."""


class SingularMapError(NonphysError):
    pass


class SolverError(NonphysError):
    """A cone program did not reach an optimal, certified solution."""

    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status
