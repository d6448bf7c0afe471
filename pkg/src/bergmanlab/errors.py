"""Exception types shared across the package."""


class BergmanLabError(Exception):
    """Base class for all package errors."""


class ConfigurationError(BergmanLabError):
    """Invalid parameters or malformed configuration input.

    ``pointer`` is a JSON-pointer-style path into the offending config
    document when the error originates from config parsing.
    """

    def __init__(self, message, pointer=None):
        self.pointer = pointer
        if pointer is not None:
            message = f"{pointer}: {message}"
        super().__init__(message)


class EvaluationError(BergmanLabError):
    """An integrand evaluated to a non-finite value at a quadrature node."""


class CriticalPointError(BergmanLabError):
    """Conditional expectation requested at a critical point of the self-map."""


class RootFindingError(BergmanLabError):
    """Preimage solver failed to produce a verified level set."""
