"""Error taxonomy shared by the whole package.

Each error class carries the CLI exit code it maps to, so the command
front end can translate exceptions without a lookup table.
"""


class PadicRigidError(Exception):
    exit_code = 1


class InputError(PadicRigidError):
    """Bad mathematical input: wrong prime, malformed matrix, bad basis."""

    exit_code = 2


class SchemaError(InputError):
    """Malformed input document; message carries the offending path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class PrecisionError(PadicRigidError):
    """A result cannot be computed to the requested precision."""

    exit_code = 3


class ConvergenceError(PadicRigidError):
    """A series construction does not converge under the given data."""

    exit_code = 3


class ConditionFailure(PadicRigidError):
    """A mathematical hypothesis check failed (strict-mode exit 1)."""

    exit_code = 1


class InconsistencyError(PadicRigidError):
    """Input data contradicts a structural theorem (e.g. index > 2)."""

    exit_code = 1
