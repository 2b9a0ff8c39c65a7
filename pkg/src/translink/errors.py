"""Exception hierarchy shared by all modules.

Two families matter for the CLI exit codes: configuration problems
(ConfigError, exit 1) and model-domain problems (ModelDomainError, exit 2).
"""


class TranslinkError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TranslinkError):
    """Invalid configuration: bad values, broken invariants, schema errors."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations) if violations else []


class PresetNotFoundError(ConfigError):
    """Unknown preset name; carries the list of valid names."""

    def __init__(self, name, valid_names):
        self.name = name
        self.valid_names = sorted(valid_names)
        super().__init__(
            f"unknown preset {name!r}; valid presets: {', '.join(self.valid_names)}"
        )


class SchemaError(ConfigError):
    """Config file does not match the documented schema.

    `pointer` is a JSON-pointer-style path ("/policy/t_del_us") locating
    the offending key.
    """

    def __init__(self, pointer, message):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")


class ModelDomainError(TranslinkError):
    """Inputs are structurally valid but outside the model's domain."""


class DivisionDomainError(ModelDomainError):
    """A formula divides by a parameter that is zero here."""


class NoOptimumError(ModelDomainError):
    """Delivery-time optimization has no optimum (no heralds possible)."""


class UnattainableError(ModelDomainError):
    """Requested target fidelity cannot be reached by any delivery time."""


class DegenerateInputError(ModelDomainError):
    """Distillation step has zero success probability for these inputs."""
