"""Exception types raised across the package."""


class ByzSpirError(ValueError):
    """Base class for every error raised by byzspir."""


class DuplicatePoint(ByzSpirError):
    pass


class Singular(ByzSpirError):
    pass


class ShapeMismatch(ByzSpirError):
    pass


class DuplicateExponentPoint(ByzSpirError):
    pass


class ZeroExponentPoint(ByzSpirError):
    pass


class MissingAppendedRandomness(ByzSpirError):
    pass


class BudgetExceeded(ByzSpirError):
    pass


class ConfigError(ByzSpirError):
    """Invalid scheme or experiment configuration.

    ``fields`` maps each offending field name to a message.
    """

    def __init__(self, fields):
        if isinstance(fields, str):
            fields = {"config": fields}
        self.fields = dict(fields)
        msg = "; ".join(f"{k}: {v}" for k, v in self.fields.items())
        super().__init__(msg)
