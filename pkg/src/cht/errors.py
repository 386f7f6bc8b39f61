"""Exception types shared across the package."""


class ChtError(Exception):
    """Base class for all errors raised by this package."""


class DataError(ChtError):
    """Malformed input data: parse failures, bad labels, non-finite values."""


class DegenerateFeatureError(ChtError):
    """A feature has zero within-class standard deviation, so the
    standardized interaction observations for it are undefined."""

    def __init__(self, features, message=None):
        self.features = tuple(features)
        if message is None:
            message = "degenerate features (zero within-class sd): " + ", ".join(
                str(f) for f in self.features
            )
        super().__init__(message)


class ScenarioError(ChtError):
    """Invalid simulation configuration (sizes, structure, or a covariance
    that is not positive definite)."""
