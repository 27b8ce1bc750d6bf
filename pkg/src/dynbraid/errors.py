"""Exception types shared across the package."""


class DynbraidError(Exception):
    """Base class for all package errors."""


class BraidFormatError(DynbraidError):
    """Malformed braid word text or strand mismatch."""


class CoordinateError(DynbraidError):
    """Invalid coordinate data (zero vector, length mismatch, bad scale)."""


class NonConvergence(DynbraidError):
    """Projective iteration failed to find an attracting direction.

    Raised for identity-like, finite order or reducible inputs, or when the
    precision ladder is exhausted.
    """


class VerificationFailed(DynbraidError):
    """A candidate matrix failed its fixed-direction or region check."""


class NoDominantRealRoot(DynbraidError):
    """The characteristic polynomial has no dominant real root > 1."""


class NotIrreducible(DynbraidError):
    """Power iteration produced an eigenvector with a zero entry."""


class TrackFormatError(DynbraidError):
    """Train-track or transition-matrix document violates its schema."""


class TieAtBasepoint(DynbraidError):
    """The basepoint of a linearization sits on a linearity wall."""
