class GradingError(ValueError):
    """Mismatched lengths or degrees in graded bookkeeping."""


class GraphError(ValueError):
    """Malformed marked graph, partition or marker index."""


class ProfileError(ValueError):
    """Requested per-vertex profile cannot be realized."""


class PresentationError(ValueError):
    """BD presentation, pairing or derivation data violates its invariants."""


class InstanceError(ValueError):
    """Instance file does not match the schema or references unknown names."""


class CertificateError(ValueError):
    """A verification was requested without its precondition certificate."""
