"""Exception types shared across the toolkit."""


class DiachronError(Exception):
    """Base class for all toolkit errors."""


class ManifestError(DiachronError):
    """Corpus manifest is invalid or a referenced text cannot be loaded."""


class CatalogError(DiachronError):
    """Pattern catalog is invalid (bad regex, duplicate feature id, ...)."""


class AlignmentError(DiachronError):
    """Cross-method inputs reference mismatched text or feature universes."""


class DegenerateWeightsError(DiachronError):
    """Ensemble weights collapse to zero total mass."""


class UndefinedCorrelationError(DiachronError):
    """Correlation requested on a zero-variance input."""


class InfiniteEffectError(DiachronError):
    """Effect size undefined: zero pooled spread with unequal means."""


class SynthSpecError(DiachronError):
    """Synthetic-corpus spec is unsatisfiable (e.g. too many injections)."""


class OracleScopeError(DiachronError):
    """Reference oracle invoked outside its supported instance size."""
