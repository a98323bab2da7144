"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside an operation's mathematical domain (e.g. not PSD)."""


class HypothesisError(ValueError):
    """A structural hypothesis (Hermitian blocks, commuting family) is violated."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or meet its accuracy contract."""


class MalformedCertificateError(ValueError):
    """A certificate's pieces are mutually inconsistent (kinds, shapes, weights)."""
