"""Exception hierarchy shared by every layer of the package."""


class ExpSOSError(Exception):
    """Base class for all package errors."""


class DomainError(ExpSOSError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NoInverseError(DomainError):
    """The element has no multiplicative inverse modulo the given modulus."""


class InvalidModulusError(DomainError):
    """A modulus factorization is not square-free, not prime, or inconsistent."""


class DegenerateAdditionError(ExpSOSError):
    """Projective addition was asked to add P and +-P (B == 0)."""


class IntegrityError(ExpSOSError):
    """A recovered value fails a structural check (e.g. an off-curve point)."""


class SessionError(ExpSOSError):
    """An outsourcing session could not complete."""


class TransportError(SessionError):
    """The worker could not be reached or the connection broke."""


class ProtocolError(ExpSOSError):
    """A wire message is malformed or the worker replied with an error."""


class VerificationRejected(SessionError):
    """The worker's answers failed the client's consistency check."""
