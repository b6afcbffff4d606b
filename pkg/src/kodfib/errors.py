"""Exception hierarchy shared by every kodfib module."""


class KodfibError(Exception):
    """Base class for all library errors."""


class ShapeError(KodfibError, ValueError):
    pass


class InvariantViolation(KodfibError):
    """A value failed one of its structural invariants."""


class SymplecticViolation(InvariantViolation):
    pass


class RelatorViolation(InvariantViolation):
    pass


class BaseMismatch(InvariantViolation):
    pass


class MissingSection(InvariantViolation):
    pass


class InvalidSpec(KodfibError, ValueError):
    pass


class ParityUndefined(KodfibError, ValueError):
    """s and q_f are only defined when the coinvariant rank is even."""


class UnsupportedOperation(KodfibError):
    pass


class DeclaredBlockUnsupported(UnsupportedOperation):
    """The operation needs explicit monodromy matrices."""


class SchemaError(KodfibError, ValueError):
    pass
