"""Exception hierarchy shared by all ordmat modules."""


class OrdmatError(Exception):
    """Base class; ``witness`` carries an optional offending object."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
        self.stage = None

    def to_dict(self):
        out = {"error": type(self).__name__, "message": str(self)}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.stage is not None:
            out["stage"] = self.stage
        return out


class DescriptorMismatch(OrdmatError):
    pass


class NotInvertible(OrdmatError):
    pass


class ConfigurationError(OrdmatError):
    pass


class DimensionMismatch(OrdmatError):
    pass


class SingularMatrix(OrdmatError):
    pass


class MalformedWord(OrdmatError):
    pass


class PreconditionError(OrdmatError):
    pass


class ShapeError(OrdmatError):
    pass


class DomainError(OrdmatError):
    pass


class ConstructionError(OrdmatError):
    pass


class NotAnAutomorphism(OrdmatError):
    pass


class PipelineOrderError(OrdmatError):
    pass


class UnsupportedRingAutomorphism(OrdmatError):
    pass


class UnsupportedHomothety(OrdmatError):
    pass


class DecompositionMismatch(OrdmatError):
    pass


class InputError(OrdmatError):
    """Malformed external input (JSON shape, unparsable numbers)."""
