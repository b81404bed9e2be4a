"""Exception hierarchy shared by every clring module."""


class CLRingError(Exception):
    """Base class for all errors raised by clring."""


class InvalidElementError(CLRingError, ValueError):
    """A value is not a valid member of the expected group."""


class EntropyError(CLRingError):
    """The randomness source failed to produce output."""


class UnsupportedParameterError(CLRingError, ValueError):
    pass


class RingError(CLRingError, ValueError):
    """A ring violates its structural invariants."""


class SignerIndexError(CLRingError, IndexError):
    pass


class KeyMismatchError(CLRingError, ValueError):
    """The private key does not belong to the claimed ring slot."""


class MalformedInputError(CLRingError, ValueError):
    """Structurally invalid data handed to verification (not a bad signature)."""


class LengthMismatchError(MalformedInputError):
    pass


class InvalidSignatureError(CLRingError):
    pass


class CodecError(CLRingError, ValueError):
    pass


class MalformedEnvelopeError(CodecError):
    pass


class WrongKindError(CodecError):
    pass


class OffCurvePointError(CodecError, InvalidElementError):
    pass


class NonCanonicalEncodingError(CodecError):
    pass


class InvalidHexError(CodecError):
    pass


class OracleCollisionError(CLRingError):
    """A programmable oracle was asked to program an already-defined point."""


class PreconditionError(CLRingError, ValueError):
    pass
