"""Versioned binary envelopes for params, keys, rings and signatures.

Envelope layout (big-endian)::

    magic "CLRS" | version u8 | kind u8 | curve_id u16 | payload

Every object has exactly one accepted encoding: :func:`decode` re-encodes its
result and rejects the input unless the bytes match.
"""
from __future__ import annotations

import re
import struct
from enum import IntEnum

from .backend import (
    G1_BYTES,
    G2_BYTES,
    GT_BYTES,
    SCALAR_BYTES,
    G1Element,
    G2Element,
    GTElement,
    get_group,
    raw_pairing,
    scalar_from_bytes,
    scalar_to_bytes,
)
from .errors import (
    CLRingError,
    CodecError,
    InvalidElementError,
    InvalidHexError,
    MalformedEnvelopeError,
    NonCanonicalEncodingError,
    OffCurvePointError,
    WrongKindError,
)
from .scheme import (
    MasterKey,
    PartialPrivateKey,
    PrivateKey,
    PublicKey,
    Ring,
    RingSignature,
    SecretValue,
    SystemParams,
)

MAGIC = b"CLRS"
VERSION = 1
_HEADER = struct.Struct(">4sBBH")

# ring and signature sizes are bounded to keep decoding of hostile input cheap
MAX_RING = 1 << 16


class Kind(IntEnum):
    PARAMS = 1
    MASTERKEY = 2
    PARTIALKEY = 3
    SECRETVALUE = 4
    PRIVATEKEY = 5
    PUBLICKEY = 6
    RING = 7
    SIGNATURE = 8


_KIND_OF = {
    SystemParams: Kind.PARAMS,
    MasterKey: Kind.MASTERKEY,
    PartialPrivateKey: Kind.PARTIALKEY,
    SecretValue: Kind.SECRETVALUE,
    PrivateKey: Kind.PRIVATEKEY,
    PublicKey: Kind.PUBLICKEY,
    Ring: Kind.RING,
    RingSignature: Kind.SIGNATURE,
}


def length_prefixed(*chunks: bytes) -> bytes:
    """Concatenate chunks, each preceded by its u32 length."""
    return b"".join(struct.pack(">I", len(c)) + bytes(c) for c in chunks)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise MalformedEnvelopeError("truncated payload")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def point(self, cls, size):
        try:
            return cls.from_bytes(self.take(size))
        except InvalidElementError as exc:
            raise OffCurvePointError(str(exc)) from exc

    def gt(self) -> GTElement:
        try:
            return GTElement.from_bytes(self.take(GT_BYTES))
        except InvalidElementError as exc:
            raise OffCurvePointError(str(exc)) from exc

    def scalar(self) -> int:
        try:
            return scalar_from_bytes(self.take(SCALAR_BYTES), nonzero=True)
        except InvalidElementError as exc:
            raise NonCanonicalEncodingError(str(exc)) from exc

    def done(self) -> None:
        if self.pos != len(self.data):
            raise MalformedEnvelopeError("trailing bytes after payload")


def _payload(obj) -> bytes:
    if isinstance(obj, SystemParams):
        suite = obj.hash_suite_id.encode("ascii")
        return (obj.P1.to_bytes() + obj.P2.to_bytes() + obj.g.to_bytes()
                + obj.P0.to_bytes() + bytes([len(suite)]) + suite)
    if isinstance(obj, MasterKey):
        return scalar_to_bytes(obj.kappa)
    if isinstance(obj, PartialPrivateKey):
        return obj.D.to_bytes()
    if isinstance(obj, SecretValue):
        return scalar_to_bytes(obj.x)
    if isinstance(obj, PrivateKey):
        return scalar_to_bytes(obj.x.x) + obj.D.D.to_bytes()
    if isinstance(obj, PublicKey):
        return obj.point.to_bytes()
    if isinstance(obj, Ring):
        return (struct.pack(">I", len(obj)) + length_prefixed(*obj.identities)
                + b"".join(pk.point.to_bytes() for pk in obj.public_keys))
    if isinstance(obj, RingSignature):
        return (struct.pack(">I", len(obj)) + b"".join(y.to_bytes() for y in obj.y)
                + obj.V.to_bytes())
    raise TypeError("cannot encode %s" % type(obj).__name__)


def encode(obj, curve_id: int | None = None) -> bytes:
    """Wrap ``obj`` in an envelope.  ``curve_id`` defaults to BLS12-381."""
    kind = _KIND_OF.get(type(obj))
    if kind is None:
        raise TypeError("cannot encode %s" % type(obj).__name__)
    if curve_id is None:
        curve_id = obj.curve_id if isinstance(obj, SystemParams) else 1
    return _HEADER.pack(MAGIC, VERSION, kind, curve_id) + _payload(obj)


def _parse(kind: Kind, curve_id: int, r: _Reader):
    if kind is Kind.PARAMS:
        group = get_group(curve_id)
        P1 = r.point(G1Element, G1_BYTES)
        P2 = r.point(G2Element, G2_BYTES)
        g = r.gt()
        P0 = r.point(G2Element, G2_BYTES)
        suite = r.take(r.u8())
        if P1 != group.P1 or P2 != group.P2:
            raise CodecError("params use non-standard generators")
        if g != raw_pairing(P1, P2):
            raise CodecError("params: g is not e(P1, P2)")
        try:
            suite_id = suite.decode("ascii")
        except UnicodeDecodeError:
            raise MalformedEnvelopeError("hash suite id is not ascii") from None
        return SystemParams(group, P1, P2, g, P0, suite_id)
    if kind is Kind.MASTERKEY:
        return MasterKey(r.scalar())
    if kind is Kind.PARTIALKEY:
        return PartialPrivateKey(r.point(G1Element, G1_BYTES))
    if kind is Kind.SECRETVALUE:
        return SecretValue(r.scalar())
    if kind is Kind.PRIVATEKEY:
        x = SecretValue(r.scalar())
        return PrivateKey(x, PartialPrivateKey(r.point(G1Element, G1_BYTES)))
    if kind is Kind.PUBLICKEY:
        return PublicKey(r.point(G2Element, G2_BYTES))
    if kind is Kind.RING:
        n = r.u32()
        if not 1 <= n <= MAX_RING:
            raise MalformedEnvelopeError("ring size %d out of range" % n)
        ids = [r.take(r.u32()) for _ in range(n)]
        pks = [PublicKey(r.point(G2Element, G2_BYTES)) for _ in range(n)]
        return Ring(tuple(ids), tuple(pks))
    if kind is Kind.SIGNATURE:
        n = r.u32()
        if not 1 <= n <= MAX_RING:
            raise MalformedEnvelopeError("signature size %d out of range" % n)
        ys = [r.gt() for _ in range(n)]
        return RingSignature(tuple(ys), r.point(G1Element, G1_BYTES))
    raise WrongKindError("unknown kind")  # pragma: no cover


def decode(data: bytes, expect=None):
    """Parse an envelope, validating every group element and invariant.

    ``expect`` may be a class (e.g. ``Ring``) or a :class:`Kind`; a mismatch
    raises :class:`WrongKindError`.  Any failure raises a :class:`CodecError`
    subclass.
    """
    data = bytes(data)
    if len(data) < _HEADER.size:
        raise MalformedEnvelopeError("envelope shorter than its header")
    magic, version, kind_byte, curve_id = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise MalformedEnvelopeError("bad magic")
    if version != VERSION:
        raise MalformedEnvelopeError("unsupported envelope version %d" % version)
    try:
        kind = Kind(kind_byte)
    except ValueError:
        raise WrongKindError("unknown kind byte %d" % kind_byte) from None
    if expect is not None:
        want = expect if isinstance(expect, Kind) else _KIND_OF[expect]
        if kind is not want:
            raise WrongKindError("expected %s, found %s" % (want.name, kind.name))
    try:
        get_group(curve_id)
    except CLRingError as exc:
        raise MalformedEnvelopeError(str(exc)) from None
    r = _Reader(data[_HEADER.size:])
    try:
        obj = _parse(kind, curve_id, r)
    except CodecError:
        raise
    except CLRingError as exc:
        # invariant violations surfaced by the domain constructors
        raise CodecError("%s: %s" % (type(exc).__name__, exc)) from exc
    r.done()
    if encode(obj, curve_id) != data:
        raise NonCanonicalEncodingError("input is not the canonical encoding")
    return obj


_HEX_RE = re.compile(r"(?:[0-9a-f]{2})*")


def to_hex(data: bytes) -> str:
    return bytes(data).hex()


def from_hex(text: str) -> bytes:
    """Strict parse: lowercase hex digits only, even length, no whitespace."""
    if not isinstance(text, str) or not _HEX_RE.fullmatch(text):
        raise InvalidHexError("not lowercase hex")
    return bytes.fromhex(text)
