"""Bilinear group engine over BLS12-381 with operation accounting.

The scheme is written for a symmetric pairing ``e: G1 x G1 -> GT``.  BLS12-381
is asymmetric, so the engine fixes one convention and every caller follows it:

* hashed points and everything derived from them (``Q_i``, ``D_i``, ``U``,
  ``V``) live in G1;
* points whose discrete log is known to their creator (the master public
  key ``P0`` and user public keys ``P_i``) live in G2;
* the generator ``P`` exists in both groups, as the pair ``(P1, P2)``.

Every pairing in signing and verification then has the shape ``e(G1, G2)``.

Arithmetic comes from the ``mcl`` library via ``pymcl``.  Scalars are plain
Python ints in ``[0, q)``.
"""
from __future__ import annotations

import dataclasses
import hashlib
import random
import secrets
import threading
from contextlib import contextmanager
from typing import Iterator, Protocol, Union

import pymcl

from .errors import EntropyError, InvalidElementError, UnsupportedParameterError

ORDER = pymcl.r

G1_BYTES = 48
G2_BYTES = 96
GT_BYTES = 576
SCALAR_BYTES = 32

H1_TAG = 0x01
H3_TAG = 0x03

_H2G_PREFIX = b"CLRING/hash-to-G1/v1"
_H2S_PREFIX = b"CLRING/hash-to-Zq/v1"


def _fr(k: int) -> pymcl.Fr:
    return pymcl.Fr(str(k % ORDER))


_FR_ORDER_MINUS_ONE = _fr(ORDER - 1)


def scalar_to_bytes(k: int) -> bytes:
    """Big-endian, fixed-width encoding of a scalar."""
    if not 0 <= k < ORDER:
        raise InvalidElementError("scalar out of range")
    return k.to_bytes(SCALAR_BYTES, "big")


def scalar_from_bytes(data: bytes, *, nonzero: bool = False) -> int:
    if len(data) != SCALAR_BYTES:
        raise InvalidElementError("scalar encoding must be %d bytes" % SCALAR_BYTES)
    k = int.from_bytes(data, "big")
    if k >= ORDER:
        raise InvalidElementError("scalar not reduced modulo the group order")
    if nonzero and k == 0:
        raise InvalidElementError("zero scalar where a nonzero one is required")
    return k


def check_nonzero_scalar(k: int) -> int:
    if not isinstance(k, int) or isinstance(k, bool):
        raise InvalidElementError("scalar must be an int")
    if not 0 < k < ORDER:
        raise InvalidElementError("scalar must lie in [1, q-1]")
    return k


class _Point:
    """Shared behaviour of the two source-group wrappers."""

    __slots__ = ("_raw",)
    _mcl: type
    _size: int

    def __init__(self, raw):
        self._raw = raw

    @classmethod
    def identity(cls):
        return cls(cls._mcl())

    @classmethod
    def from_bytes(cls, data: bytes):
        """Decode the canonical compressed form, checking subgroup membership."""
        data = bytes(data)
        if len(data) != cls._size:
            raise InvalidElementError("%s encoding must be %d bytes" % (cls.__name__, cls._size))
        try:
            raw = cls._mcl.deserialize(data)
        except ValueError as exc:
            raise InvalidElementError("not a point on the curve") from exc
        if raw.serialize() != data:
            raise InvalidElementError("non-canonical point encoding")
        # (q-1)*R + R == O  <=>  R has order dividing q
        if not (raw * _FR_ORDER_MINUS_ONE + raw).isZero():
            raise InvalidElementError("point outside the prime-order subgroup")
        return cls(raw)

    def to_bytes(self) -> bytes:
        return self._raw.serialize()

    def is_identity(self) -> bool:
        return self._raw.isZero()

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self._raw + other._raw)

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self._raw - other._raw)

    def __neg__(self):
        return type(self)(-self._raw)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._raw == other._raw

    def __hash__(self):
        return hash((type(self).__name__, self.to_bytes()))

    def __repr__(self):
        return "%s(%s..)" % (type(self).__name__, self.to_bytes().hex()[:16])


class G1Element(_Point):
    __slots__ = ()
    _mcl = pymcl.G1
    _size = G1_BYTES


class G2Element(_Point):
    __slots__ = ()
    _mcl = pymcl.G2
    _size = G2_BYTES


Point = Union[G1Element, G2Element]


class GTElement:
    """Element of the multiplicative target group."""

    __slots__ = ("_raw",)

    def __init__(self, raw):
        self._raw = raw

    @classmethod
    def one(cls) -> "GTElement":
        return cls(pymcl.GT())

    @classmethod
    def from_bytes(cls, data: bytes) -> "GTElement":
        data = bytes(data)
        if len(data) != GT_BYTES:
            raise InvalidElementError("GT encoding must be %d bytes" % GT_BYTES)
        try:
            raw = pymcl.GT.deserialize(data)
        except ValueError as exc:
            raise InvalidElementError("not an Fp12 element") from exc
        if raw.serialize() != data:
            raise InvalidElementError("non-canonical GT encoding")
        if not (raw ** _FR_ORDER_MINUS_ONE * raw).isOne():
            raise InvalidElementError("element outside the order-q subgroup of GT")
        return cls(raw)

    def to_bytes(self) -> bytes:
        return self._raw.serialize()

    def is_one(self) -> bool:
        return self._raw.isOne()

    def inverse(self) -> "GTElement":
        return GTElement(~self._raw)

    def __mul__(self, other):
        if not isinstance(other, GTElement):
            return NotImplemented
        return GTElement(self._raw * other._raw)

    def __truediv__(self, other):
        if not isinstance(other, GTElement):
            return NotImplemented
        return GTElement(self._raw / other._raw)

    def __eq__(self, other):
        if not isinstance(other, GTElement):
            return NotImplemented
        return self._raw == other._raw

    def __hash__(self):
        return hash(self.to_bytes())

    def __repr__(self):
        return "GTElement(%s..)" % self.to_bytes().hex()[:16]


def raw_pairing(a: G1Element, b: G2Element) -> GTElement:
    """Uncounted pairing, for validation code outside the scheme's cost model."""
    return GTElement(pymcl.pairing(a._raw, b._raw))


@dataclasses.dataclass
class OpCounter:
    """Tallies of the operations the efficiency table tracks."""

    pairings: int = 0
    g1_scalar_muls: int = 0
    gt_exps: int = 0
    map_to_point_hashes: int = 0

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.pairings, self.g1_scalar_muls, self.gt_exps, self.map_to_point_hashes)

    def __add__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(*(a + b for a, b in zip(self.as_tuple(), other.as_tuple())))


class RandomSource(Protocol):
    def randrange(self, start: int, stop: int = ..., step: int = ...) -> int: ...


def make_rng(seed: int | bytes | str | None = None) -> RandomSource:
    """Seeded deterministic source for replay, or OS entropy when ``seed`` is None.

    The seeded mode uses the Mersenne Twister and is for tests and
    reproducible demos only.
    """
    if seed is None:
        return secrets.SystemRandom()
    return random.Random(seed)


class PairingGroup:
    """Counted bilinear-group operations.

    Counters are kept per thread.  Scalar multiplication is counted whichever
    source group the point lives in, since the scheme's G1 corresponds to both
    of them here; point additions and GT multiplications are free.
    """

    name = "BLS12-381"
    curve_id = 1
    security_level = 128
    order = ORDER

    def __init__(self):
        self._local = threading.local()
        self.P1 = G1Element(pymcl.g1)
        self.P2 = G2Element(pymcl.g2)

    @property
    def counter(self) -> OpCounter:
        c = getattr(self._local, "counter", None)
        if c is None:
            c = self._local.counter = OpCounter()
        return c

    def counter_reset(self) -> None:
        self._local.counter = OpCounter()

    def counter_report(self) -> OpCounter:
        return dataclasses.replace(self.counter)

    @contextmanager
    def counting(self) -> Iterator[OpCounter]:
        """Reset the counter, run the block, then fill the yielded tally."""
        self.counter_reset()
        tally = OpCounter()
        try:
            yield tally
        finally:
            snap = self.counter_report()
            tally.pairings = snap.pairings
            tally.g1_scalar_muls = snap.g1_scalar_muls
            tally.gt_exps = snap.gt_exps
            tally.map_to_point_hashes = snap.map_to_point_hashes

    def pair(self, a: G1Element, b: G2Element) -> GTElement:
        if not isinstance(a, G1Element) or not isinstance(b, G2Element):
            raise InvalidElementError("pair() expects (G1Element, G2Element)")
        self.counter.pairings += 1
        return GTElement(pymcl.pairing(a._raw, b._raw))

    def g1_mul(self, k: int, a: Point) -> Point:
        if not isinstance(a, _Point):
            raise InvalidElementError("g1_mul() expects a source-group point")
        self.counter.g1_scalar_muls += 1
        return type(a)(a._raw * _fr(k))

    def gt_exp(self, b: GTElement, k: int) -> GTElement:
        if not isinstance(b, GTElement):
            raise InvalidElementError("gt_exp() expects a GTElement")
        self.counter.gt_exps += 1
        return GTElement(b._raw ** _fr(k))

    def hash_to_g1(self, domain_tag: int, msg: bytes) -> G1Element:
        """MapToPoint hash; ``domain_tag`` separates H1 from H3."""
        if not 0 <= domain_tag <= 0xFF:
            raise ValueError("domain tag must fit in one byte")
        self.counter.map_to_point_hashes += 1
        base = _H2G_PREFIX + bytes([domain_tag]) + bytes(msg)
        data = base
        for ctr in range(256):
            raw = pymcl.G1.hash(data)
            if not raw.isZero():
                return G1Element(raw)
            data = base + bytes([ctr])
        raise RuntimeError("hash_to_g1 failed to leave the identity")  # pragma: no cover

    def hash_to_scalar(self, msg: bytes) -> int:
        """Hash onto ``Z_q^*`` by expand-and-reduce over SHA-512."""
        base = _H2S_PREFIX + bytes(msg)
        data = base
        for ctr in range(256):
            k = int.from_bytes(hashlib.sha512(data).digest(), "big") % ORDER
            if k:
                return k
            data = base + bytes([ctr])
        raise RuntimeError("hash_to_scalar failed to leave zero")  # pragma: no cover

    def random_scalar(self, rng: RandomSource) -> int:
        """Uniform draw from ``[1, q-1]``."""
        try:
            return 1 + rng.randrange(ORDER - 1)
        except (OSError, NotImplementedError) as exc:
            raise EntropyError("randomness source failed") from exc


BLS12_381 = PairingGroup()

_GROUPS = {BLS12_381.curve_id: BLS12_381}


def get_group(curve_id: int) -> PairingGroup:
    try:
        return _GROUPS[curve_id]
    except KeyError:
        raise UnsupportedParameterError("unknown curve id %r" % curve_id) from None


def group_for_security(level: int) -> PairingGroup:
    for group in _GROUPS.values():
        if group.security_level == level:
            return group
    raise UnsupportedParameterError("no supported curve at security level %r" % level)
