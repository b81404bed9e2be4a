"""Certificateless ring signatures from bilinear pairings.

Seven algorithms: setup, partial-private-key extraction, secret value,
private key, public key, ring signing and verification.  Ring positions are
0-based throughout the Python API.

Group placement follows :mod:`clring.backend`: ``Q_i``, ``D_i``, ``U`` and
``V`` are G1 points; ``P0`` and every public key are G2 points.
"""
from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Sequence

from .backend import (
    G1Element,
    G2Element,
    GTElement,
    H1_TAG,
    H3_TAG,
    ORDER,
    PairingGroup,
    RandomSource,
    check_nonzero_scalar,
    group_for_security,
    make_rng,
    raw_pairing,
)
from .errors import (
    InvalidElementError,
    InvalidSignatureError,
    KeyMismatchError,
    LengthMismatchError,
    MalformedInputError,
    RingError,
    SignerIndexError,
)

HASH_SUITE_ID = "sha512-xmd+mcl-map/v1"
CONTEXT_TAG = b"CLRING/context/v1"


class VacuousAnonymityWarning(UserWarning):
    """A ring with a single member hides nothing about its signer."""


@dataclass(frozen=True)
class SystemParams:
    group: PairingGroup
    P1: G1Element
    P2: G2Element
    g: GTElement
    P0: G2Element
    hash_suite_id: str = HASH_SUITE_ID

    def __post_init__(self):
        if self.P1.is_identity() or self.P2.is_identity() or self.P0.is_identity():
            raise InvalidElementError("generator and master public key must not be the identity")

    @property
    def curve_id(self) -> int:
        return self.group.curve_id


@dataclass(frozen=True)
class MasterKey:
    kappa: int

    def __post_init__(self):
        check_nonzero_scalar(self.kappa)

    def __repr__(self):
        return "MasterKey(<hidden>)"


@dataclass(frozen=True)
class PartialPrivateKey:
    D: G1Element

    def __repr__(self):
        return "PartialPrivateKey(<hidden>)"


@dataclass(frozen=True)
class SecretValue:
    x: int

    def __post_init__(self):
        check_nonzero_scalar(self.x)

    def __repr__(self):
        return "SecretValue(<hidden>)"


@dataclass(frozen=True)
class PrivateKey:
    x: SecretValue
    D: PartialPrivateKey

    def __post_init__(self):
        if not isinstance(self.x, SecretValue) or not isinstance(self.D, PartialPrivateKey):
            raise TypeError("PrivateKey needs a SecretValue and a PartialPrivateKey")


@dataclass(frozen=True)
class PublicKey:
    point: G2Element

    def __post_init__(self):
        if not isinstance(self.point, G2Element) or self.point.is_identity():
            raise InvalidElementError("public key must be a non-identity G2 point")


@dataclass(frozen=True)
class Ring:
    """Ordered identities and their aligned public keys."""

    identities: tuple[bytes, ...]
    public_keys: tuple[PublicKey, ...]

    def __post_init__(self):
        ids = tuple(bytes(i) for i in self.identities)
        pks = tuple(self.public_keys)
        object.__setattr__(self, "identities", ids)
        object.__setattr__(self, "public_keys", pks)
        if len(ids) != len(pks):
            raise RingError("ring has %d identities but %d public keys" % (len(ids), len(pks)))
        if not ids:
            raise RingError("ring must have at least one member")
        if any(len(i) == 0 for i in ids):
            raise RingError("identities must be nonempty")
        if len(set(ids)) != len(ids):
            raise RingError("duplicate identity in ring")
        if not all(isinstance(pk, PublicKey) for pk in pks):
            raise RingError("public keys must be PublicKey instances")
        if len(ids) == 1:
            warnings.warn("single-member ring: signer anonymity is vacuous",
                          VacuousAnonymityWarning, stacklevel=3)

    def __len__(self):
        return len(self.identities)

    @property
    def members(self) -> list[tuple[bytes, PublicKey]]:
        return list(zip(self.identities, self.public_keys))


@dataclass(frozen=True)
class RingSignature:
    y: tuple[GTElement, ...]
    V: G1Element

    def __post_init__(self):
        y = tuple(self.y)
        object.__setattr__(self, "y", y)
        if not y:
            raise MalformedInputError("signature carries no y values")
        if not all(isinstance(v, GTElement) for v in y) or not isinstance(self.V, G1Element):
            raise MalformedInputError("signature components have the wrong types")
        if any(v.is_one() for v in y):
            raise MalformedInputError("signature contains the GT identity")
        if len(set(y)) != len(y):
            raise MalformedInputError("signature y values are not pairwise distinct")

    def __len__(self):
        return len(self.y)


def setup(security_level: int = 128, rng: RandomSource | None = None) -> tuple[SystemParams, MasterKey]:
    """Generate system parameters and the KGC master key."""
    group = group_for_security(security_level)
    rng = rng or make_rng()
    kappa = group.random_scalar(rng)
    P0 = group.g1_mul(kappa, group.P2)
    g = group.pair(group.P1, group.P2)
    return SystemParams(group, group.P1, group.P2, g, P0), MasterKey(kappa)


def identity_point(params: SystemParams, identity: bytes) -> G1Element:
    """``Q_ID = H1(ID)``."""
    return params.group.hash_to_g1(H1_TAG, identity)


def extract_partial_private_key(params: SystemParams, master: MasterKey,
                                identity: bytes) -> PartialPrivateKey:
    if not identity:
        raise RingError("identity must be nonempty")
    Q = identity_point(params, identity)
    return PartialPrivateKey(params.group.g1_mul(master.kappa, Q))


def partial_key_is_valid(params: SystemParams, identity: bytes, D: PartialPrivateKey) -> bool:
    """Public check ``e(D, P) = e(Q_ID, P0)``; uncounted."""
    Q = params.group.hash_to_g1(H1_TAG, identity)
    return raw_pairing(D.D, params.P2) == raw_pairing(Q, params.P0)


def set_secret_value(params: SystemParams, rng: RandomSource | None = None) -> SecretValue:
    return SecretValue(params.group.random_scalar(rng or make_rng()))


def set_private_key(x: SecretValue, D: PartialPrivateKey) -> PrivateKey:
    return PrivateKey(x, D)


def set_public_key(params: SystemParams, x: SecretValue) -> PublicKey:
    if not isinstance(x, SecretValue):
        raise InvalidElementError("expected a SecretValue")
    return PublicKey(params.group.g1_mul(x.x, params.P2))


def _u32(n: int) -> bytes:
    return struct.pack(">I", n)


def encode_context(message: bytes, ring: Ring) -> bytes:
    """Injective transcript encoding of ``(M, L_ID, L_PK)`` used as hash input.

    Layout: tag, u64 message length, message, u32 ring size, each identity
    as u32 length plus bytes, then each public key in fixed-width form.
    """
    if not isinstance(ring, Ring):
        raise RingError("expected a Ring")
    message = bytes(message)
    parts = [CONTEXT_TAG, struct.pack(">Q", len(message)), message, _u32(len(ring))]
    for ident in ring.identities:
        parts += [_u32(len(ident)), ident]
    parts += [pk.point.to_bytes() for pk in ring.public_keys]
    return b"".join(parts)


ScalarHash = Callable[[bytes], int]


def _h2(h2: ScalarHash, context: bytes, y: GTElement) -> int:
    # y has a fixed-width encoding, so suffixing keeps the input injective
    return h2(context + y.to_bytes())


def _sum(points, zero):
    return reduce(lambda a, b: a + b, points, zero)


def _sign(params: SystemParams, message: bytes, ring: Ring, s: int, x: int,
          D: G1Element, rng: RandomSource) -> RingSignature:
    """Signing steps 1-6 with no key-consistency check.

    Scalar multiplications: (n-1) for sum h_i Q_i, (n-1) for sum h_i P_i, then
    (sum r_i) P, x_s U, h_s D_s and h_s (x_s U).  Together with the key check
    in :func:`ring_sign` that is 2n+3.
    """
    grp = params.group
    n = len(ring)
    context = encode_context(message, ring)
    Q = [identity_point(params, ident) for ident in ring.identities]
    U = grp.hash_to_g1(H3_TAG, context)
    pks = [pk.point for pk in ring.public_keys]

    r = [0] * n
    y: list[GTElement | None] = [None] * n
    h = [0] * n
    for i in range(n):
        if i == s:
            continue
        r[i] = grp.random_scalar(rng)
        y[i] = grp.gt_exp(params.g, r[i])
        h[i] = _h2(grp.hash_to_scalar, context, y[i])

    others = [i for i in range(n) if i != s]
    sum_hQ = _sum((grp.g1_mul(h[i], Q[i]) for i in others), G1Element.identity())
    sum_hP = _sum((grp.g1_mul(h[i], pks[i]) for i in others), G2Element.identity())
    # e(-P0, sum h_i Q_i) e(-U, sum h_i P_i) does not depend on r_s, so a redo
    # of step 3 only redraws r_s
    blind = grp.pair(sum_hQ, -params.P0) * grp.pair(U, -sum_hP)
    taken = {y[i] for i in others}
    while True:
        r[s] = grp.random_scalar(rng)
        y_s = grp.gt_exp(params.g, r[s]) * blind
        if not y_s.is_one() and y_s not in taken:
            break
    y[s] = y_s
    h_s = _h2(grp.hash_to_scalar, context, y_s)

    xU = grp.g1_mul(x, U)
    V = grp.g1_mul(sum(r) % ORDER, params.P1) + grp.g1_mul(h_s, D) + grp.g1_mul(h_s, xU)
    return RingSignature(tuple(y), V)


def ring_sign(params: SystemParams, message: bytes, ring: Ring, signer: int,
              key: PrivateKey, rng: RandomSource | None = None) -> RingSignature:
    """Sign ``message`` on behalf of ``ring`` as member ``signer`` (0-based).

    Raises :class:`KeyMismatchError` when ``x_s P`` differs from the ring's
    public key at ``signer``.  The partial key is not checked here, because
    doing so costs two pairings; use :func:`partial_key_is_valid`.
    """
    if not isinstance(ring, Ring):
        raise RingError("expected a Ring")
    if not isinstance(signer, int) or not 0 <= signer < len(ring):
        raise SignerIndexError("signer index %r outside ring of size %d" % (signer, len(ring)))
    if not isinstance(key, PrivateKey):
        raise KeyMismatchError("expected a PrivateKey")
    if params.group.g1_mul(key.x.x, params.P2) != ring.public_keys[signer].point:
        raise KeyMismatchError("secret value does not match the ring's public key at index %d" % signer)
    return _sign(params, message, ring, signer, key.x.x, key.D.D, rng or make_rng())


def _check_shapes(ring: Ring, sig: RingSignature) -> None:
    if not isinstance(ring, Ring):
        raise MalformedInputError("expected a Ring")
    if not isinstance(sig, RingSignature):
        raise MalformedInputError("expected a RingSignature")
    if len(sig.y) != len(ring):
        raise LengthMismatchError("signature has %d y values for a ring of %d" % (len(sig.y), len(ring)))


def _verify(params: SystemParams, message: bytes, ring: Ring, sig: RingSignature,
            h2: ScalarHash) -> bool:
    _check_shapes(ring, sig)
    grp = params.group
    context = encode_context(message, ring)
    Q = [identity_point(params, ident) for ident in ring.identities]
    U = grp.hash_to_g1(H3_TAG, context)
    h = [_h2(h2, context, y) for y in sig.y]
    sum_hQ = _sum((grp.g1_mul(hi, Qi) for hi, Qi in zip(h, Q)), G1Element.identity())
    sum_hP = _sum((grp.g1_mul(hi, pk.point) for hi, pk in zip(h, ring.public_keys)),
                  G2Element.identity())
    lhs = grp.pair(sig.V, params.P2)
    rhs = reduce(lambda a, b: a * b, sig.y) * grp.pair(sum_hQ, params.P0) * grp.pair(U, sum_hP)
    return lhs == rhs


def verify(params: SystemParams, message: bytes, ring: Ring, sig: RingSignature) -> bool:
    """True iff ``sig`` satisfies the verification equation.

    Returns False for a signature that simply fails the equation; raises
    :class:`MalformedInputError` (or :class:`LengthMismatchError`) for data
    that cannot be a signature over ``ring`` at all.
    """
    return _verify(params, message, ring, sig, params.group.hash_to_scalar)


def anonymity_identity_check(params: SystemParams, message: bytes, ring: Ring,
                             sig: RingSignature, j: int, *, require_valid: bool = True) -> bool:
    """Run the candidate signer-identification test against member ``j``.

    Computes ``(e(V,P) / (prod y_i * e(sum_{i!=j} h_i Q_i, P0) *
    e(U, sum_{i!=j} h_i P_i)))^(1/h_j)`` and compares it to
    ``e(Q_j, P0) e(U, P_j)``.  On any valid signature this holds for every
    ``j``, so the test cannot single out the signer.
    """
    _check_shapes(ring, sig)
    if not 0 <= j < len(ring):
        raise SignerIndexError("index %r outside ring of size %d" % (j, len(ring)))
    if require_valid and not verify(params, message, ring, sig):
        raise InvalidSignatureError("anonymity check needs a valid signature")
    grp = params.group
    context = encode_context(message, ring)
    Q = [identity_point(params, ident) for ident in ring.identities]
    U = grp.hash_to_g1(H3_TAG, context)
    h = [_h2(grp.hash_to_scalar, context, y) for y in sig.y]
    others = [i for i in range(len(ring)) if i != j]
    sum_hQ = _sum((grp.g1_mul(h[i], Q[i]) for i in others), G1Element.identity())
    sum_hP = _sum((grp.g1_mul(h[i], ring.public_keys[i].point) for i in others),
                  G2Element.identity())
    denom = reduce(lambda a, b: a * b, sig.y) * grp.pair(sum_hQ, params.P0) * grp.pair(U, sum_hP)
    candidate = grp.gt_exp(grp.pair(sig.V, params.P2) / denom, pow(h[j], -1, ORDER))
    expected = grp.pair(Q[j], params.P0) * grp.pair(U, ring.public_keys[j].point)
    return candidate == expected


def anonymity_evidence(params: SystemParams, message: bytes, ring: Ring,
                       sig: RingSignature) -> list[bool]:
    """Outcome of :func:`anonymity_identity_check` for every ring member."""
    if not verify(params, message, ring, sig):
        raise InvalidSignatureError("anonymity check needs a valid signature")
    return [anonymity_identity_check(params, message, ring, sig, j, require_valid=False)
            for j in range(len(ring))]


@dataclass
class KeyBundle:
    """All key material of one user, convenient for tests and demos."""

    identity: bytes
    secret: SecretValue
    partial: PartialPrivateKey
    public: PublicKey
    private: PrivateKey = field(init=False)

    def __post_init__(self):
        self.private = set_private_key(self.secret, self.partial)


def enroll(params: SystemParams, master: MasterKey, identity: bytes,
           rng: RandomSource | None = None) -> KeyBundle:
    """Run extraction and the three user-side key algorithms for ``identity``."""
    x = set_secret_value(params, rng)
    return KeyBundle(identity, x, extract_partial_private_key(params, master, identity),
                     set_public_key(params, x))


def make_ring(bundles: Sequence[KeyBundle]) -> Ring:
    return Ring(tuple(b.identity for b in bundles), tuple(b.public for b in bundles))


