"""Generic CL-Ring construction, its Type-I key-replacement forgery, and the
programmable-oracle simulation of ring-signing queries.

The component schemes are restrictions of the concrete scheme in
:mod:`clring.scheme`: the PK ring scheme keeps only the ``x``/``U``/``P_i``
terms, the identity-based one keeps only the ``D``/``Q_i``/``P0`` terms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Protocol, Sequence

from . import codec
from .backend import H3_TAG, ORDER, G1Element, G2Element, GTElement, RandomSource, make_rng
from .errors import (
    KeyMismatchError,
    MalformedInputError,
    OracleCollisionError,
    PreconditionError,
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
    _check_shapes,
    _h2,
    _sign,
    _sum,
    _verify,
    encode_context,
    extract_partial_private_key,
    identity_point,
    set_public_key,
    set_secret_value,
    setup,
    verify,
)

PK_CONTEXT_TAG = b"CLRING/pk-ring-context/v1"
ID_CONTEXT_TAG = b"CLRING/id-ring-context/v1"


def _prod(values):
    return reduce(lambda a, b: a * b, values)


class PkRingScheme(Protocol):
    def gen_pk(self, rng=None) -> tuple[PublicKey, SecretValue]: ...
    def ring_sign_pk(self, sk: SecretValue, pk_list: Sequence[PublicKey], msg: bytes, rng=None) -> RingSignature: ...
    def ver_pk(self, sig: RingSignature, pk_list: Sequence[PublicKey], msg: bytes) -> bool: ...


class IdRingScheme(Protocol):
    def gen_id(self, rng=None) -> tuple[MasterKey, SystemParams]: ...
    def kgen_id(self, master: MasterKey, identity: bytes) -> PartialPrivateKey: ...
    def ring_sign_id(self, D: PartialPrivateKey, id_list: Sequence[bytes], msg: bytes, rng=None) -> RingSignature: ...
    def ver_id(self, sig: RingSignature, id_list: Sequence[bytes], msg: bytes) -> bool: ...


def _ring_blind_sign(params, s, n, context, rng, blind_of, finish):
    """Shared Schnorr-ring skeleton of both restricted schemes.

    ``blind_of(h)`` returns the GT factor that makes slot ``s`` close the
    ring given the other members' challenges; ``finish(h_s)`` returns the
    signer's contribution to ``V``.
    """
    grp = params.group
    r = [0] * n
    y = [None] * n
    h = [0] * n
    for i in range(n):
        if i != s:
            r[i] = grp.random_scalar(rng)
            y[i] = grp.gt_exp(params.g, r[i])
            h[i] = _h2(grp.hash_to_scalar, context, y[i])
    blind = blind_of(h)
    taken = {y[i] for i in range(n) if i != s}
    while True:
        r[s] = grp.random_scalar(rng)
        y_s = grp.gt_exp(params.g, r[s]) * blind
        if not y_s.is_one() and y_s not in taken:
            break
    y[s] = y_s
    h_s = _h2(grp.hash_to_scalar, context, y_s)
    V = grp.g1_mul(sum(r) % ORDER, params.P1) + finish(h_s)
    return RingSignature(tuple(y), V)


class RestrictedPkRing:
    """Public-key ring signatures: ``e(V,P) = prod y_i * e(U, sum h_i P_i)``."""

    def __init__(self, params: SystemParams):
        self.params = params

    def _context(self, pk_list, msg):
        pks = b"".join(pk.point.to_bytes() for pk in pk_list)
        return PK_CONTEXT_TAG + codec.length_prefixed(bytes(msg), pks)

    def gen_pk(self, rng=None):
        x = set_secret_value(self.params, rng)
        return set_public_key(self.params, x), x

    def ring_sign_pk(self, sk, pk_list, msg, rng=None):
        p, grp = self.params, self.params.group
        pk_list = list(pk_list)
        mine = grp.g1_mul(sk.x, p.P2)
        try:
            s = [pk.point for pk in pk_list].index(mine)
        except ValueError:
            raise KeyMismatchError("secret value matches no key in the list") from None
        context = self._context(pk_list, msg)
        U = grp.hash_to_g1(H3_TAG, context)

        def blind_of(h):
            acc = _sum((grp.g1_mul(h[i], pk.point) for i, pk in enumerate(pk_list) if i != s),
                       G2Element.identity())
            return grp.pair(U, -acc)

        return _ring_blind_sign(p, s, len(pk_list), context, rng or make_rng(), blind_of,
                                lambda h_s: grp.g1_mul(h_s * sk.x % ORDER, U))

    def ver_pk(self, sig, pk_list, msg):
        p, grp = self.params, self.params.group
        pk_list = list(pk_list)
        if len(sig.y) != len(pk_list):
            return False
        context = self._context(pk_list, msg)
        U = grp.hash_to_g1(H3_TAG, context)
        h = [_h2(grp.hash_to_scalar, context, y) for y in sig.y]
        acc = _sum((grp.g1_mul(hi, pk.point) for hi, pk in zip(h, pk_list)), G2Element.identity())
        return grp.pair(sig.V, p.P2) == _prod(sig.y) * grp.pair(U, acc)


class RestrictedIdRing:
    """Identity-based ring signatures: ``e(V,P) = prod y_i * e(sum h_i Q_i, P0)``."""

    def __init__(self, params: SystemParams | None = None, master: MasterKey | None = None):
        self.params = params
        self.master = master

    def _context(self, id_list, msg):
        return ID_CONTEXT_TAG + codec.length_prefixed(bytes(msg), *id_list)

    def gen_id(self, rng=None):
        self.params, self.master = setup(rng=rng)
        return self.master, self.params

    def kgen_id(self, master, identity):
        return extract_partial_private_key(self.params, master, identity)

    def _locate(self, D, Q):
        # the signer's slot is the one whose Q satisfies e(D, P) = e(Q, P0)
        grp = self.params.group
        lhs = grp.pair(D.D, self.params.P2)
        for i, Qi in enumerate(Q):
            if grp.pair(Qi, self.params.P0) == lhs:
                return i
        raise KeyMismatchError("partial key matches no identity in the list")

    def ring_sign_id(self, D, id_list, msg, rng=None, index: int | None = None):
        p, grp = self.params, self.params.group
        id_list = [bytes(i) for i in id_list]
        Q = [identity_point(p, i) for i in id_list]
        s = self._locate(D, Q) if index is None else index
        context = self._context(id_list, msg)

        def blind_of(h):
            acc = _sum((grp.g1_mul(h[i], Q[i]) for i in range(len(Q)) if i != s),
                       G1Element.identity())
            return grp.pair(acc, -p.P0)

        return _ring_blind_sign(p, s, len(id_list), context, rng or make_rng(), blind_of,
                                lambda h_s: grp.g1_mul(h_s, D.D))

    def ver_id(self, sig, id_list, msg):
        p, grp = self.params, self.params.group
        id_list = [bytes(i) for i in id_list]
        if len(sig.y) != len(id_list):
            return False
        context = self._context(id_list, msg)
        h = [_h2(grp.hash_to_scalar, context, y) for y in sig.y]
        acc = _sum((grp.g1_mul(hi, identity_point(p, i)) for hi, i in zip(h, id_list)),
                   G1Element.identity())
        return grp.pair(sig.V, p.P2) == _prod(sig.y) * grp.pair(acc, p.P0)


def pk_ring_instance(params: SystemParams) -> RestrictedPkRing:
    return RestrictedPkRing(params)


def id_ring_instance(params: SystemParams, master: MasterKey | None = None) -> RestrictedIdRing:
    return RestrictedIdRing(params, master)


@dataclass(frozen=True)
class CompositeSignature:
    pk_part: RingSignature
    id_part: RingSignature


@dataclass
class GenericCLRing:
    """CL-Ring assembled from a PK ring scheme and an ID ring scheme."""

    pk_scheme: PkRingScheme
    id_scheme: IdRingScheme
    params: SystemParams

    @classmethod
    def create(cls, rng: RandomSource | None = None) -> tuple["GenericCLRing", MasterKey]:
        ids = RestrictedIdRing()
        master, params = ids.gen_id(rng)
        return cls(RestrictedPkRing(params), ids, params), master

    def frame(self, msg: bytes, ring: Ring, sigma_pk: RingSignature | None = None) -> bytes:
        """``M' = M || param || L_ID || L_PK``, plus ``|| sigma_PK`` for ``M''``."""
        fields = [bytes(msg), codec.encode(self.params),
                  codec.length_prefixed(*ring.identities),
                  b"".join(pk.point.to_bytes() for pk in ring.public_keys)]
        if sigma_pk is not None:
            fields.append(codec.encode(sigma_pk))
        return codec.length_prefixed(*fields)


def generic_ring_sign(composite: GenericCLRing, key: PrivateKey, ring: Ring, msg: bytes,
                      rng: RandomSource | None = None) -> CompositeSignature:
    """Honest signing: both halves of ``key`` must belong to the same member."""
    p, grp = composite.params, composite.params.group
    mine = grp.g1_mul(key.x.x, p.P2)
    slots = [i for i, pk in enumerate(ring.public_keys) if pk.point == mine]
    if not slots:
        raise KeyMismatchError("secret value matches no ring member")
    Q_s = identity_point(p, ring.identities[slots[0]])
    if grp.pair(key.D.D, p.P2) != grp.pair(Q_s, p.P0):
        raise KeyMismatchError("partial key and secret value belong to different members")
    rng = rng or make_rng()
    m1 = composite.frame(msg, ring)
    sigma_pk = composite.pk_scheme.ring_sign_pk(key.x, ring.public_keys, m1, rng)
    m2 = composite.frame(msg, ring, sigma_pk)
    sigma_id = composite.id_scheme.ring_sign_id(key.D, ring.identities, m2, rng)
    return CompositeSignature(sigma_pk, sigma_id)


def generic_verify(composite: GenericCLRing, ring: Ring, msg: bytes, sig: CompositeSignature) -> bool:
    if not isinstance(sig, CompositeSignature) or not isinstance(sig.pk_part, RingSignature) \
            or not isinstance(sig.id_part, RingSignature):
        raise MalformedInputError("expected a CompositeSignature of two RingSignatures")
    m1 = composite.frame(msg, ring)
    if not composite.pk_scheme.ver_pk(sig.pk_part, ring.public_keys, m1):
        return False
    m2 = composite.frame(msg, ring, sig.pk_part)
    return composite.id_scheme.ver_id(sig.id_part, ring.identities, m2)


@dataclass
class Challenger:
    """Game-1 challenger answering the adversary's queries, with a query log."""

    params: SystemParams
    master: MasterKey
    rng: RandomSource
    _secrets: dict = field(default_factory=dict, repr=False)
    public_key_queries: list = field(default_factory=list)
    partial_key_queries: list = field(default_factory=list)
    private_key_queries: list = field(default_factory=list)
    signing_queries: list = field(default_factory=list)

    def public_key(self, identity: bytes) -> PublicKey:
        self.public_key_queries.append(identity)
        if identity not in self._secrets:
            self._secrets[identity] = set_secret_value(self.params, self.rng)
        return set_public_key(self.params, self._secrets[identity])

    def partial_private_key(self, identity: bytes) -> PartialPrivateKey:
        self.partial_key_queries.append(identity)
        return extract_partial_private_key(self.params, self.master, identity)


@dataclass(frozen=True)
class AdversaryKnowledge:
    """Secrets the adversary held when producing its forgery, by ring slot."""

    secret_values: dict[int, SecretValue]
    partial_keys: dict[int, PartialPrivateKey]
    private_key_queries: int = 0
    signing_queries: int = 0

    def __post_init__(self):
        if self.full_private_key_slots():
            raise PreconditionError("adversary holds a complete private key")

    def full_private_key_slots(self) -> set[int]:
        return set(self.secret_values) & set(self.partial_keys)

    def to_dict(self) -> dict:
        return {
            "secret_value_slots": sorted(self.secret_values),
            "partial_key_slots": sorted(self.partial_keys),
            "full_private_key_slots": sorted(self.full_private_key_slots()),
            "private_key_queries": self.private_key_queries,
            "signing_queries": self.signing_queries,
        }


@dataclass(frozen=True)
class AttackResult:
    forged_message: bytes
    forged_ring: Ring
    forged_signature: CompositeSignature
    verified: bool
    adversary_knowledge: AdversaryKnowledge
    replaced_index: int
    partial_key_index: int
    steps: tuple[str, ...] = ()
    control_signature: RingSignature | None = None
    control_verified: bool | None = None

    def to_report(self) -> dict:
        return {
            "attack": "type-I key replacement on the generic construction",
            "ring_size": len(self.forged_ring),
            "replaced_index": self.replaced_index,
            "partial_key_index": self.partial_key_index,
            "message_hex": self.forged_message.hex(),
            "identities": [i.decode("utf-8", "replace") for i in self.forged_ring.identities],
            "steps": list(self.steps),
            "adversary_knowledge": self.adversary_knowledge.to_dict(),
            "generic_forgery_verified": self.verified,
            "concrete_control_verified": self.control_verified,
        }


def type1_attack(composite: GenericCLRing, master: MasterKey, n: int, i: int, j: int, *,
                 rng: RandomSource | None = None, message: bytes | None = None,
                 run_control: bool = True) -> AttackResult:
    """Forge a generic-construction signature from ``x'`` of slot ``i`` and
    ``D`` of slot ``j`` (0-based, ``i != j``), without any signing query.

    ``master`` is held by the challenger only.  With ``run_control`` the same
    two secrets are fed to the concrete scheme's signer, whose output must
    fail verification.
    """
    if n < 2:
        raise PreconditionError("the attack needs a ring of at least two members")
    if not (0 <= i < n and 0 <= j < n):
        raise PreconditionError("indices outside the ring")
    if i == j:
        raise PreconditionError("the partial key must come from a member other than the replaced one")
    rng = rng or make_rng()
    params = composite.params
    challenger = Challenger(params, master, rng)
    steps = []

    tag = rng.randrange(1 << 64)
    ids = tuple(b"id-%016x-%d" % (tag, k) for k in range(n))
    steps.append("chose %d identities" % n)

    pks = [challenger.public_key(ident) for ident in ids]
    steps.append("obtained %d public keys by Public-Key queries" % n)

    x_new = set_secret_value(params, rng)
    pks[i] = set_public_key(params, x_new)
    ring = Ring(ids, tuple(pks))
    steps.append("replaced the public key of slot %d with one of its own" % i)

    D_j = challenger.partial_private_key(ids[j])
    steps.append("obtained the partial private key of slot %d" % j)

    if message is None:
        message = b"forged message %d" % rng.randrange(1 << 32)
    m1 = composite.frame(message, ring)
    sigma_pk = composite.pk_scheme.ring_sign_pk(x_new, ring.public_keys, m1, rng)
    steps.append("signed M' with the PK ring scheme using x' of slot %d" % i)

    m2 = composite.frame(message, ring, sigma_pk)
    sigma_id = composite.id_scheme.ring_sign_id(D_j, ring.identities, m2, rng)
    steps.append("signed M'' with the ID ring scheme using D of slot %d" % j)

    forged = CompositeSignature(sigma_pk, sigma_id)
    steps.append("output the forgery")
    knowledge = AdversaryKnowledge(
        {i: x_new}, {j: D_j},
        private_key_queries=len(challenger.private_key_queries),
        signing_queries=len(challenger.signing_queries),
    )
    ok = generic_verify(composite, ring, message, forged)

    control_sig = control_ok = None
    if run_control:
        control_sig = _sign(params, message, ring, i, x_new.x, D_j.D, rng)
        control_ok = verify(params, message, ring, control_sig)
    return AttackResult(message, ring, forged, ok, knowledge, i, j, tuple(steps),
                        control_sig, control_ok)


class ProgrammableOracle:
    """Random oracle for ``H2`` whose answers a simulator may fix in advance.

    Unprogrammed queries fall back to the real hash and are remembered, so a
    later attempt to program the same point raises
    :class:`OracleCollisionError`.
    """

    def __init__(self, params: SystemParams):
        self.fallback = params.group.hash_to_scalar
        self.table: dict[bytes, int] = {}
        self.collisions = 0

    def __call__(self, data: bytes) -> int:
        data = bytes(data)
        if data not in self.table:
            self.table[data] = self.fallback(data)
        return self.table[data]

    def program(self, data: bytes, value: int) -> None:
        data = bytes(data)
        if data in self.table:
            self.collisions += 1
            raise OracleCollisionError("H2 already defined at this point")
        if not 0 < value < ORDER:
            raise ValueError("programmed value must lie in Z_q^*")
        self.table[data] = value


def oracle_verify(params: SystemParams, oracle: ProgrammableOracle, message: bytes,
                  ring: Ring, sig: RingSignature) -> bool:
    """Verification with every ``H2`` evaluation answered by ``oracle``."""
    return _verify(params, message, ring, sig, oracle)


def simulate_ring_sign_query(params: SystemParams, oracle: ProgrammableOracle, message: bytes,
                             ring: Ring, rng: RandomSource | None = None) -> RingSignature:
    """Answer a ring-signing query with no private key by programming ``H2``.

    1. pick a random slot s;  2. r_i, y_i = g^r_i for i != s;
    3. h_i = H2(ctx || y_i) through the oracle;  4. random h_s and V;
    5. y_s = e(V - sum_{i!=s} r_i P, P) e(sum h_i Q_i, -P0) e(U, -sum h_i P_i),
       back to 4 on y_s = 1, a repeated y, or an already-defined oracle point;
    6. program H2(ctx || y_s) = h_s;  7. return ((y_1..y_n), V).
    """
    rng = rng or make_rng()
    grp = params.group
    n = len(ring)
    s = rng.randrange(n)
    context = encode_context(message, ring)
    Q = [identity_point(params, ident) for ident in ring.identities]
    U = grp.hash_to_g1(H3_TAG, context)

    r = [0] * n
    y: list[GTElement | None] = [None] * n
    h = [0] * n
    for i in range(n):
        if i != s:
            r[i] = grp.random_scalar(rng)
            y[i] = grp.gt_exp(params.g, r[i])
    for i in range(n):
        if i != s:
            h[i] = _h2(oracle, context, y[i])
    r_others = sum(r) % ORDER
    taken = {y[i] for i in range(n) if i != s}

    while True:
        h[s] = grp.random_scalar(rng)
        V = grp.g1_mul(grp.random_scalar(rng), params.P1)
        sum_hQ = _sum((grp.g1_mul(hi, Qi) for hi, Qi in zip(h, Q)), G1Element.identity())
        sum_hP = _sum((grp.g1_mul(hi, pk.point) for hi, pk in zip(h, ring.public_keys)),
                      G2Element.identity())
        y_s = (grp.pair(V - grp.g1_mul(r_others, params.P1), params.P2)
               * grp.pair(sum_hQ, -params.P0) * grp.pair(U, -sum_hP))
        if y_s.is_one() or y_s in taken:
            continue
        try:
            oracle.program(context + y_s.to_bytes(), h[s])
        except OracleCollisionError:
            continue
        break
    y[s] = y_s
    return RingSignature(tuple(y), V)


def structural_invariants_hold(sig: RingSignature, ring: Ring) -> bool:
    """Same shape checks an honest signature passes."""
    try:
        _check_shapes(ring, sig)
        RingSignature(sig.y, sig.V)
    except MalformedInputError:
        return False
    return True
