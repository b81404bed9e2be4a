"""Certificateless ring signatures over BLS12-381."""
from .backend import BLS12_381, OpCounter, PairingGroup, make_rng
from .scheme import (
    MasterKey,
    PartialPrivateKey,
    PrivateKey,
    PublicKey,
    Ring,
    RingSignature,
    SecretValue,
    SystemParams,
    anonymity_identity_check,
    encode_context,
    enroll,
    extract_partial_private_key,
    make_ring,
    ring_sign,
    set_private_key,
    set_public_key,
    set_secret_value,
    setup,
    verify,
)

__version__ = "0.1.0"
