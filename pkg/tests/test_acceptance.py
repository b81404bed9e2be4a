"""Exit criteria.  Each test records one PASS/FAIL line, shown in the pytest
terminal summary under "acceptance criteria"."""
import hashlib
import os
import random
import time
import warnings

import pytest
from scipy import stats

from clring import codec
from clring.backend import make_rng
from clring.bench import expected_counts
from clring.errors import CodecError, LengthMismatchError
from clring.harness import (
    GenericCLRing,
    ProgrammableOracle,
    oracle_verify,
    simulate_ring_sign_query,
    structural_invariants_hold,
    type1_attack,
)
from clring.scheme import (
    Ring,
    RingSignature,
    VacuousAnonymityWarning,
    anonymity_identity_check,
    enroll,
    make_ring,
    ring_sign,
    verify,
)

from conftest import ACCEPTANCE_LINES

FIVE_SIGMA = stats.norm.sf(5)


def record(number, ok, detail):
    status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
    line = "criterion %d: %s  %s" % (number, status, detail)
    ACCEPTANCE_LINES.append(line)
    print(line)


def fresh_ring(params, master, n, rng, tag):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", VacuousAnonymityWarning)
        bundles = [enroll(params, master, b"%s-%d" % (tag, k), rng) for k in range(n)]
        return bundles, make_ring(bundles)


def test_1_completeness(params, master):
    rng = make_rng(101)
    trials = accepted = 0
    t0 = time.perf_counter()
    for n in (1, 2, 3, 5, 8):
        for s in range(n):
            for t in range(50):
                bundles, ring = fresh_ring(params, master, n, rng, b"c1-%d-%d-%d" % (n, s, t))
                msg = rng.randbytes(rng.randrange(0, 64))
                sig = ring_sign(params, msg, ring, s, bundles[s].private, rng)
                trials += 1
                accepted += verify(params, msg, ring, sig)
    elapsed = time.perf_counter() - t0
    ok = accepted == trials and elapsed < 60
    record(1, ok, "%d/%d signatures verified in %.1f s (limit 60 s)" % (accepted, trials, elapsed))
    assert accepted == trials
    assert elapsed < 60


def test_2_operation_counts(params, master):
    rng = make_rng(102)
    grp = params.group
    mismatches = []
    pairing_totals = set()
    for n in (1, 2, 5, 10):
        bundles, ring = fresh_ring(params, master, n, rng, b"c2-%d" % n)
        for s in range(n):
            with grp.counting() as signing:
                sig = ring_sign(params, b"table", ring, s, bundles[s].private, rng)
            with grp.counting() as checking:
                assert verify(params, b"table", ring, sig)
            total = signing + checking
            for phase, got in (("sign", signing), ("verify", checking), ("total", total)):
                if got.as_tuple() != expected_counts(phase, n):
                    mismatches.append((n, s, phase, got.as_tuple()))
            pairing_totals.add((signing.pairings, checking.pairings))
    ok = not mismatches and pairing_totals == {(2, 3)}
    record(2, ok, "exact efficiency-table counts for n in {1,2,5,10}; pairings per (sign, verify) = %s"
           % sorted(pairing_totals))
    assert not mismatches
    assert pairing_totals == {(2, 3)}


def _bucket(y):
    return hashlib.sha256(y.to_bytes()).digest()[0] % 8


def test_3_anonymity(params, master):
    rng = make_rng(103)
    failures = 0
    for k in range(100):
        n = 2 + k % 5
        bundles, ring = fresh_ring(params, master, n, rng, b"c3-%d" % k)
        s = rng.randrange(n)
        msg = b"anon %d" % k
        sig = ring_sign(params, msg, ring, s, bundles[s].private, rng)
        failures += sum(not anonymity_identity_check(params, msg, ring, sig, j) for j in range(n))

    n = 3
    bundles, ring = fresh_ring(params, master, n, rng, b"c3-hist")
    msg = b"fixed message"
    hist = {s: [[0] * 8 for _ in range(n)] for s in (0, 2)}
    for s in (0, 2):
        for _ in range(500):
            sig = ring_sign(params, msg, ring, s, bundles[s].private, rng)
            for i, y in enumerate(sig.y):
                hist[s][i][_bucket(y)] += 1
    pvalues = [stats.chi2_contingency([hist[0][i], hist[2][i]])[1] for i in range(n)]
    ok = failures == 0 and min(pvalues) > FIVE_SIGMA
    record(3, ok, "identity check held for every member of 100 signatures (%d failures); "
           "min chi-square p = %.3g (5-sigma bound %.3g)" % (failures, min(pvalues), FIVE_SIGMA))
    assert failures == 0
    assert min(pvalues) > FIVE_SIGMA


def test_4_tamper_suite(params, master):
    rng = make_rng(104)
    rejected = {}
    total = {}

    def tally(name, was_rejected):
        total[name] = total.get(name, 0) + 1
        rejected[name] = rejected.get(name, 0) + bool(was_rejected)

    def rejects(msg, ring, sig):
        try:
            return not verify(params, msg, ring, sig)
        except LengthMismatchError:
            return True

    for k in range(50):
        n = 2 + k % 4
        bundles, ring = fresh_ring(params, master, n, rng, b"c4-%d" % k)
        s = rng.randrange(n)
        msg = rng.randbytes(16)
        sig = ring_sign(params, msg, ring, s, bundles[s].private, rng)
        assert verify(params, msg, ring, sig)

        bit = rng.randrange(len(msg) * 8)
        flipped = bytearray(msg)
        flipped[bit // 8] ^= 1 << (bit % 8)
        tally("flipped message bit", rejects(bytes(flipped), ring, sig))

        perm = list(range(n))
        while perm == list(range(n)):
            rng.shuffle(perm)
        swapped = Ring(tuple(ring.identities[p] for p in perm),
                       tuple(ring.public_keys[p] for p in perm))
        tally("swapped ring order", rejects(msg, swapped, sig))

        extra, _ = fresh_ring(params, master, 1, rng, b"c4-extra-%d" % k)
        bigger = Ring(ring.identities + (extra[0].identity,), ring.public_keys + (extra[0].public,))
        tally("added member", rejects(msg, bigger, sig))
        tally("added member (padded y)",
              rejects(msg, bigger, RingSignature(sig.y + (params.group.gt_exp(params.g, k + 2),), sig.V)))

        smaller = Ring(ring.identities[:-1], ring.public_keys[:-1])
        tally("removed member", rejects(msg, smaller, sig))
        tally("removed member (trimmed y)", rejects(msg, smaller, RingSignature(sig.y[:-1], sig.V)))

        tally("perturbed V", rejects(msg, ring, RingSignature(sig.y, sig.V + params.P1)))

        for i in range(n):
            ys = list(sig.y)
            ys[i] = ys[i] * params.g
            tally("perturbed y_i", rejects(msg, ring, RingSignature(tuple(ys), sig.V)))

        _, other = fresh_ring(params, master, n, rng, b"c4-other-%d" % k)
        tally("replayed against another ring", rejects(msg, other, sig))

    ok = all(rejected[c] == total[c] for c in total)
    detail = ", ".join("%s %d/%d" % (c, rejected[c], total[c]) for c in total)
    record(4, ok, "rejections: " + detail)
    assert ok


def test_5_type1_attack():
    rng = make_rng(105)
    composite, kgc_master = GenericCLRing.create(rng)
    forged = controls_failed = clean = 0
    runs = 100
    for _ in range(runs):
        n = rng.randrange(2, 7)
        i, j = rng.sample(range(n), 2)
        msg = rng.randbytes(rng.randrange(1, 40))
        res = type1_attack(composite, kgc_master, n, i, j, rng=rng, message=msg)
        k = res.adversary_knowledge
        forged += res.verified
        controls_failed += res.control_verified is False
        clean += (not k.full_private_key_slots() and k.signing_queries == 0
                  and k.private_key_queries == 0 and set(k.secret_values) == {i}
                  and set(k.partial_keys) == {j})
    ok = forged == runs and controls_failed == runs and clean == runs
    record(5, ok, "generic forgeries verified %d/%d, knowledge clean %d/%d, "
           "concrete-scheme controls rejected %d/%d" % (forged, runs, clean, runs, controls_failed, runs))
    assert ok


def test_6_oracle_simulation(params, master):
    rng = make_rng(106)
    oracle = ProgrammableOracle(params)
    programmed = real = structural = 0
    runs = 100
    for k in range(runs):
        n = 2 + k % 5
        _, ring = fresh_ring(params, master, n, rng, b"c6-%d" % k)
        msg = b"simulated %d" % k
        sig = simulate_ring_sign_query(params, oracle, msg, ring, rng)
        programmed += oracle_verify(params, oracle, msg, ring, sig)
        real += verify(params, msg, ring, sig)
        structural += structural_invariants_hold(sig, ring)
    ok = programmed == runs and real == 0 and structural == runs
    record(6, ok, "%d/%d verify under the programmed oracle, %d/%d under the real hash"
           % (programmed, runs, real, runs))
    assert ok


def test_7_reduction_bounds_not_reproducible():
    # The reductions' time/probability bounds and the advantage threshold are
    # analytic statements about a rewinding extractor; criteria 5 and 6 cover
    # the constructive parts (the forgery and the key-free signing simulation).
    record(7, "N/A", "documented: reduction bounds not desk-reproducible; "
           "substituted by criteria 5 and 6")


def test_8_codec_fuzzing(params, master):
    rng = random.Random(108)
    crashes = accepted_random = 0
    untyped = []

    def attempt(data):
        nonlocal crashes
        try:
            obj = codec.decode(data)
        except CodecError:
            return False
        except Exception as exc:  # noqa: BLE001
            crashes += 1
            untyped.append(type(exc).__name__)
            return False
        assert codec.encode(obj) == data
        return True

    for _ in range(60_000):
        accepted_random += attempt(rng.randbytes(rng.randrange(0, 256)))
    # random payloads behind a well-formed header reach the per-kind parsers
    for _ in range(40_000):
        kind = rng.randrange(0, 10)
        data = b"CLRS\x01" + bytes([kind]) + b"\x00\x01" + rng.randbytes(rng.randrange(0, 160))
        attempt(data)

    roundtrip_ok = 0
    kinds = 0
    r2 = make_rng(1080)
    from clring.scheme import setup

    for _ in range(100):
        p, m = setup(rng=r2)
        bundles, ring = fresh_ring(p, m, 3, r2, b"c8-%d" % r2.randrange(1 << 30))
        b = bundles[0]
        sig = ring_sign(p, b"fuzz", ring, 0, b.private, r2)
        objs = [p, m, b.partial, b.secret, b.private, b.public, ring, sig]
        kinds = len(objs)
        roundtrip_ok += all(codec.decode(codec.encode(o)) == o for o in objs)
    ok = crashes == 0 and accepted_random == 0 and roundtrip_ok == 100
    record(8, ok, "100000 fuzzed inputs: %d crashes, %d random strings accepted; "
           "round-trip identity %d/100 for all %d kinds" % (crashes, accepted_random, roundtrip_ok, kinds))
    assert crashes == 0, untyped[:5]
    assert accepted_random == 0
    assert roundtrip_ok == 100
