"""Measured operation counts and timings against the efficiency table."""
from __future__ import annotations

import time
from dataclasses import dataclass

from .backend import OpCounter, RandomSource, make_rng
from .scheme import SystemParams, MasterKey, enroll, make_ring, ring_sign, verify

CATEGORIES = ("pairings", "g1_scalar_muls", "gt_exps", "map_to_point_hashes")


def expected_counts(phase: str, n: int) -> tuple[int, int, int, int]:
    """(pairings, G1 scalar mults, GT exponentiations, MapToPoint hashes)."""
    if phase == "sign":
        return (2, 2 * n + 3, n, n + 1)
    if phase == "verify":
        return (3, 2 * n, 0, n + 1)
    if phase == "total":
        return (5, 4 * n + 3, n, 2 * n + 2)
    raise ValueError("unknown phase %r" % phase)


@dataclass
class BenchRow:
    n: int
    phase: str
    counts: OpCounter
    seconds: float

    @property
    def expected(self) -> tuple[int, int, int, int]:
        return expected_counts(self.phase, self.n)

    @property
    def matches(self) -> bool:
        return self.counts.as_tuple() == self.expected


def run_bench(params: SystemParams, master: MasterKey, sizes, *, repeat: int = 3,
              rng: RandomSource | None = None) -> list[BenchRow]:
    """Count one sign and one verify per ring size; time the median of ``repeat`` runs."""
    rng = rng or make_rng()
    grp = params.group
    rows = []
    for n in sizes:
        bundles = [enroll(params, master, b"bench-member-%d" % k, rng) for k in range(n)]
        ring = make_ring(bundles)
        msg = b"bench message for n=%d" % n
        sign_times, verify_times = [], []
        for _ in range(max(1, repeat)):
            grp.counter_reset()
            t0 = time.perf_counter()
            sig = ring_sign(params, msg, ring, n - 1, bundles[-1].private, rng)
            sign_times.append(time.perf_counter() - t0)
            sign_counts = grp.counter_report()
            grp.counter_reset()
            t0 = time.perf_counter()
            ok = verify(params, msg, ring, sig)
            verify_times.append(time.perf_counter() - t0)
            verify_counts = grp.counter_report()
            if not ok:
                raise RuntimeError("bench signature failed to verify")
        ts, tv = sorted(sign_times)[len(sign_times) // 2], sorted(verify_times)[len(verify_times) // 2]
        rows.append(BenchRow(n, "sign", sign_counts, ts))
        rows.append(BenchRow(n, "verify", verify_counts, tv))
        rows.append(BenchRow(n, "total", sign_counts + verify_counts, ts + tv))
    return rows


def format_rows(rows, sep: str = "\t") -> str:
    header = ["n", "phase"]
    for c in CATEGORIES:
        header += [c, c + "_expected"]
    header += ["match", "wall_ms"]
    lines = [sep.join(header)]
    for row in rows:
        cells = [str(row.n), row.phase]
        for got, want in zip(row.counts.as_tuple(), row.expected):
            cells += [str(got), str(want)]
        cells += ["yes" if row.matches else "NO", "%.3f" % (row.seconds * 1e3)]
        lines.append(sep.join(cells))
    return "\n".join(lines)
