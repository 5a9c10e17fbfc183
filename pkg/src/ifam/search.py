"""Exhaustive search for families with the most intersecting s-subfamilies."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations, islice
from math import comb
from typing import Sequence

from .compressions import apply_compression, changes, left_compressions, upset_moves, uvf_family
from .family import (
    SetFamily,
    canonical_members,
    layers,
    serialize_family,
)
from .profile import LimitExceeded, count_intersecting, intersecting_profile

SEARCH_BUDGET = 10**7


@dataclass(frozen=True)
class SearchReport:
    n: int
    N: int
    s: int
    max_count: int
    optima: tuple[SetFamily, ...]
    families_scanned: int
    restriction: str = "none"
    note: str = ""

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "N": self.N,
            "s": self.s,
            "max": str(self.max_count),
            "optima": [serialize_family(F) for F in self.optima],
            "scanned": self.families_scanned,
            "restriction": self.restriction,
        }
        if self.note:
            out["note"] = self.note
        return out


def _is_upset(members: Sequence[int], n: int) -> bool:
    have = set(members)
    for m in members:
        for e in range(n):
            bit = 1 << e
            if not m & bit and m | bit not in have:
                return False
    return True


def _scan_chunk(args) -> tuple[int, dict[int, tuple[int, list[tuple[int, ...]]]]]:
    pool, fixed, k, start, stop, s_list, n, upset_only = args
    best: dict[int, tuple[int, list]] = {s: (-1, []) for s in s_list}
    scanned = 0
    for combo in islice(combinations(pool, k), start, stop):
        members = fixed + combo
        if upset_only and not _is_upset(members, n):
            continue
        scanned += 1
        prof = count_intersecting(members, limit=len(members))
        for s in s_list:
            c = prof[s] if s < len(prof) else 0
            cur, hits = best[s]
            if c > cur:
                best[s] = (c, [members])
            elif c == cur:
                hits.append(members)
    return scanned, best


def _merge(parts) -> tuple[int, dict]:
    total = 0
    merged: dict[int, tuple[int, list]] = {}
    for scanned, best in parts:
        total += scanned
        for s, (c, hits) in best.items():
            cur, acc = merged.get(s, (-1, []))
            if c > cur:
                merged[s] = (c, list(hits))
            elif c == cur:
                merged[s] = (cur, acc + hits)
    return total, merged


def scan_families(
    n: int,
    N: int,
    s_list: Sequence[int],
    restriction: str = "none",
    allow_empty: bool = False,
    budget: int = SEARCH_BUDGET,
    jobs: int = 1,
) -> dict[int, SearchReport]:
    """One pass over the candidate space, scoring every s in ``s_list``.

    ``restriction`` is ``none``, ``upset-only`` or ``layers:R`` (families
    [n]^(>=R+1) + B with B inside [n]^(<=R)).
    """
    lo = 0 if allow_empty else 1
    if restriction.startswith("layers:"):
        R = int(restriction.split(":", 1)[1])
        fixed = tuple(layers(n, R + 1)) if n >= 1 else ()
        pool = tuple(m for m in range(lo, 1 << n) if bin(m).count("1") <= R)
        if len(fixed) > N:
            raise LimitExceeded(f"top layers alone have {len(fixed)} > N={N} sets")
    elif restriction in ("none", "upset-only"):
        fixed = ()
        pool = None
    else:
        raise ValueError(f"unknown restriction {restriction!r}")
    pool_size = len(pool) if pool is not None else (1 << n) - lo
    k = N - len(fixed)
    total = comb(pool_size, k) if k >= 0 else 0
    if total > budget:
        shown = str(total) if total < 10**15 else f"~10^{len(str(total)) - 1}"
        raise LimitExceeded(f"search space C({pool_size},{k}) = {shown} exceeds budget {budget}")
    if pool is None:
        pool = tuple(range(lo, 1 << n))
    if k < 0 or k > len(pool):
        raise LimitExceeded(f"no family of size {N} under restriction {restriction}")

    upset_only = restriction == "upset-only"
    if jobs <= 1 or total < 2000:
        parts = [_scan_chunk((pool, fixed, k, 0, total, tuple(s_list), n, upset_only))]
    else:
        step = -(-total // jobs)
        tasks = [
            (pool, fixed, k, a, min(a + step, total), tuple(s_list), n, upset_only)
            for a in range(0, total, step)
        ]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_scan_chunk, tasks))
    scanned, merged = _merge(parts)

    out = {}
    for s in s_list:
        c, hits = merged.get(s, (-1, []))
        canon = sorted({canonical_members(n, h) for h in hits})
        out[s] = SearchReport(
            n, N, s, max(c, 0), tuple(SetFamily(n, m) for m in canon), scanned, restriction
        )
    return out


def exhaustive_max(
    n: int, N: int, s: int, restriction: str = "none", allow_empty: bool = False,
    budget: int = SEARCH_BUDGET, jobs: int = 1,
) -> SearchReport:
    return scan_families(n, N, [s], restriction, allow_empty, budget, jobs)[s]


def restricted_layer_max(n: int, i: int, s: int, budget: int = SEARCH_BUDGET) -> SearchReport:
    """Best [n]^(>=3) + B over all i-sets B of 2-sets."""
    fixed = tuple(layers(n, 3))
    pool = tuple(layers(n, 2, 2))
    if comb(len(pool), i) > budget:
        raise LimitExceeded(f"C({len(pool)},{i}) choices exceed budget {budget}")
    scanned, best = _scan_chunk((pool, fixed, i, 0, comb(len(pool), i), (s,), n, False))
    c, hits = best[s]
    canon = sorted({canonical_members(n, h) for h in hits})
    note = "exploratory: small n, outside the n >= 21 regime" if n < 21 else ""
    return SearchReport(
        n, len(fixed) + i, s, max(c, 0), tuple(SetFamily(n, m) for m in canon), scanned,
        "layer2", note,
    )


def _dominates(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x >= y for x, y in zip(a, b))


def hillclimb(F: SetFamily, seed: int, budget: int = 100, max_u: int = 2) -> SetFamily:
    """Random walk through compressions that never lower any profile entry.

    Each step shuffles the compressions that would change the current family
    (left-compressions, up-set moves and (U,v,f)-compressions with
    ``|U| <= max_u``) and takes the first whose result has a componentwise
    no-smaller profile.  Stops after ``budget`` steps or when nothing moves.
    """
    rng = random.Random(seed)
    uvfs = uvf_family(F.n, max_u)
    prof = intersecting_profile(F).counts
    for _ in range(budget):
        cands = [c for c in left_compressions(F.n) + upset_moves(F) + uvfs if changes(F, c)]
        rng.shuffle(cands)
        for c in cands:
            G = apply_compression(F, c)
            p = intersecting_profile(G).counts
            if _dominates(p, prof):
                F, prof = G, p
                break
        else:
            break
    return F
