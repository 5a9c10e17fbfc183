"""Named extremal families, the complementary-pair criterion, and minimal elements."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .family import (
    FamilyError,
    SetFamily,
    full_mask,
    interval,
    layer,
    layers,
    popcount,
)
from .layer2 import quasi_graph
from .profile import LimitExceeded

NAMES = (
    "theorem1a",
    "theorem1b",
    "construct-even",
    "construct-odd",
    "star-maximal",
    "quasi-star-layer",
    "quasi-complete-layer",
)


def construct_top_size(n: int) -> int:
    """Largest N covered by the tightness constructions for this n."""
    t = n // 2
    if n % 2 == 0:
        return 2 ** (n - 1) + comb(n, t) // 2 - t
    return 2 ** (n - 1) + comb(n - 1, t - 1) - t - 1


def _construct(n: int, N: int | None, odd: bool) -> SetFamily:
    if (n % 2 == 1) != odd:
        raise FamilyError(f"construct-{'odd' if odd else 'even'} needs {'odd' if odd else 'even'} n, got {n}")
    if n < 4:
        raise FamilyError("constructions need n >= 4")
    t = n // 2
    first = interval(1, t - 1)  # [t-1]
    if odd:
        members = {first}
        members.update(m for m in layer(n, t) if m & 1)
        members.update(m for m in layers(n, t + 1) if not (popcount(m) == t + 1 and not m & first))
    else:
        members = {first}
        members.update(m for m in layers(n, t) if not (popcount(m) == t and not m & first))
    top = construct_top_size(n)
    assert len(members) == top, (len(members), top)
    N = top if N is None else N
    if not 2 ** (n - 1) < N <= top:
        raise FamilyError(f"N={N} outside ({2 ** (n - 1)}, {top}] for n={n}")
    # t-sets through 1 that miss part of [t-1]: each one's complement is
    # present, so dropping it removes one complementary pair and nothing else
    pool = [m for m in layer(n, t) if m & 1 and m & first != first and m in members]
    drop = pool[: top - N]
    return SetFamily.from_masks(n, sorted(members.difference(drop)))


def named_family(name: str, n: int, N: int | None = None) -> SetFamily:
    if name == "theorem1a":
        F = SetFamily.from_masks(n, layers(n, 3) + [m for m in layer(n, 2) if m & 1])
    elif name == "theorem1b":
        nb = 1 << (n - 1)
        F = SetFamily.from_masks(n, layers(n, 3) + [m for m in layer(n, 2) if not m & nb])
    elif name == "construct-even":
        return _construct(n, N, odd=False)
    elif name == "construct-odd":
        return _construct(n, N, odd=True)
    elif name == "star-maximal":
        F = SetFamily.from_masks(n, [m for m in range(1, 1 << n) if m & 1])
    elif name in ("quasi-star-layer", "quasi-complete-layer"):
        if N is None:
            raise FamilyError(f"{name} needs N")
        base = layers(n, 3)
        kind = "star" if name == "quasi-star-layer" else "complete"
        F = SetFamily.from_masks(n, base + list(quasi_graph(n, N - len(base), kind).edges))
    else:
        raise FamilyError(f"unknown family name {name!r}; expected one of {', '.join(NAMES)}")
    if N is not None and N != F.N:
        raise FamilyError(f"{name}({n}) has size {F.N}, not {N}")
    return F


@dataclass(frozen=True)
class KkkReport:
    N: int
    complementary_pairs: int
    other_disjoint_pairs: int
    meets_every_complementary_pair: bool
    expected_pairs: int

    @property
    def passes(self) -> bool:
        return (
            self.other_disjoint_pairs == 0
            and self.complementary_pairs == self.expected_pairs
            and self.meets_every_complementary_pair
        )

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "complementary_pairs": self.complementary_pairs,
            "other_disjoint_pairs": self.other_disjoint_pairs,
            "meets_every_complementary_pair": self.meets_every_complementary_pair,
            "passes": self.passes,
        }


def kkk_check(F: SetFamily) -> KkkReport:
    """Count complementary and other disjoint pairs, and test that F meets every pair {X, X^c}."""
    full = full_mask(F.n)
    ms = F.members
    comp = other = 0
    for i, a in enumerate(ms):
        for b in ms[i + 1:]:
            if a & b == 0:
                if a | b == full:
                    comp += 1
                else:
                    other += 1
    meets = all(X in F or (full ^ X) in F for X in range(1 << (F.n - 1)))
    return KkkReport(F.N, comp, other, meets, F.N - 2 ** (F.n - 1))


def nonintersecting_pairs_all_complementary(F: SetFamily) -> bool:
    full = full_mask(F.n)
    return all(
        a | b == full
        for i, a in enumerate(F.members)
        for b in F.members[i:]
        if a & b == 0
    )


# --- minimal elements ---------------------------------------------------------------


def minimal_elements(members) -> list[int]:
    ms = list(members)
    return [a for a in ms if not any(b != a and b & a == b for b in ms)]


def minimal_bound(n: int, t: int) -> int:
    return comb(n - 1, t - 1) - (n - t)


@dataclass(frozen=True)
class MinimalReport:
    n: int
    t: int
    mode: str
    bound: int
    achieved: int
    witness: tuple[int, ...]
    examined: int

    @property
    def passes(self) -> bool:
        return self.achieved <= self.bound


def _check_nt(n: int, t: int) -> None:
    if t < 2 or 2 * t > n:
        raise FamilyError(f"need 2 <= t <= n/2, got n={n}, t={t}")


def _exhaustive_minimal(n: int, t: int) -> tuple[int, tuple[int, ...], int]:
    # every intersecting B inside [n]^(<=t), grown by DFS in mask order
    pool = layers(n, 1, t)
    best, witness, seen = -1, (), 0

    def grow(start: int, chosen: list[int]):
        nonlocal best, witness, seen
        seen += 1
        if any(popcount(b) < t for b in chosen):
            k = len(minimal_elements(chosen))
            if k > best:
                best, witness = k, tuple(chosen)
        for i in range(start, len(pool)):
            m = pool[i]
            if all(m & c for c in chosen):
                chosen.append(m)
                grow(i + 1, chosen)
                chosen.pop()

    grow(0, [])
    return best, witness, seen


def _max_clique(k: int, adj: dict[int, int]) -> tuple[int, int]:
    """Maximum clique (size, vertex bitmask) by branch and bound with a greedy colouring bound."""
    best_size, best_set = 0, 0

    def colour_bound(P: int) -> int:
        colours = 0
        while P:
            colours += 1
            Q = P
            while Q:
                low = Q & -Q
                Q &= ~low & ~adj[low.bit_length() - 1]
                P &= ~low
        return colours

    def expand(R: int, size: int, P: int):
        nonlocal best_size, best_set
        if P == 0:
            if size > best_size:
                best_size, best_set = size, R
            return
        if size + colour_bound(P) <= best_size:
            return
        while P:
            if size + bin(P).count("1") <= best_size:
                return
            low = P & -P
            v = low.bit_length() - 1
            expand(R | low, size + 1, P & adj[v])
            P &= ~low

    expand(0, 0, (1 << k) - 1)
    return best_size, best_set


def _bnb_minimal(n: int, t: int) -> tuple[int, tuple[int, ...], int]:
    # the minimal elements form an intersecting antichain with a set of size < t;
    # up to relabeling that small set is [k]
    best, witness, examined = -1, (), 0
    for k in range(1, t):
        S = interval(1, k)
        cands = [
            m for m in layers(n, 1, t)
            if m != S and m & S and m & S != m and m & S != S
        ]
        adj = {}
        for i, a in enumerate(cands):
            row = 0
            for j, b in enumerate(cands):
                if i != j and a & b and a & b != a and a & b != b:
                    row |= 1 << j
            adj[i] = row
        size, chosen = _max_clique(len(cands), adj)
        examined += len(cands)
        if size + 1 > best:
            best = size + 1
            witness = (S,) + tuple(cands[j] for j in range(len(cands)) if chosen >> j & 1)
    return best, tuple(sorted(witness)), examined


def minimal_bound_check(n: int, t: int, mode: str = "exhaustive") -> MinimalReport:
    """Largest number of minimal elements of an intersecting B in [n]^(<=t) not inside [n]^(t)."""
    _check_nt(n, t)
    if mode == "exhaustive":
        if n > 5:
            raise LimitExceeded("exhaustive minimal-element scan is limited to n <= 5")
        best, witness, seen = _exhaustive_minimal(n, t)
    elif mode == "branch-and-bound":
        if n > 8:
            raise LimitExceeded("branch-and-bound minimal-element search is limited to n <= 8")
        best, witness, seen = _bnb_minimal(n, t)
    else:
        raise FamilyError(f"unknown mode {mode!r}")
    return MinimalReport(n, t, mode, minimal_bound(n, t), best, tuple(sorted(witness)), seen)


@dataclass(frozen=True)
class ShadowReport:
    n: int
    t: int
    min_gap: int  # min over nonempty U of |upper shadow| - |U|
    required: int  # n - t
    subsets: int

    @property
    def passes(self) -> bool:
        return self.min_gap >= self.required


def upper_shadow(members, n: int, t: int) -> list[int]:
    return [B for B in layer(n, t) if any(A & B == A for A in members)]


def shadow_check(n: int, t: int, max_sets: int = 26) -> ShadowReport:
    """min |dU| - |U| over every nonempty U inside [n]^(t-1), dU its upper shadow in [n]^(t)."""
    _check_nt(n, t)
    low, high = layer(n, t - 1), layer(n, t)
    if len(low) > max_sets:
        raise LimitExceeded(f"2^{len(low)} subsets is too many")
    if len(high) > 63:
        raise LimitExceeded("upper layer does not fit a 64-bit row")
    index = {B: k for k, B in enumerate(high)}
    rows = [sum(1 << index[B] for B in high if A & B == A) for A in low]
    m = len(low)
    sh = np.zeros(1 << m, dtype=np.uint64)
    for i, row in enumerate(rows):
        lo = 1 << i
        sh[lo:2 * lo] = sh[:lo] | np.uint64(row)
    size_u = np.bitwise_count(np.arange(1 << m, dtype=np.uint64))
    gap = np.bitwise_count(sh).astype(np.int64) - size_u.astype(np.int64)
    return ShadowReport(n, t, int(gap[1:].min()), n - t, (1 << m) - 1)
