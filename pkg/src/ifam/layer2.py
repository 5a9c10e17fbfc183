"""Families of 2-sets as graphs, and families [n]^(>=3) + B with B a graph.

An intersecting subfamily of [n]^(>=3) + B is determined by its trace on
the 2-sets, which is intersecting and hence a star S_r or the triangle T.
The number of completions of a trace depends only on its isomorphism type,
so the count splits as sum_r a_r |I_r| + b |I_T|.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .family import (
    FamilyError,
    SetFamily,
    canonical_form,
    elements_of,
    fmt_set,
    interval,
    layer,
    layers,
    mask_of,
    popcount,
)
from .profile import LimitExceeded, count_intersecting, is_intersecting

ENUM_BUDGET = 10**7
TRACE_LIMIT = 128


@dataclass(frozen=True)
class Layer2Graph:
    n: int
    edges: tuple[int, ...]

    def __post_init__(self):
        es = tuple(sorted(self.edges))
        if len(set(es)) != len(es):
            raise FamilyError("duplicate edge")
        for e in es:
            if popcount(e) != 2 or e >> self.n:
                raise FamilyError(f"{fmt_set(e)} is not a 2-subset of [{self.n}]")
        object.__setattr__(self, "edges", es)

    @classmethod
    def of(cls, F: SetFamily) -> "Layer2Graph":
        return cls(F.n, tuple(m for m in F.members if popcount(m) == 2))

    @property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for e in self.edges:
            for v in elements_of(e):
                deg[v - 1] += 1
        return tuple(deg)

    def complement(self) -> "Layer2Graph":
        have = set(self.edges)
        return Layer2Graph(self.n, tuple(e for e in layer(self.n, 2) if e not in have))

    def family(self) -> SetFamily:
        return SetFamily(self.n, self.edges)

    def canonical(self) -> "Layer2Graph":
        return Layer2Graph(self.n, canonical_form(self.family()).members)

    def __len__(self) -> int:
        return len(self.edges)


def quasi_graph(n: int, i: int, kind: str) -> Layer2Graph:
    """Quasi-complete graph (K_a on 1..a, vertex a+1 joined to 1..b) or its complement-based quasi-star."""
    total = comb(n, 2)
    if not 0 <= i <= total:
        raise FamilyError(f"i={i} outside 0..{total}")
    if kind == "star":
        return quasi_graph(n, total - i, "complete").complement()
    if kind != "complete":
        raise FamilyError(f"unknown kind {kind!r}")
    a = 0
    while comb(a + 1, 2) <= i:
        a += 1
    b = i - comb(a, 2)
    edges = [mask_of((x, y)) for x, y in combinations(range(1, a + 1), 2)]
    edges += [mask_of((x, a + 1)) for x in range(1, b + 1)]
    return Layer2Graph(n, tuple(edges))


def p2_count(B: Layer2Graph) -> int:
    """Unordered pairs of edges sharing a vertex."""
    return sum(d * (d - 1) // 2 for d in B.degrees)


@dataclass(frozen=True)
class P2Max:
    n: int
    i: int
    value: int
    optima: tuple[Layer2Graph, ...]  # canonical, sorted
    scanned: int


def max_p2(n: int, i: int, budget: int = ENUM_BUDGET) -> P2Max:
    """Exhaustive maximum of p2_count over all i-edge graphs on [n]."""
    all_edges = layer(n, 2)
    if comb(len(all_edges), i) > budget:
        raise LimitExceeded(f"C({len(all_edges)},{i}) graphs exceed budget {budget}")
    ends = [[v - 1 for v in elements_of(e)] for e in all_edges]
    best = -1
    hits: list[tuple[int, ...]] = []
    scanned = 0
    for idx in combinations(range(len(all_edges)), i):
        scanned += 1
        deg = [0] * n
        for k in idx:
            a, b = ends[k]
            deg[a] += 1
            deg[b] += 1
        val = sum(d * (d - 1) // 2 for d in deg)
        if val > best:
            best, hits = val, [idx]
        elif val == best:
            hits.append(idx)
    canon = {Layer2Graph(n, tuple(all_edges[k] for k in idx)).canonical() for idx in hits}
    return P2Max(n, i, best, tuple(sorted(canon, key=lambda g: g.edges)), scanned)


def crossover_rows(n: int) -> list[dict]:
    rows = []
    for i in range(comb(n, 2) + 1):
        ps = p2_count(quasi_graph(n, i, "star"))
        pc = p2_count(quasi_graph(n, i, "complete"))
        winner = "star" if ps > pc else "complete" if pc > ps else "tie"
        rows.append({"i": i, "p2_quasi_star": ps, "p2_quasi_complete": pc, "winner": winner})
    return rows


def crossover_csv(n: int) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, ["i", "p2_quasi_star", "p2_quasi_complete", "winner"], lineterminator="\n")
    w.writeheader()
    w.writerows(crossover_rows(n))
    return buf.getvalue()


# --- census ---------------------------------------------------------------------


@dataclass(frozen=True)
class Census:
    a: tuple[int, ...]  # a[r] = number of r-edge stars in B, r = 0..n-1
    b: int  # number of triangles


def triangle_count(B: Layer2Graph) -> int:
    t = 0
    for x, y, z in combinations(B.edges, 3):
        if popcount(x | y | z) == 3:
            t += 1
    return t


def star_triangle_census(B: Layer2Graph) -> Census:
    deg = B.degrees
    a = [1, len(B.edges)] + [sum(comb(d, r) for d in deg) for r in range(2, B.n)]
    return Census(tuple(a[: B.n]), triangle_count(B))


# --- trace-constrained counts ----------------------------------------------------------


@dataclass(frozen=True)
class Star:
    r: int


@dataclass(frozen=True)
class Triangle:
    pass


TRIANGLE = Triangle()


def trace_members(n: int, trace: Star | Triangle) -> list[int]:
    if isinstance(trace, Triangle):
        if n < 3:
            raise FamilyError("the triangle needs n >= 3")
        return [mask_of((1, 2)), mask_of((1, 3)), mask_of((2, 3))]
    if not 0 <= trace.r <= n - 1:
        raise FamilyError(f"star S_{trace.r} does not fit in [{n}]")
    return [mask_of((1, t)) for t in range(2, trace.r + 2)]


def compatible_sets(n: int, trace: Star | Triangle) -> list[int]:
    """Sets of size >= 3 meeting every member of the trace."""
    tr = trace_members(n, trace)
    return [m for m in layers(n, 3) if all(m & e for e in tr)]


def trace_profile(n: int, trace: Star | Triangle, limit: int = TRACE_LIMIT) -> list[int]:
    """[|I_trace| of size s for s = 0..] as a list indexed by s."""
    tr = trace_members(n, trace)
    comp = compatible_sets(n, trace)
    if len(comp) > limit:
        raise LimitExceeded(f"{len(comp)} compatible sets exceed the trace limit {limit}")
    poly = count_intersecting(comp, limit=limit)
    return [0] * len(tr) + poly


def count_trace_families(n: int, s: int, trace: Star | Triangle, limit: int = TRACE_LIMIT) -> int:
    """Number of intersecting s-families inside [n]^(>=2) whose 2-set part is exactly ``trace``."""
    k = len(trace_members(n, trace))
    if s < k:
        raise FamilyError(f"s={s} is smaller than the trace size {k}")
    prof = trace_profile(n, trace, limit)
    return prof[s] if s < len(prof) else 0


def decomposition_count(n: int, B: Layer2Graph, s: int, tables: dict | None = None) -> int:
    """sum_r a_r |I_r| + b |I_T| for the family [n]^(>=3) + B."""
    if tables is None:
        tables = {}
    cen = star_triangle_census(B)

    def I(trace):
        if trace not in tables:
            tables[trace] = trace_profile(n, trace)
        prof = tables[trace]
        return prof[s] if s < len(prof) else 0

    total = sum(a * I(Star(r)) for r, a in enumerate(cen.a) if a)
    if cen.b:
        total += cen.b * I(TRIANGLE)
    return total


def trace_of(F: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(m for m in F if popcount(m) <= 2))


def classify_trace(n: int, F: Iterable[int]) -> Star | Triangle | None:
    """Which of S_0..S_{n-1}, T the 2-set part of F is literally equal to (not up to relabeling)."""
    tr = trace_of(F)
    if tr == tuple(sorted(trace_members(n, TRIANGLE))) and n >= 3:
        return TRIANGLE
    for r in range(n):
        if tr == tuple(sorted(trace_members(n, Star(r)))):
            return Star(r)
    return None


def trace_families(n: int, s: int, trace: Star | Triangle) -> list[tuple[int, ...]]:
    """All members of I_trace of size s, each as a sorted mask tuple (small cases only)."""
    tr = trace_members(n, trace)
    comp = compatible_sets(n, trace)
    out = []

    def grow(start: int, chosen: list[int]):
        if len(chosen) == s - len(tr):
            out.append(tuple(sorted(tr + chosen)))
            return
        for k in range(start, len(comp)):
            m = comp[k]
            if all(m & c for c in chosen):
                chosen.append(m)
                grow(k + 1, chosen)
                chosen.pop()

    if s >= len(tr):
        grow(0, [])
    return out


# --- the map Phi: [r+2,n]^(>=2) x I_r -> I_{r-1} (u I_T when r = 3) ---------------------------


def phi_map_case(U: int, E: Iterable[int], r: int, n: int) -> tuple[tuple[int, ...], int]:
    """Phi(U, E) together with which of the two constructions (1 or 2) produced it."""
    E = tuple(sorted(E))
    if r < 3:
        raise FamilyError("phi_map needs r >= 3")
    R = interval(r + 2, n)
    if U & ~R or popcount(U) < 2:
        raise FamilyError(f"U={fmt_set(U)} must be a subset of [{r + 2},{n}] with at least 2 elements")
    if any(popcount(X) < 2 for X in E) or not is_intersecting(E):
        raise FamilyError("E must be an intersecting family of sets of size >= 2")
    if trace_of(E) != tuple(sorted(trace_members(n, Star(r)))):
        raise FamilyError(f"E must have trace S_{r}")

    one = 1
    e1r = mask_of((1, r + 1))
    low = interval(2, r)
    low1 = interval(2, r + 1)
    Up = e1r | U
    Ebar = set(E)
    if Up not in Ebar:
        Ebar.discard(e1r)
        Ebar.add(Up)

    E0 = [X for X in Ebar if X & one and X & low]
    E1p = [X & R for X in Ebar if X & one and not X & low1]
    E2p = [X & R for X in Ebar if not X & one]
    E3p = [X & R for X in Ebar if X & one and X & e1r == e1r and not X & low]
    Uc = R & ~U

    if all(X & Uc for X in E1p):
        case = 1
        F = [X for X in Ebar if X & one and X & low]
        F += [X for X in Ebar if X & one and not X & low1]
        F += [X for X in Ebar if not X & one]
        F += [e1r | X for X in E3p if X & Uc]
        F += [low | (R & ~X) for X in E3p if not X & ~U]
    else:
        if not all(X & U for X in E2p):
            raise AssertionError("neither construction applies")  # would refute the cross-intersection argument
        case = 2
        F = list(E0)
        F += [e1r | X for X in E1p]
        F += [low | X for X in E2p]
        F += [one | X for X in E3p if X & U == U]
        F += [low1 | (R & ~X) for X in E3p if R & ~X & U]
    return tuple(sorted(F)), case


def phi_map(U: int, E: SetFamily | Iterable[int], r: int, n: int) -> SetFamily:
    members = E.members if isinstance(E, SetFamily) else E
    F, _ = phi_map_case(U, members, r, n)
    return SetFamily.from_masks(n, F)


# --- numeric checks ----------------------------------------------------------------------


def layer2_bound_value(n: int) -> Fraction:
    """n C(n-1,3) 2^(6-n) + C(n,3) 2^(6-n) + sum_{r=4}^{n-1} n C(n-1,r) 2^(13-2n)."""
    if n < 4:
        raise FamilyError("bound defined for n >= 4")
    two = Fraction(2)
    val = n * comb(n - 1, 3) * two ** (6 - n) + comb(n, 3) * two ** (6 - n)
    val += sum(n * comb(n - 1, r) for r in range(4, n)) * two ** (13 - 2 * n)
    return val


def stars_factor(n: int, r: int) -> Fraction:
    if r == 3:
        return Fraction(2) ** (n - 5) - Fraction(n - 1, 2)
    return Fraction(2) ** (n - r - 2) - Fraction(n - r, 2)


@dataclass(frozen=True)
class StarsRatio:
    n: int
    r: int
    s: int
    lower: int  # |I_{r-1}|
    upper: int  # |I_r|
    factor: Fraction
    triangle: int  # |I_T| (reported for r = 3)

    @property
    def passes(self) -> bool:
        return self.lower >= self.factor * self.upper

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "s": self.s,
            "I_r_minus_1": str(self.lower),
            "I_r": str(self.upper),
            "I_T": str(self.triangle),
            "factor": f"{self.factor.numerator}/{self.factor.denominator}",
            "status": "pass" if self.passes else "fail",
        }


def stars_ratio_check(n: int, r: int, s: int, limit: int = TRACE_LIMIT) -> StarsRatio:
    """Exact check of |I_{r-1}| >= factor(n, r) |I_r| at family size s."""
    if r < 3:
        raise FamilyError("the star comparison is stated for r >= 3")
    lower = count_trace_families(n, s, Star(r - 1), limit) if s >= r - 1 else 0
    upper = count_trace_families(n, s, Star(r), limit) if s >= r else 0
    tri = count_trace_families(n, s, TRIANGLE, limit) if s >= 3 else 0
    return StarsRatio(n, r, s, lower, upper, stars_factor(n, r), tri)


def census_from_brute(B: Layer2Graph, m: int) -> int:
    """Intersecting m-subfamilies of B by direct enumeration (test oracle)."""
    return sum(1 for sub in combinations(B.edges, m) if is_intersecting(sub))


def graph_from_sets(n: int, edges: Sequence[Sequence[int]]) -> Layer2Graph:
    return Layer2Graph(n, tuple(mask_of(e) for e in edges))
