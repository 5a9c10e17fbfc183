"""Counting intersecting subfamilies.

The intersecting s-subfamilies of F are exactly the independent s-sets of
its disjointness graph (one vertex per member, an edge per disjoint pair),
so the profile is the coefficient list of that graph's independence
polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .family import FamilyError, SetFamily

DEFAULT_LIMIT = 64
BRUTE_LIMIT = 20


class LimitExceeded(FamilyError):
    """The instance is larger than the configured budget."""


def is_intersecting(F: SetFamily | Sequence[int]) -> bool:
    ms = F.members if isinstance(F, SetFamily) else tuple(F)
    for i, a in enumerate(ms):
        if a == 0:
            return False
        for b in ms[i + 1:]:
            if a & b == 0:
                return False
    return True


@dataclass(frozen=True)
class DisjointnessGraph:
    """Adjacency bit-rows; ``loops`` marks members disjoint from themselves (only the empty set)."""

    adj: tuple[int, ...]
    loops: int

    @classmethod
    def of(cls, members: Sequence[int]) -> "DisjointnessGraph":
        k = len(members)
        adj = [0] * k
        loops = 0
        for u in range(k):
            a = members[u]
            if a == 0:
                loops |= 1 << u
            for v in range(u + 1, k):
                if a & members[v] == 0:
                    adj[u] |= 1 << v
                    adj[v] |= 1 << u
        return cls(tuple(adj), loops)

    def components(self) -> list[int]:
        """Vertex masks of the connected components (loop vertices included)."""
        rest = (1 << len(self.adj)) - 1
        out = []
        while rest:
            comp = _component(self.adj, rest & -rest, rest)
            out.append(comp)
            rest &= ~comp
        return out


def _component(adj: Sequence[int], seed: int, within: int) -> int:
    comp = seed
    frontier = seed
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        nbrs = adj[low.bit_length() - 1] & within & ~comp
        comp |= nbrs
        frontier |= nbrs
    return comp


@dataclass(frozen=True)
class IntersectingProfile:
    n: int
    N: int
    counts: tuple[int, ...]

    def __getitem__(self, s: int) -> int:
        return self.counts[s] if 0 <= s < len(self.counts) else 0

    def total(self) -> int:
        return sum(self.counts)

    def to_json(self) -> dict:
        return {"n": self.n, "N": self.N, "profile": [str(c) for c in self.counts]}


def _poly_add(a: list[int], b: list[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return out


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _binomial_row(k: int) -> list[int]:
    return [math.comb(k, j) for j in range(k + 1)]


def independence_polynomial(adj: Sequence[int], vertices: int) -> list[int]:
    """Coefficients of sum_{independent S within ``vertices``} x^|S|.

    Splits into connected components, then branches on a maximum-degree
    vertex v: I(G) = I(G - v) + x I(G - N[v]).  Results are memoized on the
    vertex mask for the duration of one call.
    """
    memo: dict[int, list[int]] = {}

    def rec(mask: int) -> list[int]:
        if mask == 0:
            return [1]
        hit = memo.get(mask)
        if hit is not None:
            return hit
        # peel off isolated vertices in one go
        isolated = 0
        best_v, best_deg = -1, 0
        m = mask
        while m:
            low = m & -m
            m ^= low
            v = low.bit_length() - 1
            d = bin(adj[v] & mask).count("1")
            if d == 0:
                isolated |= low
            elif d > best_deg:
                best_v, best_deg = v, d
        if isolated:
            k = bin(isolated).count("1")
            res = _poly_mul(_binomial_row(k), rec(mask & ~isolated)) if isolated != mask else _binomial_row(k)
        else:
            comp = _component(adj, mask & -mask, mask)
            if comp != mask:
                res = _poly_mul(rec(comp), rec(mask & ~comp))
            else:
                bit = 1 << best_v
                without = rec(mask & ~bit)
                with_v = rec(mask & ~bit & ~adj[best_v])
                res = _poly_add(without, [0] + with_v)
        memo[mask] = res
        return res

    return rec(vertices)


def intersecting_profile(F: SetFamily, limit: int = DEFAULT_LIMIT) -> IntersectingProfile:
    """Exact c_s = number of intersecting s-subfamilies of F, for s = 0..N."""
    N = F.N
    if N > limit:
        raise LimitExceeded(f"family has {N} members, over the counter limit {limit}")
    g = DisjointnessGraph.of(F.members)
    usable = ((1 << N) - 1) & ~g.loops
    poly = independence_polynomial(g.adj, usable)
    counts = poly + [0] * (N + 1 - len(poly))
    return IntersectingProfile(F.n, N, tuple(counts[: N + 1]))


def count_intersecting(members: Sequence[int], s: int | None = None, limit: int = DEFAULT_LIMIT):
    """Profile (or one coefficient) of a bare member list, without building a SetFamily."""
    if len(members) > limit:
        raise LimitExceeded(f"{len(members)} members over the counter limit {limit}")
    g = DisjointnessGraph.of(members)
    poly = independence_polynomial(g.adj, ((1 << len(members)) - 1) & ~g.loops)
    poly = poly + [0] * (len(members) + 1 - len(poly))
    if s is None:
        return poly
    return poly[s] if 0 <= s < len(poly) else 0


def brute_profile(F: SetFamily) -> IntersectingProfile:
    """Profile by testing every one of the 2^N subfamilies (oracle, N <= 20)."""
    N = F.N
    if N > BRUTE_LIMIT:
        raise LimitExceeded(f"brute force limited to N <= {BRUTE_LIMIT}, got {N}")
    ms = F.members
    # ok[mask] is built highest-bit-last: ok[2^i + r] = ok[r] and member i
    # meets itself and every member in r
    ok = np.zeros(1 << N, dtype=bool)
    ok[0] = True
    rest = np.arange(1 << N, dtype=np.int64)
    for i in range(N):
        bad = 0
        for j in range(i + 1):
            if ms[i] & ms[j] == 0:
                bad |= 1 << j
        lo = 1 << i
        r = rest[:lo]
        ok[lo:2 * lo] = ok[:lo] & ((r & bad) == 0) & (ms[i] != 0)
    sizes = np.zeros(1 << N, dtype=np.int64)
    for i in range(N):
        sizes += (rest >> i) & 1
    counts = np.bincount(sizes[ok], minlength=N + 1)
    return IntersectingProfile(F.n, N, tuple(int(c) for c in counts[: N + 1]))


# --- probability -------------------------------------------------------------


@dataclass(frozen=True)
class ProbabilityResult:
    p: Fraction | float
    exact: Fraction | None = None
    estimate: float | None = None
    stderr: float | None = None
    trials: int | None = None
    seed: int | None = None

    def to_json(self) -> dict:
        if self.exact is not None:
            return {"p": _frac_str(self.p), "exact": _frac_str(self.exact)}
        return {
            "p": self.p,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "trials": self.trials,
            "seed": self.seed,
        }


def _frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise FamilyError(f"not a rational number: {text!r}") from None


def probability_from_profile(counts: Sequence[int], p) -> Fraction:
    p = Fraction(p)
    q = 1 - p
    N = len(counts) - 1
    return sum((Fraction(c) * p**s * q ** (N - s) for s, c in enumerate(counts)), Fraction(0))


def probability_eval(F: SetFamily, p, limit: int = DEFAULT_LIMIT) -> ProbabilityResult:
    """Exact P(F(p) is intersecting) when each member is kept with probability p."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise FamilyError(f"p={p} outside [0,1]")
    prof = intersecting_profile(F, limit=limit)
    return ProbabilityResult(p=p, exact=probability_from_profile(prof.counts, p))


def mc_estimate(F: SetFamily, p: float, trials: int, seed: int, chunk: int = 20000) -> ProbabilityResult:
    """Seeded Monte Carlo estimate of P(F(p) is intersecting)."""
    if trials < 1:
        raise FamilyError("trials must be >= 1")
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise FamilyError(f"p={p} outside [0,1]")
    ms = F.members
    N = len(ms)
    us, vs = [], []
    for u in range(N):
        for v in range(u, N):
            if ms[u] & ms[v] == 0:
                us.append(u)
                vs.append(v)
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = 0
    done = 0
    us_a = np.array(us, dtype=np.intp)
    vs_a = np.array(vs, dtype=np.intp)
    while done < trials:
        m = min(chunk, trials - done)
        sel = rng.random((m, N)) < p
        if len(us):
            bad = (sel[:, us_a] & sel[:, vs_a]).any(axis=1)
            hits += int(m - bad.sum())
        else:
            hits += m
        done += m
    est = hits / trials
    se = math.sqrt(est * (1 - est) / trials)
    return ProbabilityResult(p=p, estimate=est, stderr=se, trials=trials, seed=seed)
