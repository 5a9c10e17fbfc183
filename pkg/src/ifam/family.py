"""Subsets of [n] as bit masks, families of them, and the family file format.

Element ``i`` of ``[n]`` is bit ``i - 1`` of a mask.  A :class:`SetFamily`
keeps its members sorted by mask value, so two families are equal exactly
when they have the same ground size and the same members.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from math import comb
from typing import Iterable, Iterator, Sequence

MAX_N = 64
MAX_CANON_N = 10


class FamilyError(ValueError):
    """Malformed family input or an operation outside its supported range."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> list[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def full_mask(n: int) -> int:
    return (1 << n) - 1


def interval(a: int, b: int) -> int:
    """Mask of ``[a, b] = {a, a+1, ..., b}`` (empty when ``a > b``)."""
    if a > b:
        return 0
    return ((1 << (b - a + 1)) - 1) << (a - 1)


def layer(n: int, k: int) -> list[int]:
    """All k-subsets of [n] in increasing mask order."""
    if k < 0 or k > n:
        return []
    return sorted(mask_of(c) for c in combinations(range(1, n + 1), k))


def layers(n: int, lo: int, hi: int | None = None) -> list[int]:
    """All subsets of [n] with ``lo <= size <= hi``, sorted by mask."""
    hi = n if hi is None else hi
    out = [m for k in range(max(lo, 0), min(hi, n) + 1) for m in layer(n, k)]
    out.sort()
    return out


def fmt_set(mask: int) -> str:
    if mask == 0:
        return "{}"
    return "{" + ",".join(str(e) for e in elements_of(mask)) + "}"


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise FamilyError(f"ground size n={n} outside supported range 1..{MAX_N}")


@dataclass(frozen=True)
class SetFamily:
    """A duplicate-free family of subsets of [n], members sorted by mask."""

    n: int
    members: tuple[int, ...]

    def __post_init__(self):
        _check_n(self.n)
        ms = tuple(self.members)
        limit = 1 << self.n
        for m in ms:
            if not 0 <= m < limit:
                raise FamilyError(f"mask {m:#x} has bits outside [{self.n}]")
        for a, b in zip(ms, ms[1:]):
            if a >= b:
                raise FamilyError("members must be strictly increasing (no duplicates)")
        object.__setattr__(self, "members", ms)

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "SetFamily":
        ms = list(masks)
        s = sorted(set(ms))
        if len(s) != len(ms):
            raise FamilyError("duplicate set in family")
        return cls(n, tuple(s))

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        masks = []
        for s in sets:
            s = list(s)
            for e in s:
                if not 1 <= e <= n:
                    raise FamilyError(f"element {e} out of range [1,{n}]")
            masks.append(mask_of(s))
        return cls.from_masks(n, masks)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, mask: object) -> bool:
        return mask in self._memberset

    @property
    def _memberset(self) -> frozenset:
        # cached on first use; the dataclass is frozen so bypass __setattr__
        try:
            return self.__dict__["_ms"]
        except KeyError:
            ms = frozenset(self.members)
            object.__setattr__(self, "_ms", ms)
            return ms

    @property
    def N(self) -> int:
        return len(self.members)

    def sets(self) -> list[list[int]]:
        return [elements_of(m) for m in self.members]

    def union(self, masks: Iterable[int]) -> "SetFamily":
        return SetFamily(self.n, tuple(sorted(set(self.members) | set(masks))))

    def minus(self, masks: Iterable[int]) -> "SetFamily":
        drop = set(masks)
        return SetFamily(self.n, tuple(m for m in self.members if m not in drop))

    def relabel(self, perm: Sequence[int]) -> "SetFamily":
        """Apply ``i -> perm[i-1]`` to every member (perm is a 1-based permutation)."""
        return SetFamily.from_masks(self.n, (permute_mask(m, perm) for m in self.members))

    def __str__(self) -> str:
        return "{" + ", ".join(fmt_set(m) for m in self.members) + "}"


def permute_mask(mask: int, perm: Sequence[int]) -> int:
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out |= 1 << (perm[i] - 1)
        mask >>= 1
        i += 1
    return out


# --- file format -----------------------------------------------------------

_HEADER = re.compile(r"^n\s+(\d+)$")


def parse_family(text: str | Iterable[str], allow_empty: bool = False) -> SetFamily:
    """Parse the family file format.

    The first non-comment line is ``n <k>``; each later line is either
    whitespace-separated element labels or a ``0x`` hex mask.  ``#`` starts a
    comment and blank lines are skipped.  The empty set can only be written
    as ``0x0`` and is rejected unless ``allow_empty`` is set.
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    n = None
    masks: list[int] = []
    seen: set[int] = set()
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            m = _HEADER.match(line)
            if not m:
                raise FamilyError(f"line {lineno}: missing header 'n <k>'")
            n = int(m.group(1))
            if not 1 <= n <= MAX_N:
                raise FamilyError(f"line {lineno}: n={n} exceeds supported width {MAX_N}")
            continue
        if line.lower().startswith("0x"):
            try:
                mask = int(line, 16)
            except ValueError:
                raise FamilyError(f"line {lineno}: bad hex mask {line!r}") from None
            if mask >> n:
                raise FamilyError(f"line {lineno}: mask {line} has elements outside [1,{n}]")
        else:
            mask = 0
            for tok in line.split():
                try:
                    e = int(tok)
                except ValueError:
                    raise FamilyError(f"line {lineno}: bad element label {tok!r}") from None
                if not 1 <= e <= n:
                    raise FamilyError(f"line {lineno}: element {e} out of range [1,{n}]")
                bit = 1 << (e - 1)
                if mask & bit:
                    raise FamilyError(f"line {lineno}: element {e} repeated")
                mask |= bit
        if mask == 0 and not allow_empty:
            raise FamilyError(f"line {lineno}: empty set not allowed (use allow_empty)")
        if mask in seen:
            raise FamilyError(f"line {lineno}: duplicate set {fmt_set(mask)}")
        seen.add(mask)
        masks.append(mask)
    if n is None:
        raise FamilyError("missing header 'n <k>'")
    return SetFamily(n, tuple(sorted(masks)))


def serialize_family(F: SetFamily) -> str:
    # the empty set has no label form; it is the only member written as hex
    out = [f"n {F.n}"]
    for m in F.members:
        out.append(" ".join(str(e) for e in elements_of(m)) if m else "0x0")
    return "\n".join(out) + "\n"


# --- canonical form ----------------------------------------------------------


@lru_cache(maxsize=16)
def _perm_tables(n: int) -> tuple[tuple[int, ...], ...]:
    """For each permutation of [n], the induced map on all 2^n masks."""
    tables = []
    for perm in permutations(range(1, n + 1)):
        img = [0] * (1 << n)
        bits = [1 << (p - 1) for p in perm]
        for m in range(1, 1 << n):
            low = m & -m
            img[m] = img[m ^ low] | bits[low.bit_length() - 1]
        tables.append(tuple(img))
    return tuple(tables)


def canonical_members(n: int, members: Iterable[int]) -> tuple[int, ...]:
    if n > MAX_CANON_N:
        raise FamilyError(f"canonical form needs n <= {MAX_CANON_N}, got {n}")
    ms = tuple(members)
    best = None
    for table in _perm_tables(n):
        cand = tuple(sorted(table[m] for m in ms))
        if best is None or cand < best:
            best = cand
    return best if best is not None else ()


def canonical_form(F: SetFamily) -> SetFamily:
    """Lexicographically least sorted mask tuple over all relabelings of [n]."""
    return SetFamily(F.n, canonical_members(F.n, F.members))


def isomorphic(F: SetFamily, G: SetFamily) -> bool:
    return F.n == G.n and F.N == G.N and canonical_form(F) == canonical_form(G)


def embeds(F: SetFamily, G: SetFamily) -> bool:
    """True if some relabeling of F is a subfamily of G."""
    if F.n != G.n or F.N > G.N:
        return False
    target = set(G.members)
    for table in _perm_tables(F.n):
        if all(table[m] in target for m in F.members):
            return True
    return False


# --- the layer threshold r(N, n) ----------------------------------------------


@dataclass(frozen=True)
class Threshold:
    r: int
    # True only for N = 2^n, which no r satisfies strictly; r is then 0
    at_upper: bool = False


def r_of(N: int, n: int) -> Threshold:
    """The r with sum_{k>r} C(n,k) <= N < sum_{k>=r} C(n,k)."""
    _check_n(n)
    if not 1 <= N <= 1 << n:
        raise FamilyError(f"N={N} outside 1..2^{n}")
    if N == 1 << n:
        return Threshold(0, at_upper=True)
    above = 0  # sum_{k=r+1}^n C(n,k)
    for r in range(n, -1, -1):
        upto = above + comb(n, r)
        if above <= N < upto:
            return Threshold(r)
        above = upto
    raise AssertionError("unreachable")


def has_layer_form(F: SetFamily) -> bool:
    """Is F equal to [n]^(>=r+1) plus some sets of size exactly r, r = r(N, n)?"""
    if F.N == 0:
        return True
    th = r_of(F.N, F.n)
    r = th.r
    for m in F.members:
        if popcount(m) < r:
            return False
    return sum(1 for m in F.members if popcount(m) > r) == sum(
        comb(F.n, k) for k in range(r + 1, F.n + 1)
    )
