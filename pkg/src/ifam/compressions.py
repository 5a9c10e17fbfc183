"""Up-set, ij- and (U,v,f)-compressions of set families.

All three move sets simultaneously: whether a member moves is decided
against the family as it was before the compression, so the result never
depends on the order in which members are visited.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence, Union

from .family import FamilyError, SetFamily, elements_of, fmt_set, mask_of, popcount
from .profile import DEFAULT_LIMIT, intersecting_profile


class CompressionError(FamilyError):
    pass


@dataclass(frozen=True)
class UpSet:
    source: int
    target: int

    def validate(self, n: int | None = None) -> None:
        if self.source & ~self.target or self.source == self.target:
            raise CompressionError(
                f"up-set compression needs source strictly inside target: "
                f"{fmt_set(self.source)} -> {fmt_set(self.target)}"
            )
        if n is not None and self.target >> n:
            raise CompressionError("target outside the ground set")


@dataclass(frozen=True)
class IJ:
    i: int
    j: int

    def validate(self, n: int | None = None) -> None:
        if self.i == self.j:
            raise CompressionError("ij-compression needs i != j")
        if min(self.i, self.j) < 1 or (n is not None and max(self.i, self.j) > n):
            raise CompressionError(f"ij-compression ({self.i},{self.j}) outside [1,{n}]")


@dataclass(frozen=True)
class UVF:
    """Add v and swap inside U along the fixed-point-free involution ``pairs``."""

    U: int
    v: int
    pairs: tuple[tuple[int, int], ...]
    _swap: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        swap = {}
        for a, b in self.pairs:
            swap[1 << (a - 1)] = 1 << (b - 1)
            swap[1 << (b - 1)] = 1 << (a - 1)
        object.__setattr__(self, "_swap", swap)

    def validate(self, n: int | None = None) -> None:
        if popcount(self.U) % 2:
            raise CompressionError("U must have even size")
        vbit = 1 << (self.v - 1)
        if self.v < 1 or self.U & vbit:
            raise CompressionError("v must be an element outside U")
        if n is not None and (self.v > n or self.U >> n):
            raise CompressionError("descriptor outside the ground set")
        covered = 0
        for a, b in self.pairs:
            if a == b:
                raise CompressionError("involution has a fixed point")
            for e in (a, b):
                bit = 1 << (e - 1)
                if covered & bit:
                    raise CompressionError("swap pairs overlap")
                covered |= bit
        if covered != self.U:
            raise CompressionError("swap pairs must cover U exactly")

    def image(self, A: int) -> int:
        inside = A & self.U
        swapped = 0
        while inside:
            low = inside & -inside
            inside ^= low
            swapped |= self._swap[low]
        return (A & ~self.U) | (1 << (self.v - 1)) | swapped

    def preimage(self, T: int) -> int:
        """Inverse of :meth:`image` on sets containing v."""
        inside = T & self.U
        swapped = 0
        while inside:
            low = inside & -inside
            inside ^= low
            swapped |= self._swap[low]
        return (T & ~self.U & ~(1 << (self.v - 1))) | swapped


Compression = Union[UpSet, IJ, UVF]


def _move(c: Compression, A: int) -> int | None:
    """Where A would go under c, or None if c does not touch A."""
    if isinstance(c, IJ):
        ib, jb = 1 << (c.i - 1), 1 << (c.j - 1)
        if A & jb and not A & ib:
            return (A | ib) & ~jb
        return None
    if isinstance(c, UVF):
        if A & (1 << (c.v - 1)):
            return None
        return c.image(A)
    if isinstance(c, UpSet):
        return c.target if A == c.source else None
    raise TypeError(f"not a compression: {c!r}")


def apply_compression(F: SetFamily, c: Compression) -> SetFamily:
    c.validate(F.n)
    if isinstance(c, UpSet):
        if c.source not in F:
            raise CompressionError(f"source {fmt_set(c.source)} not in family")
        if c.target in F:
            raise CompressionError(f"target {fmt_set(c.target)} already in family")
    out = []
    for A in F.members:
        B = _move(c, A)
        out.append(A if B is None or B in F else B)
    return SetFamily.from_masks(F.n, out)


def changes(F: SetFamily, c: Compression) -> bool:
    """Would applying c alter F?  (False for up-set moves that are not applicable.)"""
    if isinstance(c, UpSet):
        return c.source in F and c.target not in F
    for A in F.members:
        B = _move(c, A)
        if B is not None and B not in F:
            return True
    return False


def build_uvf_for(source: int, target: int, v: int) -> UVF:
    """The (U,v,f)-compression sending ``source`` to ``target``.

    ``U`` is ``source`` together with ``target - {v}``, and f pairs the k-th
    smallest element of ``source`` with the k-th smallest of ``target - {v}``.
    """
    vbit = 1 << (v - 1)
    if not target & vbit:
        raise CompressionError(f"v={v} must lie in the target")
    if source & vbit:
        raise CompressionError(f"v={v} must not lie in the source")
    rest = target & ~vbit
    if source & rest:
        raise CompressionError("source meets target - {v}; no valid U exists")
    a, b = elements_of(source), elements_of(rest)
    if len(a) != len(b):
        raise CompressionError("|target - {v}| must equal |source|")
    c = UVF(source | rest, v, tuple(zip(a, b)))
    c.validate()
    return c


# --- descriptor syntax --------------------------------------------------------


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def parse_descriptor(text: str) -> Compression:
    """``ij:i,j`` | ``up:src=1 2;tgt=1 2 3`` | ``uvf:U=1,5;v=6;f=1-5``."""
    kind, _, body = text.strip().partition(":")
    try:
        if kind == "ij":
            i, j = _ints(body)
            return IJ(i, j)
        fields = {}
        for part in body.split(";"):
            k, _, v = part.partition("=")
            fields[k.strip()] = v.strip()
        if kind == "up":
            return UpSet(mask_of(_ints(fields["src"])), mask_of(_ints(fields["tgt"])))
        if kind == "uvf":
            pairs = []
            if fields.get("f"):
                for p in fields["f"].split(","):
                    a, b = p.split("-")
                    pairs.append((int(a), int(b)))
            return UVF(mask_of(_ints(fields.get("U", ""))), int(fields["v"]), tuple(pairs))
    except (KeyError, ValueError) as e:
        raise CompressionError(f"bad descriptor {text!r}: {e}") from None
    raise CompressionError(f"unknown descriptor kind in {text!r}")


def format_descriptor(c: Compression) -> str:
    if isinstance(c, IJ):
        return f"ij:{c.i},{c.j}"
    if isinstance(c, UpSet):
        src = " ".join(map(str, elements_of(c.source)))
        tgt = " ".join(map(str, elements_of(c.target)))
        return f"up:src={src};tgt={tgt}"
    U = ",".join(map(str, elements_of(c.U)))
    f = ",".join(f"{a}-{b}" for a, b in c.pairs)
    return f"uvf:U={U};v={c.v};f={f}"


# --- candidate generators -------------------------------------------------------


def left_compressions(n: int) -> list[IJ]:
    return [IJ(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def upset_moves(F: SetFamily) -> list[UpSet]:
    """Applicable up-set compressions, sorted by (source, target)."""
    full = (1 << F.n) - 1
    out = []
    for A in F.members:
        free = full & ~A
        sub = free
        while sub:
            T = A | sub
            if T not in F:
                out.append(UpSet(A, T))
            sub = (sub - 1) & free
    out.sort(key=lambda c: (c.source, c.target))
    return out


def perfect_matchings(elems: Sequence[int]) -> list[tuple[tuple[int, int], ...]]:
    if not elems:
        return [()]
    first, rest = elems[0], elems[1:]
    out = []
    for k, partner in enumerate(rest):
        for m in perfect_matchings(rest[:k] + rest[k + 1:]):
            out.append(((first, partner),) + m)
    return out


def uvf_family(n: int, max_u: int = 2) -> list[UVF]:
    """Every (U,v,f)-compression on [n] with |U| <= max_u, in a fixed order."""
    out = []
    for v in range(1, n + 1):
        others = [e for e in range(1, n + 1) if e != v]
        for size in range(0, max_u + 1, 2):
            for U in combinations(others, size):
                for pairs in perfect_matchings(list(U)):
                    out.append(UVF(mask_of(U), v, pairs))
    return out


# --- fixpoint driver ----------------------------------------------------------------


def compress_to_fixpoint(
    F: SetFamily,
    allowed: Callable[[SetFamily], bool] | None = None,
    left: bool = True,
    upsets: bool = True,
    uvf: Callable[[SetFamily], Iterable[UVF]] | Iterable[UVF] | None = None,
    log: list | None = None,
    max_steps: int = 1_000_000,
) -> SetFamily:
    """Apply allowed compressions until none changes the family.

    Candidates are tried as: left-compressions by (i, j), then up-set moves
    by (source, target) mask, then the (U,v,f)-compressions in the order
    ``uvf`` yields them.  The first one that changes the family and whose
    result passes ``allowed`` fires, and the scan restarts.

    Every up-set and (U,v,f) step raises the total size of the members and
    every left-compression keeps it while lowering the total of the element
    labels, so the loop terminates.
    """
    uvf_list = None if uvf is None or callable(uvf) else list(uvf)

    def candidates(G: SetFamily):
        if left:
            yield from left_compressions(G.n)
        if upsets:
            yield from upset_moves(G)
        if uvf is not None:
            yield from (uvf(G) if callable(uvf) else uvf_list)

    for _ in range(max_steps):
        for c in candidates(F):
            if not changes(F, c):
                continue
            G = apply_compression(F, c)
            if allowed is not None and not allowed(G):
                continue
            if log is not None:
                log.append(c)
            F = G
            break
        else:
            return F
    raise CompressionError(f"no fixpoint within {max_steps} steps")


# --- monotonicity ---------------------------------------------------------------------


@dataclass(frozen=True)
class MonotoneReport:
    descriptor: str
    before: tuple[int, ...]
    after: tuple[int, ...]
    deltas: dict[int, int]

    @property
    def falsified(self) -> bool:
        return any(d < 0 for d in self.deltas.values())

    def to_json(self) -> dict:
        return {
            "descriptor": self.descriptor,
            "deltas": {str(s): str(d) for s, d in self.deltas.items()},
            "falsification": self.falsified,
        }


def monotone_check(
    F: SetFamily, c: Compression, s_range: Iterable[int] | None = None, limit: int = DEFAULT_LIMIT
) -> MonotoneReport:
    """Profile change c_s(C(F)) - c_s(F); a negative entry would refute monotonicity."""
    G = apply_compression(F, c)
    before = intersecting_profile(F, limit=limit)
    after = intersecting_profile(G, limit=limit)
    ss = range(F.N + 1) if s_range is None else s_range
    deltas = {s: after[s] - before[s] for s in ss}
    return MonotoneReport(format_descriptor(c), before.counts, after.counts, deltas)
