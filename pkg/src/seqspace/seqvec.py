"""Finitely supported sequences and index maps.

A :class:`SeqVec` is a sparse real sequence indexed by positive integers.
Zero entries are never stored, so equality and support queries are exact.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    IndexOutOfRange,
    InvalidPartition,
    LiteralParseError,
    NonDisjointTargets,
    OverlappingSupports,
    ZeroMember,
)


class SeqVec:
    """Immutable finitely supported sequence ``(a_j)_{j>=1}``.

    Parameters
    ----------
    entries : mapping or iterable of ``(index, value)`` pairs
        Indices must be positive integers.  Zero values are dropped.
    """

    __slots__ = ("_map", "_indices")

    def __init__(self, entries: Mapping[int, float] | Iterable[tuple[int, float]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        data: dict[int, float] = {}
        for idx, val in items:
            i = int(idx)
            if i != idx or i < 1:
                raise IndexOutOfRange(f"index must be a positive integer, got {idx!r}")
            v = float(val)
            if not math.isfinite(v):
                raise ValueError(f"entry at {i} is not finite: {val!r}")
            if v != 0.0:
                data[i] = v
            else:
                data.pop(i, None)
        self._indices = tuple(sorted(data))
        self._map = {i: data[i] for i in self._indices}

    @classmethod
    def from_values(cls, values: Iterable[float], start: int = 1) -> "SeqVec":
        """Place ``values`` at consecutive indices ``start, start+1, ...``."""
        return cls(zip(itertools.count(start), values))

    @classmethod
    def from_arrays(cls, indices: Sequence[int], values: Sequence[float]) -> "SeqVec":
        return cls(zip(indices, values))

    # -- basic protocol ---------------------------------------------------
    def __getitem__(self, index: int) -> float:
        return self._map.get(index, 0.0)

    def __len__(self) -> int:
        return len(self._indices)

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return ((i, self._map[i]) for i in self._indices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeqVec):
            return NotImplemented
        return self._map == other._map

    def __hash__(self) -> int:
        return hash(tuple(self))

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {v!r}" for i, v in self)
        return f"SeqVec({{{body}}})"

    def __mul__(self, c: float) -> "SeqVec":
        return SeqVec((i, c * v) for i, v in self)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "SeqVec":
        return SeqVec((i, v / c) for i, v in self)

    def __neg__(self) -> "SeqVec":
        return self * -1.0

    def __add__(self, other: "SeqVec") -> "SeqVec":
        out = dict(self._map)
        for i, v in other:
            out[i] = out.get(i, 0.0) + v
        return SeqVec(out)

    def __sub__(self, other: "SeqVec") -> "SeqVec":
        return self + (-other)

    @property
    def indices(self) -> tuple[int, ...]:
        return self._indices

    def values_array(self) -> np.ndarray:
        return np.fromiter((self._map[i] for i in self._indices), dtype=float, count=len(self))

    def abs_array(self) -> np.ndarray:
        return np.abs(self.values_array())

    def max_index(self) -> int:
        return self._indices[-1] if self._indices else 0

    def abs(self) -> "SeqVec":
        return SeqVec((i, abs(v)) for i, v in self)

    def sup_norm(self) -> float:
        return float(self.abs_array().max()) if self._indices else 0.0

    # -- serialization ----------------------------------------------------
    def to_json_obj(self) -> dict:
        return {"entries": [[i, v] for i, v in self]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "SeqVec":
        try:
            return cls((int(i), float(v)) for i, v in obj["entries"])
        except (KeyError, TypeError, ValueError) as exc:
            raise LiteralParseError(f"malformed SeqVec JSON: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "SeqVec":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise LiteralParseError(f"malformed SeqVec JSON: {exc}") from exc
        return cls.from_json_obj(obj)

    def to_text(self) -> str:
        return "".join(f"{i} {v!r}\n" for i, v in self)

    @classmethod
    def from_text(cls, text: str) -> "SeqVec":
        """Parse ``index value`` lines; blank lines and ``#`` comments are skipped."""
        pairs = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise LiteralParseError(f"line {lineno}: expected 'index value', got {raw!r}")
            try:
                pairs.append((int(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise LiteralParseError(f"line {lineno}: {exc}") from exc
        return cls(pairs)


def support(f: SeqVec) -> list[int]:
    return list(f.indices)


def rearrangement(f: SeqVec) -> np.ndarray:
    """Non-increasing rearrangement of ``|f|`` (length ``|supp f|``)."""
    return np.sort(f.abs_array())[::-1]


# -- index sets -------------------------------------------------------------


@dataclass(frozen=True)
class IndexSetSpec:
    """A subset of the positive integers.

    Three kinds are supported:

    ``explicit``
        a finite sorted tuple of indices;
    ``progression``
        ``{start, start + step, start + 2 step, ...}``;
    ``predicate``
        a membership test paired with an enumerator that yields the members
        in strictly increasing order.
    """

    kind: str
    values: tuple[int, ...] = ()
    start: int = 1
    step: int = 1
    member: Callable[[int], bool] | None = field(default=None, compare=False)
    enumerator: Callable[[], Iterator[int]] | None = field(default=None, compare=False)
    label: str = ""

    # constructors
    @classmethod
    def explicit(cls, values: Iterable[int]) -> "IndexSetSpec":
        vals = tuple(sorted(set(int(v) for v in values)))
        if vals and vals[0] < 1:
            raise IndexOutOfRange("index sets contain positive integers only")
        return cls("explicit", values=vals)

    @classmethod
    def progression(cls, start: int, step: int) -> "IndexSetSpec":
        if start < 1 or step < 1:
            raise ValueError("progression needs start >= 1 and step >= 1")
        return cls("progression", start=int(start), step=int(step))

    @classmethod
    def naturals(cls) -> "IndexSetSpec":
        return cls.progression(1, 1)

    @classmethod
    def odds(cls) -> "IndexSetSpec":
        return cls.progression(1, 2)

    @classmethod
    def evens(cls) -> "IndexSetSpec":
        return cls.progression(2, 2)

    @classmethod
    def multiples(cls, b: int) -> "IndexSetSpec":
        return cls.progression(b, b)

    @classmethod
    def predicate(cls, member: Callable[[int], bool], enumerator: Callable[[], Iterator[int]],
                  label: str = "") -> "IndexSetSpec":
        return cls("predicate", member=member, enumerator=enumerator, label=label)

    @property
    def is_infinite(self) -> bool:
        return self.kind != "explicit"

    def __contains__(self, j: int) -> bool:
        if j < 1:
            return False
        if self.kind == "explicit":
            return j in self.values
        if self.kind == "progression":
            return j >= self.start and (j - self.start) % self.step == 0
        return bool(self.member(j))

    def __iter__(self) -> Iterator[int]:
        if self.kind == "explicit":
            return iter(self.values)
        if self.kind == "progression":
            return itertools.count(self.start, self.step)
        return iter(self.enumerator())

    def next_after(self, m: int) -> int | None:
        """Smallest member strictly greater than ``m`` (``None`` if exhausted)."""
        if self.kind == "progression":
            if m < self.start:
                return self.start
            return self.start + ((m - self.start) // self.step + 1) * self.step
        for j in self:
            if j > m:
                return j
        return None

    def take(self, n: int) -> list[int]:
        return list(itertools.islice(iter(self), n))


def coordinate_projection(f: SeqVec, A: IndexSetSpec) -> SeqVec:
    return SeqVec((i, v) for i, v in f if i in A)


# -- index maps -------------------------------------------------------------


@dataclass(frozen=True)
class IndexMap:
    """Finite strictly increasing map ``k -> values[k-1]``."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if vals and vals[0] < 1:
            raise ValueError("index map values must be >= 1")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("index map must be strictly increasing")

    def __len__(self) -> int:
        return len(self.values)

    def __call__(self, k: int) -> int:
        return self.values[k - 1]

    def to_json_obj(self) -> dict:
        return {"phi": list(self.values)}


def spread(f: SeqVec, phi: IndexMap) -> SeqVec:
    """Move the entry at ``j`` to ``phi(j)``."""
    if f.max_index() > len(phi):
        raise IndexOutOfRange(
            f"index map of length {len(phi)} cannot place index {f.max_index()}")
    return SeqVec((phi(j), v) for j, v in f)


def compress(f: SeqVec, phi: IndexMap) -> SeqVec:
    """Entry ``j`` of the result is ``f[phi(j)]``."""
    return SeqVec((k, f[p]) for k, p in enumerate(phi.values, 1))


def _gcd_disjoint(a: IndexSetSpec, b: IndexSetSpec) -> bool:
    # two progressions meet (infinitely often) iff start_a == start_b mod gcd
    g = math.gcd(a.step, b.step)
    return (a.start - b.start) % g != 0


def targets_disjoint(targets: Sequence[IndexSetSpec], window: int = 10_000) -> bool:
    """Pairwise disjointness; exact for progressions, windowed otherwise."""
    for a, b in itertools.combinations(targets, 2):
        if a.kind == "progression" and b.kind == "progression":
            if not _gcd_disjoint(a, b):
                return False
            continue
        for j in itertools.islice(iter(a), window):
            if j in b:
                return False
    return True


def interleave_map(blocks: Sequence[IndexSetSpec], targets: Sequence[IndexSetSpec]) -> IndexMap:
    """Increasing map sending block ``B_n`` into target ``A_n``.

    Uses the greedy recursion ``phi(k) = min{j in A_nu(k) : j > phi(k-1)}``
    with ``phi(0) = 0``, where ``nu(k)`` is the block containing ``k``.  The
    result is the pointwise smallest increasing map with ``phi(B_n) ⊆ A_n``.
    """
    if len(blocks) != len(targets):
        raise InvalidPartition(f"{len(blocks)} blocks but {len(targets)} targets")
    owner: dict[int, int] = {}
    for n, block in enumerate(blocks):
        if block.kind != "explicit":
            raise InvalidPartition("blocks must be explicit finite sets")
        for k in block.values:
            if k in owner:
                raise InvalidPartition(f"index {k} lies in two blocks")
            owner[k] = n
    K = len(owner)
    if K and set(owner) != set(range(1, K + 1)):
        raise InvalidPartition(f"blocks do not partition 1..{K}")
    if not all(t.is_infinite for t in targets):
        raise NonDisjointTargets("targets must be infinite index sets")
    if not targets_disjoint(targets):
        raise NonDisjointTargets("targets are not pairwise disjoint")
    phi = []
    prev = 0
    for k in range(1, K + 1):
        nxt = targets[owner[k]].next_after(prev)
        if nxt is None:  # enumerator ran dry; contract says it cannot
            raise NonDisjointTargets(f"target {owner[k] + 1} is exhausted after {prev}")
        phi.append(nxt)
        prev = nxt
    return IndexMap(tuple(phi))


# -- disjoint families ------------------------------------------------------


@dataclass(frozen=True)
class BlockFamily:
    """Pairwise disjointly supported nonzero vectors.

    ``origin`` records how the family was produced (scheme, truncation) and
    is carried along into reports.
    """

    members: tuple[SeqVec, ...]
    origin: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        seen: set[int] = set()
        for n, f in enumerate(self.members, 1):
            if len(f) == 0:
                raise ZeroMember(f"member {n} is the zero vector")
            s = set(f.indices)
            if seen & s:
                raise OverlappingSupports(f"member {n} overlaps an earlier member")
            seen |= s

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, n: int) -> SeqVec:
        return self.members[n]

    def to_json_obj(self) -> dict:
        return {"members": [f.to_json_obj() for f in self.members], "origin": self.origin}


def disjoint_sum(family: BlockFamily | Sequence[SeqVec], coeffs: SeqVec) -> SeqVec:
    """``sum_n coeffs[n] * family[n]`` (members indexed from 1)."""
    members = family.members if isinstance(family, BlockFamily) else tuple(family)
    out: dict[int, float] = {}
    for n, f in enumerate(members, 1):
        c = coeffs[n]
        for i, v in f:
            if i in out:
                raise OverlappingSupports(f"index {i} appears in two members")
            out[i] = c * v
    return SeqVec(out)
