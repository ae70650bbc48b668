"""Closed dynamic value universe.

Every payload the library manipulates is one of the shapes below:
unit, integer, exact rational, boolean, string, pair, sequence, tagged
variant, finite function table, or finite-support probability
distribution.  All shapes are immutable, hashable, and have decidable
structural equality; tables and distributions are canonicalized at
construction so equal contents compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import InvalidValue, MalformedPayload


class Value:
    """Base class; concrete shapes are the frozen dataclasses below."""

    __slots__ = ()

    def show(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.show()


@dataclass(frozen=True)
class VUnit(Value):
    def show(self) -> str:
        return "()"


@dataclass(frozen=True)
class VInt(Value):
    n: int

    def show(self) -> str:
        return str(self.n)


@dataclass(frozen=True)
class VRat(Value):
    q: Fraction

    def show(self) -> str:
        return str(self.q)


@dataclass(frozen=True)
class VBool(Value):
    b: bool

    def show(self) -> str:
        return "true" if self.b else "false"


@dataclass(frozen=True)
class VStr(Value):
    s: str

    def show(self) -> str:
        return '"' + self.s.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True)
class VPair(Value):
    fst: Value
    snd: Value

    def show(self) -> str:
        return f"({self.fst.show()}, {self.snd.show()})"


@dataclass(frozen=True)
class VSeq(Value):
    items: tuple[Value, ...]

    def show(self) -> str:
        return "[" + ", ".join(v.show() for v in self.items) + "]"


@dataclass(frozen=True)
class VTag(Value):
    tag: str
    value: Value

    def show(self) -> str:
        return f"#{self.tag}({self.value.show()})"


@dataclass(frozen=True)
class VTable(Value):
    """Finite map; entries sorted by canonical key order, keys unique."""

    entries: tuple[tuple[Value, Value], ...]

    def show(self) -> str:
        body = "; ".join(f"{k.show()} -> {v.show()}" for k, v in self.entries)
        return "{" + body + "}"

    def keys(self) -> tuple[Value, ...]:
        return tuple(k for k, _ in self.entries)

    def get(self, key: Value) -> Value:
        for k, v in self.entries:
            if k == key:
                return v
        raise MalformedPayload(f"table has no entry for {key.show()}")

    def has(self, key: Value) -> bool:
        return any(k == key for k, _ in self.entries)


@dataclass(frozen=True)
class VDist(Value):
    """Finite-support distribution; positive exact weights summing to 1."""

    entries: tuple[tuple[Value, Fraction], ...]

    def show(self) -> str:
        body = "; ".join(f"{v.show()} @ {w}" for v, w in self.entries)
        return "dist{" + body + "}"

    def support(self) -> tuple[Value, ...]:
        return tuple(v for v, _ in self.entries)

    def weight(self, v: Value) -> Fraction:
        for u, w in self.entries:
            if u == v:
                return w
        return Fraction(0)


def _cached_hash(parts):
    """Composite values are hashed constantly by tables, caches, and law
    comparisons; memoize the recursive hash on first use."""

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash(parts(self))
            object.__setattr__(self, "_h", h)
        return h

    return __hash__


VPair.__hash__ = _cached_hash(lambda s: ("P", s.fst, s.snd))
VSeq.__hash__ = _cached_hash(lambda s: ("S", s.items))
VTag.__hash__ = _cached_hash(lambda s: ("G", s.tag, s.value))
VTable.__hash__ = _cached_hash(lambda s: ("T", s.entries))
VDist.__hash__ = _cached_hash(lambda s: ("D", s.entries))

unit = VUnit()


def vint(n: int) -> VInt:
    return VInt(int(n))


def vrat(num, den=None) -> VRat:
    return VRat(Fraction(num) if den is None else Fraction(num, den))


def vbool(b: bool) -> VBool:
    return VBool(bool(b))


def vstr(s: str) -> VStr:
    return VStr(s)


def vpair(a: Value, b: Value) -> VPair:
    return VPair(a, b)


def vseq(items: Iterable[Value]) -> VSeq:
    return VSeq(tuple(items))


def vtag(tag: str, value: Value) -> VTag:
    return VTag(tag, value)


_RANKS = {
    VUnit: 0, VInt: 1, VRat: 2, VBool: 3, VStr: 4,
    VPair: 5, VSeq: 6, VTag: 7, VTable: 8, VDist: 9,
}

_KEY_CACHE: dict[Value, tuple] = {}


def sort_key(v: Value):
    """Total order over the whole universe, used for canonical sorting."""
    cached = _KEY_CACHE.get(v)
    if cached is not None:
        return cached
    key = _sort_key(v)
    if len(_KEY_CACHE) < 1 << 18:
        _KEY_CACHE[v] = key
    return key


def _sort_key(v: Value):
    rank = _RANKS[type(v)]
    if isinstance(v, VUnit):
        return (rank,)
    if isinstance(v, VInt):
        return (rank, v.n)
    if isinstance(v, VRat):
        return (rank, v.q)
    if isinstance(v, VBool):
        return (rank, v.b)
    if isinstance(v, VStr):
        return (rank, v.s)
    if isinstance(v, VPair):
        return (rank, sort_key(v.fst), sort_key(v.snd))
    if isinstance(v, VSeq):
        return (rank, tuple(sort_key(x) for x in v.items))
    if isinstance(v, VTag):
        return (rank, v.tag, sort_key(v.value))
    if isinstance(v, VTable):
        return (rank, tuple((sort_key(k), sort_key(x)) for k, x in v.entries))
    if isinstance(v, VDist):
        return (rank, tuple((sort_key(x), w) for x, w in v.entries))
    raise InvalidValue(f"foreign value {v!r}")


def table(entries: Mapping[Value, Value] | Iterable[tuple[Value, Value]]) -> VTable:
    pairs = list(entries.items()) if isinstance(entries, Mapping) else list(entries)
    pairs.sort(key=lambda kv: sort_key(kv[0]))
    for (k1, _), (k2, _) in zip(pairs, pairs[1:]):
        if k1 == k2:
            raise InvalidValue(f"duplicate table key {k1.show()}")
    return VTable(tuple(pairs))


def dist(entries: Mapping[Value, Fraction] | Iterable[tuple[Value, Fraction]]) -> VDist:
    pairs = list(entries.items()) if isinstance(entries, Mapping) else list(entries)
    acc: dict[Value, Fraction] = {}
    for v, w in pairs:
        w = Fraction(w)
        if w < 0:
            raise InvalidValue("negative distribution weight")
        if w == 0:
            continue
        acc[v] = acc.get(v, Fraction(0)) + w
    total = sum(acc.values(), Fraction(0))
    if total != 1:
        raise InvalidValue(f"distribution weights sum to {total}, not 1")
    entries_sorted = tuple(sorted(acc.items(), key=lambda kv: sort_key(kv[0])))
    return VDist(entries_sorted)


def point(v: Value) -> VDist:
    return VDist(((v, Fraction(1)),))


def dist_map(fn: Callable[[Value], Value], d: VDist) -> VDist:
    return dist([(fn(v), w) for v, w in d.entries])


def dist_bind(d: VDist, k: Callable[[Value], VDist]) -> VDist:
    out: list[tuple[Value, Fraction]] = []
    for v, w in d.entries:
        for u, x in k(v).entries:
            out.append((u, w * x))
    return dist(out)


def uniform(values: Iterable[Value]) -> VDist:
    vs = list(values)
    if not vs:
        raise InvalidValue("uniform over empty support")
    w = Fraction(1, len(vs))
    return dist([(v, w) for v in vs])
