"""Index categories and 2-categories.

Effectful computations are indexed by morphisms of a category.  The
kinds supported here are the ones the built-in structures need: finite
tables, free path categories over a graph, one-object categories from a
(pre-ordered) monoid, discrete and indiscrete categories, pair
completions, products, and finite function categories (objects are
finite value sets, morphisms are all functions between them).

Morphisms are plain data: a source, a target, and a word describing the
arrow.  Equality is structural on the word, so free paths are equal iff
their generator sequences are equal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping

from .errors import (
    CompositionMismatch,
    DanglingEdge,
    ForeignMorphism,
    SymbolicObjects,
    UnknownObject,
)
from .values import Value


@dataclass(frozen=True)
class ObjectId:
    name: str

    def __str__(self) -> str:
        return self.name


# --- morphism words ---

@dataclass(frozen=True)
class WIdentity:
    obj: ObjectId


@dataclass(frozen=True)
class WPath:
    gens: tuple[str, ...]


@dataclass(frozen=True)
class WElem:
    """Morphism labelled by a monoid carrier element."""

    value: Hashable


@dataclass(frozen=True)
class WPair:
    """The unique arrow of an indiscrete category (a 'domino')."""

    src: ObjectId
    tgt: ObjectId


@dataclass(frozen=True)
class WInj1:
    inner: "Morphism"


@dataclass(frozen=True)
class WInj2:
    src: ObjectId
    tgt: ObjectId


@dataclass(frozen=True)
class WTuple:
    left: "Morphism"
    right: "Morphism"


@dataclass(frozen=True)
class WFn:
    """Graph of a function between two finite value sets."""

    graph: tuple[tuple[Value, Value], ...]

    def apply(self, v: Value) -> Value:
        for a, b in self.graph:
            if a == v:
                return b
        raise ForeignMorphism(f"function graph undefined at {v.show()}")


Word = WIdentity | WPath | WElem | WPair | WInj1 | WInj2 | WTuple | WFn


def _show_elem(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return str(x)


def word_str(w: Word) -> str:
    if isinstance(w, WIdentity):
        return f"id_{w.obj.name}"
    if isinstance(w, WPath):
        return ";".join(w.gens)
    if isinstance(w, WElem):
        return _show_elem(w.value)
    if isinstance(w, WPair):
        return f"({w.src.name},{w.tgt.name})"
    if isinstance(w, WInj1):
        return f"in1({word_str(w.inner.word)})"
    if isinstance(w, WInj2):
        return f"in2({w.src.name},{w.tgt.name})"
    if isinstance(w, WTuple):
        return f"({word_str(w.left.word)}, {w.right.src.name} -> {w.right.tgt.name})"
    if isinstance(w, WFn):
        return "fn{" + ", ".join(f"{a.show()}->{b.show()}" for a, b in w.graph) + "}"
    raise ForeignMorphism(f"unknown word {w!r}")


@dataclass(frozen=True)
class Morphism:
    src: ObjectId
    tgt: ObjectId
    word: Word

    def __str__(self) -> str:
        return f"{word_str(self.word)} : {self.src.name} -> {self.tgt.name}"


def morphism_key(m: Morphism):
    """Deterministic sort key for morphisms (reports, pools)."""
    return (m.src.name, m.tgt.name, word_str(m.word))


class IndexCategory:
    """Abstract interface; concrete kinds below."""

    kind: str = "abstract"

    def object_ids(self) -> tuple[ObjectId, ...] | None:
        """Enumerated objects, or None when the object set is symbolic."""
        raise NotImplementedError

    def has_object(self, obj: ObjectId) -> bool:
        objs = self.object_ids()
        return objs is None or obj in objs

    def identity(self, obj: ObjectId) -> Morphism:
        raise NotImplementedError

    def contains(self, m: Morphism) -> bool:
        raise NotImplementedError

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        """g after f.  Requires tgt(f) = src(g)."""
        raise NotImplementedError

    def morphisms(self, max_path_len: int = 4) -> tuple[Morphism, ...]:
        """Enumerate (a sample of) the morphisms, deterministically sorted."""
        raise NotImplementedError

    # Identities reconstructed from a morphism's endpoints.  Works even for
    # symbolic object sets, where identity(obj) cannot decode the object.
    def identity_at_src(self, m: Morphism) -> Morphism:
        return self.identity(m.src)

    def identity_at_tgt(self, m: Morphism) -> Morphism:
        return self.identity(m.tgt)

    def _check_endpoints(self, g: Morphism, f: Morphism) -> None:
        if not (self.contains(f) and self.contains(g)):
            bad = f if not self.contains(f) else g
            raise ForeignMorphism(f"{bad} is not a morphism of this {self.kind} category")
        if f.tgt != g.src:
            raise CompositionMismatch(
                f"cannot compose: target {f.tgt.name} of ({f}) differs from source {g.src.name} of ({g})")


def _require_object(cat: IndexCategory, obj: ObjectId) -> None:
    if not cat.has_object(obj):
        raise UnknownObject(f"no object named {obj.name}")


def _sorted_morphisms(ms: Iterable[Morphism]) -> tuple[Morphism, ...]:
    return tuple(sorted(ms, key=morphism_key))


@dataclass(frozen=True)
class FiniteTableCategory(IndexCategory):
    """Explicitly tabulated finite category."""

    objects: tuple[ObjectId, ...]
    arrows: tuple[Morphism, ...]  # non-identity morphisms
    comp: Mapping[tuple[Word, Word], Morphism] = field(hash=False)  # (g.word, f.word) -> g o f

    kind = "table"

    def object_ids(self):
        return self.objects

    def identity(self, obj):
        _require_object(self, obj)
        return Morphism(obj, obj, WIdentity(obj))

    def contains(self, m):
        if isinstance(m.word, WIdentity):
            return m.word.obj == m.src == m.tgt and self.has_object(m.src)
        return m in self.arrows

    def compose(self, g, f):
        self._check_endpoints(g, f)
        if isinstance(f.word, WIdentity):
            return g
        if isinstance(g.word, WIdentity):
            return f
        try:
            return self.comp[(g.word, f.word)]
        except KeyError:
            raise CompositionMismatch(f"composition table has no entry for ({g}) o ({f})")

    def morphisms(self, max_path_len: int = 4):
        ids = [self.identity(o) for o in self.objects]
        return _sorted_morphisms(list(self.arrows) + ids)


@dataclass(frozen=True)
class FreeCategory(IndexCategory):
    """Free category on a labelled graph; morphisms are generator paths."""

    objects: tuple[ObjectId, ...]
    edges: tuple[tuple[str, ObjectId, ObjectId], ...]  # (label, src, tgt)

    kind = "free"

    def object_ids(self):
        return self.objects

    def edge(self, label: str) -> tuple[ObjectId, ObjectId]:
        for name, s, t in self.edges:
            if name == label:
                return (s, t)
        raise ForeignMorphism(f"no generator named {label}")

    def identity(self, obj):
        _require_object(self, obj)
        return Morphism(obj, obj, WIdentity(obj))

    def path(self, labels: Iterable[str]) -> Morphism:
        gens = tuple(labels)
        if not gens:
            raise ForeignMorphism("empty path; use identity()")
        src, cur = None, None
        for name in gens:
            s, t = self.edge(name)
            if src is None:
                src, cur = s, t
            else:
                if s != cur:
                    raise CompositionMismatch(f"generator {name} does not chain at {cur.name}")
                cur = t
        return Morphism(src, cur, WPath(gens))

    def contains(self, m):
        if isinstance(m.word, WIdentity):
            return m.word.obj == m.src == m.tgt and self.has_object(m.src)
        if not isinstance(m.word, WPath) or not m.word.gens:
            return False
        try:
            return self.path(m.word.gens) == m
        except (ForeignMorphism, CompositionMismatch):
            return False

    def compose(self, g, f):
        self._check_endpoints(g, f)
        if isinstance(f.word, WIdentity):
            return g
        if isinstance(g.word, WIdentity):
            return f
        return Morphism(f.src, g.tgt, WPath(f.word.gens + g.word.gens))

    def morphisms(self, max_path_len: int = 4):
        out = [self.identity(o) for o in self.objects]
        frontier = [self.path([name]) for name, _, _ in self.edges]
        out.extend(frontier)
        for _ in range(max_path_len - 1):
            nxt = []
            for m in frontier:
                for name, s, _ in self.edges:
                    if s == m.tgt:
                        nxt.append(Morphism(m.src, self.edge(name)[1],
                                            WPath(m.word.gens + (name,))))
            out.extend(nxt)
            frontier = nxt
        return _sorted_morphisms(out)


STAR = ObjectId("*")


@dataclass(frozen=True)
class MonoidCategory(IndexCategory):
    """One-object category whose arrows are monoid elements."""

    op: Callable[[Hashable, Hashable], Hashable] = field(hash=False, compare=False)
    unit: Hashable
    sample: tuple[Hashable, ...]
    label: str = "monoid"

    kind = "monoid"

    def object_ids(self):
        return (STAR,)

    def elem(self, x) -> Morphism:
        return Morphism(STAR, STAR, WElem(x))

    def identity(self, obj):
        _require_object(self, obj)
        return self.elem(self.unit)

    def contains(self, m):
        return isinstance(m.word, WElem) and m.src == m.tgt == STAR

    def compose(self, g, f):
        self._check_endpoints(g, f)
        # g o f runs f first, so the product is f * g.
        return self.elem(self.op(f.word.value, g.word.value))

    def morphisms(self, max_path_len: int = 4):
        elems = {self.unit, *self.sample}
        return tuple(self.elem(x) for x in sorted(elems, key=lambda e: (str(type(e)), e)))


@dataclass(frozen=True)
class DiscreteCategory(IndexCategory):
    objects: tuple[ObjectId, ...]

    kind = "discrete"

    def object_ids(self):
        return self.objects

    def identity(self, obj):
        _require_object(self, obj)
        return Morphism(obj, obj, WIdentity(obj))

    def contains(self, m):
        return isinstance(m.word, WIdentity) and m.word.obj == m.src == m.tgt and self.has_object(m.src)

    def compose(self, g, f):
        self._check_endpoints(g, f)
        return f

    def morphisms(self, max_path_len: int = 4):
        return _sorted_morphisms(self.identity(o) for o in self.objects)


@dataclass(frozen=True)
class IndiscreteCategory(IndexCategory):
    """Exactly one arrow between every ordered pair of objects.

    objects=None makes the object set symbolic: membership is by name and
    the category cannot be enumerated.
    """

    objects: tuple[ObjectId, ...] | None

    kind = "indiscrete"

    def object_ids(self):
        return self.objects

    def pair(self, a: ObjectId, b: ObjectId) -> Morphism:
        _require_object(self, a)
        _require_object(self, b)
        return Morphism(a, b, WPair(a, b))

    def identity(self, obj):
        return self.pair(obj, obj)

    def contains(self, m):
        return (isinstance(m.word, WPair) and m.word.src == m.src and m.word.tgt == m.tgt
                and self.has_object(m.src) and self.has_object(m.tgt))

    def compose(self, g, f):
        self._check_endpoints(g, f)
        return self.pair(f.src, g.tgt)

    def morphisms(self, max_path_len: int = 4):
        if self.objects is None:
            raise SymbolicObjects("indiscrete category over a symbolic object set")
        return _sorted_morphisms(self.pair(a, b) for a in self.objects for b in self.objects)


@dataclass(frozen=True)
class PairCompletionCategory(IndexCategory):
    """Inner morphisms tagged in1 plus one formal in2 arrow per object pair."""

    inner: IndexCategory

    kind = "pair_completion"

    def object_ids(self):
        return self.inner.object_ids()

    def inj1(self, m: Morphism) -> Morphism:
        if not self.inner.contains(m):
            raise ForeignMorphism(f"{m} is not in the inner category")
        return Morphism(m.src, m.tgt, WInj1(m))

    def inj2(self, a: ObjectId, b: ObjectId) -> Morphism:
        _require_object(self, a)
        _require_object(self, b)
        return Morphism(a, b, WInj2(a, b))

    def identity(self, obj):
        _require_object(self, obj)
        return self.inj1(self.inner.identity(obj))

    def contains(self, m):
        if isinstance(m.word, WInj1):
            i = m.word.inner
            return self.inner.contains(i) and i.src == m.src and i.tgt == m.tgt
        if isinstance(m.word, WInj2):
            return m.word.src == m.src and m.word.tgt == m.tgt and self.has_object(m.src) and self.has_object(m.tgt)
        return False

    def compose(self, g, f):
        self._check_endpoints(g, f)
        if isinstance(f.word, WInj1) and isinstance(g.word, WInj1):
            return self.inj1(self.inner.compose(g.word.inner, f.word.inner))
        return self.inj2(f.src, g.tgt)

    def morphisms(self, max_path_len: int = 4):
        objs = self.object_ids()
        if objs is None:
            raise SymbolicObjects("pair completion of a symbolic category")
        out = [self.inj1(m) for m in self.inner.morphisms(max_path_len)]
        out.extend(self.inj2(a, b) for a in objs for b in objs)
        return _sorted_morphisms(out)


_ESC = str.maketrans({"\\": "\\\\", "|": "\\|", "<": "\\<", ">": "\\>"})


def pair_object(a: ObjectId, b: ObjectId) -> ObjectId:
    return ObjectId(f"<{a.name.translate(_ESC)}|{b.name.translate(_ESC)}>")


def split_pair_object(obj: ObjectId) -> tuple[ObjectId, ObjectId]:
    name = obj.name
    if not (name.startswith("<") and name.endswith(">")):
        raise UnknownObject(f"{name} is not a product object")
    body, parts, cur, i = name[1:-1], [], [], 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            cur.append(body[i + 1])
            i += 2
        elif c == "|":
            parts.append("".join(cur))
            cur = []
            i += 1
        else:
            cur.append(c)
            i += 1
    parts.append("".join(cur))
    if len(parts) != 2:
        raise UnknownObject(f"{name} is not a product object")
    return ObjectId(parts[0]), ObjectId(parts[1])


@dataclass(frozen=True)
class ProductCategory(IndexCategory):
    left: IndexCategory
    right: IndexCategory

    kind = "product"

    def object_ids(self):
        lo, ro = self.left.object_ids(), self.right.object_ids()
        if lo is None or ro is None:
            return None
        return tuple(pair_object(a, b) for a in lo for b in ro)

    def has_object(self, obj):
        try:
            a, b = split_pair_object(obj)
        except UnknownObject:
            return False
        return self.left.has_object(a) and self.right.has_object(b)

    def tuple_morphism(self, l: Morphism, r: Morphism) -> Morphism:
        return Morphism(pair_object(l.src, r.src), pair_object(l.tgt, r.tgt), WTuple(l, r))

    def identity(self, obj):
        a, b = split_pair_object(obj)
        return self.tuple_morphism(self.left.identity(a), self.right.identity(b))

    def identity_at_src(self, m):
        return self.tuple_morphism(self.left.identity_at_src(m.word.left),
                                   self.right.identity_at_src(m.word.right))

    def identity_at_tgt(self, m):
        return self.tuple_morphism(self.left.identity_at_tgt(m.word.left),
                                   self.right.identity_at_tgt(m.word.right))

    def contains(self, m):
        return (isinstance(m.word, WTuple)
                and self.left.contains(m.word.left) and self.right.contains(m.word.right)
                and m.src == pair_object(m.word.left.src, m.word.right.src)
                and m.tgt == pair_object(m.word.left.tgt, m.word.right.tgt))

    def compose(self, g, f):
        self._check_endpoints(g, f)
        return self.tuple_morphism(self.left.compose(g.word.left, f.word.left),
                                   self.right.compose(g.word.right, f.word.right))

    def morphisms(self, max_path_len: int = 4):
        ls = self.left.morphisms(max_path_len)
        rs = self.right.morphisms(max_path_len)
        return _sorted_morphisms(self.tuple_morphism(l, r) for l in ls for r in rs)


@dataclass(frozen=True)
class FuncCategory(IndexCategory):
    """Objects are named finite value sets; arrows are all functions."""

    sets: tuple[tuple[ObjectId, tuple[Value, ...]], ...]

    kind = "func"

    def object_ids(self):
        return tuple(o for o, _ in self.sets)

    def carrier(self, obj: ObjectId) -> tuple[Value, ...]:
        for o, vs in self.sets:
            if o == obj:
                return vs
        raise UnknownObject(f"no object named {obj.name}")

    def fn(self, src: ObjectId, tgt: ObjectId, mapping: Mapping[Value, Value]) -> Morphism:
        dom = self.carrier(src)
        cod = self.carrier(tgt)
        graph = []
        for v in dom:
            out = mapping[v]
            if out not in cod:
                raise ForeignMorphism(f"{out.show()} is not in the target carrier")
            graph.append((v, out))
        return Morphism(src, tgt, WFn(tuple(graph)))

    def identity(self, obj):
        return self.fn(obj, obj, {v: v for v in self.carrier(obj)})

    def contains(self, m):
        if not isinstance(m.word, WFn):
            return False
        try:
            dom, cod = self.carrier(m.src), self.carrier(m.tgt)
        except UnknownObject:
            return False
        keys = tuple(a for a, _ in m.word.graph)
        return keys == dom and all(b in cod for _, b in m.word.graph)

    def compose(self, g, f):
        self._check_endpoints(g, f)
        graph = tuple((a, g.word.apply(b)) for a, b in f.word.graph)
        return Morphism(f.src, g.tgt, WFn(graph))

    def morphisms(self, max_path_len: int = 4):
        out = []
        for src, dom in self.sets:
            for tgt, cod in self.sets:
                for image in itertools.product(cod, repeat=len(dom)):
                    out.append(Morphism(src, tgt, WFn(tuple(zip(dom, image)))))
        return _sorted_morphisms(out)


@dataclass(frozen=True)
class TwoCategory:
    """An index category plus a decidable 2-cell preorder on parallel arrows."""

    base: IndexCategory
    cell: Callable[[Morphism, Morphism], bool] = field(hash=False, compare=False)

    def leq(self, f: Morphism, g: Morphism) -> bool:
        if f.src != g.src or f.tgt != g.tgt:
            return False
        return f == g or self.cell(f, g)


@dataclass(frozen=True)
class WideSubcategory:
    parent: IndexCategory
    member: Callable[[Morphism], bool] = field(hash=False, compare=False)

    def contains(self, m: Morphism) -> bool:
        return self.parent.contains(m) and self.member(m)


def whole_category(cat: IndexCategory) -> WideSubcategory:
    return WideSubcategory(cat, lambda m: True)


# --- module-level operation surface ---

def compose(cat: IndexCategory, g: Morphism, f: Morphism) -> Morphism:
    return cat.compose(g, f)


def identity(cat: IndexCategory, obj: ObjectId) -> Morphism:
    return cat.identity(obj)


def monoid_to_category(op, unit, sample, label: str = "monoid") -> MonoidCategory:
    """One object, arrows are carrier elements, composition is the op."""
    return MonoidCategory(op=op, unit=unit, sample=tuple(sample), label=label)


def pomonoid_to_2category(op, unit, sample, leq, label: str = "pomonoid") -> TwoCategory:
    base = monoid_to_category(op, unit, sample, label)

    def cell(f: Morphism, g: Morphism) -> bool:
        return leq(f.word.value, g.word.value)

    return TwoCategory(base, cell)


def discretise(cat: IndexCategory) -> DiscreteCategory:
    objs = cat.object_ids()
    if objs is None:
        raise SymbolicObjects("cannot discretise a symbolic object set")
    return DiscreteCategory(tuple(objs))


def indiscretise(cat: IndexCategory) -> IndiscreteCategory:
    objs = cat.object_ids()
    if objs is None:
        raise SymbolicObjects("cannot indiscretise a symbolic object set")
    return IndiscreteCategory(tuple(objs))


def pair_completion(cat: IndexCategory) -> PairCompletionCategory:
    if cat.object_ids() is None:
        raise SymbolicObjects("cannot pair-complete a symbolic object set")
    return PairCompletionCategory(cat)


def free_category(objects: Iterable[str | ObjectId],
                  edges: Iterable[tuple[str, str | ObjectId, str | ObjectId]]) -> FreeCategory:
    objs = tuple(o if isinstance(o, ObjectId) else ObjectId(o) for o in objects)
    norm = []
    for name, s, t in edges:
        s = s if isinstance(s, ObjectId) else ObjectId(s)
        t = t if isinstance(t, ObjectId) else ObjectId(t)
        if s not in objs or t not in objs:
            raise DanglingEdge(f"edge {name} references an undeclared object")
        norm.append((name, s, t))
    return FreeCategory(objs, tuple(norm))


def func_category(sets: Mapping[str, Iterable[Value]]) -> FuncCategory:
    norm = tuple((ObjectId(name), tuple(vs)) for name, vs in sets.items())
    return FuncCategory(norm)


def tabulate_free(free: FreeCategory, max_path_len: int = 8) -> FiniteTableCategory:
    """Materialize a free category as an explicit table.

    Only works when the path set is finite (acyclic graphs); a cycle makes
    the enumeration hit the cap and is rejected.
    """
    arrows = [m for m in free.morphisms(max_path_len) if not isinstance(m.word, WIdentity)]
    longest = max((len(m.word.gens) for m in arrows), default=0)
    if longest >= max_path_len:
        raise SymbolicObjects("graph has unbounded paths; cannot tabulate")
    comp = {}
    for f in arrows:
        for g in arrows:
            if f.tgt == g.src:
                comp[(g.word, f.word)] = Morphism(f.src, g.tgt, WPath(f.word.gens + g.word.gens))
    return FiniteTableCategory(free.objects, tuple(arrows), comp)
