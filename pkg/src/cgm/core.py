"""Value-level morphism-graded monads and the sampling law harness.

An instance is a descriptor bundling an index category with unit,
multiplication, functor map, a payload validator, and a deterministic
payload sampler.  The harness instantiates every coherence diagram
pointwise on sampled payloads and compares both legs with exact
structural equality; there is no numeric tolerance anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import (
    CgmError,
    InconsistentContinuationIndex,
    MalformedPayload,
    NoTwoCell,
    NotInSubcategory,
    SamplerUnavailable,
    UnknownObject,
)
from .indexcat import (
    IndexCategory,
    Morphism,
    ObjectId,
    TwoCategory,
    WideSubcategory,
    morphism_key,
)
from .rng import Rng, derive_seed
from .values import Value, vbool, vint, vpair, vtag


@dataclass(frozen=True)
class GradedComputation:
    """A morphism index paired with the payload inhabiting it."""

    index: Morphism
    payload: Value

    def __str__(self) -> str:
        return f"[{self.index}] {self.payload.show()}"


@dataclass
class CatGradedMonad:
    name: str
    index_cat: IndexCategory
    unit_fn: Callable[[ObjectId, Value], Value]
    mult_fn: Callable[[Morphism, Morphism, Value], Value]
    map_fn: Callable[[Morphism, Callable[[Value], Value], Value], Value]
    validator: Callable[[Morphism, Value], bool]
    sampler: Callable[[Morphism, Rng], Value] | None = None
    element_sampler: Callable[[Rng], Value] = lambda rng: vint(rng.randint(0, 9))
    index_samples: tuple[Morphism, ...] | None = None


@dataclass
class TwoCatGradedMonad:
    base: CatGradedMonad
    index_cat2: TwoCategory
    approx_fn: Callable[[Morphism, Morphism, Value], Value]

    @property
    def name(self) -> str:
        return self.base.name


@dataclass
class GeneralisedUnit:
    monad: CatGradedMonad
    sub: WideSubcategory
    geneta_fn: Callable[[Morphism, Value], Value]

    @property
    def name(self) -> str:
        return self.monad.name


@dataclass
class Homomorphism:
    """Index-preserving map between two monads over the same index category."""

    name: str
    source: CatGradedMonad
    target: CatGradedMonad
    gamma_fn: Callable[[Morphism, Value], Value]


# --- operations ---

def unit(T: CatGradedMonad, obj: ObjectId, a: Value) -> GradedComputation:
    if not T.index_cat.has_object(obj):
        raise UnknownObject(f"no object named {obj.name}")
    idx = T.index_cat.identity(obj)
    payload = T.unit_fn(obj, a)
    if not T.validator(idx, payload):
        raise MalformedPayload(f"unit produced an invalid payload at {idx}")
    return GradedComputation(idx, payload)


def mult(T: CatGradedMonad, f: Morphism, g: Morphism, nested: Value) -> GradedComputation:
    idx = T.index_cat.compose(g, f)
    if not T.validator(f, nested):
        raise MalformedPayload(f"nested payload is invalid at outer index {f}")
    payload = T.mult_fn(f, g, nested)
    if not T.validator(idx, payload):
        raise MalformedPayload(f"mult produced an invalid payload at {idx}")
    return GradedComputation(idx, payload)


def fmap(T: CatGradedMonad, f: Morphism, fn: Callable[[Value], Value], payload: Value) -> Value:
    if not T.validator(f, payload):
        raise MalformedPayload(f"payload is invalid at {f}")
    return T.map_fn(f, fn, payload)


def bind(T: CatGradedMonad,
         c: GradedComputation,
         k: Callable[[Value], GradedComputation],
         cont_index: Morphism | None = None) -> GradedComputation:
    """Sequence c with a continuation whose outputs all share one index."""
    seen: list[Morphism] = []

    def run(a: Value) -> Value:
        out = k(a)
        seen.append(out.index)
        return out.payload

    mapped = fmap(T, c.index, run, c.payload)
    for idx in seen:
        if idx != seen[0]:
            raise InconsistentContinuationIndex(
                f"continuation produced indices ({seen[0]}) and ({idx})")
    if seen:
        g = seen[0]
        if cont_index is not None and g != cont_index:
            raise InconsistentContinuationIndex(
                f"continuation produced ({g}), expected ({cont_index})")
    elif cont_index is not None:
        g = cont_index
    else:
        raise InconsistentContinuationIndex(
            "effect-free computation: continuation index must be supplied")
    return mult(T, c.index, g, mapped)


def approximate(T2: TwoCatGradedMonad, f: Morphism, g: Morphism,
                c: GradedComputation) -> GradedComputation:
    if c.index != f:
        raise MalformedPayload(f"computation is indexed by ({c.index}), not ({f})")
    if not T2.index_cat2.leq(f, g):
        raise NoTwoCell(f"no 2-cell from ({f}) to ({g})")
    payload = T2.approx_fn(f, g, c.payload)
    if not T2.base.validator(g, payload):
        raise MalformedPayload(f"approximation produced an invalid payload at {g}")
    return GradedComputation(g, payload)


def gen_unit(G: GeneralisedUnit, f: Morphism, a: Value) -> GradedComputation:
    if not G.sub.contains(f):
        raise NotInSubcategory(f"({f}) is outside the unit subcategory")
    payload = G.geneta_fn(f, a)
    if not G.monad.validator(f, payload):
        raise MalformedPayload(f"generalised unit produced an invalid payload at {f}")
    return GradedComputation(f, payload)


# --- law reports ---

@dataclass(frozen=True)
class LawFailure:
    law: str
    indices: tuple[Morphism, ...]
    input_value: Value | None
    lhs: Value | None
    rhs: Value | None
    note: str = ""

    def render(self) -> str:
        lines = [f"FAIL {self.law}"]
        for i, m in enumerate(self.indices):
            lines.append(f"  index[{i}]: {m}")
        if self.input_value is not None:
            lines.append(f"  input: {self.input_value.show()}")
        if self.lhs is not None:
            lines.append(f"  lhs: {self.lhs.show()}")
        if self.rhs is not None:
            lines.append(f"  rhs: {self.rhs.show()}")
        if self.note:
            lines.append(f"  note: {self.note}")
        return "\n".join(lines)


@dataclass(frozen=True)
class LawReport:
    counts: tuple[tuple[str, int], ...]  # (law name, instantiations run)
    failures: tuple[LawFailure, ...]

    @property
    def checks_run(self) -> int:
        return sum(n for _, n in self.counts)

    def ok(self) -> bool:
        return not self.failures

    def merge(self, other: "LawReport") -> "LawReport":
        return LawReport(self.counts + other.counts, self.failures + other.failures)

    def render_text(self) -> str:
        lines = []
        for law, n in self.counts:
            bad = sum(1 for f in self.failures if f.law == law)
            lines.append(f"law {law}: {n - bad}/{n}")
        for f in self.failures:
            lines.append(f.render())
        lines.append(f"failures: {len(self.failures)}")
        return "\n".join(lines)

    def render_machine(self) -> str:
        lines = []
        for law, n in self.counts:
            bad = sum(1 for f in self.failures if f.law == law)
            lines.append(f"law.{law}.run={n}")
            lines.append(f"law.{law}.failures={bad}")
        for i, f in enumerate(self.failures):
            lines.append(f"failure.{i}.law={f.law}")
            lines.append("failure.%d.indices=%s"
                         % (i, "; ".join(str(m) for m in f.indices)))
            if f.input_value is not None:
                lines.append(f"failure.{i}.input={f.input_value.show()}")
            if f.lhs is not None:
                lines.append(f"failure.{i}.lhs={f.lhs.show()}")
            if f.rhs is not None:
                lines.append(f"failure.{i}.rhs={f.rhs.show()}")
            if f.note:
                lines.append(f"failure.{i}.note={f.note}")
        lines.append(f"failures.total={len(self.failures)}")
        lines.append(f"status={'ok' if self.ok() else 'fail'}")
        return "\n".join(lines)


# --- harness internals ---

_FN_POOL: tuple[tuple[str, Callable[[Value], Value]], ...] = (
    ("tag", lambda v: vtag("t", v)),
    ("pair1", lambda v: vpair(v, vint(1))),
    ("const7", lambda v: vint(7)),
)


def index_pool(T: CatGradedMonad, max_path_len: int = 4) -> tuple[Morphism, ...]:
    if T.index_samples is not None:
        return tuple(sorted(T.index_samples, key=morphism_key))
    return T.index_cat.morphisms(max_path_len)


def _composable_pairs(pool: Sequence[Morphism]) -> list[tuple[Morphism, Morphism]]:
    return [(f, g) for f in pool for g in pool if f.tgt == g.src]


def _composable_triples(pool: Sequence[Morphism]) -> list[tuple[Morphism, Morphism, Morphism]]:
    pairs = _composable_pairs(pool)
    return [(f, g, h) for f, g in pairs for h in pool if g.tgt == h.src]


def _sample_payload(T: CatGradedMonad, f: Morphism, rng: Rng) -> Value:
    if T.sampler is None:
        raise SamplerUnavailable(f"instance {T.name} has no payload sampler")
    return T.sampler(f, rng)


def _nested2(T: CatGradedMonad, f: Morphism, g: Morphism, rng: Rng) -> Value:
    """A T_f payload whose carried values are T_g payloads, value-dependent."""
    outer = _sample_payload(T, f, rng.fork(0))
    base = _sample_payload(T, g, rng.fork(1))
    return T.map_fn(f, lambda a: T.map_fn(g, lambda b: vpair(a, b), base), outer)


def _nested3(T: CatGradedMonad, f: Morphism, g: Morphism, h: Morphism, rng: Rng) -> Value:
    outer = _sample_payload(T, f, rng.fork(0))
    mid = _sample_payload(T, g, rng.fork(1))
    inner = _sample_payload(T, h, rng.fork(2))

    def mk_mid(a: Value) -> Value:
        return T.map_fn(
            g, lambda b: T.map_fn(h, lambda c: vpair(vpair(a, b), c), inner), mid)

    return T.map_fn(f, mk_mid, outer)


class Runner:
    """Collects per-law instantiation counts and failures."""

    def __init__(self, samples: int, seed: int):
        self.samples = samples
        self.seed = seed
        self.counts: list[tuple[str, int]] = []
        self.failures: list[LawFailure] = []

    def law(self, name: str, data: Sequence, body) -> None:
        """Run `samples` instantiations of one law.

        data: non-empty pool of index tuples, cycled deterministically.
        body(datum, rng) -> (indices, input_value, lhs, rhs).
        """
        if not data:
            self.counts.append((name, 0))
            return
        run = 0
        for i in range(self.samples):
            datum = data[i % len(data)]
            rng = Rng(derive_seed(self.seed, name, i))
            run += 1
            try:
                indices, inp, lhs, rhs = body(datum, rng)
            except CgmError as exc:
                self.failures.append(LawFailure(
                    name, tuple(datum) if isinstance(datum, tuple) else (datum,),
                    None, None, None, note=f"{type(exc).__name__}: {exc}"))
                continue
            if lhs != rhs:
                self.failures.append(LawFailure(name, indices, inp, lhs, rhs))
        self.counts.append((name, run))

    def report(self) -> LawReport:
        return LawReport(tuple(self.counts), tuple(self.failures))


def _monad_laws(T: CatGradedMonad, r: Runner) -> None:
    cat = T.index_cat
    pool = index_pool(T)
    pairs = _composable_pairs(pool)
    triples = _composable_triples(pool)

    def payload_validity(f: Morphism, rng: Rng):
        p = _sample_payload(T, f, rng)
        return (f,), p, vbool(T.validator(f, p)), vbool(True)

    r.law("payload.validity", pool, payload_validity)

    def functor_identity(f: Morphism, rng: Rng):
        p = _sample_payload(T, f, rng)
        return (f,), p, T.map_fn(f, lambda v: v, p), p

    r.law("functor.identity", pool, functor_identity)

    def functor_composition(datum, rng: Rng):
        f, i = datum
        _, fn1 = _FN_POOL[i % len(_FN_POOL)]
        _, fn2 = _FN_POOL[(i + 1) % len(_FN_POOL)]
        p = _sample_payload(T, f, rng)
        lhs = T.map_fn(f, lambda v: fn2(fn1(v)), p)
        rhs = T.map_fn(f, fn2, T.map_fn(f, fn1, p))
        return (f,), p, lhs, rhs

    r.law("functor.composition", [(f, i) for i, f in enumerate(pool)], functor_composition)

    def unit_left(f: Morphism, rng: Rng):
        # wrap outside with the unit at src(f), then flatten
        p = _sample_payload(T, f, rng)
        ids = cat.identity_at_src(f)
        wrapped = T.unit_fn(f.src, p)
        lhs = T.mult_fn(ids, f, wrapped)
        return (f,), p, lhs, p

    r.law("unit.left", pool, unit_left)

    def unit_right(f: Morphism, rng: Rng):
        # wrap each carried value with the unit at tgt(f), then flatten
        p = _sample_payload(T, f, rng)
        idt = cat.identity_at_tgt(f)
        wrapped = T.map_fn(f, lambda a: T.unit_fn(f.tgt, a), p)
        lhs = T.mult_fn(f, idt, wrapped)
        return (f,), p, lhs, p

    r.law("unit.right", pool, unit_right)

    def assoc(datum, rng: Rng):
        f, g, h = datum
        p3 = _nested3(T, f, g, h, rng)
        gf = cat.compose(g, f)
        hg = cat.compose(h, g)
        lhs = T.mult_fn(gf, h, T.mult_fn(f, g, p3))
        rhs = T.mult_fn(f, hg, T.map_fn(f, lambda q: T.mult_fn(g, h, q), p3))
        return (f, g, h), p3, lhs, rhs

    r.law("assoc", triples, assoc)

    def unit_natural(datum, rng: Rng):
        f, i = datum
        _, fn = _FN_POOL[i % len(_FN_POOL)]
        a = T.element_sampler(rng)
        lhs = T.map_fn(cat.identity_at_src(f), fn, T.unit_fn(f.src, a))
        rhs = T.unit_fn(f.src, fn(a))
        return (f,), a, lhs, rhs

    r.law("naturality.unit", [(f, i) for i, f in enumerate(pool)], unit_natural)

    def mult_natural(datum, rng: Rng):
        (f, g), i = datum
        _, fn = _FN_POOL[i % len(_FN_POOL)]
        p2 = _nested2(T, f, g, rng)
        gf = cat.compose(g, f)
        lhs = T.map_fn(gf, fn, T.mult_fn(f, g, p2))
        rhs = T.mult_fn(f, g, T.map_fn(f, lambda q: T.map_fn(g, fn, q), p2))
        return (f, g), p2, lhs, rhs

    r.law("naturality.mult", [(fg, i) for i, fg in enumerate(pairs)], mult_natural)

    def bind_left_unit(g: Morphism, rng: Rng):
        a = T.element_sampler(rng)
        template = _sample_payload(T, g, rng.fork(0))

        def k(x: Value) -> GradedComputation:
            return GradedComputation(g, T.map_fn(g, lambda b: vpair(x, b), template))

        c = unit(T, g.src, a)
        lhs = bind(T, c, k, cont_index=g)
        rhs = k(a)
        return (g,), a, lhs.payload, rhs.payload

    r.law("bind.left_unit", pool, bind_left_unit)

    def bind_right_unit(f: Morphism, rng: Rng):
        p = _sample_payload(T, f, rng)
        c = GradedComputation(f, p)
        idt = cat.identity_at_tgt(f)
        lhs = bind(T, c, lambda a: unit(T, f.tgt, a), cont_index=idt)
        return (f,), p, lhs.payload, p

    r.law("bind.right_unit", pool, bind_right_unit)

    def bind_assoc(datum, rng: Rng):
        f, g, h = datum
        p = _sample_payload(T, f, rng.fork(0))
        tg = _sample_payload(T, g, rng.fork(1))
        th = _sample_payload(T, h, rng.fork(2))
        c = GradedComputation(f, p)

        def k1(x: Value) -> GradedComputation:
            return GradedComputation(g, T.map_fn(g, lambda b: vpair(x, b), tg))

        def k2(y: Value) -> GradedComputation:
            return GradedComputation(h, T.map_fn(h, lambda c2: vpair(y, c2), th))

        hg = cat.compose(h, g)
        lhs = bind(T, bind(T, c, k1, cont_index=g), k2, cont_index=h)
        rhs = bind(T, c, lambda x: bind(T, k1(x), k2, cont_index=h), cont_index=hg)
        return (f, g, h), p, lhs.payload, rhs.payload

    r.law("bind.assoc", triples, bind_assoc)


def _approx_laws(T2: TwoCatGradedMonad, r: Runner) -> None:
    T = T2.base
    cat = T.index_cat
    pool = index_pool(T)
    cells = [(f, g) for f in pool for g in pool if T2.index_cat2.leq(f, g)]
    chains = [(f, g, h)
              for f, g in cells for h in pool if T2.index_cat2.leq(g, h)]
    squares = [(fc, gc) for fc in cells for gc in [
        c for c in cells if c[0].src == fc[0].tgt]]

    def approx_identity(f: Morphism, rng: Rng):
        p = _sample_payload(T, f, rng)
        return (f,), p, T2.approx_fn(f, f, p), p

    r.law("approx.identity", pool, approx_identity)

    def approx_vertical(datum, rng: Rng):
        f, g, h = datum
        p = _sample_payload(T, f, rng)
        lhs = T2.approx_fn(g, h, T2.approx_fn(f, g, p))
        rhs = T2.approx_fn(f, h, p)
        return (f, g, h), p, lhs, rhs

    r.law("approx.vertical", chains, approx_vertical)

    def approx_unit(f: Morphism, rng: Rng):
        a = T.element_sampler(rng)
        ids = cat.identity_at_src(f)
        u = T.unit_fn(f.src, a)
        return (ids,), a, T2.approx_fn(ids, ids, u), u

    r.law("approx.unit", pool, approx_unit)

    def approx_horizontal(datum, rng: Rng):
        (f, f2), (g, g2) = datum
        p2 = _nested2(T, f, g, rng)
        inner = T.map_fn(f, lambda q: T2.approx_fn(g, g2, q), p2)
        lhs = T.mult_fn(f2, g2, T2.approx_fn(f, f2, inner))
        gf = cat.compose(g, f)
        g2f2 = cat.compose(g2, f2)
        rhs = T2.approx_fn(gf, g2f2, T.mult_fn(f, g, p2))
        return (f, f2, g, g2), p2, lhs, rhs

    r.law("approx.horizontal", squares, approx_horizontal)


def _genunit_laws(G: GeneralisedUnit, r: Runner) -> None:
    T = G.monad
    cat = T.index_cat
    pool = [m for m in index_pool(T) if G.sub.contains(m)]
    pairs = _composable_pairs(pool)

    def gen_compose(datum, rng: Rng):
        f, g = datum
        a = T.element_sampler(rng)
        gf = cat.compose(g, f)
        staged = T.map_fn(f, lambda b: G.geneta_fn(g, b), G.geneta_fn(f, a))
        lhs = T.mult_fn(f, g, staged)
        rhs = G.geneta_fn(gf, a)
        return (f, g), a, lhs, rhs

    r.law("genunit.compose", pairs, gen_compose)

    def gen_identity(f: Morphism, rng: Rng):
        a = T.element_sampler(rng)
        idf = cat.identity_at_src(f)
        return (idf,), a, G.geneta_fn(idf, a), T.unit_fn(f.src, a)

    r.law("genunit.identity", pool, gen_identity)

    def gen_natural(datum, rng: Rng):
        f, i = datum
        _, fn = _FN_POOL[i % len(_FN_POOL)]
        a = T.element_sampler(rng)
        lhs = T.map_fn(f, fn, G.geneta_fn(f, a))
        rhs = G.geneta_fn(f, fn(a))
        return (f,), a, lhs, rhs

    r.law("genunit.naturality", [(f, i) for i, f in enumerate(pool)], gen_natural)


def _hom_laws(H: Homomorphism, r: Runner) -> None:
    T, S = H.source, H.target
    pool = index_pool(T)
    pairs = _composable_pairs(pool)

    def hom_unit(f: Morphism, rng: Rng):
        a = T.element_sampler(rng)
        idx = T.index_cat.identity_at_src(f)
        lhs = H.gamma_fn(idx, T.unit_fn(f.src, a))
        rhs = S.unit_fn(f.src, a)
        return (idx,), a, lhs, rhs

    r.law("hom.unit", pool, hom_unit)

    def hom_mult(datum, rng: Rng):
        f, g = datum
        p2 = _nested2(T, f, g, rng)
        gf = T.index_cat.compose(g, f)
        lhs = H.gamma_fn(gf, T.mult_fn(f, g, p2))
        rhs = S.mult_fn(f, g, H.gamma_fn(f, T.map_fn(f, lambda q: H.gamma_fn(g, q), p2)))
        return (f, g), p2, lhs, rhs

    r.law("hom.mult", pairs, hom_mult)


def check_laws(subject, samples: int = 200, seed: int = 0) -> LawReport:
    """Instantiate every applicable coherence diagram on sampled data."""
    r = Runner(samples, seed)
    if isinstance(subject, CatGradedMonad):
        _monad_laws(subject, r)
    elif isinstance(subject, TwoCatGradedMonad):
        _monad_laws(subject.base, r)
        _approx_laws(subject, r)
    elif isinstance(subject, GeneralisedUnit):
        _genunit_laws(subject, r)
    elif isinstance(subject, Homomorphism):
        _hom_laws(subject, r)
    else:
        raise TypeError(f"cannot check laws of {type(subject).__name__}")
    return r.report()
