"""A small graded monadic metalanguage.

Programs are do-blocks of `x <- t;` binds over instance primitives and
pure expressions.  Grade inference composes the primitives' morphisms,
so a program typechecks exactly when its effect trace is a path in the
instance's index category.  Evaluation elaborates each bind as
tensorial strength on the environment, functor map of the continuation,
then multiplication, and always produces the inferred index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .core import CatGradedMonad, GradedComputation, fmap, mult, unit
from .errors import (
    GradeMismatch,
    InconsistentContinuationIndex,
    MalformedPayload,
    ParseError,
    SpawnGradeError,
    UnknownPrim,
)
from .formulas import TokenStream, VarDecl, tokenize
from .indexcat import Morphism, ObjectId
from .instances import InstanceBundle, LockPrims
from .values import (
    Value,
    VBool,
    VInt,
    VPair,
    VStr,
    VUnit,
    unit as vunit,
    vbool,
    vint,
    vpair,
    vseq,
    vstr,
)


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOPOS = Pos(0, 0)


# --- pure expressions ---

@dataclass(frozen=True)
class PLit:
    value: Value


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PArith:
    op: str
    lhs: "PExpr"
    rhs: "PExpr"


@dataclass(frozen=True)
class PPairE:
    fst: "PExpr"
    snd: "PExpr"


PExpr = PLit | PVar | PArith | PPairE


# --- terms ---

@dataclass(frozen=True)
class TVar:
    name: str
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class TLit:
    value: Value
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class TPure:
    expr: PExpr
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class TPrim:
    name: str
    args: tuple[PExpr, ...] = ()
    body: "Term | None" = None  # spawn carries a computation argument
    pos: Pos = field(default=NOPOS, compare=False)


@dataclass(frozen=True)
class TLet:
    var: str
    bound: "Term"
    body: "Term"
    pos: Pos = field(default=NOPOS, compare=False)


Term = TVar | TLit | TPure | TPrim | TLet


@dataclass(frozen=True)
class Program:
    instance: str
    start: str | None
    var_decls: tuple[VarDecl, ...]
    store: tuple[int, int] | None
    body: Term


# --- shapes ---

Shape = object  # "unit" | "int" | "bool" | "str" | "any" | ("pair", s, s)


def shape_of_value(v: Value) -> Shape:
    if isinstance(v, VUnit):
        return "unit"
    if isinstance(v, VInt):
        return "int"
    if isinstance(v, VBool):
        return "bool"
    if isinstance(v, VStr):
        return "str"
    if isinstance(v, VPair):
        return ("pair", shape_of_value(v.fst), shape_of_value(v.snd))
    return "any"


def _shape_ok(actual: Shape, wanted: Shape) -> bool:
    return wanted == "any" or actual == "any" or actual == wanted


def shape_text(s: Shape) -> str:
    if isinstance(s, tuple):
        return f"pair({shape_text(s[1])}, {shape_text(s[2])})"
    return str(s)


@dataclass(frozen=True)
class GradedType:
    index: Morphism
    shape: Shape

    def __str__(self) -> str:
        return f"{self.index} [{shape_text(self.shape)}]"


# --- primitive signatures per instance ---

@dataclass
class PrimSpec:
    arg_shapes: tuple[Shape, ...]
    result_shape: Shape
    src: ObjectId
    tgt: ObjectId
    make: Callable[[list[Value]], GradedComputation]


class PrimTable:
    def __init__(self, specs: Mapping[str, PrimSpec], spawn=None):
        self.specs = dict(specs)
        self.spawn = spawn  # Callable[[GradedComputation], GradedComputation]

    def lookup(self, name: str) -> PrimSpec:
        try:
            return self.specs[name]
        except KeyError:
            raise UnknownPrim(f"no primitive named {name!r}")


def prims_for(bundle: InstanceBundle) -> PrimTable:
    if bundle.name.startswith("concst"):
        lp = LockPrims(bundle.monad)
        free = ObjectId("free")
        crit = ObjectId("critical")
        specs = {
            "lock": PrimSpec((), "unit", free, crit, lambda _a: lp.lock()),
            "unlock": PrimSpec((), "unit", crit, free, lambda _a: lp.unlock()),
            "get": PrimSpec((), "int", crit, crit, lambda _a: lp.get()),
            "put": PrimSpec(("int",), "unit", crit, crit, lambda a: lp.put(a[0])),
        }
        return PrimTable(specs, spawn=lp.spawn)
    return PrimTable({})


# --- parsing ---

_KEYWORDS = {"do", "pure", "spawn", "instance", "start", "var", "store",
             "true", "false"}


def _parse_pexpr_atom(ts: TokenStream, scope: set[str]) -> PExpr:
    t = ts.next("expression")
    if t.kind == "int":
        return PLit(vint(int(t.text)))
    if t.text == "true":
        return PLit(vbool(True))
    if t.text == "false":
        return PLit(vbool(False))
    if t.kind == "name":
        if t.text in _KEYWORDS:
            raise ParseError(f"keyword {t.text!r} is not an expression", t.line, t.col)
        return PVar(t.text)
    if t.text == "(":
        if ts.eat(")"):
            return PLit(vunit)
        e = parse_pexpr(ts, scope)
        if ts.eat(","):
            e2 = parse_pexpr(ts, scope)
            ts.expect(")")
            return PPairE(e, e2)
        ts.expect(")")
        return e
    raise ParseError(f"expected expression, found {t.text!r}", t.line, t.col)


def _parse_pexpr_mul(ts: TokenStream, scope: set[str]) -> PExpr:
    left = _parse_pexpr_atom(ts, scope)
    while ts.at("*"):
        ts.next()
        left = PArith("*", left, _parse_pexpr_atom(ts, scope))
    return left


def parse_pexpr(ts: TokenStream, scope: set[str]) -> PExpr:
    left = _parse_pexpr_mul(ts, scope)
    while ts.at("+") or ts.at("-"):
        op = ts.next().text
        left = PArith(op, left, _parse_pexpr_mul(ts, scope))
    return left


def _parse_term(ts: TokenStream, scope: set[str]) -> Term:
    t = ts.peek()
    if t is None:
        raise ParseError("expected a term", ts.end_line, 1)
    pos = Pos(t.line, t.col)
    if t.text == "do":
        return _parse_block(ts, scope)
    if t.text == "pure":
        ts.next()
        return TPure(parse_pexpr(ts, scope), pos)
    if t.text == "spawn":
        ts.next()
        body = _parse_block(ts, scope) if ts.at("do") else _parse_term(ts, scope)
        return TPrim("spawn", (), body, pos)
    if t.kind == "int" or t.text in ("true", "false") or t.text == "(":
        return TPure(parse_pexpr(ts, scope), pos)
    if t.kind == "name":
        ts.next()
        if ts.eat("("):
            args = []
            if not ts.eat(")"):
                args.append(parse_pexpr(ts, scope))
                while ts.eat(","):
                    args.append(parse_pexpr(ts, scope))
                ts.expect(")")
            return TPrim(t.text, tuple(args), None, pos)
        if t.text in scope:
            return TVar(t.text, pos)
        return TPrim(t.text, (), None, pos)
    raise ParseError(f"expected a term, found {t.text!r}", t.line, t.col)


def _parse_block(ts: TokenStream, scope: set[str]) -> Term:
    ts.expect("do")
    ts.expect("{")
    stmts: list[tuple[str | None, Term, Pos]] = []
    while True:
        t = ts.peek()
        if t is None:
            raise ParseError("unterminated block", ts.end_line, 1)
        if t.text == "}":
            break
        var = None
        pos = Pos(t.line, t.col)
        if (t.kind == "name" and t.text not in _KEYWORDS
                and ts.pos + 1 < len(ts.toks) and ts.toks[ts.pos + 1].text == "<-"):
            var = t.text
            ts.next()
            ts.next()
        term = _parse_term(ts, scope | {s[0] for s in stmts if s[0]})
        stmts.append((var, term, pos))
        if not ts.eat(";"):
            break
    close = ts.expect("}")
    if not stmts:
        raise ParseError("empty block", close.line, close.col)
    last_var, last_term, last_pos = stmts[-1]
    if last_var is not None:
        raise ParseError("block must end with an expression statement",
                         last_pos.line, last_pos.col)
    term = last_term
    for var, bound, pos in reversed(stmts[:-1]):
        term = TLet(var if var is not None else "_", bound, term, pos)
    return term


def parse_program(text: str) -> Program:
    toks = tokenize(text)
    ts = TokenStream(toks, end_line=text.count("\n") + 1)
    instance = None
    start = None
    var_decls: list[VarDecl] = []
    store = None
    while True:
        t = ts.peek()
        if t is None:
            raise ParseError("program has no do-block", ts.end_line, 1)
        if t.text == "instance":
            ts.next()
            instance = ts.next("instance name").text
        elif t.text == "start":
            ts.next()
            tok = ts.next("object name")
            start = tok.text
        elif t.text == "var":
            ts.next()
            name = ts.next("variable name").text
            ts.expect(":")
            lo, hi = _parse_int_range(ts)
            var_decls.append(VarDecl(name, lo, hi))
        elif t.text == "store":
            ts.next()
            store = _parse_int_range(ts)
        else:
            break
    if instance is None:
        t = ts.peek()
        raise ParseError("missing `instance` header", t.line if t else 1, 1)
    body = _parse_block(ts, set())
    t = ts.peek()
    if t is not None:
        raise ParseError(f"trailing input {t.text!r}", t.line, t.col)
    return Program(instance, start, tuple(var_decls), store, body)


def _parse_int_range(ts: TokenStream) -> tuple[int, int]:
    ts.expect("int")
    ts.expect("[")
    lo = int(ts.next("integer").text)
    ts.expect("..")
    hi = int(ts.next("integer").text)
    ts.expect("]")
    return lo, hi


# --- pretty printing ---

def pexpr_text(e: PExpr) -> str:
    if isinstance(e, PLit):
        if isinstance(e.value, VBool):
            return "true" if e.value.b else "false"
        if isinstance(e.value, VUnit):
            return "()"
        return e.value.show()
    if isinstance(e, PVar):
        return e.name
    if isinstance(e, PArith):
        return f"({pexpr_text(e.lhs)} {e.op} {pexpr_text(e.rhs)})"
    return f"({pexpr_text(e.fst)}, {pexpr_text(e.snd)})"


def _term_text(t: Term, indent: int) -> str:
    pad = "  " * indent
    if isinstance(t, TLet):
        stmts = []
        cur: Term = t
        while isinstance(cur, TLet):
            head = f"{cur.var} <- " if cur.var != "_" else ""
            stmts.append(pad + "  " + head + _inline_term(cur.bound, indent + 1) + ";")
            cur = cur.body
        stmts.append(pad + "  " + _inline_term(cur, indent + 1))
        return pad + "do {\n" + "\n".join(stmts) + "\n" + pad + "}"
    return pad + _inline_term(t, indent)


def _inline_term(t: Term, indent: int) -> str:
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, TLit):
        return pexpr_text(PLit(t.value))
    if isinstance(t, TPure):
        return f"pure {pexpr_text(t.expr)}"
    if isinstance(t, TPrim):
        if t.name == "spawn":
            return "spawn " + _term_text(t.body, indent).lstrip()
        if t.args:
            return f"{t.name}({', '.join(pexpr_text(a) for a in t.args)})"
        return t.name
    return _term_text(t, indent).lstrip() if isinstance(t, TLet) else str(t)


def pretty_program(p: Program) -> str:
    lines = [f"instance {p.instance}"]
    if p.start is not None:
        lines.append(f"start {p.start}")
    for d in p.var_decls:
        lines.append(f"var {d.name} : int[{d.lo}..{d.hi}]")
    if p.store is not None:
        lines.append(f"store int[{p.store[0]}..{p.store[1]}]")
    lines.append("")
    body = p.body if isinstance(p.body, TLet) else p.body
    if isinstance(body, TLet):
        lines.append(_term_text(body, 0))
    else:
        lines.append("do {\n  " + _inline_term(body, 1) + "\n}")
    return "\n".join(lines) + "\n"


# --- grade inference ---

def shape_of_pexpr(e: PExpr, env: Mapping[str, Shape]) -> Shape:
    if isinstance(e, PLit):
        return shape_of_value(e.value)
    if isinstance(e, PVar):
        if e.name not in env:
            raise GradeMismatch(f"unbound variable {e.name!r}")
        return env[e.name]
    if isinstance(e, PArith):
        for side in (e.lhs, e.rhs):
            s = shape_of_pexpr(side, env)
            if not _shape_ok(s, "int"):
                raise GradeMismatch(f"arithmetic on non-integer ({shape_text(s)})")
        return "int"
    return ("pair", shape_of_pexpr(e.fst, env), shape_of_pexpr(e.snd, env))


def infer_grade(bundle: InstanceBundle, start: ObjectId, term: Term,
                env: Mapping[str, Shape] | None = None) -> GradedType:
    prims = prims_for(bundle)
    cat = bundle.monad.index_cat
    env = dict(env or {})

    def go(t: Term, obj: ObjectId, env: dict) -> GradedType:
        if isinstance(t, TVar):
            if t.name not in env:
                raise GradeMismatch(f"{t.pos}: unbound variable {t.name!r}")
            return GradedType(cat.identity(obj), env[t.name])
        if isinstance(t, TLit):
            return GradedType(cat.identity(obj), shape_of_value(t.value))
        if isinstance(t, TPure):
            return GradedType(cat.identity(obj), shape_of_pexpr(t.expr, env))
        if isinstance(t, TPrim):
            if t.name == "spawn":
                if prims.spawn is None:
                    raise UnknownPrim(f"{t.pos}: instance has no spawn")
                free = ObjectId("free")
                body = go(t.body, free, env)
                if not (body.index.src == free and body.index.tgt == free):
                    raise SpawnGradeError(
                        f"{t.pos}: spawn body has grade ({body.index}), "
                        "needs free -> free")
                if obj != free:
                    raise GradeMismatch(f"{t.pos}: spawn used at {obj.name}, "
                                        "only available at free")
                return GradedType(cat.identity(free), "unit")
            try:
                spec = prims.lookup(t.name)
            except UnknownPrim:
                raise UnknownPrim(f"{t.pos}: no primitive named {t.name!r}")
            if len(t.args) != len(spec.arg_shapes):
                raise GradeMismatch(
                    f"{t.pos}: {t.name} takes {len(spec.arg_shapes)} argument(s)")
            for a, want in zip(t.args, spec.arg_shapes):
                got = shape_of_pexpr(a, env)
                if not _shape_ok(got, want):
                    raise GradeMismatch(
                        f"{t.pos}: {t.name} argument has shape {shape_text(got)}, "
                        f"wants {shape_text(want)}")
            if spec.src != obj:
                raise GradeMismatch(
                    f"{t.pos}: primitive {t.name} starts at {spec.src.name}, "
                    f"but the program is at {obj.name}")
            idx = _prim_index(bundle, t.name, spec)
            return GradedType(idx, spec.result_shape)
        if isinstance(t, TLet):
            first = go(t.bound, obj, env)
            env2 = dict(env)
            env2[t.var] = first.shape
            rest = go(t.body, first.index.tgt, env2)
            return GradedType(cat.compose(rest.index, first.index), rest.shape)
        raise GradeMismatch(f"cannot infer a grade for {t!r}")

    result = go(term, start, env)
    if result.index.src != start:
        raise GradeMismatch(
            f"program grade starts at {result.index.src.name}, not {start.name}")
    return result


def _prim_index(bundle: InstanceBundle, name: str, spec: PrimSpec) -> Morphism:
    # primitive computations carry their morphism; build one cheaply
    comp = spec.make([_dummy_value(s) for s in spec.arg_shapes])
    return comp.index


def _dummy_value(shape: Shape) -> Value:
    if shape == "int":
        return vint(0)
    if shape == "bool":
        return vbool(False)
    if shape == "str":
        return vstr("")
    if isinstance(shape, tuple):
        return vpair(_dummy_value(shape[1]), _dummy_value(shape[2]))
    return vunit


# --- evaluation ---

def strength(T: CatGradedMonad, f: Morphism, a: Value,
             c: GradedComputation) -> GradedComputation:
    """Thread a context value through a computation: payload values b
    become pairs (a, b); the index is unchanged."""
    if c.index != f:
        raise MalformedPayload(f"computation is at ({c.index}), not ({f})")
    return GradedComputation(f, fmap(T, f, lambda b: vpair(a, b), c.payload))


def eval_pexpr(e: PExpr, env: Mapping[str, Value]) -> Value:
    if isinstance(e, PLit):
        return e.value
    if isinstance(e, PVar):
        return env[e.name]
    if isinstance(e, PArith):
        a, b = eval_pexpr(e.lhs, env), eval_pexpr(e.rhs, env)
        if not (isinstance(a, VInt) and isinstance(b, VInt)):
            raise MalformedPayload("arithmetic on non-integers")
        if e.op == "+":
            return vint(a.n + b.n)
        if e.op == "-":
            return vint(a.n - b.n)
        return vint(a.n * b.n)
    return vpair(eval_pexpr(e.fst, env), eval_pexpr(e.snd, env))


def _encode_env(env: Mapping[str, Value]) -> Value:
    return vseq(vpair(vstr(k), env[k]) for k in sorted(env))


def _decode_env(v: Value) -> dict[str, Value]:
    out = {}
    for pr in v.items:
        out[pr.fst.s] = pr.snd
    return out


def eval_term(bundle: InstanceBundle, term: Term, env: Mapping[str, Value],
              start: ObjectId) -> GradedComputation:
    """Evaluate; the resulting index always equals the inferred one."""
    T = bundle.monad
    prims = prims_for(bundle)
    static_memo: dict = {}

    def _shape_sig(shapes: dict) -> tuple:
        return tuple(sorted((k, str(s)) for k, s in shapes.items()))

    def _static_index(t: TLet, obj: ObjectId, env: dict[str, Value]) -> Morphism:
        shapes = {k: shape_of_value(v) for k, v in env.items()}
        key = (id(t), obj, _shape_sig(shapes))
        if key not in static_memo:
            bound_gt = infer_grade(bundle, obj, t.bound, shapes)
            shapes2 = dict(shapes)
            shapes2[t.var] = bound_gt.shape
            static_memo[key] = infer_grade(
                bundle, bound_gt.index.tgt, t.body, shapes2).index
        return static_memo[key]

    def go(t: Term, obj: ObjectId, env: dict[str, Value]) -> GradedComputation:
        if isinstance(t, TVar):
            return unit(T, obj, env[t.name])
        if isinstance(t, TLit):
            return unit(T, obj, t.value)
        if isinstance(t, TPure):
            return unit(T, obj, eval_pexpr(t.expr, env))
        if isinstance(t, TPrim):
            if t.name == "spawn":
                body = go(t.body, ObjectId("free"), env)
                return prims.spawn(body)
            spec = prims.lookup(t.name)
            args = [eval_pexpr(a, env) for a in t.args]
            return spec.make(args)
        if isinstance(t, TLet):
            c1 = go(t.bound, obj, env)
            f = c1.index
            g_static = _static_index(t, obj, env)
            carried = strength(T, f, _encode_env(env), c1)
            seen: list[Morphism] = []
            cont_memo: dict[Value, Value] = {}

            def cont(pr: Value) -> Value:
                # pure in (env, value); payloads repeat the same pair often
                if pr in cont_memo:
                    return cont_memo[pr]
                env2 = _decode_env(pr.fst)
                env2[t.var] = pr.snd
                out = go(t.body, f.tgt, env2)
                seen.append(out.index)
                cont_memo[pr] = out.payload
                return out.payload

            payload2 = fmap(T, f, cont, carried.payload)
            for idx in seen:
                if idx != g_static:
                    raise InconsistentContinuationIndex(
                        f"{t.pos}: continuation at ({idx}), inferred ({g_static})")
            return mult(T, f, g_static, payload2)
        raise MalformedPayload(f"cannot evaluate {t!r}")

    result = go(term, start, dict(env))
    inferred = infer_grade(bundle, start, term,
                           {k: shape_of_value(v) for k, v in env.items()})
    if result.index != inferred.index:
        raise InconsistentContinuationIndex(
            f"evaluation produced ({result.index}), inference ({inferred.index})")
    return result


def start_object(bundle: InstanceBundle, program: Program) -> ObjectId:
    if program.start is not None:
        return ObjectId(program.start)
    objs = bundle.monad.index_cat.object_ids()
    if not objs:
        raise GradeMismatch("instance has no default start object")
    return objs[0]


def infer_program(bundle: InstanceBundle, program: Program) -> GradedType:
    """Top-level programs must describe a complete protocol run: the
    overall grade has to return to the start object."""
    start = start_object(bundle, program)
    gt = infer_grade(bundle, start, program.body)
    if gt.index.tgt != start:
        raise GradeMismatch(
            f"program grade ({gt.index}) does not return to {start.name}; "
            "the protocol run is incomplete")
    return gt
