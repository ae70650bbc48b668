"""Metalanguage: parsing, grade inference, evaluation, derivation checking."""

from fractions import Fraction

import pytest

from cgm.ahlcheck import (
    DRand,
    DSeq,
    DSkip,
    DWeak,
    Judgement,
    check_ahl,
    check_ahl_file,
    parse_ahl_file,
)
from cgm.errors import (
    GradeMismatch,
    InvalidImplication,
    ParseError,
    RuleMismatch,
    SpawnGradeError,
)
from cgm.formulas import FCmp, EVar, EInt, TRUE, VarDecl
from cgm.indexcat import ObjectId
from cgm.instances import InstanceBundle, ahl_instance, concst_instance
from cgm.metalang import (
    TLet,
    TPrim,
    TPure,
    PVar,
    PArith,
    PLit,
    eval_term,
    infer_grade,
    infer_program,
    parse_program,
    pretty_program,
    start_object,
    strength,
)
from cgm.rng import Rng
from cgm.values import vint, vpair, vseq

LOCK_PROGRAM = """
instance concst
start free
store int[0..63]

do {
  lock;
  x <- get;
  put(x + 1);
  unlock
}
"""


def lock_bundle(n=64):
    return InstanceBundle("concst", concst_instance(tuple(vint(i) for i in range(n))))


FREE = ObjectId("free")


# --- parsing ---

def test_parse_lock_program_shape():
    p = parse_program(LOCK_PROGRAM)
    assert p.instance == "concst" and p.start == "free" and p.store == (0, 63)
    t = p.body
    steps = []
    while isinstance(t, TLet):
        steps.append((t.var, t.bound))
        t = t.body
    steps.append((None, t))
    assert len(steps) == 4
    assert steps[0][1] == TPrim("lock")
    assert steps[1] == ("x", TPrim("get"))
    assert steps[2][1] == TPrim("put", (PArith("+", PVar("x"), PLit(vint(1))),))
    assert steps[3][1] == TPrim("unlock")


def test_parse_pure_literal():
    p = parse_program("instance glist\nstart *\ndo { pure 5 }")
    assert p.body == TPure(PLit(vint(5)))


def test_parse_error_unbalanced():
    with pytest.raises(ParseError) as err:
        parse_program("instance concst\ndo { lock;\n")
    assert err.value.line >= 2


def test_parse_error_missing_instance():
    with pytest.raises(ParseError):
        parse_program("do { pure 1 }")


def test_pretty_roundtrip_lock():
    p = parse_program(LOCK_PROGRAM)
    again = parse_program(pretty_program(p))
    assert again.body == p.body
    assert again.instance == p.instance and again.store == p.store


def test_pretty_roundtrip_nested():
    text = """
instance concst
start free
do {
  spawn do { lock; put(3); unlock };
  y <- pure (1 + 2 * 3, ());
  pure y
}
"""
    p = parse_program(text)
    again = parse_program(pretty_program(p))
    assert again.body == p.body


# --- grade inference ---

def test_lock_program_grade():
    bundle = lock_bundle()
    p = parse_program(LOCK_PROGRAM)
    gt = infer_program(bundle, p)
    assert str(gt.index) == "lock;get;put;unlock : free -> free"
    assert gt.shape == "unit"


def test_pure_term_grade_is_identity():
    bundle = lock_bundle(4)
    gt = infer_grade(bundle, FREE, TPure(PLit(vint(5))))
    assert str(gt.index) == "id_free : free -> free"
    assert gt.shape == "int"


def test_get_from_free_rejected():
    bundle = lock_bundle(4)
    with pytest.raises(GradeMismatch):
        infer_grade(bundle, FREE, TPrim("get"))


def test_missing_unlock_rejected_at_program_level():
    bundle = lock_bundle(4)
    p = parse_program("instance concst\nstart free\ndo { lock; get }")
    with pytest.raises(GradeMismatch):
        infer_program(bundle, p)


def test_spawn_of_critical_body_rejected():
    bundle = lock_bundle(4)
    p = parse_program(
        "instance concst\nstart free\ndo { lock; x <- get; unlock; "
        "spawn do { lock; put(x); unlock }; pure () }")
    # inner spawn body is free -> free, fine; now a critical body:
    gt = infer_program(bundle, p)
    assert gt.index.src == FREE
    bad = parse_program(
        "instance concst\nstart free\ndo { spawn do { lock; get; pure () }; pure () }")
    with pytest.raises(SpawnGradeError):
        infer_program(bundle, bad)


def test_unknown_prim():
    from cgm.errors import UnknownPrim
    bundle = lock_bundle(4)
    with pytest.raises(UnknownPrim):
        infer_grade(bundle, FREE, TPrim("warp"))


# --- evaluation ---

def test_eval_lock_program_threads_store():
    bundle = lock_bundle()
    p = parse_program(LOCK_PROGRAM)
    c = eval_term(bundle, p.body, {}, start_object(bundle, p))
    assert str(c.index) == "lock;get;put;unlock : free -> free"
    step = c.payload.get(vint(41))
    assert step.snd == vint(42)
    # state-threading oracle across the whole domain
    for s0 in range(63):
        assert c.payload.get(vint(s0)).snd == vint(s0 + 1)
    assert not c.payload.has(vint(63))  # 64 escapes the store domain


def test_eval_pure_is_unit():
    bundle = lock_bundle(4)
    from cgm.core import unit
    c = eval_term(bundle, TPure(PLit(vint(9))), {}, FREE)
    assert c == unit(bundle.monad, FREE, vint(9))


def test_eval_index_matches_inference_corpus():
    bundle = lock_bundle(8)
    rng = Rng(2024)
    for i in range(40):
        term = _random_valid_program(rng.fork(i))
        inferred = infer_grade(bundle, FREE, term)
        got = eval_term(bundle, term, {}, FREE)
        assert got.index == inferred.index


def test_pretty_roundtrip_generated_corpus():
    rng = Rng(77)
    for i in range(30):
        term = _random_valid_program(rng.fork(i))
        from cgm.metalang import Program
        p = Program("concst", "free", (), (0, 7), term)
        again = parse_program(pretty_program(p))
        assert again.body == p.body


def _replay_reference(term, store, domain):
    """Oracle: walk the statement chain over a plain (env, store) machine.

    Returns the final store, or None when a write leaves the domain.
    """
    from cgm.metalang import eval_pexpr

    env = {}
    t = term
    while True:
        if isinstance(t, TLet):
            stmt, var, rest = t.bound, t.var, t.body
        else:
            stmt, var, rest = t, None, None
        if isinstance(stmt, TPrim):
            if stmt.name == "get":
                if var and var != "_":
                    env[var] = vint(store)
            elif stmt.name == "put":
                store = eval_pexpr(stmt.args[0], env).n
                if store not in domain:
                    return None
            # lock/unlock do not touch the store
        elif isinstance(stmt, TPure) and var and var != "_":
            env[var] = eval_pexpr(stmt.expr, env)
        if rest is None:
            return store
        t = rest


def test_eval_matches_reference_machine_corpus():
    domain = range(8)
    bundle = lock_bundle(8)
    rng = Rng(4242)
    for i in range(30):
        term = _random_valid_program(rng.fork(i))
        comp = eval_term(bundle, term, {}, FREE)
        for s0 in domain:
            expected = _replay_reference(term, s0, domain)
            if expected is None:
                assert not comp.payload.has(vint(s0))
            else:
                assert comp.payload.get(vint(s0)).snd == vint(expected)


def _random_valid_program(rng: Rng, depth: int = 5):
    """DFA-respecting statement chains from `free`, depth statements."""
    stmts = []
    state = "free"
    bound = []
    for _ in range(depth - 1):
        choice = rng.randint(0, 3)
        if state == "free":
            if choice == 0:
                stmts.append(("_", TPure(PLit(vint(rng.randint(0, 3))))))
            else:
                stmts.append(("_", TPrim("lock")))
                state = "critical"
        else:
            if choice == 0:
                var = f"v{len(bound)}"
                stmts.append((var, TPrim("get")))
                bound.append(var)
            elif choice == 1:
                arg = PVar(rng.choice(bound)) if bound else PLit(vint(rng.randint(0, 7)))
                stmts.append(("_", TPrim("put", (arg,))))
            elif choice == 2:
                stmts.append(("_", TPure(PLit(vint(1)))))
            else:
                stmts.append(("_", TPrim("unlock")))
                state = "free"
    last = TPrim("unlock") if state == "critical" else TPure(PLit(vint(0)))
    term = last
    for var, bound_term in reversed(stmts):
        term = TLet(var, bound_term, term)
    return term


# --- strength ---

def test_strength_graded_list():
    from cgm.core import GradedComputation
    from cgm.instances import graded_list_instance
    two = graded_list_instance()
    T = two.base
    f = T.index_cat.elem(2)
    c = GradedComputation(f, vseq([vint(1), vint(2)]))
    out = strength(T, f, vint(9), c)
    # fmap-pairing oracle
    assert out.payload == vseq([vpair(vint(9), vint(1)), vpair(vint(9), vint(2))])
    assert out.index == f
    # projection: strength then second == original
    from cgm.core import fmap
    back = fmap(T, f, lambda pr: pr.snd, out.payload)
    assert back == c.payload


def test_strength_identity_instance():
    from cgm.core import GradedComputation
    from cgm.instances import identity_instance, lock_category
    T = identity_instance(lock_category())
    f = T.index_cat.identity(FREE)
    c = GradedComputation(f, vint(5))
    assert strength(T, f, vint(1), c).payload == vpair(vint(1), vint(5))


# --- protocol completeness against a reference DFA ---

LOCK_DFA = {
    ("free", "lock"): "critical",
    ("critical", "get"): "critical",
    ("critical", "put"): "critical",
    ("critical", "unlock"): "free",
}


def _chain(prims):
    term = TPure(PLit(vint(0)))
    for name in reversed(prims):
        args = (PLit(vint(0)),) if name == "put" else ()
        term = TLet("_", TPrim(name, args), term)
    return term


def test_dfa_equivalence_up_to_length_5():
    import itertools
    bundle = lock_bundle(4)
    names = ("lock", "get", "put", "unlock")
    mismatches = 0
    total = 0
    for length in range(0, 6):
        for seq in itertools.product(names, repeat=length):
            total += 1
            state = "free"
            accepted = True
            for name in seq:
                nxt = LOCK_DFA.get((state, name))
                if nxt is None:
                    accepted = False
                    break
                state = nxt
            try:
                infer_grade(bundle, FREE, _chain(seq))
                inferred_ok = True
            except GradeMismatch:
                inferred_ok = False
            if inferred_ok != accepted:
                mismatches += 1
    assert mismatches == 0
    assert total == sum(4 ** k for k in range(6))


# --- derivation checking ---

X_NE_0 = FCmp("!=", EVar("x"), EInt(0))
XY_DECLS = (VarDecl("x", 0, 9), VarDecl("y", 0, 9))


def test_skip_valid():
    inst = ahl_instance((VarDecl("x", 0, 9),))
    v = check_ahl(inst, DSkip(X_NE_0))
    assert v.valid
    assert v.conclusion == Judgement(Fraction(0), X_NE_0, X_NE_0)
    assert v.nodes[-1].failure == 0


def test_seq_two_samplers_exact_probability():
    inst = ahl_instance(XY_DECLS)
    y_ne_0 = FCmp("!=", EVar("y"), EInt(0))
    from cgm.formulas import FAnd
    both = FAnd(X_NE_0, y_ne_0)
    d = DSeq(DRand("x", 0, 9, Fraction(1, 10), TRUE, X_NE_0),
             DRand("y", 0, 9, Fraction(1, 10), X_NE_0, both))
    v = check_ahl(inst, d)
    assert v.valid
    assert v.conclusion.beta == Fraction(1, 5)
    assert v.nodes[-1].failure == Fraction(19, 100)
    # brute-force enumeration oracle over the 100 outcomes
    bad = sum(1 for x in range(10) for y in range(10) if x == 0 or y == 0)
    assert Fraction(bad, 100) == Fraction(19, 100)


def test_seq_middle_mismatch():
    inst = ahl_instance(XY_DECLS)
    d = DSeq(DRand("x", 0, 9, Fraction(1, 10), TRUE, X_NE_0),
             DRand("y", 0, 9, Fraction(1, 10), TRUE, TRUE))
    with pytest.raises(RuleMismatch):
        check_ahl(inst, d)


def test_weak_decreasing_bound_rejected():
    inst = ahl_instance((VarDecl("x", 0, 9),))
    d = DWeak(DRand("x", 0, 9, Fraction(1, 10), TRUE, X_NE_0),
              Fraction(1, 20), TRUE, X_NE_0)
    with pytest.raises(RuleMismatch):
        check_ahl(inst, d)


def test_weak_invalid_implication_rejected():
    inst = ahl_instance((VarDecl("x", 0, 9),))
    d = DWeak(DRand("x", 0, 9, Fraction(1, 10), X_NE_0, X_NE_0),
              Fraction(1, 2), TRUE, X_NE_0)
    with pytest.raises(InvalidImplication):
        check_ahl(inst, d)


def test_rand_overclaimed_bound_semantically_invalid():
    inst = ahl_instance((VarDecl("x", 0, 9),))
    v = check_ahl(inst, DRand("x", 0, 9, Fraction(1, 20), TRUE, X_NE_0))
    assert not v.valid
    assert "exceeds bound" in v.message


def test_structural_implies_semantic_on_corpus():
    # randomly generated structurally-sound derivations are semantically valid
    inst = ahl_instance(XY_DECLS)
    rng = Rng(99)
    built = 0
    for i in range(60):
        d = _random_derivation(inst, rng.fork(i), depth=rng.randint(1, 3))
        v = check_ahl(inst, d)
        assert v.valid, v.render()
        built += 1
    assert built == 60


def _random_derivation(inst, rng: Rng, depth: int):
    from cgm.ahlcheck import conclusion
    x_gt = lambda k: FCmp(">", EVar("x"), EInt(k))
    if depth <= 1:
        kind = rng.randint(0, 2)
        if kind == 0:
            return DSkip(x_gt(rng.randint(0, 5)))
        if kind == 1:
            k = rng.randint(0, 8)
            # uniform over 0..9 misses x > k with probability (k+1)/10
            return DRand("x", 0, 9, Fraction(k + 1, 10), TRUE, x_gt(k))
        return DRand("y", 0, 9, Fraction(1, 10), TRUE,
                     FCmp("!=", EVar("y"), EInt(0)))
    if rng.randint(0, 1) == 0:
        left = _random_derivation(inst, rng.fork(0), 1)
        mid = conclusion(inst, left).post
        right = DSkip(mid)
        return DSeq(left, right)
    child = _random_derivation(inst, rng.fork(1), depth - 1)
    j = conclusion(inst, child)
    bump = j.beta + Fraction(rng.randint(0, 2), 10)
    return DWeak(child, min(bump, Fraction(1)), j.pre, j.post)


def test_parse_ahl_file_and_check():
    text = """
var x : int[0..9]
conclude 1/10 : true => (x != 0)
rand x 0 9 : 1/10 : true => (x != 0)
"""
    f = parse_ahl_file(text)
    assert f.claimed.beta == Fraction(1, 10)
    v = check_ahl_file(text)
    assert v.valid


def test_ahl_file_claim_mismatch():
    text = """
var x : int[0..9]
conclude 1/20 : true => (x != 0)
rand x 0 9 : 1/10 : true => (x != 0)
"""
    with pytest.raises(RuleMismatch):
        check_ahl_file(text)


def test_ahl_file_parse_error():
    with pytest.raises(ParseError):
        parse_ahl_file("var x : int[0..9]\nconclude oops")
