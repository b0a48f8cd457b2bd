"""Language core: parsing, substitution, reduction, and the interpreter."""
from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from mini_iris import lang
from mini_iris.lang import (
    Alloc,
    App,
    BinOp,
    BoolV,
    If,
    IntV,
    Let,
    Load,
    LocV,
    PairV,
    Par,
    Rec,
    Seq,
    Store,
    StuckExpr,
    UnitV,
    ValE,
    Var,
    decompose,
    interp,
    is_value,
    plug,
    pure_step,
    subst,
)
from mini_iris.parser import Env, ParseError, parse_expr
from mini_iris.terms import IntLit, Sort, TVar


def intE(k: int) -> ValE:
    return ValE(IntV(k))


# ---------------------------------------------------------------------------
# parsing


def test_parse_incr_shape():
    e = parse_expr('λ: "l", let: "n" := !"l" in "l" <- "n" + #1')
    assert isinstance(e, Rec) and e.self_name is None and e.binder == "l"
    body = e.body
    assert isinstance(body, Let) and body.binder == "n"
    assert isinstance(body.bound, Load) and body.bound.arg == Var("l")
    assert isinstance(body.body, Store)
    assert body.body.dst == Var("l")
    assert body.body.src == BinOp("+", Var("n"), intE(1))


def test_parse_unit_literal():
    assert parse_expr("#()") == ValE(UnitV())


def test_parse_par_seq_shape():
    env = Env(sorts={"ℓ": Sort.LOC})
    e = parse_expr("(!#ℓ ||| !#ℓ) ;; !#ℓ", env)
    assert isinstance(e, Seq)
    assert isinstance(e.first, Par)
    assert isinstance(e.second, Load)
    assert e.second.arg == ValE(LocV("ℓ"))


def test_parse_precedence_store_add():
    env = Env(sorts={"ℓ": Sort.LOC})
    e = parse_expr("#ℓ <- !#ℓ + #1", env)
    assert isinstance(e, Store)
    assert isinstance(e.src, BinOp) and e.src.op == "+"


def test_parse_ascii_lambda():
    a = parse_expr('\\: "x", "x" + #1')
    b = parse_expr('λ: "x", "x" + #1')
    assert a == b


def test_parse_error_has_position():
    with pytest.raises(ParseError) as exc:
        parse_expr('let: "x" := #1')
    assert exc.value.line >= 1


# ---------------------------------------------------------------------------
# substitution


def test_subst_var():
    assert subst(Var("x"), "x", IntV(3)) == intE(3)


def test_subst_shadowing():
    e = Let("x", Var("x"), Var("x"))
    got = subst(e, "x", IntV(1))
    assert got == Let("x", intE(1), Var("x"))


def test_subst_binop_matches_interp_oracle():
    # independent oracle: run both the substituted body and the original
    # let-binding; they must agree on result and final heap
    body = BinOp("+", Var("n"), intE(1))
    substituted = subst(body, "n", IntV(7))
    assert substituted == BinOp("+", intE(7), intE(1))
    v1, h1 = interp(substituted, {})
    v2, h2 = interp(Let("n", intE(7), body), {})
    assert (v1, h1) == (v2, h2) == (IntV(8), {})


# ---------------------------------------------------------------------------
# pure reduction


def test_pure_step_beta():
    body = Load(Var("l"))
    e = App(Rec(None, "l", body), ValE(LocV("ℓ")))
    assert pure_step(e) == Load(ValE(LocV("ℓ")))


def test_pure_step_add():
    assert pure_step(BinOp("+", intE(1), intE(2))) == intE(3)


def test_pure_step_if_true():
    e = If(ValE(BoolV(True)), intE(1), intE(2))
    assert pure_step(e) == intE(1)


def test_pure_step_none_for_heap_ops():
    assert pure_step(Load(ValE(LocV("ℓ")))) is None
    assert pure_step(Alloc(intE(0))) is None
    assert pure_step(Par(intE(1), intE(2))) is None


def test_pure_step_stuck_on_ill_typed():
    with pytest.raises(StuckExpr):
        pure_step(BinOp("+", ValE(BoolV(True)), intE(1)))


# ---------------------------------------------------------------------------
# the interpreter oracle


def _incr_applied(loc: str) -> lang.Expr:
    incr = parse_expr('λ: "l", let: "n" := !"l" in "l" <- "n" + #1')
    return App(incr, ValE(LocV(loc)))


def test_interp_incr():
    v, h = interp(_incr_applied("ℓ"), {"ℓ": IntV(7)})
    assert v == UnitV()
    assert h == {"ℓ": IntV(8)}


def test_interp_load():
    v, h = interp(Load(ValE(LocV("ℓ"))), {"ℓ": IntV(3)})
    assert v == IntV(3)
    assert h == {"ℓ": IntV(3)}


def test_interp_bank_body():
    bank = parse_expr(
        'λ: <>, let: "a_bal" := ref #0 in let: "b_bal" := ref #0 in ("a_bal", "b_bal")'
    )
    v, h = interp(App(bank, ValE(UnitV())), {})
    assert isinstance(v, PairV)
    assert isinstance(v.fst, LocV) and isinstance(v.snd, LocV)
    assert v.fst != v.snd
    assert h == {v.fst.name: IntV(0), v.snd.name: IntV(0)}


def test_interp_missing_location():
    with pytest.raises(lang.MissingLocation):
        interp(Load(ValE(LocV("nowhere"))), {})


def test_interp_par_left_then_right():
    # both threads append to the same cell; sequential left-then-right order
    prog = Par(Store(ValE(LocV("l")), intE(1)), Store(ValE(LocV("l")), intE(2)))
    v, h = interp(prog, {"l": IntV(0)})
    assert h == {"l": IntV(2)}
    assert v == PairV(UnitV(), UnitV())


def test_interp_untouched_heap_frame_is_identical():
    frame = {"a": IntV(41), "b": PairV(IntV(1), BoolV(True))}
    heap = dict(frame)
    heap["ℓ"] = IntV(7)
    _, h = interp(_incr_applied("ℓ"), heap)
    for k, v in frame.items():
        assert h[k] is heap[k] or h[k] == v
    assert h["ℓ"] == IntV(8)


# ---------------------------------------------------------------------------
# randomized structure properties


def exprs(depth: int = 3) -> st.SearchStrategy[lang.Expr]:
    base = st.one_of(
        st.integers(-5, 5).map(intE),
        st.booleans().map(lambda b: ValE(BoolV(b))),
        st.just(ValE(UnitV())),
        st.sampled_from(["x", "y"]).map(Var),
        st.just(ValE(LocV("ℓ"))),
    )

    def extend(children):
        return st.one_of(
            st.tuples(children, children).map(lambda p: BinOp("+", *p)),
            st.tuples(children, children).map(lambda p: App(*p)),
            st.tuples(children, children).map(lambda p: Seq(*p)),
            st.tuples(children, children).map(lambda p: Store(*p)),
            st.tuples(children, children).map(lambda p: lang.Pair(*p)),
            children.map(Load),
            children.map(Alloc),
            children.map(lang.Fst),
            st.tuples(children, children, children).map(lambda t: If(*t)),
            st.tuples(st.sampled_from(["x", "y"]), children, children).map(
                lambda t: Let(t[0], t[1], t[2])
            ),
            children.map(lambda b: Rec(None, "x", b)),
        )

    return st.recursive(base, extend, max_leaves=12)


@given(exprs())
@settings(max_examples=300)
def test_decompose_plug_roundtrip(e):
    d = decompose(e)
    if d is None:
        assert is_value(e)
    else:
        ctx, red = d
        assert plug(ctx, red) == e


@given(exprs())
@settings(max_examples=200)
def test_pure_step_deterministic(e):
    try:
        s1 = pure_step(e)
        s2 = pure_step(e)
    except StuckExpr:
        return
    assert s1 == s2


def closed_int_bodies() -> st.SearchStrategy[lang.Expr]:
    """Integer-valued expressions over the free variable "x"."""
    base = st.one_of(st.integers(-4, 4).map(intE), st.just(Var("x")))

    def extend(children):
        return st.one_of(
            st.tuples(children, children).map(lambda p: BinOp("+", *p)),
            st.tuples(children, children).map(lambda p: BinOp("*", *p)),
            st.tuples(children, children).map(lambda p: Seq(*p)),
            st.tuples(st.just("y"), children, children).map(lambda t: Let(*t)),
        )

    return st.recursive(base, extend, max_leaves=8)


@given(closed_int_bodies(), st.integers(-4, 4))
@settings(max_examples=200)
def test_substitution_lemma(body, k):
    # one pure step of  let x := #k in body  is exactly subst(body, x, #k)
    stepped = pure_step(Let("x", intE(k), body))
    assert stepped == subst(body, "x", IntV(k))
    v1, h1 = interp(stepped, {})
    v2, h2 = interp(subst(body, "x", IntV(k)), {})
    assert (v1, h1) == (v2, h2)


@given(exprs())
@settings(max_examples=200)
def test_render_parse_roundtrip(e):
    env = Env(sorts={"ℓ": Sort.LOC})
    try:
        text = lang.render_expr(e, {"ℓ": Sort.LOC})
    except TypeError:
        return
    try:
        back = parse_expr(text, env)
    except ParseError:
        pytest.fail(f"rendered expression did not parse: {text!r}")
    assert lang.render_expr(back, {"ℓ": Sort.LOC}) == text
