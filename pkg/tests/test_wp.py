"""Program-logic layer: wp tactics, invariants, ghost state, the par rule."""
from __future__ import annotations

import pytest

from mini_iris import engine, lang, props, script as scriptmod, wp
from mini_iris.engine import GoalTree, Hyp, ProofState, PureVar, TacticFailure, parse_ipat
from mini_iris.parser import Env, parse_expr, parse_prop
from mini_iris.props import (
    Exists,
    Forall,
    Later,
    PointsTo,
    PredApp,
    Pure,
    Sep,
    Triple,
    TrueP,
    Upd,
    Wand,
    WP,
    alpha_equal,
)
from mini_iris.terms import IntLit, Sort, TVar, UnitLit

ENV = Env(sorts={"ℓ": Sort.LOC, "n": Sort.INT, "γ": Sort.GNAME})


def P(text: str):
    return parse_prop(text, ENV)


def wp_state(expr_text: str, spatial: dict[str, str] | None = None) -> ProofState:
    st = ProofState()
    st.pure_ctx = [PureVar("ℓ", Sort.LOC), PureVar("n", Sort.INT),
                   PureVar("Φ", Sort.PRED), PureVar("γ", Sort.GNAME)]
    for name, text in (spatial or {}).items():
        st.spatial.append(Hyp(name, P(text)))
    st.goal = WP(parse_expr(expr_text, ENV), "v", PredApp("Φ", TVar("v")))
    return st


# ---------------------------------------------------------------------------
# texan unfolding


def test_unfold_triple_shape_two_antecedents():
    t = P("{{{ ℓ ↦ #n }}} !#ℓ {{{ RET #(); ℓ ↦ #(n + 1) }}}")
    g = wp.unfold_triple(t)
    assert isinstance(g, Forall) and g.sort is Sort.PRED
    w1 = g.body
    assert isinstance(w1, Wand)
    w2 = w1.right
    assert isinstance(w2, Wand)
    assert isinstance(w2.right, WP)
    assert alpha_equal(w1.left, P("ℓ ↦ #n"))
    assert isinstance(w2.left, Wand)  # Q -∗ Φ ret


def test_unfold_triple_shape_on_all_corpus_lemmas():
    from tests.conftest import CORPUS

    for path in sorted(CORPUS.glob("*.v")):
        sc = scriptmod.parse_script(path.read_text(encoding="utf-8"))
        for lem in sc.lemmas:
            if not isinstance(lem.statement, Triple):
                continue
            g = wp.unfold_triple(lem.statement)
            assert isinstance(g, Forall)
            body = g.body
            count = 0
            while isinstance(body, Wand):
                count += 1
                body = body.right
            assert count == 2 and isinstance(body, WP), lem.name


def test_unfold_true_precondition_bank_style():
    t = P("{{{ True }}} #1 + #1 {{{ b, RET b; True }}}")
    g = wp.unfold_triple(t)
    assert isinstance(g.body.left, TrueP)


def test_value_triple_reaches_upd_immediately():
    t = P("{{{ True }}} #7 {{{ RET #7; True }}}")
    st = wp.initial_state(t, [])
    (st2,) = engine.t_intros(st, ["Φ"], parse_ipat("_ HΦ"))
    (st3,) = wp.t_wp_pures(st2)
    assert isinstance(st3.goal, Upd)
    assert alpha_equal(st3.goal.body, PredApp("Φ", IntLit(7)))


# ---------------------------------------------------------------------------
# pure-step tactics


def test_wp_pures_stops_at_load():
    st = wp_state('(λ: "l", let: "x" := !"l" in "x") #ℓ')
    (out,) = wp.t_wp_pures(st)
    assert isinstance(out.goal, WP)
    d = lang.decompose(out.goal.expr)
    assert isinstance(d[1], lang.Load)


def test_wp_op_single_step():
    st = wp_state("#ℓ <- #1 + #2")
    (out,) = wp.t_wp_op(st)
    assert isinstance(out.goal, WP)
    assert isinstance(out.goal.expr, lang.Store)
    assert out.goal.expr.src == lang.ValE(lang.IntV(3))


def test_wp_let_demands_let_redex():
    st = wp_state("#ℓ <- #1 + #2")
    with pytest.raises(TacticFailure):
        wp.t_wp_let(st)


def test_wp_pures_value_collapses_to_upd():
    st = wp_state("#()")
    (out,) = wp.t_wp_pures(st)
    assert alpha_equal(out.goal, Upd(PredApp("Φ", UnitLit())))


# ---------------------------------------------------------------------------
# heap tactics


def test_wp_load_rewrites_redex():
    st = wp_state('let: "x" := !#ℓ in "x" + #1', {"Hpt": "ℓ ↦ #1"})
    (out,) = wp.t_wp_load(st)
    assert alpha_equal(out.find_spatial("Hpt").prop, P("ℓ ↦ #1"))  # unchanged
    assert isinstance(out.goal.expr, lang.Let)
    assert out.goal.expr.bound == lang.ValE(lang.IntV(1))


def test_wp_load_missing_pointsto():
    st = wp_state("!#ℓ")
    with pytest.raises(TacticFailure) as e:
        wp.t_wp_load(st)
    assert e.value.code == "NoPointsTo"


def test_wp_store_updates_hypothesis():
    st = wp_state("#ℓ <- #(n + 1)", {"Hpt": "ℓ ↦ #n"})
    (out,) = wp.t_wp_store(st)
    assert alpha_equal(out.find_spatial("Hpt").prop, P("ℓ ↦ #(n + 1)"))
    assert alpha_equal(out.goal, Upd(PredApp("Φ", UnitLit())))


def test_wp_store_requires_value_operand():
    st = wp_state("#ℓ <- !#ℓ", {"Hpt": "ℓ ↦ #n"})
    with pytest.raises(TacticFailure) as e:
        wp.t_wp_store(st)
    assert e.value.code == "NonValueOperand"


def test_wp_store_unowned_location():
    st = wp_state("#ℓ <- #1", {"Hother": "own γ (●E 0)"})
    with pytest.raises(TacticFailure) as e:
        wp.t_wp_store(st)
    assert e.value.code == "NoPointsTo"


def test_wp_alloc_fresh_and_clash():
    st = wp_state("ref #0")
    (out,) = wp.t_wp_alloc(st, "l", "Hl")
    assert alpha_equal(out.find_spatial("Hl").prop, PointsTo(TVar("l"), IntLit(0)))
    assert any(isinstance(e, PureVar) and e.name == "l" and e.sort is Sort.LOC
               for e in out.pure_ctx)
    st2 = wp_state("ref #0")
    with pytest.raises(TacticFailure) as e:
        wp.t_wp_alloc(st2, "ℓ", "H")  # ℓ is already a context variable
    assert e.value.code == "NameClash"


def test_wp_alloc_pair_value():
    from mini_iris.terms import PairT

    st = wp_state("ref (#1, #2)")
    (st,) = wp.t_wp_pures(st)  # fold the pair constructor into a value
    (out,) = wp.t_wp_alloc(st, "l", "Hl")
    got = out.find_spatial("Hl").prop
    assert isinstance(got, PointsTo)
    assert got.val == PairT(IntLit(1), IntLit(2))


def test_load_store_footprint():
    st = wp_state("#ℓ <- #5", {"Hpt": "ℓ ↦ #n", "Hother": "k ↦ #0"})
    st.pure_ctx.append(PureVar("k", Sort.LOC))
    before = {h.name: props.render_prop(h.prop) for h in st.spatial}
    (out,) = wp.t_wp_store(st)
    after = {h.name: props.render_prop(h.prop) for h in out.spatial}
    assert after["Hother"] == before["Hother"]
    assert after["Hpt"] != before["Hpt"]


# ---------------------------------------------------------------------------
# bind / apply


def test_wp_bind_counter_shape():
    st = wp_state("#ℓ <- !#ℓ + #1")
    (out,) = wp.t_wp_bind(st, parse_expr("!#ℓ", ENV))
    g = out.goal
    assert isinstance(g, WP) and isinstance(g.expr, lang.Load)
    assert isinstance(g.post, WP)


def test_wp_bind_whole_expression_identity():
    st = wp_state("!#ℓ")
    (out,) = wp.t_wp_bind(st, parse_expr("!#ℓ", ENV))
    assert isinstance(out.goal, WP) and not isinstance(out.goal.post, WP)


def test_wp_bind_pattern_under_lambda_fails():
    st = wp_state('(λ: "x", !#ℓ) #1')
    with pytest.raises(TacticFailure) as e:
        wp.t_wp_bind(st, parse_expr("!#ℓ", ENV))
    assert e.value.code == "PatternNotInEvalPosition"


def test_wp_apply_compose_incr_twice_with_oracle():
    text = """
Definition incr : expr :=
  λ: "l", let: "n" := !"l" in "l" <- "n" + #1.

Lemma incr_spec (ℓ : loc) (n : Z) :
  {{{ ℓ ↦ #n }}} incr #ℓ {{{ RET #(); ℓ ↦ #(n + 1) }}}.
Proof.
iIntros (Φ) "Hpt HΦ".
wp_pures. wp_load. wp_let. wp_op. wp_store. iModIntro.
iApply "HΦ". iFrame.
Qed.

Lemma incr_twice (ℓ : loc) (n : Z) :
  {{{ ℓ ↦ #n }}} incr #ℓ ;; incr #ℓ {{{ RET #(); ℓ ↦ #(n + 1 + 1) }}}.
Proof.
iIntros (Φ) "Hpt HΦ".
wp_apply (incr_spec with "[Hpt]").
iIntros "Hpt".
wp_apply (incr_spec with "[Hpt]").
iIntros "Hpt".
wp_pures. iModIntro.
iApply "HΦ". iFrame.
Qed.
"""
    rep = scriptmod.check_text(text)
    assert rep.all_proved, rep.text()
    # brute-force oracle: running the program really adds two
    incr = parse_expr('λ: "l", let: "n" := !"l" in "l" <- "n" + #1')
    prog = lang.Seq(
        lang.App(incr, lang.ValE(lang.LocV("ℓ"))), lang.App(incr, lang.ValE(lang.LocV("ℓ")))
    )
    for seed in range(-3, 4):
        _, h = lang.interp(prog, {"ℓ": lang.IntV(seed)})
        assert h == {"ℓ": lang.IntV(seed + 2)}


def test_wp_apply_no_matching_subterm():
    text = """
Definition incr : expr :=
  λ: "l", let: "n" := !"l" in "l" <- "n" + #1.

Lemma incr_spec (ℓ : loc) (n : Z) :
  {{{ ℓ ↦ #n }}} incr #ℓ {{{ RET #(); ℓ ↦ #(n + 1) }}}.
Proof.
iIntros (Φ) "Hpt HΦ".
wp_pures. wp_load. wp_let. wp_op. wp_store. iModIntro.
iApply "HΦ". iFrame.
Qed.

Lemma wrong (ℓ : loc) (n : Z) :
  {{{ ℓ ↦ #n }}} !#ℓ {{{ RET #n; ℓ ↦ #n }}}.
Proof.
iIntros (Φ) "Hpt HΦ".
wp_apply (incr_spec with "[Hpt]").
Qed.
"""
    rep = scriptmod.check_text(text)
    assert rep.results[1].verdict == "failed"
    assert "NoMatchingSubterm" in rep.results[1].error or "nowhere" in rep.results[1].error


# ---------------------------------------------------------------------------
# invariants


def counter_inv() -> props.Prop:
    return P("∃ (m : Z), ⌜n ≤ m⌝ ∗ ℓ ↦ #m")


def test_inv_alloc_emits_subgoal():
    st = wp_state("!#ℓ", {"Hpt": "ℓ ↦ #n"})
    subs = wp.t_inv_alloc(st, "N", counter_inv(), ["Hpt"], parse_ipat("#HInv")[0])
    assert len(subs) == 2
    sub, main = subs
    assert alpha_equal(sub.goal, Later(counter_inv()))
    assert [h.name for h in sub.spatial] == ["Hpt"]
    assert main.find_persistent("HInv") is not None
    assert main.find_spatial("Hpt") is None


def test_inv_alloc_true_body_no_subgoal():
    st = wp_state("!#ℓ")
    subs = wp.t_inv_alloc(st, "N", TrueP(), [], parse_ipat("#HInv")[0])
    assert len(subs) == 1
    assert subs[0].find_persistent("HInv") is not None


def test_inv_alloc_namespace_in_use():
    st = wp_state("!#ℓ")
    (st2,) = wp.t_inv_alloc(st, "N", TrueP(), [], parse_ipat("#HInv")[0])
    with pytest.raises(TacticFailure) as e:
        wp.t_inv_alloc(st2, "N", P("⌜n = 0⌝"), [], parse_ipat("#HInv2")[0])
    assert e.value.code == "NamespaceInUse"


def opened_state() -> ProofState:
    st = wp_state("!#ℓ", {"Hpt": "ℓ ↦ #n"})
    _sub, st2 = wp.t_inv_alloc(st, "N", P("⌜0 ≤ 0⌝"), [], parse_ipat("#HInv")[0])
    (st3,) = wp.t_inv_open(st2, "N", "H", "Hclose")
    return st3


def test_inv_open_gives_body_and_closer():
    st3 = opened_state()
    assert alpha_equal(st3.find_spatial("H").prop, Later(P("⌜0 ≤ 0⌝")))
    hclose = st3.find_spatial("Hclose")
    assert hclose is not None and hclose.close_ns == "N"
    assert alpha_equal(hclose.prop, Wand(Later(P("⌜0 ≤ 0⌝")), Upd(TrueP())))
    assert [ns for ns, _ in st3.open_invs] == ["N"]


def test_inv_open_reentrancy_banned():
    st3 = opened_state()
    with pytest.raises(TacticFailure) as e:
        wp.t_inv_open(st3, "N", "H2", "Hclose2")
    assert e.value.code == "AlreadyOpen"


def test_inv_open_not_atomic():
    st = wp_state("#ℓ <- !#ℓ + #1", {"Hpt": "ℓ ↦ #n"})
    (st2,) = wp.t_inv_alloc(st, "N", TrueP(), [], parse_ipat("#HInv")[0])
    with pytest.raises(TacticFailure) as e:
        wp.t_inv_open(st2, "N", "H", "Hclose")
    assert e.value.code == "NotAtomic"


def test_inv_open_no_such_invariant():
    st = wp_state("!#ℓ", {"Hpt": "ℓ ↦ #n"})
    with pytest.raises(TacticFailure) as e:
        wp.t_inv_open(st, "M", "H", "Hclose")
    assert e.value.code == "NoSuchInvariant"


def test_inv_close_round_trip_state_diff():
    st3 = opened_state()
    before_spatial = sorted(
        props.render_prop(h.prop) for h in st3.spatial if h.name not in ("H", "Hclose")
    )
    subs = wp.t_inv_close(st3, "Hclose", ["H"], parse_ipat("_")[0])
    sub, main = subs
    # reestablishment subgoal carries exactly the given hypotheses
    assert [h.name for h in sub.spatial] == ["H"]
    assert alpha_equal(sub.goal, Later(P("⌜0 ≤ 0⌝")))
    # the main goal is back to the pre-open state modulo the consumed ▷P
    after_spatial = sorted(props.render_prop(h.prop) for h in main.spatial)
    assert after_spatial == before_spatial
    assert main.open_invs == []


def test_inv_close_wrong_order():
    st = wp_state("!#ℓ", {"Hpt": "ℓ ↦ #n"})
    _s, st = wp.t_inv_alloc(st, "N1", P("⌜0 ≤ 0⌝"), [], parse_ipat("#H1")[0])
    _s, st = wp.t_inv_alloc(st, "N2", P("⌜0 ≤ 1⌝"), [], parse_ipat("#H2")[0])
    (st,) = wp.t_inv_open(st, "N1", "Ha", "Hclose1")
    (st,) = wp.t_inv_open(st, "N2", "Hb", "Hclose2")
    with pytest.raises(TacticFailure) as e:
        wp.t_inv_close(st, "Hclose1", ["Ha"], parse_ipat("_")[0])
    assert e.value.code == "WrongCloseOrder"
    subs = wp.t_inv_close(st, "Hclose2", ["Hb"], parse_ipat("_")[0])
    assert [ns for ns, _ in subs[1].open_invs] == ["N1"]


def test_inv_close_missing_hypothesis():
    st3 = opened_state()
    with pytest.raises(TacticFailure):
        wp.t_inv_close(st3, "Hclose", ["Nope"], parse_ipat("_")[0])


def test_qed_with_open_invariant_rejected():
    st3 = opened_state()
    st3.goal = TrueP()
    tree = GoalTree(st3)
    senv = scriptmod.ScriptEnv()
    with pytest.raises(TacticFailure) as e:
        scriptmod.apply_sentence(tree, "done", senv)
    assert e.value.code == "InvariantStillOpen"


def test_pure_steps_blocked_while_open():
    st3 = opened_state()
    st3.goal = WP(parse_expr("#1 + #1", ENV), "v", PredApp("Φ", TVar("v")))
    with pytest.raises(TacticFailure) as e:
        wp.t_wp_pures(st3)
    assert e.value.code == "InvariantStillOpen"


# ---------------------------------------------------------------------------
# ghost state


def test_ghost_alloc_pair_and_freshness():
    st = wp_state("!#ℓ")
    (out,) = wp.t_ghost_var_alloc(st, IntLit(0), "γ1", parse_ipat("[Hown Hfrag]")[0])
    assert out.find_spatial("Hown").prop == props.Own(TVar("γ1"), "auth", IntLit(0))
    assert out.find_spatial("Hfrag").prop == props.Own(TVar("γ1"), "frag", IntLit(0))
    (out2,) = wp.t_ghost_var_alloc(out, IntLit(0), "γ2", parse_ipat("[Hown2 Hfrag2]")[0])
    names = {e.name for e in out2.pure_ctx if isinstance(e, PureVar)}
    assert {"γ1", "γ2"} <= names
    with pytest.raises(TacticFailure):
        wp.t_ghost_var_alloc(out2, IntLit(1), "γ1", parse_ipat("[A B]")[0])


def test_ghost_agree_adds_pure_fact():
    st = wp_state("!#ℓ", {"H1": "own γ (●E 0)", "H2": "own γ (◯E n)"})
    (out,) = wp.t_ghost_var_agree(st, "H1", "H2", parse_ipat("%Heq")[0])
    hyp = out.find_pure_hyp("Heq")
    assert hyp is not None
    assert hyp.form == props.Eq(IntLit(0), TVar("n"))
    # both ownership halves are retained
    assert out.find_spatial("H1") and out.find_spatial("H2")


def test_ghost_agree_gname_mismatch():
    st = wp_state("!#ℓ", {"H1": "own γ (●E 0)", "H2": "own δ (◯E 0)"})
    st.pure_ctx.append(PureVar("δ", Sort.GNAME))
    with pytest.raises(TacticFailure) as e:
        wp.t_ghost_var_agree(st, "H1", "H2", parse_ipat("%Heq")[0])
    assert e.value.code == "GnameMismatch"


def test_ghost_update():
    st = wp_state("!#ℓ", {"H1": "own γ (●E 0)", "H2": "own γ (◯E 0)"})
    (out,) = wp.t_ghost_var_update(st, "H1", "H2", IntLit(7))
    assert out.find_spatial("H1").prop == props.Own(TVar("γ"), "auth", IntLit(7))
    assert out.find_spatial("H2").prop == props.Own(TVar("γ"), "frag", IntLit(7))


def test_ghost_update_agreement_violation():
    st = wp_state("!#ℓ", {"H1": "own γ (●E 0)", "H2": "own γ (◯E 1)"})
    with pytest.raises(TacticFailure) as e:
        wp.t_ghost_var_update(st, "H1", "H2", IntLit(7))
    assert e.value.code == "AgreementViolation"


# ---------------------------------------------------------------------------
# wp_par and the fork rule


def test_wp_par_three_subgoals():
    st = wp_state("(!#ℓ ||| !#ℓ) ;; #0", {"HΦx": "True -∗ True"})
    subs = wp.t_wp_par(st, [], [])
    assert len(subs) == 3
    t1, t2, cont = subs
    assert isinstance(t1.goal, WP) and isinstance(t1.goal.post, TrueP)
    assert isinstance(t2.goal, WP)
    assert isinstance(cont.goal, Forall)
    assert cont.find_spatial("HΦx") is not None
    assert t1.find_spatial("HΦx") is None


def test_hoare_fork_kernel_rule():
    premise = Triple(P("ℓ ↦ #n"), parse_expr("#ℓ <- #1", ENV), (), UnitLit(), TrueP())
    concl = wp.hoare_fork_rule(premise)
    assert isinstance(concl.expr, lang.Fork)
    assert alpha_equal(concl.pre, premise.pre)
    assert isinstance(concl.post, TrueP)
    # fork is neither executable nor part of the surface syntax
    with pytest.raises(lang.StuckExpr):
        lang.pure_step(concl.expr)
    parsed = parse_expr("fork (#ℓ <- #1)", ENV)  # a plain application of a name
    forks = []
    def walk(e):
        if isinstance(e, lang.Fork):
            forks.append(e)
        for c in lang.children(e):
            walk(c)
    walk(parsed)
    assert forks == []
    with pytest.raises(ValueError):
        wp.hoare_fork_rule(Triple(TrueP(), parse_expr("#1"), (), UnitLit(), P("ℓ ↦ #n")))
