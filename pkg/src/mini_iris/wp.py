"""Program-logic layer: triple unfolding, wp tactics, invariants, ghost state.

The wp tactics drive `lang.pure_step` over the goal's weakest-precondition
expression.  Heap tactics are strict about their redex: a load reduces only
a load, a store only a store with value operands.  Reaching a value
collapses the WP; the collapse produces the update modality exactly when
the postcondition is not itself a nested WP, which is where the |={⊤}=>
display in the traces comes from.

Invariants open only around a goal that is exactly one atomic heap
operation, and the per-goal ledger bans re-entrant opening and enforces
well-nested closing.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import lang, props
from .engine import (
    Hyp,
    IPat,
    ProofState,
    TacticFailure,
    destructure,
    unify_expr,
    unify_prop,
)
from .props import (
    Forall,
    Inv,
    Later,
    PointsTo,
    PredApp,
    Prop,
    Sep,
    Triple,
    TrueP,
    Upd,
    Wand,
    WP,
    alpha_equal,
    prop_subst,
    sep_flatten,
    sep_multiset_equal,
    sep_normal_form,
)
from .terms import Sort, Term, TVar


# ---------------------------------------------------------------------------
# texan-triple unfolding


def unfold_triple(t: Triple, pred_name: str = "Φ") -> Prop:
    """∀Φ. P -∗ (∀binders. Q -∗ Φ ret) -∗ WP e {{v, Φ v}}."""
    post_wand: Prop = Wand(t.post, PredApp(pred_name, t.ret))
    for b, s in reversed(t.binders):
        post_wand = Forall(b, s, post_wand)
    wp = WP(t.expr, "v", PredApp(pred_name, TVar("v")))
    return Forall(pred_name, Sort.PRED, Wand(t.pre, Wand(post_wand, wp)))


def initial_state(statement: Prop, binders: list[tuple[str, Sort]]) -> ProofState:
    from .engine import PureVar

    st = ProofState()
    for n, s in binders:
        st.pure_ctx.append(PureVar(n, s))
    if isinstance(statement, Triple):
        st.goal = unfold_triple(statement)
    else:
        st.goal = statement
    return st


# ---------------------------------------------------------------------------
# WP goal plumbing


def _wp_goal(state: ProofState, tactic: str) -> WP:
    g = state.goal
    if not isinstance(g, WP):
        raise TacticFailure(tactic, "goal is not a weakest precondition", "NotWpGoal")
    return g


def _collapse(goal: WP) -> Prop:
    """WP of a value: substitute into the postcondition; wrap non-WP results
    in the update modality."""
    v = lang.to_val(goal.expr)
    try:
        t = lang.term_of_val(v)
    except lang.StuckExpr as e:
        raise TacticFailure("wp", str(e), "StuckExpr")
    body = prop_subst(goal.post, goal.binder, t)
    if isinstance(body, WP):
        return body
    return Upd(body)


def _set_wp_expr(state: ProofState, goal: WP, expr: lang.Expr) -> None:
    if lang.is_value(expr):
        state.goal = _collapse(WP(expr, goal.binder, goal.post))
    else:
        state.goal = WP(expr, goal.binder, goal.post)


def _guard_ledger_pure(state: ProofState, tactic: str) -> None:
    if state.open_invs:
        raise TacticFailure(
            tactic,
            f"invariant {state.open_invs[-1][0]} is open; only its atomic step may run",
            "InvariantStillOpen",
        )


def _unfold_defs_at_redex(e: lang.Expr) -> lang.Expr:
    """Administrative reduction: unfold definition references in redex
    position so single-step tactics see through names."""
    while True:
        d = lang.decompose(e)
        if d is None:
            return e
        ctx, red = d
        if isinstance(red, lang.DefApp):
            e = lang.plug(ctx, red.expansion)
        elif isinstance(red, lang.App) and isinstance(red.fn, lang.DefApp):
            e = lang.plug(ctx, lang.App(red.fn.expansion, red.arg))
        else:
            return e


def t_wp_pures(state: ProofState) -> list[ProofState]:
    goal = _wp_goal(state, "wp_pures")
    expr = goal.expr
    while True:
        if lang.is_value(expr):
            state.goal = _collapse(WP(expr, goal.binder, goal.post))
            inner = state.goal
            if isinstance(inner, WP):
                goal, expr = inner, inner.expr
                continue
            return [state]
        try:
            stepped = lang.pure_step(expr)
        except lang.StuckExpr as e:
            raise TacticFailure("wp_pures", str(e), "StuckExpr")
        if stepped is None:
            state.goal = WP(expr, goal.binder, goal.post)
            return [state]
        _guard_ledger_pure(state, "wp_pures")
        expr = stepped


def _single_step(state: ProofState, tactic: str, want) -> list[ProofState]:
    goal = _wp_goal(state, tactic)
    expr = _unfold_defs_at_redex(goal.expr)
    d = lang.decompose(expr)
    if d is None:
        raise TacticFailure(tactic, "expression is already a value", "ShapeMismatch")
    ctx, red = d
    if not want(red):
        raise TacticFailure(
            tactic, f"redex {lang.render_expr(red)} has the wrong shape", "ShapeMismatch"
        )
    _guard_ledger_pure(state, tactic)
    try:
        stepped = lang.head_pure_step(red)
    except lang.StuckExpr as e:
        raise TacticFailure(tactic, str(e), "StuckExpr")
    if stepped is None:
        raise TacticFailure(tactic, "redex is not a pure step", "NoPureStep")
    _set_wp_expr(state, goal, lang.plug(ctx, stepped))
    return [state]


def t_wp_pure(state: ProofState) -> list[ProofState]:
    return _single_step(state, "wp_pure", lambda r: True)


def t_wp_let(state: ProofState) -> list[ProofState]:
    return _single_step(state, "wp_let", lambda r: isinstance(r, lang.Let))


def t_wp_seq(state: ProofState) -> list[ProofState]:
    return _single_step(state, "wp_seq", lambda r: isinstance(r, lang.Seq))


def t_wp_op(state: ProofState) -> list[ProofState]:
    return _single_step(state, "wp_op", lambda r: isinstance(r, lang.BinOp))


def t_wp_rec(state: ProofState) -> list[ProofState]:
    return _single_step(
        state, "wp_rec", lambda r: isinstance(r, lang.App) and lang.is_value(r.fn)
    )


def t_wp_if(state: ProofState) -> list[ProofState]:
    return _single_step(state, "wp_if", lambda r: isinstance(r, lang.If))


def t_wp_proj(state: ProofState) -> list[ProofState]:
    return _single_step(state, "wp_proj", lambda r: isinstance(r, (lang.Fst, lang.Snd)))


def _find_points_to(state: ProofState, loc: Term) -> Optional[Hyp]:
    for h in state.spatial:
        if isinstance(h.prop, PointsTo) and h.prop.loc == loc:
            return h
    return None


def _heap_redex(state: ProofState, tactic: str, kind) -> tuple[WP, list, lang.Expr]:
    goal = _wp_goal(state, tactic)
    expr = _unfold_defs_at_redex(goal.expr)
    d = lang.decompose(expr)
    if d is None:
        raise TacticFailure(tactic, "expression is already a value", "ShapeMismatch")
    ctx, red = d
    if not isinstance(red, kind):
        op_tags = {"Load": ("load",), "Store": ("store_l", "store_r"), "Alloc": ("alloc",)}
        inside = any(f[0] in op_tags[kind.__name__] for f in ctx)
        code = "NonValueOperand" if inside else "ShapeMismatch"
        raise TacticFailure(
            tactic,
            f"redex {lang.render_expr(red)} is not a {kind.__name__.lower()}"
            + ("; reduce its operands first (wp_pures)" if inside else ""),
            code,
        )
    return WP(expr, goal.binder, goal.post), ctx, red


def t_wp_load(state: ProofState) -> list[ProofState]:
    goal, ctx, red = _heap_redex(state, "wp_load", lang.Load)
    assert isinstance(red, lang.Load)
    loc_val = lang.to_val(red.arg)
    if not isinstance(loc_val, lang.LocV):
        raise TacticFailure("wp_load", "load of a non-location", "StuckExpr")
    loc = TVar(loc_val.name)
    h = _find_points_to(state, loc)
    if h is None:
        raise TacticFailure(
            "wp_load",
            f"no points-to assertion for {loc_val.name} in the spatial context "
            "(is it inside an unopened invariant?)",
            "NoPointsTo",
        )
    assert isinstance(h.prop, PointsTo)
    w = lang.val_of_term(h.prop.val, state.sorts())
    _set_wp_expr(state, goal, lang.plug(ctx, lang.ValE(w)))
    return [state]


def t_wp_store(state: ProofState) -> list[ProofState]:
    goal, ctx, red = _heap_redex(state, "wp_store", lang.Store)
    assert isinstance(red, lang.Store)
    dst = lang.to_val(red.dst)
    if not isinstance(dst, lang.LocV):
        raise TacticFailure("wp_store", "store to a non-location", "StuckExpr")
    loc = TVar(dst.name)
    h = _find_points_to(state, loc)
    if h is None:
        raise TacticFailure(
            "wp_store",
            f"no points-to assertion for {dst.name} in the spatial context",
            "NoPointsTo",
        )
    h.prop = PointsTo(loc, lang.term_of_val(lang.to_val(red.src)))
    _set_wp_expr(state, goal, lang.plug(ctx, lang.ValE(lang.UnitV())))
    return [state]


def t_wp_alloc(state: ProofState, loc_name: str, hyp_name: str) -> list[ProofState]:
    goal, ctx, red = _heap_redex(state, "wp_alloc", lang.Alloc)
    assert isinstance(red, lang.Alloc)
    v = lang.to_val(red.arg)
    state.add_pure_var("wp_alloc", loc_name, Sort.LOC)
    state.add_spatial("wp_alloc", hyp_name, PointsTo(TVar(loc_name), lang.term_of_val(v)))
    _set_wp_expr(state, goal, lang.plug(ctx, lang.ValE(lang.LocV(loc_name))))
    return [state]


# ---------------------------------------------------------------------------
# bind and apply


def t_wp_bind(state: ProofState, pattern: lang.Expr) -> list[ProofState]:
    goal = _wp_goal(state, "wp_bind")
    expr = _unfold_defs_at_redex(goal.expr)
    for ctx, sub in lang.eval_positions(expr):
        if alpha_equal_expr(sub, pattern):
            if not ctx:
                return [state]  # binding the whole expression: identity nesting
            w = state.fresh("w")
            cont = lang.plug(ctx, lang.ValE(lang.SymV(TVar(w))))
            state.goal = WP(sub, w, WP(cont, goal.binder, goal.post))
            return [state]
    raise TacticFailure(
        "wp_bind",
        f"{lang.render_expr(pattern)} is not in evaluation position",
        "PatternNotInEvalPosition",
    )


def alpha_equal_expr(a: lang.Expr, b: lang.Expr) -> bool:
    from .engine import unify_expr

    return unify_expr(a, b, {})


def _fresh_meta(state: ProofState, base: str) -> str:
    return state.fresh(base)


def t_wp_apply(
    state: ProofState,
    lemma: Triple,
    lemma_binders: list[tuple[str, Sort]],
    groups: list[list[str]],
) -> list[ProofState]:
    """Apply a proved triple lemma against a subterm in evaluation position."""
    goal = _wp_goal(state, "wp_apply")
    holes: dict[str, Optional[Term]] = {b: None for b, _ in lemma_binders}
    expr = goal.expr
    match: tuple[list, lang.Expr] | None = None
    while True:
        for ctx, sub in lang.eval_positions(expr):
            trial = dict(holes)
            if unify_expr(lemma.expr, sub, trial):
                holes = trial
                match = (ctx, sub)
                break
        if match is not None:
            break
        try:
            stepped = lang.pure_step(expr)
        except lang.StuckExpr as e:
            raise TacticFailure("wp_apply", str(e), "StuckExpr")
        if stepped is None:
            raise TacticFailure(
                "wp_apply", "the lemma's program occurs nowhere in evaluation position",
                "NoMatchingSubterm",
            )
        _guard_ledger_pure(state, "wp_apply")
        expr = stepped
    ctx, sub = match

    with_hyps: list[Hyp] = []
    for grp in groups[:1]:
        with_hyps = [state.take_spatial("wp_apply", nm) for nm in grp]
    if len(groups) > 1:
        raise TacticFailure("wp_apply", "too many specialization groups", "ArityMismatch")

    # resolve remaining lemma parameters against the precondition
    pre_pat = lemma.pre
    if any(v is None for v in holes.values()):
        if not _match_pre(pre_pat, [h.prop for h in with_hyps], holes):
            missing = [k for k, v in holes.items() if v is None]
            raise TacticFailure(
                "wp_apply", f"cannot infer instantiation for {', '.join(missing)}",
                "CannotInfer",
            )

    def inst(p: Prop) -> Prop:
        for k, v in holes.items():
            if v is not None:
                p = prop_subst(p, k, v)
        return p

    pre = inst(lemma.pre)
    post = inst(lemma.post)
    ret = lemma.ret
    for k, v in holes.items():
        if v is not None:
            from .terms import term_subst

            ret = term_subst(ret, k, v)

    subgoals: list[ProofState] = []
    discharged = sep_multiset_equal(
        sep_normal_form(pre), sep_normal_form(props.sep_list([h.prop for h in with_hyps]))
    )
    if not discharged:
        pre_state = state.copy()
        pre_state.goal = pre
        pre_state.spatial = with_hyps
        subgoals.append(pre_state)

    cont = state
    wand: Prop = Wand(post, WP(lang.plug(ctx, lang.ValE(lang.val_of_term(ret, state.sorts()))),
                               goal.binder, goal.post))
    for b, s in reversed(lemma.binders):
        wand = Forall(b, s, wand)
    cont.goal = wand
    subgoals.append(cont)
    return subgoals


def _match_pre(pat: Prop, given: list[Prop], holes: dict[str, Optional[Term]]) -> bool:
    """Match precondition conjuncts against provided hypotheses to resolve
    leftover lemma parameters (small lists; simple backtracking)."""
    pats = sep_flatten(pat)
    if len(pats) != len(given):
        return False

    def go(i: int, remaining: list[Prop], h: dict) -> Optional[dict]:
        if i == len(pats):
            return h
        for j, cand in enumerate(remaining):
            trial = dict(h)
            if unify_prop(pats[i], cand, trial):
                res = go(i + 1, remaining[:j] + remaining[j + 1 :], trial)
                if res is not None:
                    return res
        return None

    res = go(0, given, dict(holes))
    if res is None:
        return False
    holes.update(res)
    return all(v is not None for v in holes.values())


def t_wp_par(state: ProofState, group1: list[str], group2: list[str]) -> list[ProofState]:
    """Dispatch `e1 ||| e2` [built-in par rule]: one goal per thread with the
    chosen spatial split, and a continuation receiving both postconditions."""
    goal = _wp_goal(state, "wp_apply (wp_par)")
    expr = _unfold_defs_at_redex(goal.expr)
    par_pos: tuple[list, lang.Par] | None = None
    while par_pos is None:
        for ctx, sub in lang.eval_positions(expr):
            if isinstance(sub, lang.Par):
                par_pos = (ctx, sub)
                break
        if par_pos is not None:
            break
        stepped = lang.pure_step(expr)
        if stepped is None:
            raise TacticFailure(
                "wp_apply", "no parallel composition in evaluation position",
                "NoMatchingSubterm",
            )
        _guard_ledger_pure(state, "wp_apply")
        expr = _unfold_defs_at_redex(stepped)
    ctx, par = par_pos
    hy1 = [state.take_spatial("wp_apply", nm) for nm in group1]
    hy2 = [state.take_spatial("wp_apply", nm) for nm in group2]

    thread1 = state.copy()
    thread1.spatial = hy1
    thread1.goal = WP(par.left, "v", TrueP())
    thread2 = state.copy()
    thread2.spatial = hy2
    thread2.goal = WP(par.right, "v", TrueP())

    cont = state.copy()
    v1 = cont.fresh("v1")
    v2 = cont.fresh("v2")
    pair = lang.ValE(lang.PairV(lang.SymV(TVar(v1)), lang.SymV(TVar(v2))))
    cont_wp = WP(lang.plug(ctx, pair), goal.binder, goal.post)
    cont.goal = Forall(
        v1, Sort.VAL, Forall(v2, Sort.VAL, Wand(Sep(TrueP(), TrueP()), cont_wp))
    )
    return [thread1, thread2, cont]


# ---------------------------------------------------------------------------
# invariants


def _atomic_shape(e: lang.Expr) -> bool:
    e = _strip_defapps(e)
    if isinstance(e, lang.Load):
        return lang.is_value(e.arg)
    if isinstance(e, lang.Store):
        return lang.is_value(e.dst) and lang.is_value(e.src)
    if isinstance(e, lang.Alloc):
        return lang.is_value(e.arg)
    return False


def _strip_defapps(e: lang.Expr) -> lang.Expr:
    while isinstance(e, lang.DefApp):
        e = e.expansion
    return e


def t_inv_alloc(
    state: ProofState,
    namespace: str,
    body: Prop,
    with_names: list[str],
    as_pat: IPat,
) -> list[ProofState]:
    g = state.goal
    if not isinstance(g, (WP, Upd)):
        raise TacticFailure(
            "iMod", "allocating an invariant needs a WP or |==> goal", "ModalityRequired"
        )
    for h in state.persistent:
        if isinstance(h.prop, Inv) and h.prop.namespace == namespace:
            if not alpha_equal(h.prop.body, body):
                raise TacticFailure(
                    "inv_alloc", f"namespace {namespace} already holds a different invariant",
                    "NamespaceInUse",
                )
    hyps = [state.take_spatial("inv_alloc", nm) for nm in with_names]
    stripped = body
    while isinstance(stripped, Later):
        stripped = stripped.body
    given = props.sep_list([h.prop for h in hyps])
    sub: ProofState | None = None
    if not sep_multiset_equal(sep_normal_form(given), sep_normal_form(stripped)):
        sub = state.copy()
        sub.spatial = hyps
        sub.goal = Later(stripped)
    inv_prop = Inv(namespace, body)
    if as_pat.kind == "intuit":
        state.add_persistent("inv_alloc", as_pat.name, inv_prop)
    elif as_pat.kind == "name":
        state.add_spatial("inv_alloc", as_pat.name, inv_prop)
    else:
        raise TacticFailure("inv_alloc", "as-pattern must name the invariant", "BadPattern")
    return [sub, state] if sub is not None else [state]


def t_inv_open(state: ProofState, namespace: str, name_h: str, name_close: str) -> list[ProofState]:
    inv = None
    for h in state.persistent + state.spatial:
        if isinstance(h.prop, Inv) and h.prop.namespace == namespace:
            inv = h.prop
            break
    if inv is None:
        raise TacticFailure("iInv", f"no invariant in namespace {namespace}", "NoSuchInvariant")
    if any(ns == namespace for ns, _ in state.open_invs):
        raise TacticFailure(
            "iInv", f"invariant {namespace} is already open (re-entrancy)", "AlreadyOpen"
        )
    g = state.goal
    if not isinstance(g, WP) or not _atomic_shape(g.expr):
        raise TacticFailure(
            "iInv",
            "the goal must be a WP of a single atomic heap operation (use wp_bind)",
            "NotAtomic",
        )
    state.add_spatial("iInv", name_h, Later(inv.body))
    state.add_spatial(
        "iInv", name_close, Wand(Later(inv.body), Upd(TrueP())), close_ns=namespace
    )
    state.open_invs.append((namespace, inv.body))
    return [state]


def t_inv_close(
    state: ProofState, close_name: str, with_names: list[str], as_pat: IPat
) -> list[ProofState]:
    h = state.find_spatial(close_name)
    if h is None:
        raise TacticFailure("iMod", f"no hypothesis {close_name!r}", "NoSuchHypothesis")
    if h.close_ns is None:
        raise TacticFailure(
            "iMod", f"{close_name!r} does not close an invariant", "ShapeMismatch"
        )
    g = state.goal
    if not isinstance(g, (WP, Upd)):
        raise TacticFailure("iMod", "closing needs a WP or |==> goal", "ModalityRequired")
    if not state.open_invs:
        raise TacticFailure("iMod", "no invariant is open", "WrongCloseOrder")
    top_ns, top_body = state.open_invs[-1]
    if h.close_ns != top_ns:
        raise TacticFailure(
            "iMod",
            f"invariant {h.close_ns} is not the most recently opened ({top_ns})",
            "WrongCloseOrder",
        )
    state.spatial.remove(h)
    hyps = [state.take_spatial("iMod", nm) for nm in with_names]
    state.open_invs.pop()
    if as_pat.kind == "name":
        state.add_spatial("iMod", as_pat.name, TrueP())
    elif as_pat.kind != "drop":
        raise TacticFailure("iMod", "close result pattern must be a name or _", "BadPattern")
    sub = state.copy()
    sub.spatial = hyps
    sub.goal = Later(top_body)
    sub.open_invs = list(state.open_invs)
    return [sub, state]


# ---------------------------------------------------------------------------
# ghost state


def t_ghost_var_alloc(
    state: ProofState, initial: Term, gname: str, pat: IPat
) -> list[ProofState]:
    g = state.goal
    if not isinstance(g, (WP, Upd)):
        raise TacticFailure(
            "iMod", "ghost allocation needs a WP or |==> goal", "ModalityRequired"
        )
    state.add_pure_var("ghost_var_alloc", gname, Sort.GNAME)
    pair = Sep(
        props.Own(TVar(gname), "auth", initial), props.Own(TVar(gname), "frag", initial)
    )
    return destructure(state, pair, pat, "ghost_var_alloc")


def _own_pair(state: ProofState, tactic: str, n1: str, n2: str) -> tuple[Hyp, Hyp]:
    h1 = state.find_spatial(n1)
    h2 = state.find_spatial(n2)
    if h1 is None or h2 is None:
        raise TacticFailure(tactic, "both own-hypotheses must be spatial", "NoSuchHypothesis")
    p1, p2 = h1.prop, h2.prop
    if not isinstance(p1, props.Own) or not isinstance(p2, props.Own):
        raise TacticFailure(tactic, "hypotheses are not ghost ownership", "ShapeMismatch")
    if isinstance(p1, props.Own) and p1.kind == "frag":
        h1, h2 = h2, h1
        p1, p2 = p2, p1
    if p1.kind != "auth" or p2.kind != "frag":
        raise TacticFailure(tactic, "need one ●E and one ◯E part", "ShapeMismatch")
    if p1.gname != p2.gname:
        raise TacticFailure(tactic, "the ghost names differ", "GnameMismatch")
    return h1, h2


def t_ghost_var_agree(state: ProofState, n1: str, n2: str, pat: IPat) -> list[ProofState]:
    h1, h2 = _own_pair(state, "ghost_var_agree", n1, n2)
    fact = props.Pure(props.Eq(h1.prop.value, h2.prop.value))  # type: ignore[union-attr]
    return destructure(state, fact, pat, "ghost_var_agree")


def t_ghost_var_update(state: ProofState, n1: str, n2: str, new: Term) -> list[ProofState]:
    g = state.goal
    if not isinstance(g, (WP, Upd)):
        raise TacticFailure("iMod", "ghost update needs a WP or |==> goal", "ModalityRequired")
    h1, h2 = _own_pair(state, "ghost_var_update", n1, n2)
    a = h1.prop.value  # type: ignore[union-attr]
    f = h2.prop.value  # type: ignore[union-attr]
    if a != f:
        raise TacticFailure(
            "ghost_var_update",
            "authoritative and fragment values disagree",
            "AgreementViolation",
        )
    gname = h1.prop.gname  # type: ignore[union-attr]
    h1.prop = props.Own(gname, "auth", new)
    h2.prop = props.Own(gname, "frag", new)
    return [state]


def t_mod_elim_hyp(state: ProofState, name: str, binders: list[str], pat: IPat) -> list[ProofState]:
    """iMod "H": strip an update modality in hypothesis H."""
    g = state.goal
    if not isinstance(g, (WP, Upd)):
        raise TacticFailure(
            "iMod", "eliminating |==> needs a WP or |==> goal", "ModalityRequired"
        )
    h = state.take_spatial("iMod", name)
    prop = h.prop
    if not isinstance(prop, Upd):
        raise TacticFailure("iMod", f"{name!r} has no leading |==>", "ShapeMismatch")
    prop = prop.body
    from .engine import _peel_exists

    for b in binders:
        prop = _peel_exists(state, prop, b, "iMod")
    return destructure(state, prop, pat, "iMod")


# ---------------------------------------------------------------------------
# the fork rule (kernel-level only; not reachable from scripts)


def hoare_fork_rule(premise: Triple) -> Triple:
    """{P} e {_. True}  ⊢  {P} fork e {_. True}."""
    if not isinstance(premise.post, TrueP):
        raise ValueError("fork rule needs a trivial postcondition")
    return Triple(premise.pre, lang.Fork(premise.expr), (), premise.ret, TrueP())
