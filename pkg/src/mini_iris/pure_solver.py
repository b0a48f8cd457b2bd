"""The pure-goal fragment: Coq-flavoured tactics and a small decision kit.

`lia` decides conjunction-free linear integer (in)equalities by
normalization plus Fourier–Motzkin elimination over rationals (sound and
complete enough for the tiny instances that arise here; integers embed into
the rational relaxation, and we only ever *prove*, never refute).

`eval_form` is the independent brute-force evaluator used by tests to
cross-check everything the solver discharges over finite ranges.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional

from . import props
from .engine import ProofState, PureHyp, PureVar, TacticFailure
from .props import AndF, Eq, FalseF, ImplF, Le, Lt, NotF, OrF, PureForm, TrueF
from .terms import BinT, BoolLit, IntLit, PairT, Sort, Term, TVar, UnitLit, fold


class NonLinear(Exception):
    pass


# ---------------------------------------------------------------------------
# brute-force evaluation (the oracle side)


def eval_term(t: Term, env: dict[str, object]):
    if isinstance(t, IntLit):
        return t.value
    if isinstance(t, BoolLit):
        return t.value
    if isinstance(t, UnitLit):
        return ()
    if isinstance(t, TVar):
        if t.name not in env:
            raise KeyError(t.name)
        return env[t.name]
    if isinstance(t, BinT):
        a, b = eval_term(t.left, env), eval_term(t.right, env)
        return {"+": a + b, "-": a - b, "*": a * b}[t.op]
    if isinstance(t, PairT):
        return (eval_term(t.left, env), eval_term(t.right, env))
    raise TypeError(t)


def eval_form(f: PureForm, env: dict[str, object]) -> bool:
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Eq):
        return eval_term(f.left, env) == eval_term(f.right, env)
    if isinstance(f, Le):
        return eval_term(f.left, env) <= eval_term(f.right, env)
    if isinstance(f, Lt):
        return eval_term(f.left, env) < eval_term(f.right, env)
    if isinstance(f, AndF):
        return eval_form(f.left, env) and eval_form(f.right, env)
    if isinstance(f, OrF):
        return eval_form(f.left, env) or eval_form(f.right, env)
    if isinstance(f, ImplF):
        return (not eval_form(f.left, env)) or eval_form(f.right, env)
    if isinstance(f, NotF):
        return not eval_form(f.arg, env)
    raise TypeError(f)


# ---------------------------------------------------------------------------
# linear arithmetic


def linearize(t: Term) -> tuple[dict[str, Fraction], Fraction]:
    if isinstance(t, IntLit):
        return {}, Fraction(t.value)
    if isinstance(t, TVar):
        return {t.name: Fraction(1)}, Fraction(0)
    if isinstance(t, BinT):
        lc, lk = linearize(t.left)
        rc, rk = linearize(t.right)
        if t.op == "+":
            out = dict(lc)
            for k, v in rc.items():
                out[k] = out.get(k, Fraction(0)) + v
            return out, lk + rk
        if t.op == "-":
            out = dict(lc)
            for k, v in rc.items():
                out[k] = out.get(k, Fraction(0)) - v
            return out, lk - rk
        if t.op == "*":
            if not lc:
                return {k: v * lk for k, v in rc.items()}, lk * rk
            if not rc:
                return {k: v * rk for k, v in lc.items()}, lk * rk
            raise NonLinear(t)
    raise NonLinear(t)


# constraints are (coeffs, const, strict) meaning  coeffs·x + const  >= 0  (or > 0)
Constraint = tuple[dict[str, Fraction], Fraction, bool]


def _diff(a: Term, b: Term) -> tuple[dict[str, Fraction], Fraction]:
    ca, ka = linearize(a)
    cb, kb = linearize(b)
    out = dict(ca)
    for k, v in cb.items():
        out[k] = out.get(k, Fraction(0)) - v
    out = {k: v for k, v in out.items() if v != 0}
    return out, ka - kb


def _form_constraints(f: PureForm) -> list[Constraint]:
    if isinstance(f, Le):  # l <= r  ⇔  r - l >= 0
        c, k = _diff(f.right, f.left)
        return [(c, k, False)]
    if isinstance(f, Lt):
        c, k = _diff(f.right, f.left)
        return [(c, k, True)]
    if isinstance(f, Eq):
        c, k = _diff(f.right, f.left)
        neg = ({x: -v for x, v in c.items()}, -k, False)
        return [(c, k, False), neg]
    raise NonLinear(f)


def _fm_unsat(constraints: list[Constraint]) -> bool:
    """Fourier–Motzkin: True when the constraint set is rationally infeasible."""
    constraints = [c for c in constraints]
    while True:
        ground = [c for c in constraints if not c[0]]
        for _, k, strict in ground:
            if k < 0 or (strict and k == 0):
                return True
        live = [c for c in constraints if c[0]]
        if not live:
            return False
        var = next(iter(live[0][0]))
        pos = [c for c in constraints if c[0].get(var, Fraction(0)) > 0]
        neg = [c for c in constraints if c[0].get(var, Fraction(0)) < 0]
        rest = [c for c in constraints if c[0].get(var, Fraction(0)) == 0]
        new: list[Constraint] = list(rest)
        for cp, kp, sp in pos:
            for cn, kn, sn in neg:
                a = cp[var]
                b = -cn[var]
                comb: dict[str, Fraction] = {}
                for k2, v in cp.items():
                    comb[k2] = comb.get(k2, Fraction(0)) + v * b
                for k2, v in cn.items():
                    comb[k2] = comb.get(k2, Fraction(0)) + v * a
                comb.pop(var, None)
                comb = {k2: v for k2, v in comb.items() if v != 0}
                new.append((comb, kp * b + kn * a, sp or sn))
        if len(new) > 4000:  # tiny instances only; refuse to blow up
            return False
        constraints = new


def lia_prove(hyps: list[PureForm], goal: PureForm) -> bool:
    """Try to derive goal from hyps by linear arithmetic."""
    try:
        cs: list[Constraint] = []
        for h in hyps:
            if isinstance(h, (Le, Lt, Eq)):
                try:
                    cs.extend(_form_constraints(h))
                except NonLinear:
                    continue
        goals: list[list[Constraint]]
        if isinstance(goal, Le):  # ¬(l <= r) ⇔ l - r > 0
            c, k = _diff(goal.left, goal.right)
            goals = [[(c, k, True)]]
        elif isinstance(goal, Lt):
            c, k = _diff(goal.left, goal.right)
            goals = [[(c, k, False)]]
        elif isinstance(goal, Eq):
            c1, k1 = _diff(goal.left, goal.right)
            c2 = {x: -v for x, v in c1.items()}
            goals = [[(c1, k1, True)], [(c2, -k1, True)]]
        else:
            return False
        return all(_fm_unsat(cs + g) for g in goals)
    except NonLinear:
        return False


# ---------------------------------------------------------------------------
# tactics on pure goals


def _pure_hyps(state: ProofState) -> list[PureHyp]:
    return [e for e in state.pure_ctx if isinstance(e, PureHyp)]


def _require_pure(state: ProofState, tactic: str) -> PureForm:
    if state.pure_goal is None:
        raise TacticFailure(tactic, "the goal is not a pure Coq goal", "NotPureGoal")
    return state.pure_goal


def _fold_form(f: PureForm) -> PureForm:
    if isinstance(f, (Eq, Le, Lt)):
        return type(f)(fold(f.left), fold(f.right))
    if isinstance(f, (AndF, OrF, ImplF)):
        return type(f)(_fold_form(f.left), _fold_form(f.right))
    if isinstance(f, NotF):
        return NotF(_fold_form(f.arg))
    return f


def done_solves(state: ProofState, goal: PureForm) -> bool:
    goal = _fold_form(goal)
    if isinstance(goal, TrueF):
        return True
    if isinstance(goal, Eq) and goal.left == goal.right:
        return True
    if isinstance(goal, Le) and goal.left == goal.right:
        return True
    for h in _pure_hyps(state):
        if _fold_form(h.form) == goal:
            return True
    # decide ground literals, e.g. 0 + 0 = 0 after folding or 1 ≤ 2
    if isinstance(goal, (Eq, Le, Lt)):
        try:
            return eval_form(goal, {})
        except (KeyError, TypeError):
            return False
    return False


def t_done(state: ProofState) -> list[ProofState]:
    goal = _require_pure(state, "done")
    if done_solves(state, goal):
        return []
    raise TacticFailure("done", "goal is not trivially closed", "NotSolved")


def _saturate(state: ProofState, depth: int = 3) -> list[PureForm]:
    facts = [_fold_form(h.form) for h in _pure_hyps(state)]
    for _ in range(depth):
        new: list[PureForm] = []
        for f in facts:
            if isinstance(f, ImplF) and f.left in facts and f.right not in facts:
                new.append(f.right)
            if isinstance(f, AndF):
                for part in (f.left, f.right):
                    if part not in facts:
                        new.append(part)
        if not new:
            break
        facts.extend(new)
    return facts


def t_auto(state: ProofState) -> list[ProofState]:
    goal = _require_pure(state, "auto")
    goal = _fold_form(goal)
    if done_solves(state, goal):
        return []
    facts = _saturate(state)
    if goal in facts:
        return []
    if lia_prove(facts, goal):
        return []
    raise TacticFailure("auto", "no applicable closure found", "NotSolved")


def t_lia(state: ProofState) -> list[ProofState]:
    goal = _require_pure(state, "lia")
    if done_solves(state, goal) or lia_prove(_saturate(state), _fold_form(goal)):
        return []
    raise TacticFailure("lia", "not a consequence by linear arithmetic", "NotSolved")


def t_left_right(state: ProofState, which: str) -> list[ProofState]:
    goal = _require_pure(state, which)
    if not isinstance(goal, OrF):
        raise TacticFailure(which, "pure goal is not a disjunction", "ShapeMismatch")
    state.pure_goal = goal.left if which == "left" else goal.right
    return [state]


def t_split(state: ProofState) -> list[ProofState]:
    goal = _require_pure(state, "split")
    if not isinstance(goal, AndF):
        raise TacticFailure("split", "pure goal is not a conjunction", "ShapeMismatch")
    s1, s2 = state.copy(), state.copy()
    s1.pure_goal = goal.left
    s2.pure_goal = goal.right
    return [s1, s2]


def t_intros(state: ProofState, names: list[str]) -> list[ProofState]:
    """Peel ∀-quantifiers (and → premises) off a pure-fragment statement."""
    from .props import Forall, Impl, Pure as PureP

    i = 0
    while True:
        g = state.goal
        if state.pure_goal is not None:
            f = state.pure_goal
            if isinstance(f, ImplF):
                name = names[i] if i < len(names) else state.fresh("H")
                i += 1
                state.add_pure_hyp("intros", name, f.left)
                state.pure_goal = f.right
                continue
            break
        if isinstance(g, Forall):
            if g.sort is Sort.PROP:
                raise TacticFailure(
                    "intros",
                    "quantification over iProp parses but is not supported by this kernel",
                    "Unsupported",
                )
            name = names[i] if i < len(names) else g.binder
            i += 1
            if name in state.names():
                name = state.fresh(name)
            state.add_pure_var("intros", name, g.sort)
            state.goal = (
                props.prop_subst(g.body, g.binder, TVar(name)) if g.binder != name else g.body
            )
            continue
        if isinstance(g, PureP):
            state.drop_spatial_affine("intros")
            state.persistent = []
            state.pure_goal = g.form
            continue
        if isinstance(g, Impl) and isinstance(g.left, PureP):
            name = names[i] if i < len(names) else state.fresh("H")
            i += 1
            state.add_pure_hyp("intros", name, g.left.form)
            state.goal = g.right
            continue
        break
    return [state]


def _subst_everywhere(state: ProofState, x: str, t: Term) -> None:
    for e in state.pure_ctx:
        if isinstance(e, PureHyp):
            e.form = _fold_form(props.form_subst(e.form, x, t))
    if state.pure_goal is not None:
        state.pure_goal = _fold_form(props.form_subst(state.pure_goal, x, t))
    else:
        state.goal = props.prop_subst(state.goal, x, t)


def t_destruct_bool(state: ProofState, name: str) -> list[ProofState]:
    var = next(
        (e for e in state.pure_ctx if isinstance(e, PureVar) and e.name == name), None
    )
    if var is None:
        raise TacticFailure("destruct", f"no variable {name!r} in the context", "NoSuchHypothesis")
    if var.sort is not Sort.BOOL:
        raise TacticFailure("destruct", f"{name} is not a boolean", "SortMismatch")
    out = []
    for b in (True, False):
        st = state.copy()
        st.pure_ctx = [e for e in st.pure_ctx if not (isinstance(e, PureVar) and e.name == name)]
        _subst_everywhere(st, name, BoolLit(b))
        out.append(st)
    return out


def t_subst(state: ProofState, name: str) -> list[ProofState]:
    _require_pure(state, "subst")
    for e in list(state.pure_ctx):
        if not isinstance(e, PureHyp) or not isinstance(e.form, Eq):
            continue
        l, r = e.form.left, e.form.right
        repl: Optional[Term] = None
        if isinstance(l, TVar) and l.name == name and name not in _tvars(r):
            repl = r
        elif isinstance(r, TVar) and r.name == name and name not in _tvars(l):
            repl = l
        if repl is not None:
            state.pure_ctx.remove(e)
            state.pure_ctx = [
                x for x in state.pure_ctx if not (isinstance(x, PureVar) and x.name == name)
            ]
            _subst_everywhere(state, name, repl)
            return [state]
    raise TacticFailure("subst", f"no defining equality for {name!r}", "NoSuchHypothesis")


def _tvars(t: Term) -> set[str]:
    from .terms import term_vars

    return term_vars(t)


def t_rewrite_in(state: ProofState, eq_name: str, target: str) -> list[ProofState]:
    _require_pure(state, "rewrite")
    eq = state.find_pure_hyp(eq_name)
    if eq is None or not isinstance(eq.form, Eq):
        raise TacticFailure("rewrite", f"{eq_name!r} is not an equality", "ShapeMismatch")
    tgt = state.find_pure_hyp(target)
    if tgt is None:
        raise TacticFailure("rewrite", f"no hypothesis {target!r}", "NoSuchHypothesis")
    lhs, rhs = eq.form.left, eq.form.right
    tgt.form = _rewrite_form(tgt.form, lhs, rhs)
    return [state]


def _rewrite_term(t: Term, lhs: Term, rhs: Term) -> Term:
    if t == lhs:
        return rhs
    if isinstance(t, BinT):
        return BinT(t.op, _rewrite_term(t.left, lhs, rhs), _rewrite_term(t.right, lhs, rhs))
    if isinstance(t, PairT):
        return PairT(_rewrite_term(t.left, lhs, rhs), _rewrite_term(t.right, lhs, rhs))
    return t


def _rewrite_form(f: PureForm, lhs: Term, rhs: Term) -> PureForm:
    if isinstance(f, (Eq, Le, Lt)):
        return type(f)(_rewrite_term(f.left, lhs, rhs), _rewrite_term(f.right, lhs, rhs))
    if isinstance(f, (AndF, OrF, ImplF)):
        return type(f)(_rewrite_form(f.left, lhs, rhs), _rewrite_form(f.right, lhs, rhs))
    if isinstance(f, NotF):
        return NotF(_rewrite_form(f.arg, lhs, rhs))
    return f
