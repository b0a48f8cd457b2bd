"""Proof states, the goal tree, and the context-management tactics.

A `ProofState` is one open goal: named pure variables and facts, persistent
and spatial hypothesis lists, the goal proposition (or a pure formula once
the proof has dropped into the pure fragment), and the ledger of invariants
currently open in this goal.

Tactics are functions from a state to a list of successor states (empty
list = goal proved).  `GoalTree` strings them together, keeps creation
order, enforces the brace discipline and name uniqueness, and snapshots
itself for undo.
"""
from __future__ import annotations

import copy as _copy
from dataclasses import dataclass, field
from typing import Optional

from . import lang, props
from .props import (
    And,
    Exists,
    FalseP,
    Forall,
    Impl,
    Inv,
    Later,
    Or,
    PointsTo,
    PredApp,
    Prop,
    Pure,
    Sep,
    TrueP,
    Upd,
    Wand,
    WP,
    alpha_equal,
    is_persistent,
    prop_subst,
    render_prop,
    sep_normal_form,
)
from .terms import Sort, Term, TVar


class TacticFailure(Exception):
    """Structured tactic failure; the proof state is unchanged."""

    def __init__(self, tactic: str, reason: str, code: str = "TacticFailure"):
        super().__init__(f"{tactic}: {reason}")
        self.tactic = tactic
        self.reason = reason
        self.code = code


class NothingToUndo(Exception):
    def __init__(self) -> None:
        super().__init__("nothing to undo")


# ---------------------------------------------------------------------------
# state


@dataclass
class PureVar:
    name: str
    sort: Sort


@dataclass
class PureHyp:
    name: str
    form: props.PureForm


@dataclass
class Hyp:
    name: str
    prop: Prop
    close_ns: Optional[str] = None  # set on Hclose hypotheses from iInv


@dataclass
class ProofState:
    pure_ctx: list = field(default_factory=list)  # PureVar | PureHyp, ordered
    persistent: list[Hyp] = field(default_factory=list)
    spatial: list[Hyp] = field(default_factory=list)
    goal: Prop = field(default_factory=TrueP)
    pure_goal: Optional[props.PureForm] = None  # set once in the pure fragment
    open_invs: list[tuple[str, Prop]] = field(default_factory=list)
    drops: list[str] = field(default_factory=list)  # strict-linear lint log

    # -- bookkeeping --------------------------------------------------------

    def copy(self) -> "ProofState":
        return ProofState(
            [_copy.copy(e) for e in self.pure_ctx],
            [_copy.copy(h) for h in self.persistent],
            [_copy.copy(h) for h in self.spatial],
            self.goal,
            self.pure_goal,
            list(self.open_invs),
            list(self.drops),
        )

    def names(self) -> set[str]:
        out = {e.name for e in self.pure_ctx}
        out |= {h.name for h in self.persistent}
        out |= {h.name for h in self.spatial}
        return out

    def sorts(self) -> dict[str, Sort]:
        return {e.name: e.sort for e in self.pure_ctx if isinstance(e, PureVar)}

    def fresh(self, base: str) -> str:
        if base not in self.names():
            return base
        i = 1
        while f"{base}{i}" in self.names():
            i += 1
        return f"{base}{i}"

    def check_fresh(self, tactic: str, name: str) -> None:
        if name in self.names():
            raise TacticFailure(tactic, f"name {name!r} already in use", "NameClash")

    def add_pure_var(self, tactic: str, name: str, sort: Sort) -> None:
        self.check_fresh(tactic, name)
        self.pure_ctx.append(PureVar(name, sort))

    def add_pure_hyp(self, tactic: str, name: str, form: props.PureForm) -> None:
        self.check_fresh(tactic, name)
        self.pure_ctx.append(PureHyp(name, form))

    def add_spatial(self, tactic: str, name: str, prop: Prop, close_ns: str | None = None) -> None:
        self.check_fresh(tactic, name)
        self.spatial.append(Hyp(name, prop, close_ns))

    def add_persistent(self, tactic: str, name: str, prop: Prop) -> None:
        self.check_fresh(tactic, name)
        if not is_persistent(prop):
            raise TacticFailure(
                tactic, f"{render_prop(prop)} is not persistent", "NotPersistent"
            )
        self.persistent.append(Hyp(name, prop))

    def find_spatial(self, name: str) -> Optional[Hyp]:
        for h in self.spatial:
            if h.name == name:
                return h
        return None

    def find_persistent(self, name: str) -> Optional[Hyp]:
        for h in self.persistent:
            if h.name == name:
                return h
        return None

    def find_pure_hyp(self, name: str) -> Optional[PureHyp]:
        for e in self.pure_ctx:
            if isinstance(e, PureHyp) and e.name == name:
                return e
        return None

    def take_spatial(self, tactic: str, name: str) -> Hyp:
        h = self.find_spatial(name)
        if h is None:
            raise TacticFailure(tactic, f"no spatial hypothesis {name!r}", "NoSuchHypothesis")
        self.spatial.remove(h)
        return h

    def drop_spatial_affine(self, tactic: str) -> None:
        for h in self.spatial:
            self.drops.append(f"{tactic}: dropped {h.name}")
        self.spatial = []


# ---------------------------------------------------------------------------
# rendering

RULE_SOLID = "─" * 40
RULE_PERSISTENT = "-" * 39 + "□"
RULE_SPATIAL = "-" * 39 + "∗"
NO_MORE = "No more subgoals."

RULE_SOLID_ASCII = "=" * 40
RULE_PERSISTENT_ASCII = "-" * 39 + "#"
RULE_SPATIAL_ASCII = "-" * 39 + "*"


def render_leaf(state: ProofState, ascii_mode: bool = False) -> str:
    sorts = state.sorts()
    lines: list[str] = []
    for e in state.pure_ctx:
        if isinstance(e, PureVar):
            lines.append(f"{e.name} : {e.sort}")
        else:
            lines.append(f"{e.name} : {props.render_form(e.form, sorts)}")
    if state.pure_ctx:
        lines.append(RULE_SOLID)
    if state.pure_goal is not None:
        lines.append(props.render_form(state.pure_goal, sorts))
    else:
        for h in state.persistent:
            lines.append(f'"{h.name}" : {render_prop(h.prop, sorts)}')
        if state.persistent:
            lines.append(RULE_PERSISTENT)
        for h in state.spatial:
            lines.append(f'"{h.name}" : {render_prop(h.prop, sorts)}')
        if state.spatial:
            lines.append(RULE_SPATIAL)
        lines.append(render_prop(state.goal, sorts))
        if state.open_invs:
            lines.append("open invariants: " + ", ".join(ns for ns, _ in state.open_invs))
    text = "\n".join(lines)
    return props.to_ascii(text) if ascii_mode else text


# ---------------------------------------------------------------------------
# goal tree


@dataclass(eq=False)
class Leaf:
    state: ProofState
    proved: bool = False
    provenance: str = ""


class GoalTree:
    def __init__(self, initial: ProofState):
        self.leaves: list[Leaf] = [Leaf(initial)]
        self.brace_stack: list[int] = []

    def copy(self) -> "GoalTree":
        t = GoalTree.__new__(GoalTree)
        t.leaves = [Leaf(l.state.copy(), l.proved, l.provenance) for l in self.leaves]
        t.brace_stack = list(self.brace_stack)
        return t

    def unproven(self) -> list[int]:
        return [i for i, l in enumerate(self.leaves) if not l.proved]

    def focused(self) -> int:
        idx = self.unproven()
        if not idx:
            raise TacticFailure("focus", "no goals remain", "NoGoals")
        return idx[0]

    @property
    def complete(self) -> bool:
        return not self.unproven()

    def focused_state(self) -> ProofState:
        return self.leaves[self.focused()].state

    def replace_focused(self, tactic: str, subgoals: list[ProofState]) -> None:
        i = self.focused()
        if not subgoals:
            st = self.leaves[i].state
            if st.open_invs:
                ns = st.open_invs[-1][0]
                raise TacticFailure(
                    tactic, f"invariant {ns} is still open", "InvariantStillOpen"
                )
            self.leaves[i].proved = True
            self.leaves[i].provenance = tactic
        else:
            new = [Leaf(s, provenance=tactic) for s in subgoals]
            self.leaves[i : i + 1] = new

    def open_brace(self) -> None:
        self.focused()  # raises when there is nothing to focus
        self.brace_stack.append(len(self.unproven()))

    def close_brace(self) -> None:
        if not self.brace_stack:
            raise TacticFailure("}", "no matching '{'", "UnmatchedBrace")
        expected = self.brace_stack.pop() - 1
        if len(self.unproven()) != expected:
            raise TacticFailure(
                "}", "the focused goal is not finished", "UnfinishedBrace"
            )

    def bullet(self) -> None:
        self.focused()

    def render(self, ascii_mode: bool = False) -> str:
        if self.complete:
            return NO_MORE
        idx = self.unproven()
        body = render_leaf(self.leaves[idx[0]].state, ascii_mode)
        if len(idx) > 1:
            return f"{len(idx)} subgoals\n{body}"
        return body


# ---------------------------------------------------------------------------
# intro patterns


@dataclass(frozen=True)
class IPat:
    kind: str  # name anon drop frame pure intuit sep or later puremod updmod
    name: Optional[str] = None
    subs: tuple["IPat", ...] = ()


def parse_ipat(text: str) -> list[IPat]:
    toks: list[str] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("!%", i):
            toks.append("!%")
            i += 2
            continue
        if text.startswith("!>", i):
            toks.append("!>")
            i += 2
            continue
        if c in "[]()&|%#$_?>":
            toks.append(c)
            i += 1
            continue
        j = i
        while j < len(text) and (text[j].isalnum() or text[j] in "_'" or text[j].isalpha()):
            j += 1
        if j == i:
            raise TacticFailure("intro pattern", f"bad character {c!r} in pattern", "BadPattern")
        toks.append(text[i:j])
        i = j

    pos = 0

    def peek() -> Optional[str]:
        return toks[pos] if pos < len(toks) else None

    def parse_one() -> IPat:
        nonlocal pos
        t = peek()
        if t is None:
            raise TacticFailure("intro pattern", "unexpected end of pattern", "BadPattern")
        pos += 1
        if t == "_":
            return IPat("drop")
        if t == "?":
            return IPat("anon")
        if t == "$":
            return IPat("frame")
        if t == "!%":
            return IPat("puremod")
        if t == "!>":
            return IPat("updmod")
        if t == ">":
            return IPat("later", subs=(parse_one(),))
        if t == "%":
            nxt = peek()
            if nxt is not None and nxt not in "[]()&|%#$_?>":
                pos += 1
                return IPat("pure", nxt)
            return IPat("pure", None)
        if t == "#":
            nxt = peek()
            if nxt is None or nxt in "[]()&|%#$_?>":
                raise TacticFailure("intro pattern", "# needs a name", "BadPattern")
            pos += 1
            return IPat("intuit", nxt)
        if t == "[":
            subs: list[IPat] = []
            alts: list[tuple[IPat, ...]] = []
            while peek() not in ("]", None):
                if peek() == "|":
                    pos += 1
                    alts.append(tuple(subs))
                    subs = []
                else:
                    subs.append(parse_one())
            if peek() != "]":
                raise TacticFailure("intro pattern", "missing ']'", "BadPattern")
            pos += 1
            if alts:
                alts.append(tuple(subs))
                branches = [p[0] if len(p) == 1 else IPat("sep", subs=p) for p in alts]
                return IPat("or", subs=tuple(branches))
            return IPat("sep", subs=tuple(subs))
        if t == "(":
            subs = [parse_one()]
            while peek() == "&":
                pos += 1
                subs.append(parse_one())
            if peek() != ")":
                raise TacticFailure("intro pattern", "missing ')'", "BadPattern")
            pos += 1
            return IPat("sep", subs=tuple(subs))
        return IPat("name", t)

    out = []
    while peek() is not None:
        out.append(parse_one())
    return out


def _strip_laters(p: Prop) -> Prop:
    while isinstance(p, Later):
        p = p.body
    return p


def destructure(state: ProofState, prop: Prop, pat: IPat, tactic: str) -> list[ProofState]:
    """Add `prop` to `state` according to the pattern; may branch on ∨."""
    if pat.kind == "name":
        state.add_spatial(tactic, pat.name, prop)
        return [state]
    if pat.kind == "anon":
        state.add_spatial(tactic, state.fresh("H"), prop)
        return [state]
    if pat.kind == "drop":
        state.drops.append(f"{tactic}: dropped hypothesis")
        return [state]
    if pat.kind == "frame":
        frame_cancel(state, tactic, props_to_frame=[prop])
        return [state]
    if pat.kind == "pure":
        stripped = _strip_laters(prop)
        if not isinstance(stripped, Pure):
            raise TacticFailure(tactic, "% pattern on a non-pure hypothesis", "NotPure")
        state.add_pure_hyp(tactic, pat.name or state.fresh("H"), stripped.form)
        return [state]
    if pat.kind == "intuit":
        state.add_persistent(tactic, pat.name, _strip_laters(prop))
        return [state]
    if pat.kind == "later":
        return destructure(state, _strip_laters(prop), pat.subs[0], tactic)
    if pat.kind == "sep":
        if isinstance(prop, Sep):
            if len(pat.subs) == 2:
                first, rest = prop.left, prop.right
                states = destructure(state, first, pat.subs[0], tactic)
                return [
                    s2
                    for s in states
                    for s2 in destructure(s, rest, pat.subs[1], tactic)
                ]
            first, rest = prop.left, prop.right
            states = destructure(state, first, pat.subs[0], tactic)
            rest_pat = IPat("sep", subs=pat.subs[1:])
            return [s2 for s in states for s2 in destructure(s, rest, rest_pat, tactic)]
        if isinstance(prop, And):
            if len(pat.subs) != 2:
                raise TacticFailure(tactic, "∧ destructs into exactly two parts", "BadPattern")
            drop_l = pat.subs[0].kind == "drop"
            drop_r = pat.subs[1].kind == "drop"
            if not (is_persistent(prop.left) or is_persistent(prop.right) or drop_l or drop_r):
                raise TacticFailure(
                    tactic,
                    "destructing P ∧ Q needs a persistent side or a _ branch",
                    "UnsupportedAndElim",
                )
            states = destructure(state, prop.left, pat.subs[0], tactic)
            return [
                s2 for s in states for s2 in destructure(s, prop.right, pat.subs[1], tactic)
            ]
        raise TacticFailure(
            tactic, f"cannot split {render_prop(prop)} with a [..] pattern", "ShapeMismatch"
        )
    if pat.kind == "or":
        if not isinstance(prop, Or):
            raise TacticFailure(tactic, "[..|..] pattern on a non-disjunction", "ShapeMismatch")
        left = destructure(state.copy(), prop.left, pat.subs[0], tactic)
        right = destructure(state, prop.right, pat.subs[1], tactic)
        return left + right
    raise TacticFailure(tactic, f"pattern {pat.kind} not usable here", "BadPattern")


# ---------------------------------------------------------------------------
# unification (first order, structural)


def unify_term(pat: Term, target: Term, holes: dict[str, Optional[Term]]) -> bool:
    from .terms import BinT, PairT

    if isinstance(pat, TVar) and pat.name in holes:
        bound = holes[pat.name]
        if bound is None:
            holes[pat.name] = target
            return True
        return bound == target
    if type(pat) is not type(target):
        return False
    if isinstance(pat, TVar):
        return pat.name == target.name
    if isinstance(pat, BinT):
        return (
            pat.op == target.op
            and unify_term(pat.left, target.left, holes)
            and unify_term(pat.right, target.right, holes)
        )
    if isinstance(pat, PairT):
        return unify_term(pat.left, target.left, holes) and unify_term(
            pat.right, target.right, holes
        )
    return pat == target


def unify_form(pat: props.PureForm, tgt: props.PureForm, holes) -> bool:
    if type(pat) is not type(tgt):
        return False
    if isinstance(pat, (props.Eq, props.Le, props.Lt)):
        return unify_term(pat.left, tgt.left, holes) and unify_term(pat.right, tgt.right, holes)
    if isinstance(pat, (props.AndF, props.OrF, props.ImplF)):
        return unify_form(pat.left, tgt.left, holes) and unify_form(pat.right, tgt.right, holes)
    if isinstance(pat, props.NotF):
        return unify_form(pat.arg, tgt.arg, holes)
    return True


def unify_expr(pat: lang.Expr, tgt: lang.Expr, holes) -> bool:
    if isinstance(pat, lang.ValE) and isinstance(tgt, lang.ValE):
        try:
            return unify_term(lang.term_of_val(pat.value), lang.term_of_val(tgt.value), holes)
        except lang.StuckExpr:
            return pat == tgt
    if isinstance(pat, lang.DefApp) and isinstance(tgt, lang.DefApp):
        return pat.name == tgt.name and len(pat.args) == len(tgt.args) and all(
            unify_term(a, b, holes) for a, b in zip(pat.args, tgt.args)
        )
    if type(pat) is not type(tgt):
        return False
    if isinstance(pat, lang.Var):
        return pat == tgt
    if isinstance(pat, lang.Rec):
        return (pat.self_name, pat.binder) == (tgt.self_name, tgt.binder) and unify_expr(
            pat.body, tgt.body, holes
        )
    if isinstance(pat, lang.Let) and pat.binder != tgt.binder:
        return False
    if isinstance(pat, lang.BinOp) and pat.op != tgt.op:
        return False
    kids_p = list(lang.children(pat))
    kids_t = list(lang.children(tgt))
    return len(kids_p) == len(kids_t) and all(
        unify_expr(a, b, holes) for a, b in zip(kids_p, kids_t)
    )


def unify_prop(pat: Prop, tgt: Prop, holes: dict[str, Optional[Term]]) -> bool:
    if type(pat) is not type(tgt):
        return False
    if isinstance(pat, Pure):
        return unify_form(pat.form, tgt.form, holes)
    if isinstance(pat, (TrueP, FalseP)):
        return True
    if isinstance(pat, (And, Or, Impl, Sep, Wand)):
        return unify_prop(pat.left, tgt.left, holes) and unify_prop(pat.right, tgt.right, holes)
    if isinstance(pat, (Forall, Exists)):
        if pat.binder == tgt.binder:
            return unify_prop(pat.body, tgt.body, holes)
        renamed = prop_subst(tgt.body, tgt.binder, TVar(pat.binder))
        return unify_prop(pat.body, renamed, holes)
    if isinstance(pat, PointsTo):
        return unify_term(pat.loc, tgt.loc, holes) and unify_term(pat.val, tgt.val, holes)
    if isinstance(pat, Inv):
        return pat.namespace == tgt.namespace and unify_prop(pat.body, tgt.body, holes)
    if isinstance(pat, (Later, Upd)):
        return unify_prop(pat.body, tgt.body, holes)
    if isinstance(pat, props.Own):
        return (
            pat.kind == tgt.kind
            and unify_term(pat.gname, tgt.gname, holes)
            and unify_term(pat.value, tgt.value, holes)
        )
    if isinstance(pat, WP):
        if not unify_expr(pat.expr, tgt.expr, holes):
            return False
        post = tgt.post if pat.binder == tgt.binder else prop_subst(
            tgt.post, tgt.binder, TVar(pat.binder)
        )
        return unify_prop(pat.post, post, holes)
    if isinstance(pat, PredApp):
        return pat.pred == tgt.pred and unify_term(pat.arg, tgt.arg, holes)
    return alpha_equal(pat, tgt)


# ---------------------------------------------------------------------------
# frame cancellation


def frame_cancel(
    state: ProofState,
    tactic: str,
    names: list[str] | None = None,
    selectors: set[str] | None = None,
    props_to_frame: list[Prop] | None = None,
) -> None:
    """Cancel hypotheses against ∗-conjuncts of the goal (first match in
    canonical order, no backtracking).  Mutates `state` in place."""
    if state.pure_goal is not None:
        raise TacticFailure(tactic, "iFrame has no effect on pure goals", "NotIrisGoal")
    conjuncts = sep_normal_form(state.goal)
    selectors = selectors or set()

    def cancel(p: Prop) -> bool:
        for i, c in enumerate(conjuncts):
            if alpha_equal(p, c):
                del conjuncts[i]
                return True
        return False

    if names is not None or props_to_frame is not None:
        for nm in names or []:
            hyp = state.find_spatial(nm)
            if hyp is not None:
                if not cancel(hyp.prop):
                    raise TacticFailure(tactic, f"{nm} matches no conjunct of the goal", "NoMatch")
                state.spatial.remove(hyp)
                continue
            ph = state.find_persistent(nm)
            if ph is not None:
                if not cancel(ph.prop):
                    raise TacticFailure(tactic, f"{nm} matches no conjunct of the goal", "NoMatch")
                continue
            raise TacticFailure(tactic, f"no hypothesis {nm!r}", "NoSuchHypothesis")
        for p in props_to_frame or []:
            if not cancel(p):
                raise TacticFailure(tactic, "hypothesis matches no conjunct", "NoMatch")
    else:
        # bare iFrame: greedily cancel the spatial context
        for hyp in list(state.spatial):
            if cancel(hyp.prop):
                state.spatial.remove(hyp)
        if "#" in selectors:
            for hyp in state.persistent:
                while cancel(hyp.prop):
                    pass
        if "%" in selectors:
            for e in state.pure_ctx:
                if isinstance(e, PureHyp):
                    while cancel(Pure(e.form)):
                        pass
    state.goal = props.sep_list(conjuncts)


# ---------------------------------------------------------------------------
# context-management tactics (each returns successor states)


def t_intros_binder(state: ProofState, name: str) -> None:
    g = state.goal
    if not isinstance(g, Forall):
        raise TacticFailure("iIntros", "goal is not universally quantified", "ShapeMismatch")
    if g.sort is Sort.PROP:
        raise TacticFailure(
            "iIntros",
            "quantification over iProp parses but is not supported by this kernel",
            "Unsupported",
        )
    state.check_fresh("iIntros", name)
    if g.sort is Sort.PRED:
        state.pure_ctx.append(PureVar(name, Sort.PRED))
        state.goal = props.prop_rename_pred(g.body, g.binder, name) if g.binder != name else g.body
    else:
        state.pure_ctx.append(PureVar(name, g.sort))
        state.goal = prop_subst(g.body, g.binder, TVar(name)) if g.binder != name else g.body


def t_intros(state: ProofState, binders: list[str], pats: list[IPat]) -> list[ProofState]:
    for b in binders:
        t_intros_binder(state, b)
    states = [state]
    for pat in pats:
        nxt: list[ProofState] = []
        for st in states:
            g = st.goal
            if pat.kind == "puremod":
                nxt.append(t_pure_intro(st))
                continue
            if pat.kind == "updmod":
                nxt.extend(t_modintro(st))
                continue
            if isinstance(g, Wand):
                st.goal = g.right
                nxt.extend(destructure(st, g.left, pat, "iIntros"))
            elif isinstance(g, Forall) and pat.kind == "pure":
                t_intros_binder(st, pat.name or st.fresh("x"))
                nxt.append(st)
            elif isinstance(g, Impl) and isinstance(g.left, Pure) and pat.kind == "pure":
                st.add_pure_hyp("iIntros", pat.name or st.fresh("H"), g.left.form)
                st.goal = g.right
                nxt.append(st)
            else:
                raise TacticFailure(
                    "iIntros", f"nothing to introduce in {render_prop(g)}", "ShapeMismatch"
                )
        states = nxt
    return states


def t_pure_intro(state: ProofState) -> ProofState:
    g = state.goal
    if not isinstance(g, Pure):
        raise TacticFailure("iPureIntro", "goal is not a pure embedding", "NotPure")
    state.drop_spatial_affine("iPureIntro")
    state.persistent = []
    state.pure_goal = g.form
    return state


def t_modintro(state: ProofState) -> list[ProofState]:
    g = state.goal
    if isinstance(g, Upd):
        state.goal = g.body
    elif isinstance(g, Later):
        state.goal = g.body
    else:
        raise TacticFailure("iModIntro", "goal has no leading modality", "ShapeMismatch")
    return [state]


def t_next(state: ProofState) -> list[ProofState]:
    g = state.goal
    if not isinstance(g, Later):
        raise TacticFailure("iNext", "goal has no leading ▷", "ShapeMismatch")
    state.goal = g.body
    for h in state.spatial + state.persistent:
        if isinstance(h.prop, Later):
            h.prop = h.prop.body
    return [state]


def t_rename(state: ProofState, old: str, new: str) -> list[ProofState]:
    h = state.find_spatial(old) or state.find_persistent(old)
    if h is None:
        raise TacticFailure("iRename", f"no hypothesis {old!r}", "NoSuchHypothesis")
    state.check_fresh("iRename", new)
    h.name = new
    return [state]


def t_clear(state: ProofState, names: list[str]) -> list[ProofState]:
    for nm in names:
        h = state.find_spatial(nm)
        if h is not None:
            state.spatial.remove(h)
            state.drops.append(f"iClear: dropped {nm}")
            continue
        hp = state.find_persistent(nm)
        if hp is not None:
            state.persistent.remove(hp)
            continue
        e = state.find_pure_hyp(nm)
        if e is not None:
            state.pure_ctx.remove(e)
            continue
        raise TacticFailure("iClear", f"no hypothesis {nm!r}", "NoSuchHypothesis")
    return [state]


def t_exact(state: ProofState, name: str) -> list[ProofState]:
    h = state.find_spatial(name) or state.find_persistent(name)
    if h is None:
        raise TacticFailure("iExact", f"no hypothesis {name!r}", "NoSuchHypothesis")
    if not alpha_equal(h.prop, state.goal):
        raise TacticFailure("iExact", "hypothesis does not match the goal", "NoMatch")
    if state.find_spatial(name) is not None:
        state.spatial.remove(h)
    state.drop_spatial_affine("iExact")
    return []


def _peel_lemma(p: Prop) -> tuple[list[tuple[str, Sort]], list[Prop], Prop]:
    """Split ∀xs. P1 -∗ … -∗ Pk -∗ G into (binders, premises, conclusion)."""
    binders: list[tuple[str, Sort]] = []
    while isinstance(p, Forall):
        binders.append((p.binder, p.sort))
        p = p.body
    prems: list[Prop] = []
    while isinstance(p, Wand):
        prems.append(p.left)
        p = p.right
    return binders, prems, p


def t_apply(
    state: ProofState,
    name: str,
    lemma: Prop | None = None,
    spec_groups: list[list[str]] | None = None,
) -> list[ProofState]:
    """iApply on a hypothesis (consumed when spatial) or library lemma."""
    if lemma is None:
        h = state.find_spatial(name) or state.find_persistent(name)
        if h is None:
            raise TacticFailure("iApply", f"no hypothesis {name!r}", "NoSuchHypothesis")
        lemma = h.prop
        if state.find_spatial(name) is not None:
            state.spatial.remove(h)
    binders, prems, concl = _peel_lemma(lemma)
    holes: dict[str, Optional[Term]] = {b: None for b, _ in binders}
    if not unify_prop(concl, state.goal, holes):
        raise TacticFailure(
            "iApply", "conclusion does not match the goal", "ConclusionMismatch"
        )
    unresolved = [b for b, v in holes.items() if v is None]
    if unresolved:
        raise TacticFailure(
            "iApply", f"cannot infer instantiation for {', '.join(unresolved)}", "CannotInfer"
        )

    def inst(p: Prop) -> Prop:
        for b, v in holes.items():
            p = prop_subst(p, b, v)  # type: ignore[arg-type]
        return p

    if not prems:
        state.drop_spatial_affine("iApply")
        return []
    groups = spec_groups or []
    if len(groups) > len(prems):
        raise TacticFailure("iApply", "more specialization groups than premises", "ArityMismatch")
    taken: list[list[Hyp]] = [
        [state.take_spatial("iApply", nm) for nm in grp] for grp in groups
    ]
    rest = state.spatial
    out: list[ProofState] = []
    for i, prem in enumerate(prems):
        sub = state.copy()
        sub.goal = inst(prem)
        if i < len(taken):
            sub.spatial = [_copy.copy(h) for h in taken[i]]
        else:
            sub.spatial = []
        if i == len(prems) - 1:
            sub.spatial.extend(_copy.copy(h) for h in rest)
        out.append(sub)
    return out


def t_split(state: ProofState, which: str, names: list[str]) -> list[ProofState]:
    g = state.goal
    if not isinstance(g, Sep):
        raise TacticFailure(which, "goal is not a separating conjunction", "ShapeMismatch")
    named = []
    for nm in names:
        named.append(state.take_spatial(which, nm))
    rest = state.spatial
    left, right = state.copy(), state.copy()
    left.goal, right.goal = g.left, g.right
    if which == "iSplitL":
        left.spatial, right.spatial = named, rest
    else:
        left.spatial, right.spatial = rest, named
    return [left, right]


def t_split_plain(state: ProofState) -> list[ProofState]:
    g = state.goal
    if isinstance(g, Sep):
        if is_persistent(g.left):
            left, right = state.copy(), state.copy()
            left.goal, left.spatial = g.left, []
            right.goal = g.right
            return [left, right]
        if is_persistent(g.right):
            left, right = state.copy(), state.copy()
            left.goal = g.left
            right.goal, right.spatial = g.right, []
            return [left, right]
        raise TacticFailure(
            "iSplit", "use iSplitL/iSplitR: neither conjunct is persistent", "ShapeMismatch"
        )
    if isinstance(g, And):
        left, right = state.copy(), state.copy()
        left.goal, right.goal = g.left, g.right
        return [left, right]
    raise TacticFailure("iSplit", "goal is not a conjunction", "ShapeMismatch")


def _atoms_through_binders(p: Prop, binder: str) -> list[tuple[Prop, set[str]]]:
    """(atom, inner existential binders) pairs reachable without consuming
    the variable of interest; inner binders act as wildcards during
    matching."""
    out: list[tuple[Prop, set[str]]] = []

    def walk(p: Prop, inner: set[str]) -> None:
        if isinstance(p, (Sep, And)):
            walk(p.left, inner)
            walk(p.right, inner)
        elif isinstance(p, Exists) and p.binder != binder:
            walk(p.body, inner | {p.binder})
        elif isinstance(p, Later):
            walk(p.body, inner)
        else:
            out.append((p, inner))

    walk(p, set())
    return out


def _infer_witness(state: ProofState, binder: str, body: Prop) -> Term:
    """Resolve `iExists _` by matching goal conjuncts against hypotheses or
    pure equations; conjuncts under further existentials are matched with
    those binders as wildcards."""
    from .terms import term_vars

    for conj, inner in _atoms_through_binders(body, binder):
        if binder not in props.prop_free_vars(conj):
            continue
        if isinstance(conj, Pure) and isinstance(conj.form, props.Eq):
            l, r = conj.form.left, conj.form.right
            for pat, tgt in ((l, r), (r, l)):
                if binder in term_vars(pat) and binder not in term_vars(tgt):
                    holes: dict[str, Optional[Term]] = {binder: None}
                    holes.update({b: None for b in inner})
                    if unify_term(pat, tgt, holes) and holes[binder] is not None:
                        return holes[binder]
        if isinstance(conj, (PointsTo, props.Own)):
            for h in state.spatial:
                holes = {binder: None}
                holes.update({b: None for b in inner})
                if unify_prop(conj, h.prop, holes) and holes[binder] is not None:
                    return holes[binder]
    raise TacticFailure("iExists", "cannot infer a witness for _", "CannotInfer")


def t_exists(state: ProofState, witnesses: list[Optional[Term]]) -> list[ProofState]:
    from .terms import infer_sort

    for w in witnesses:
        g = state.goal
        under_upd = isinstance(g, Upd)
        if under_upd:
            g = g.body
        if not isinstance(g, Exists):
            raise TacticFailure("iExists", "goal is not an existential", "ShapeMismatch")
        if w is None:
            w = _infer_witness(state, g.binder, g.body)
        ws = infer_sort(w, state.sorts())
        if ws is not None and g.sort is not Sort.VAL and ws is not g.sort and ws is not Sort.VAL:
            raise TacticFailure(
                "iExists", f"witness has sort {ws}, expected {g.sort}", "SortMismatch"
            )
        new = prop_subst(g.body, g.binder, w)
        state.goal = Upd(new) if under_upd else new
    return [state]


def t_left_right(state: ProofState, which: str) -> list[ProofState]:
    g = state.goal
    if not isinstance(g, Or):
        raise TacticFailure(which, "goal is not a disjunction", "ShapeMismatch")
    state.goal = g.left if which == "iLeft" else g.right
    return [state]


def t_exfalso(state: ProofState) -> list[ProofState]:
    state.goal = FalseP()
    return [state]


def t_assert(
    state: ProofState, prop: Prop, with_names: list[str], pat: IPat
) -> list[ProofState]:
    sub = state.copy()
    sub.spatial = []
    for nm in with_names:
        sub.spatial.append(state.take_spatial("iAssert", nm))
    sub.goal = prop
    sub.pure_goal = None
    mains = destructure(state, prop, pat, "iAssert")
    return [sub] + mains


def t_pose_proof(
    state: ProofState, lemma: Prop, binders: list[str], pat: IPat
) -> list[ProofState]:
    prop = lemma
    for b in binders:
        prop = _peel_exists(state, prop, b, "iPoseProof")
    return destructure(state, prop, pat, "iPoseProof")


def _peel_exists(state: ProofState, prop: Prop, name: str, tactic: str) -> Prop:
    laters = 0
    p = prop
    while isinstance(p, Later):
        laters += 1
        p = p.body
    if isinstance(p, Upd):
        inner = _peel_exists(state, p.body, name, tactic)
        return Upd(inner)
    if not isinstance(p, Exists):
        raise TacticFailure(tactic, "no existential to eliminate", "ShapeMismatch")
    if p.sort is Sort.PROP:
        raise TacticFailure(
            tactic,
            "quantification over iProp parses but is not supported by this kernel",
            "Unsupported",
        )
    state.add_pure_var(tactic, name, p.sort)
    body = prop_subst(p.body, p.binder, TVar(name)) if p.binder != name else p.body
    for _ in range(laters):
        body = Later(body)
    return body


def t_destruct(
    state: ProofState, name: str, binders: list[str], pat: IPat
) -> list[ProofState]:
    h = state.find_spatial(name)
    persistent_src = False
    if h is None:
        h = state.find_persistent(name)
        persistent_src = True
    if h is None:
        e = state.find_pure_hyp(name)
        if e is not None:
            raise TacticFailure(
                "iDestruct", f"{name!r} is already a pure hypothesis", "ShapeMismatch"
            )
        raise TacticFailure("iDestruct", f"no hypothesis {name!r}", "NoSuchHypothesis")
    prop = h.prop
    if not persistent_src:
        state.spatial.remove(h)
    for b in binders:
        prop = _peel_exists(state, prop, b, "iDestruct")
    return destructure(state, prop, pat, "iDestruct")
