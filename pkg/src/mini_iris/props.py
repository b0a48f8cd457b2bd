"""The Iris-style proposition algebra.

Propositions are immutable trees.  ``Sep`` is treated as associative and
commutative with unit ``TrueP`` by `sep_normal_form`; everything else is
matched up to bound-variable renaming by `alpha_equal`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from . import lang
from .terms import (
    BinT,
    BoolLit,
    IntLit,
    PairT,
    Sort,
    SortError,
    Term,
    TVar,
    UnitLit,
    render_term,
    render_value_term,
    term_subst,
    term_vars,
)

# ---------------------------------------------------------------------------
# pure formulas


@dataclass(frozen=True)
class PureForm:
    pass


@dataclass(frozen=True)
class Eq(PureForm):
    left: Term
    right: Term


@dataclass(frozen=True)
class Le(PureForm):
    left: Term
    right: Term


@dataclass(frozen=True)
class Lt(PureForm):
    left: Term
    right: Term


@dataclass(frozen=True)
class TrueF(PureForm):
    pass


@dataclass(frozen=True)
class FalseF(PureForm):
    pass


@dataclass(frozen=True)
class AndF(PureForm):
    left: PureForm
    right: PureForm


@dataclass(frozen=True)
class OrF(PureForm):
    left: PureForm
    right: PureForm


@dataclass(frozen=True)
class ImplF(PureForm):
    left: PureForm
    right: PureForm


@dataclass(frozen=True)
class NotF(PureForm):
    arg: PureForm


def form_subst(f: PureForm, x: str, t: Term) -> PureForm:
    if isinstance(f, (Eq, Le, Lt)):
        return type(f)(term_subst(f.left, x, t), term_subst(f.right, x, t))
    if isinstance(f, (AndF, OrF, ImplF)):
        return type(f)(form_subst(f.left, x, t), form_subst(f.right, x, t))
    if isinstance(f, NotF):
        return NotF(form_subst(f.arg, x, t))
    return f


def form_vars(f: PureForm) -> set[str]:
    if isinstance(f, (Eq, Le, Lt)):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, (AndF, OrF, ImplF)):
        return form_vars(f.left) | form_vars(f.right)
    if isinstance(f, NotF):
        return form_vars(f.arg)
    return set()


# ---------------------------------------------------------------------------
# propositions


@dataclass(frozen=True)
class Prop:
    pass


@dataclass(frozen=True)
class Pure(Prop):
    form: PureForm


@dataclass(frozen=True)
class TrueP(Prop):
    pass


@dataclass(frozen=True)
class FalseP(Prop):
    pass


@dataclass(frozen=True)
class And(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True)
class Or(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True)
class Impl(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True)
class Forall(Prop):
    binder: str
    sort: Sort
    body: Prop


@dataclass(frozen=True)
class Exists(Prop):
    binder: str
    sort: Sort
    body: Prop


@dataclass(frozen=True)
class PointsTo(Prop):
    loc: Term
    val: Term


@dataclass(frozen=True)
class Sep(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True)
class Wand(Prop):
    left: Prop
    right: Prop


@dataclass(frozen=True)
class Inv(Prop):
    namespace: str
    body: Prop


@dataclass(frozen=True)
class Later(Prop):
    body: Prop


@dataclass(frozen=True)
class Own(Prop):
    gname: Term
    kind: str  # "auth" or "frag"
    value: Term


@dataclass(frozen=True)
class Upd(Prop):
    body: Prop


@dataclass(frozen=True)
class WP(Prop):
    expr: lang.Expr
    binder: str
    post: Prop


@dataclass(frozen=True)
class PredApp(Prop):
    """Application of a postcondition predicate variable to a value term."""

    pred: str
    arg: Term


@dataclass(frozen=True)
class Triple(Prop):
    """Texan triple {{{ pre }}} e {{{ binders…, RET ret; post }}}.

    A derived form: the kernel only ever manipulates its unfolding.
    """

    pre: Prop
    expr: lang.Expr
    binders: tuple[tuple[str, Sort], ...]
    ret: Term
    post: Prop


def sep_list(props: list[Prop]) -> Prop:
    if not props:
        return TrueP()
    out = props[-1]
    for p in reversed(props[:-1]):
        out = Sep(p, out)
    return out


# ---------------------------------------------------------------------------
# traversal helpers


def prop_free_vars(p: Prop) -> set[str]:
    if isinstance(p, Pure):
        return form_vars(p.form)
    if isinstance(p, (TrueP, FalseP)):
        return set()
    if isinstance(p, (And, Or, Impl, Sep, Wand)):
        return prop_free_vars(p.left) | prop_free_vars(p.right)
    if isinstance(p, (Forall, Exists)):
        return prop_free_vars(p.body) - {p.binder}
    if isinstance(p, PointsTo):
        return term_vars(p.loc) | term_vars(p.val)
    if isinstance(p, Inv):
        return prop_free_vars(p.body)
    if isinstance(p, (Later, Upd)):
        return prop_free_vars(p.body)
    if isinstance(p, Own):
        return term_vars(p.gname) | term_vars(p.value)
    if isinstance(p, WP):
        return lang.expr_vars(p.expr) | (prop_free_vars(p.post) - {p.binder})
    if isinstance(p, PredApp):
        return {p.pred} | term_vars(p.arg)
    if isinstance(p, Triple):
        bound = {b for b, _ in p.binders}
        return (
            prop_free_vars(p.pre)
            | lang.expr_vars(p.expr)
            | ((prop_free_vars(p.post) | term_vars(p.ret)) - bound)
        )
    raise TypeError(p)


def _freshen(base: str, avoid: set[str]) -> str:
    if base not in avoid:
        return base
    i = 0
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def prop_subst(p: Prop, x: str, t: Term) -> Prop:
    """Capture-avoiding substitution of term t for variable x."""
    tv = term_vars(t)

    def go(p: Prop) -> Prop:
        if isinstance(p, Pure):
            return Pure(form_subst(p.form, x, t))
        if isinstance(p, (TrueP, FalseP)):
            return p
        if isinstance(p, (And, Or, Impl, Sep, Wand)):
            return type(p)(go(p.left), go(p.right))
        if isinstance(p, (Forall, Exists)):
            if p.binder == x:
                return p
            if p.binder in tv:
                fresh = _freshen(p.binder, tv | prop_free_vars(p.body) | {x})
                body = prop_subst(p.body, p.binder, TVar(fresh))
                return type(p)(fresh, p.sort, go(body))
            return type(p)(p.binder, p.sort, go(p.body))
        if isinstance(p, PointsTo):
            return PointsTo(term_subst(p.loc, x, t), term_subst(p.val, x, t))
        if isinstance(p, Inv):
            return Inv(p.namespace, go(p.body))
        if isinstance(p, (Later, Upd)):
            return type(p)(go(p.body))
        if isinstance(p, Own):
            return Own(term_subst(p.gname, x, t), p.kind, term_subst(p.value, x, t))
        if isinstance(p, WP):
            expr = lang.expr_subst_term(p.expr, x, t)
            if p.binder == x:
                return WP(expr, p.binder, p.post)
            if p.binder in tv:
                fresh = _freshen(p.binder, tv | prop_free_vars(p.post) | {x})
                post = prop_subst(p.post, p.binder, TVar(fresh))
                return WP(expr, fresh, go(post))
            return WP(expr, p.binder, go(p.post))
        if isinstance(p, PredApp):
            if p.pred == x:
                raise SortError("cannot substitute a term for a predicate variable")
            return PredApp(p.pred, term_subst(p.arg, x, t))
        if isinstance(p, Triple):
            bound = {b for b, _ in p.binders}
            pre = go(p.pre)
            expr = lang.expr_subst_term(p.expr, x, t)
            if x in bound:
                return Triple(pre, expr, p.binders, p.ret, p.post)
            if bound & tv:
                raise SortError("substitution would capture a triple binder")
            return Triple(pre, expr, p.binders, term_subst(p.ret, x, t), go(p.post))
        raise TypeError(p)

    return go(p)


def prop_rename_pred(p: Prop, old: str, new: str) -> Prop:
    """Rename a predicate variable (used when intro'ing the texan ∀Φ)."""

    def go(p: Prop) -> Prop:
        if isinstance(p, PredApp) and p.pred == old:
            return PredApp(new, p.arg)
        if isinstance(p, (And, Or, Impl, Sep, Wand)):
            return type(p)(go(p.left), go(p.right))
        if isinstance(p, (Forall, Exists)):
            if p.binder == old:
                return p
            return type(p)(p.binder, p.sort, go(p.body))
        if isinstance(p, Inv):
            return Inv(p.namespace, go(p.body))
        if isinstance(p, (Later, Upd)):
            return type(p)(go(p.body))
        if isinstance(p, WP):
            return WP(p.expr, p.binder, go(p.post))
        if isinstance(p, Triple):
            return Triple(go(p.pre), p.expr, p.binders, p.ret, go(p.post))
        return p

    return go(p)


# ---------------------------------------------------------------------------
# alpha equivalence


def alpha_equal(p: Prop, q: Prop) -> bool:
    return _alpha(p, q, {}, {})


def _alpha_term(s: Term, t: Term, env: dict[str, str]) -> bool:
    if isinstance(s, TVar) and isinstance(t, TVar):
        return env.get(s.name, s.name) == t.name
    if type(s) is not type(t):
        return False
    if isinstance(s, (IntLit, BoolLit)):
        return s == t
    if isinstance(s, UnitLit):
        return True
    if isinstance(s, BinT):
        assert isinstance(t, BinT)
        return s.op == t.op and _alpha_term(s.left, t.left, env) and _alpha_term(s.right, t.right, env)
    if isinstance(s, PairT):
        assert isinstance(t, PairT)
        return _alpha_term(s.left, t.left, env) and _alpha_term(s.right, t.right, env)
    return False


def _alpha_form(f: PureForm, g: PureForm, env: dict[str, str]) -> bool:
    if type(f) is not type(g):
        return False
    if isinstance(f, (Eq, Le, Lt)):
        return _alpha_term(f.left, g.left, env) and _alpha_term(f.right, g.right, env)
    if isinstance(f, (AndF, OrF, ImplF)):
        return _alpha_form(f.left, g.left, env) and _alpha_form(f.right, g.right, env)
    if isinstance(f, NotF):
        return _alpha_form(f.arg, g.arg, env)
    return True


def _alpha_expr(a: lang.Expr, b: lang.Expr, env: dict[str, str]) -> bool:
    if isinstance(a, lang.ValE) and isinstance(b, lang.ValE):
        return _alpha_val(a.value, b.value, env)
    if type(a) is not type(b):
        return False
    if isinstance(a, lang.Var):
        return a == b
    if isinstance(a, lang.DefApp):
        assert isinstance(b, lang.DefApp)
        return (
            a.name == b.name
            and len(a.args) == len(b.args)
            and all(_alpha_term(s, t, env) for s, t in zip(a.args, b.args))
        )
    kids_a = list(lang.children(a))
    kids_b = list(lang.children(b))
    if isinstance(a, lang.Rec):
        if (a.self_name, a.binder) != (b.self_name, b.binder):  # type: ignore[attr-defined]
            return False
    if isinstance(a, lang.Let):
        if a.binder != b.binder:  # type: ignore[attr-defined]
            return False
    if isinstance(a, lang.BinOp):
        if a.op != b.op:  # type: ignore[attr-defined]
            return False
    return len(kids_a) == len(kids_b) and all(
        _alpha_expr(x, y, env) for x, y in zip(kids_a, kids_b)
    )


def _alpha_val(u: lang.Val, v: lang.Val, env: dict[str, str]) -> bool:
    if isinstance(u, lang.SymV) or isinstance(v, lang.SymV) or isinstance(u, lang.LocV):
        try:
            return _alpha_term(lang.term_of_val(u), lang.term_of_val(v), env)
        except lang.StuckExpr:
            return False
    if type(u) is not type(v):
        return False
    if isinstance(u, lang.PairV):
        assert isinstance(v, lang.PairV)
        return _alpha_val(u.fst, v.fst, env) and _alpha_val(u.snd, v.snd, env)
    if isinstance(u, lang.ClosV):
        assert isinstance(v, lang.ClosV)
        return (
            u.self_name == v.self_name
            and u.binder == v.binder
            and _alpha_expr(u.body, v.body, env)
        )
    return u == v


def _alpha(p: Prop, q: Prop, env: dict[str, str], renv: dict[str, str]) -> bool:
    if type(p) is not type(q):
        return False
    if isinstance(p, Pure):
        return _alpha_form(p.form, q.form, env)
    if isinstance(p, (TrueP, FalseP)):
        return True
    if isinstance(p, (And, Or, Impl, Sep, Wand)):
        return _alpha(p.left, q.left, env, renv) and _alpha(p.right, q.right, env, renv)
    if isinstance(p, (Forall, Exists)):
        if p.sort is not q.sort:
            return False
        env2 = dict(env)
        env2[p.binder] = q.binder
        return _alpha(p.body, q.body, env2, renv)
    if isinstance(p, PointsTo):
        return _alpha_term(p.loc, q.loc, env) and _alpha_term(p.val, q.val, env)
    if isinstance(p, Inv):
        return p.namespace == q.namespace and _alpha(p.body, q.body, env, renv)
    if isinstance(p, (Later, Upd)):
        return _alpha(p.body, q.body, env, renv)
    if isinstance(p, Own):
        return (
            p.kind == q.kind
            and _alpha_term(p.gname, q.gname, env)
            and _alpha_term(p.value, q.value, env)
        )
    if isinstance(p, WP):
        if not _alpha_expr(p.expr, q.expr, env):
            return False
        env2 = dict(env)
        env2[p.binder] = q.binder
        return _alpha(p.post, q.post, env2, renv)
    if isinstance(p, PredApp):
        return env.get(p.pred, p.pred) == q.pred and _alpha_term(p.arg, q.arg, env)
    if isinstance(p, Triple):
        if len(p.binders) != len(q.binders):
            return False
        if not _alpha(p.pre, q.pre, env, renv) or not _alpha_expr(p.expr, q.expr, env):
            return False
        env2 = dict(env)
        for (b1, s1), (b2, s2) in zip(p.binders, q.binders):
            if s1 is not s2:
                return False
            env2[b1] = b2
        return _alpha_term(p.ret, q.ret, env2) and _alpha(p.post, q.post, env2, renv)
    raise TypeError(p)


# ---------------------------------------------------------------------------
# AC-normal form for ∗


def _atom_key(p: Prop) -> tuple:
    # points-to first (ordered by location), then own, then pure, then rest
    if isinstance(p, PointsTo):
        return (0, render_term(p.loc), _encode(p))
    if isinstance(p, Own):
        return (1, render_term(p.gname), p.kind, _encode(p))
    if isinstance(p, Pure):
        return (2, _encode(p))
    return (3, _encode(p))


def _encode(p) -> str:
    # stable structural encoding with bound names canonicalized
    if isinstance(p, (Forall, Exists)):
        body = prop_subst(p.body, p.binder, TVar("§"))
        return f"{type(p).__name__}[{p.sort.name}]({_encode(body)})"
    if isinstance(p, WP):
        post = prop_subst(p.post, p.binder, TVar("§"))
        return f"WP({lang.render_expr(p.expr)})({_encode(post)})"
    if isinstance(p, Prop):
        parts = []
        for f in p.__dataclass_fields__:
            v = getattr(p, f)
            if isinstance(v, (Prop, PureForm)):
                parts.append(_encode(v))
            elif isinstance(v, Term):
                parts.append(render_term(v))
            elif isinstance(v, lang.Expr):
                parts.append(lang.render_expr(v))
            else:
                parts.append(repr(v))
        return f"{type(p).__name__}({','.join(parts)})"
    if isinstance(p, PureForm):
        parts = []
        for f in p.__dataclass_fields__:
            v = getattr(p, f)
            parts.append(_encode(v) if isinstance(v, PureForm) else render_term(v))
        return f"{type(p).__name__}({','.join(parts)})"
    return repr(p)


def sep_flatten(p: Prop) -> list[Prop]:
    """Flatten the ∗-spine, dropping True units; no reordering."""
    if isinstance(p, Sep):
        return sep_flatten(p.left) + sep_flatten(p.right)
    if isinstance(p, TrueP):
        return []
    return [p]


def sep_normal_form(p: Prop) -> list[Prop]:
    """Flattened, canonically ordered list of ∗-conjuncts."""
    return sorted(sep_flatten(p), key=_atom_key)


def sep_multiset_equal(ps: list[Prop], qs: list[Prop]) -> bool:
    if len(ps) != len(qs):
        return False
    remaining = list(qs)
    for p in ps:
        for i, q in enumerate(remaining):
            if alpha_equal(p, q):
                del remaining[i]
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# persistence (syntactic test)


def is_persistent(p: Prop) -> bool:
    if isinstance(p, (Pure, TrueP, Inv)):
        return True
    if isinstance(p, (And, Or)):
        return is_persistent(p.left) and is_persistent(p.right)
    if isinstance(p, (Forall, Exists)):
        return is_persistent(p.body)
    return False


# ---------------------------------------------------------------------------
# rendering

_ASCII = {
    "⌜": "[! ",
    "⌝": " !]",
    "∗": "*",
    "-∗": "-*",
    "↦": "|->",
    "∃": "exists",
    "∀": "forall",
    "▷": "|>",
    "≤": "<=",
    "∧": "/\\",
    "∨": "\\/",
    "¬": "~",
    "→": "->",
    "●E": "auth",
    "◯E": "frag",
    "|={⊤}=>": "|==>",
    "λ": "\\",
    "Φ": "PHI",
    "ℓ": "l",
}


def to_ascii(text: str) -> str:
    for uni, asc in _ASCII.items():
        text = text.replace(uni, asc)
    return text


_F_PREC = {"→": 1, "∨": 2, "∧": 3}


def render_form(f: PureForm, sorts=None, prec: int = 0) -> str:
    def paren(s: str, lvl: int) -> str:
        return f"({s})" if lvl < prec else s

    if isinstance(f, Eq):
        return paren(f"{render_term(f.left, sorts)} = {render_term(f.right, sorts)}", 4)
    if isinstance(f, Le):
        return paren(f"{render_term(f.left, sorts)} ≤ {render_term(f.right, sorts)}", 4)
    if isinstance(f, Lt):
        return paren(f"{render_term(f.left, sorts)} < {render_term(f.right, sorts)}", 4)
    if isinstance(f, TrueF):
        return "True"
    if isinstance(f, FalseF):
        return "False"
    if isinstance(f, AndF):
        return paren(f"{render_form(f.left, sorts, 4)} ∧ {render_form(f.right, sorts, 3)}", 3)
    if isinstance(f, OrF):
        return paren(f"{render_form(f.left, sorts, 3)} ∨ {render_form(f.right, sorts, 2)}", 2)
    if isinstance(f, ImplF):
        return paren(f"{render_form(f.left, sorts, 2)} → {render_form(f.right, sorts, 1)}", 1)
    if isinstance(f, NotF):
        return paren(f"¬{render_form(f.arg, sorts, 5)}", 5)
    raise TypeError(f)


# prop precedence: 0 quantifier/wand-body | 1 -∗ | 2 ∨/∧/→ | 3 ∗ | 4 modal prefix | 5 atom


def render_prop(p: Prop, sorts: Mapping[str, Sort] | None = None, prec: int = 0) -> str:
    sorts = dict(sorts or {})

    def paren(s: str, lvl: int) -> str:
        return f"({s})" if lvl < prec else s

    if isinstance(p, Pure):
        return f"⌜{render_form(p.form, sorts)}⌝"
    if isinstance(p, TrueP):
        return "True"
    if isinstance(p, FalseP):
        return "False"
    if isinstance(p, And):
        return paren(f"{render_prop(p.left, sorts, 2)} ∧ {render_prop(p.right, sorts, 3)}", 2)
    if isinstance(p, Or):
        return paren(f"{render_prop(p.left, sorts, 2)} ∨ {render_prop(p.right, sorts, 3)}", 2)
    if isinstance(p, Impl):
        return paren(f"{render_prop(p.left, sorts, 2)} → {render_prop(p.right, sorts, 3)}", 2)
    if isinstance(p, Forall):
        inner = dict(sorts)
        inner[p.binder] = p.sort
        if p.sort is Sort.PRED:
            return paren(f"∀ {p.binder}, {render_prop(p.body, inner, 0)}", 0)
        return paren(f"∀ ({p.binder} : {p.sort}), {render_prop(p.body, inner, 0)}", 0)
    if isinstance(p, Exists):
        inner = dict(sorts)
        inner[p.binder] = p.sort
        return paren(f"∃ ({p.binder} : {p.sort}), {render_prop(p.body, inner, 0)}", 0)
    if isinstance(p, PointsTo):
        return paren(f"{render_term(p.loc, sorts)} ↦ {render_value_term(p.val, sorts)}", 4)
    if isinstance(p, Sep):
        return paren(f"{render_prop(p.left, sorts, 4)} ∗ {render_prop(p.right, sorts, 3)}", 3)
    if isinstance(p, Wand):
        return paren(f"{render_prop(p.left, sorts, 2)} -∗ {render_prop(p.right, sorts, 1)}", 1)
    if isinstance(p, Inv):
        return paren(f"inv {p.namespace} ({render_prop(p.body, sorts, 0)})", 4)
    if isinstance(p, Later):
        return paren(f"▷ {render_prop(p.body, sorts, 4)}", 4)
    if isinstance(p, Upd):
        return paren(f"|={{⊤}}=> {render_prop(p.body, sorts, 4)}", 4)
    if isinstance(p, Own):
        sym = "●E" if p.kind == "auth" else "◯E"
        return paren(
            f"own {render_term(p.gname, sorts)} ({sym} {render_term(p.value, sorts)})", 4
        )
    if isinstance(p, WP):
        inner = dict(sorts)
        inner[p.binder] = Sort.VAL
        return paren(
            f"WP {lang.render_expr(p.expr, sorts, 2)} "
            f"{{{{ {p.binder}, {render_prop(p.post, inner, 0)} }}}}",
            4,
        )
    if isinstance(p, PredApp):
        return paren(f"{p.pred} {render_value_term(p.arg, sorts)}", 4)
    if isinstance(p, Triple):
        inner = dict(sorts)
        for b, s in p.binders:
            inner[b] = s
        binders = "".join(f"({b} : {s}) " for b, s in p.binders)
        prefix = f"{binders}" if binders else ""
        return paren(
            f"{{{{{{ {render_prop(p.pre, sorts, 0)} }}}}}} {lang.render_expr(p.expr, sorts, 2)} "
            f"{{{{{{ {prefix}RET {render_value_term(p.ret, inner)}; {render_prop(p.post, inner, 0)} }}}}}}",
            0,
        )
    raise TypeError(p)
