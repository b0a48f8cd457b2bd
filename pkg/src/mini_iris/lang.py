"""HeapLang-subset abstract syntax, reduction and the concrete interpreter.

The same expression type serves two masters: the concrete big-step
interpreter (the brute-force oracle used to cross-validate proofs) and the
symbolic executor behind the wp tactics.  Symbolic values (``SymV``) wrap a
pure term; the concrete interpreter refuses them.

Operands evaluate right to left, matching the evaluation order the proof
traces rely on (a store reduces its value before its location).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .terms import (
    BinT,
    BoolLit,
    IntLit,
    PairT,
    Sort,
    Term,
    TVar,
    UnitLit,
    fold,
    render_term,
    render_value_term,
)


class StuckExpr(Exception):
    """The head redex is ill-typed or otherwise cannot reduce."""


class MissingLocation(Exception):
    def __init__(self, loc: str):
        super().__init__(f"location {loc} not in heap")
        self.loc = loc


# ---------------------------------------------------------------------------
# values


@dataclass(frozen=True)
class Val:
    pass


@dataclass(frozen=True)
class IntV(Val):
    value: int


@dataclass(frozen=True)
class BoolV(Val):
    value: bool


@dataclass(frozen=True)
class UnitV(Val):
    pass


@dataclass(frozen=True)
class LocV(Val):
    name: str  # interned symbol; equality is symbol equality


@dataclass(frozen=True)
class PairV(Val):
    fst: Val
    snd: Val


@dataclass(frozen=True)
class ClosV(Val):
    self_name: Optional[str]
    binder: Optional[str]  # None encodes the <> binder
    body: "Expr"


@dataclass(frozen=True)
class SymV(Val):
    """A symbolic value: a pure term standing for an unknown value."""

    term: Term


# ---------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class ValE(Expr):
    value: Val


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Rec(Expr):
    self_name: Optional[str]
    binder: Optional[str]
    body: Expr


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class Let(Expr):
    binder: Optional[str]
    bound: Expr
    body: Expr


@dataclass(frozen=True)
class If(Expr):
    cond: Expr
    then: Expr
    els: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # + - * = ≤ <
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pair(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Fst(Expr):
    arg: Expr


@dataclass(frozen=True)
class Snd(Expr):
    arg: Expr


@dataclass(frozen=True)
class Alloc(Expr):
    arg: Expr


@dataclass(frozen=True)
class Load(Expr):
    arg: Expr


@dataclass(frozen=True)
class Store(Expr):
    dst: Expr
    src: Expr


@dataclass(frozen=True)
class Seq(Expr):
    first: Expr
    second: Expr


@dataclass(frozen=True)
class Par(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Fork(Expr):
    """Kernel-only node backing the fork proof rule; not in the surface
    grammar and never executable."""

    arg: Expr


@dataclass(frozen=True)
class DefApp(Expr):
    """Reference to a named program definition, applied to meta-arguments.

    Keeps the surface form for display; one administrative reduction step
    replaces it by ``expansion``.
    """

    name: str
    args: tuple[Term, ...]
    expansion: Expr


def is_value(e: Expr) -> bool:
    return isinstance(e, ValE) or isinstance(e, Rec)


def to_val(e: Expr) -> Val:
    if isinstance(e, ValE):
        return e.value
    if isinstance(e, Rec):
        return ClosV(e.self_name, e.binder, e.body)
    raise ValueError("not a value")


# ---------------------------------------------------------------------------
# value / term conversions


def term_of_val(v: Val) -> Term:
    if isinstance(v, IntV):
        return IntLit(v.value)
    if isinstance(v, BoolV):
        return BoolLit(v.value)
    if isinstance(v, UnitV):
        return UnitLit()
    if isinstance(v, LocV):
        return TVar(v.name)
    if isinstance(v, PairV):
        return PairT(term_of_val(v.fst), term_of_val(v.snd))
    if isinstance(v, SymV):
        return v.term
    raise StuckExpr("closure values have no term representation")


def val_of_term(t: Term, sorts: dict[str, Sort] | None = None) -> Val:
    sorts = sorts or {}
    if isinstance(t, IntLit):
        return IntV(t.value)
    if isinstance(t, BoolLit):
        return BoolV(t.value)
    if isinstance(t, UnitLit):
        return UnitV()
    if isinstance(t, PairT):
        return PairV(val_of_term(t.left, sorts), val_of_term(t.right, sorts))
    if isinstance(t, TVar):
        if sorts.get(t.name) == Sort.LOC:
            return LocV(t.name)
        return SymV(t)
    return SymV(fold(t))


# ---------------------------------------------------------------------------
# substitution


def subst(e: Expr, x: str, v: Val) -> Expr:
    """Capture-avoiding substitution of value v for program variable x."""
    if isinstance(e, ValE):
        return e
    if isinstance(e, Var):
        return ValE(v) if e.name == x else e
    if isinstance(e, Rec):
        if e.self_name == x or e.binder == x:
            return e
        return Rec(e.self_name, e.binder, subst(e.body, x, v))
    if isinstance(e, App):
        return App(subst(e.fn, x, v), subst(e.arg, x, v))
    if isinstance(e, Let):
        bound = subst(e.bound, x, v)
        body = e.body if e.binder == x else subst(e.body, x, v)
        return Let(e.binder, bound, body)
    if isinstance(e, If):
        return If(subst(e.cond, x, v), subst(e.then, x, v), subst(e.els, x, v))
    if isinstance(e, BinOp):
        return BinOp(e.op, subst(e.left, x, v), subst(e.right, x, v))
    if isinstance(e, Pair):
        return Pair(subst(e.left, x, v), subst(e.right, x, v))
    if isinstance(e, Fst):
        return Fst(subst(e.arg, x, v))
    if isinstance(e, Snd):
        return Snd(subst(e.arg, x, v))
    if isinstance(e, Alloc):
        return Alloc(subst(e.arg, x, v))
    if isinstance(e, Load):
        return Load(subst(e.arg, x, v))
    if isinstance(e, Store):
        return Store(subst(e.dst, x, v), subst(e.src, x, v))
    if isinstance(e, Seq):
        return Seq(subst(e.first, x, v), subst(e.second, x, v))
    if isinstance(e, Par):
        return Par(subst(e.left, x, v), subst(e.right, x, v))
    if isinstance(e, Fork):
        return Fork(subst(e.arg, x, v))
    if isinstance(e, DefApp):
        return DefApp(e.name, e.args, subst(e.expansion, x, v))
    raise TypeError(e)


def _subst_val_term(v: Val, x: str, t: Term, sorts: dict[str, Sort]) -> Val:
    if isinstance(v, SymV):
        return val_of_term(term_subst_into(v.term, x, t), sorts)
    if isinstance(v, LocV) and v.name == x:
        return val_of_term(t, sorts)
    if isinstance(v, PairV):
        return PairV(_subst_val_term(v.fst, x, t, sorts), _subst_val_term(v.snd, x, t, sorts))
    if isinstance(v, ClosV):
        return ClosV(v.self_name, v.binder, expr_subst_term(v.body, x, t, sorts))
    return v


def term_subst_into(s: Term, x: str, t: Term) -> Term:
    from .terms import term_subst

    return term_subst(s, x, t)


def expr_subst_term(e: Expr, x: str, t: Term, sorts: dict[str, Sort] | None = None) -> Expr:
    """Substitute a pure term for a meta variable inside symbolic values."""
    sorts = sorts or {}
    if isinstance(e, ValE):
        return ValE(_subst_val_term(e.value, x, t, sorts))
    if isinstance(e, Var):
        return e
    if isinstance(e, Rec):
        return Rec(e.self_name, e.binder, expr_subst_term(e.body, x, t, sorts))
    if isinstance(e, App):
        return App(expr_subst_term(e.fn, x, t, sorts), expr_subst_term(e.arg, x, t, sorts))
    if isinstance(e, Let):
        return Let(e.binder, expr_subst_term(e.bound, x, t, sorts), expr_subst_term(e.body, x, t, sorts))
    if isinstance(e, If):
        return If(
            expr_subst_term(e.cond, x, t, sorts),
            expr_subst_term(e.then, x, t, sorts),
            expr_subst_term(e.els, x, t, sorts),
        )
    if isinstance(e, BinOp):
        return BinOp(e.op, expr_subst_term(e.left, x, t, sorts), expr_subst_term(e.right, x, t, sorts))
    if isinstance(e, Pair):
        return Pair(expr_subst_term(e.left, x, t, sorts), expr_subst_term(e.right, x, t, sorts))
    if isinstance(e, Fst):
        return Fst(expr_subst_term(e.arg, x, t, sorts))
    if isinstance(e, Snd):
        return Snd(expr_subst_term(e.arg, x, t, sorts))
    if isinstance(e, Alloc):
        return Alloc(expr_subst_term(e.arg, x, t, sorts))
    if isinstance(e, Load):
        return Load(expr_subst_term(e.arg, x, t, sorts))
    if isinstance(e, Store):
        return Store(expr_subst_term(e.dst, x, t, sorts), expr_subst_term(e.src, x, t, sorts))
    if isinstance(e, Seq):
        return Seq(expr_subst_term(e.first, x, t, sorts), expr_subst_term(e.second, x, t, sorts))
    if isinstance(e, Par):
        return Par(expr_subst_term(e.left, x, t, sorts), expr_subst_term(e.right, x, t, sorts))
    if isinstance(e, Fork):
        return Fork(expr_subst_term(e.arg, x, t, sorts))
    if isinstance(e, DefApp):
        args = tuple(term_subst_into(a, x, t) for a in e.args)
        return DefApp(e.name, args, expr_subst_term(e.expansion, x, t, sorts))
    raise TypeError(e)


def expr_vars(e: Expr) -> set[str]:
    """Free meta variables (inside symbolic values and def arguments)."""
    out: set[str] = set()

    def walk_val(v: Val) -> None:
        if isinstance(v, SymV):
            from .terms import term_vars

            out.update(term_vars(v.term))
        elif isinstance(v, LocV):
            out.add(v.name)
        elif isinstance(v, PairV):
            walk_val(v.fst)
            walk_val(v.snd)
        elif isinstance(v, ClosV):
            walk(v.body)

    def walk(e: Expr) -> None:
        if isinstance(e, ValE):
            walk_val(e.value)
        elif isinstance(e, DefApp):
            from .terms import term_vars

            for a in e.args:
                out.update(term_vars(a))
            walk(e.expansion)
        else:
            for sub in children(e):
                walk(sub)

    walk(e)
    return out


def check_par_placement(e: Expr) -> None:
    """Par is a statement-level primitive: it may not occur inside the
    operands of heap operations."""

    def walk(e: Expr, banned: bool) -> None:
        if isinstance(e, Par) and banned:
            raise StuckExpr("parallel composition inside a heap-operation operand")
        inner = banned or isinstance(e, (Alloc, Load, Store))
        for c in children(e):
            walk(c, inner)

    walk(e, False)


def children(e: Expr) -> Iterator[Expr]:
    if isinstance(e, (ValE, Var)):
        return iter(())
    if isinstance(e, Rec):
        return iter((e.body,))
    if isinstance(e, App):
        return iter((e.fn, e.arg))
    if isinstance(e, Let):
        return iter((e.bound, e.body))
    if isinstance(e, If):
        return iter((e.cond, e.then, e.els))
    if isinstance(e, BinOp):
        return iter((e.left, e.right))
    if isinstance(e, Pair):
        return iter((e.left, e.right))
    if isinstance(e, (Fst, Snd, Alloc, Load, Fork)):
        return iter((e.arg,))
    if isinstance(e, Store):
        return iter((e.dst, e.src))
    if isinstance(e, Seq):
        return iter((e.first, e.second))
    if isinstance(e, Par):
        return iter((e.left, e.right))
    if isinstance(e, DefApp):
        return iter((e.expansion,))
    raise TypeError(e)


# ---------------------------------------------------------------------------
# evaluation contexts

# A frame is (tag, payload...); plugging is defined by `plug_frame`.


Frame = tuple


def plug_frame(f: Frame, e: Expr) -> Expr:
    tag = f[0]
    if tag == "app_l":
        return App(e, f[1])
    if tag == "app_r":
        return App(f[1], e)
    if tag == "let":
        return Let(f[1], e, f[2])
    if tag == "if":
        return If(e, f[1], f[2])
    if tag == "binop_l":
        return BinOp(f[1], e, f[2])
    if tag == "binop_r":
        return BinOp(f[1], f[2], e)
    if tag == "pair_l":
        return Pair(e, f[1])
    if tag == "pair_r":
        return Pair(f[1], e)
    if tag == "fst":
        return Fst(e)
    if tag == "snd":
        return Snd(e)
    if tag == "alloc":
        return Alloc(e)
    if tag == "load":
        return Load(e)
    if tag == "store_l":
        return Store(e, f[1])
    if tag == "store_r":
        return Store(f[1], e)
    if tag == "seq":
        return Seq(e, f[1])
    raise ValueError(tag)


def plug(ctx: list[Frame], e: Expr) -> Expr:
    for f in reversed(ctx):
        e = plug_frame(f, e)
    return e


def decompose(e: Expr) -> tuple[list[Frame], Expr] | None:
    """Split e into (evaluation context, head redex); None when e is a value.

    Operands are visited right to left.  The redex may itself be a value
    inside a frame only transiently; values plugged at the root yield None.
    """
    if is_value(e):
        return None
    ctx: list[Frame] = []
    cur = e
    while True:
        nxt: tuple[Frame, Expr] | None = None
        if isinstance(cur, App):
            if not is_value(cur.arg):
                nxt = (("app_r", cur.fn), cur.arg)
            elif not is_value(cur.fn):
                nxt = (("app_l", cur.arg), cur.fn)
        elif isinstance(cur, Let):
            if not is_value(cur.bound):
                nxt = (("let", cur.binder, cur.body), cur.bound)
        elif isinstance(cur, If):
            if not is_value(cur.cond):
                nxt = (("if", cur.then, cur.els), cur.cond)
        elif isinstance(cur, BinOp):
            if not is_value(cur.right):
                nxt = (("binop_r", cur.op, cur.left), cur.right)
            elif not is_value(cur.left):
                nxt = (("binop_l", cur.op, cur.right), cur.left)
        elif isinstance(cur, Pair):
            if not is_value(cur.right):
                nxt = (("pair_r", cur.left), cur.right)
            elif not is_value(cur.left):
                nxt = (("pair_l", cur.right), cur.left)
        elif isinstance(cur, (Fst, Snd, Alloc, Load)):
            tag = type(cur).__name__.lower()
            if not is_value(cur.arg):
                nxt = ((tag,), cur.arg)
        elif isinstance(cur, Store):
            if not is_value(cur.src):
                nxt = (("store_r", cur.dst), cur.src)
            elif not is_value(cur.dst):
                nxt = (("store_l", cur.src), cur.dst)
        elif isinstance(cur, Seq):
            if not is_value(cur.first):
                nxt = (("seq", cur.second), cur.first)
        # Par, Fork, Var, DefApp: head positions, never descended into.
        if nxt is None:
            return ctx, cur
        frame, sub = nxt
        ctx.append(frame)
        cur = sub


def eval_positions(e: Expr) -> list[tuple[list[Frame], Expr]]:
    """All (context, subterm) pairs along the evaluation spine, outermost
    first.  Administrative DefApp unfolding is applied transparently so the
    spine reaches through definition references."""
    out: list[tuple[list[Frame], Expr]] = []
    d = decompose(e)
    if d is None:
        return [([], e)]
    ctx, red = d
    # reconstruct the spine prefix path
    path: list[tuple[list[Frame], Expr]] = [([], e)]
    cur = e
    acc: list[Frame] = []
    for f in ctx:
        # recompute the subterm under f
        sub = _frame_subterm(cur, f)
        acc = acc + [f]
        path.append((list(acc), sub))
        cur = sub
    for c, s in path:
        if isinstance(s, DefApp):
            for c2, s2 in eval_positions(s.expansion):
                out.append((c + c2, s2))
        else:
            out.append((c, s))
    return out


def _frame_subterm(e: Expr, f: Frame) -> Expr:
    tag = f[0]
    if tag == "app_r":
        return e.arg  # type: ignore[attr-defined]
    if tag == "app_l":
        return e.fn  # type: ignore[attr-defined]
    if tag == "let":
        return e.bound  # type: ignore[attr-defined]
    if tag == "if":
        return e.cond  # type: ignore[attr-defined]
    if tag == "binop_r":
        return e.right  # type: ignore[attr-defined]
    if tag == "binop_l":
        return e.left  # type: ignore[attr-defined]
    if tag == "pair_r":
        return e.right  # type: ignore[attr-defined]
    if tag == "pair_l":
        return e.left  # type: ignore[attr-defined]
    if tag in ("fst", "snd", "alloc", "load"):
        return e.arg  # type: ignore[attr-defined]
    if tag == "store_r":
        return e.src  # type: ignore[attr-defined]
    if tag == "store_l":
        return e.dst  # type: ignore[attr-defined]
    if tag == "seq":
        return e.first  # type: ignore[attr-defined]
    raise ValueError(tag)


# ---------------------------------------------------------------------------
# pure small-step reduction


def _binop_vals(op: str, a: Val, b: Val) -> Val:
    if op in ("+", "-", "*"):
        if isinstance(a, IntV) and isinstance(b, IntV):
            f = {"+": int.__add__, "-": int.__sub__, "*": int.__mul__}[op]
            return IntV(f(a.value, b.value))
        ta, tb = term_of_val(a), term_of_val(b)
        if isinstance(a, (IntV, SymV)) and isinstance(b, (IntV, SymV)):
            return SymV(fold(BinT(op, ta, tb)))
        raise StuckExpr(f"ill-typed operands for {op}")
    if op == "=":
        if isinstance(a, IntV) and isinstance(b, IntV):
            return BoolV(a.value == b.value)
        if isinstance(a, BoolV) and isinstance(b, BoolV):
            return BoolV(a.value == b.value)
        if isinstance(a, UnitV) and isinstance(b, UnitV):
            return BoolV(True)
        if isinstance(a, LocV) and isinstance(b, LocV):
            return BoolV(a.name == b.name)
        if a == b:  # identical symbolic values compare equal
            return BoolV(True)
        raise StuckExpr("cannot decide equality of distinct symbolic values")
    if op in ("≤", "<"):
        if isinstance(a, IntV) and isinstance(b, IntV):
            return BoolV(a.value <= b.value if op == "≤" else a.value < b.value)
        raise StuckExpr(f"cannot decide symbolic {op}")
    raise StuckExpr(f"unknown operator {op}")


def head_pure_step(red: Expr) -> Expr | None:
    """One head reduction of a pure redex; None when the redex is a heap
    operation or Par.  Raises StuckExpr on ill-typed redexes."""
    if isinstance(red, DefApp):
        return red.expansion
    if isinstance(red, App):
        fn = red.fn
        if isinstance(fn, DefApp):
            return App(fn.expansion, red.arg)
        if not is_value(fn) or not is_value(red.arg):
            raise StuckExpr("application head is not a function value")
        fv = to_val(fn)
        if not isinstance(fv, ClosV):
            raise StuckExpr("application head is not a function value")
        body = fv.body
        if fv.binder is not None:
            body = subst(body, fv.binder, to_val(red.arg))
        if fv.self_name is not None:
            body = subst(body, fv.self_name, fv)
        return body
    if isinstance(red, Let):
        if red.binder is None:
            return red.body
        return subst(red.body, red.binder, to_val(red.bound))
    if isinstance(red, If):
        c = to_val(red.cond)
        if isinstance(c, BoolV):
            return red.then if c.value else red.els
        raise StuckExpr("if condition is not a boolean")
    if isinstance(red, BinOp):
        return ValE(_binop_vals(red.op, to_val(red.left), to_val(red.right)))
    if isinstance(red, Pair):
        return ValE(PairV(to_val(red.left), to_val(red.right)))
    if isinstance(red, Fst):
        v = to_val(red.arg)
        if isinstance(v, PairV):
            return ValE(v.fst)
        raise StuckExpr("Fst of a non-pair")
    if isinstance(red, Snd):
        v = to_val(red.arg)
        if isinstance(v, PairV):
            return ValE(v.snd)
        raise StuckExpr("Snd of a non-pair")
    if isinstance(red, Seq):
        return red.second
    if isinstance(red, Var):
        raise StuckExpr(f"unbound variable {red.name!r}")
    if isinstance(red, (Load, Store, Alloc, Par)):
        return None
    if isinstance(red, Fork):
        raise StuckExpr("fork is not executable")
    raise TypeError(red)


def pure_step(e: Expr) -> Expr | None:
    """One pure reduction step anywhere in evaluation position, or None."""
    d = decompose(e)
    if d is None:
        return None
    ctx, red = d
    stepped = head_pure_step(red)
    if stepped is None:
        return None
    return plug(ctx, stepped)


# ---------------------------------------------------------------------------
# the concrete interpreter (oracle)


@dataclass
class Heap:
    cells: dict[str, Val] = field(default_factory=dict)
    _next: int = 0

    def fresh(self) -> str:
        while True:
            name = f"l{self._next}"
            self._next += 1
            if name not in self.cells:
                return name

    def copy(self) -> "Heap":
        return Heap(dict(self.cells), self._next)


def interp(e: Expr, heap: dict[str, Val] | Heap, fuel: int = 100_000) -> tuple[Val, dict[str, Val]]:
    """Deterministic big-step evaluation; Par runs left then right."""
    h = heap if isinstance(heap, Heap) else Heap(dict(heap))
    v = _run(e, h, fuel)
    return v, h.cells


def _concrete(v: Val) -> Val:
    if isinstance(v, SymV):
        raise StuckExpr(f"symbolic value {v.term} in concrete execution")
    return v


def _run(e: Expr, h: Heap, fuel: int) -> Val:
    steps = 0
    while True:
        steps += 1
        if steps > fuel:
            raise StuckExpr("out of fuel")
        if is_value(e):
            return _concrete(to_val(e))
        d = decompose(e)
        assert d is not None
        ctx, red = d
        if isinstance(red, Load):
            loc = _concrete(to_val(red.arg))
            if not isinstance(loc, LocV):
                raise StuckExpr("load of a non-location")
            if loc.name not in h.cells:
                raise MissingLocation(loc.name)
            e = plug(ctx, ValE(h.cells[loc.name]))
        elif isinstance(red, Store):
            loc = _concrete(to_val(red.dst))
            if not isinstance(loc, LocV):
                raise StuckExpr("store to a non-location")
            if loc.name not in h.cells:
                raise MissingLocation(loc.name)
            h.cells[loc.name] = _concrete(to_val(red.src))
            e = plug(ctx, ValE(UnitV()))
        elif isinstance(red, Alloc):
            name = h.fresh()
            h.cells[name] = _concrete(to_val(red.arg))
            e = plug(ctx, ValE(LocV(name)))
        elif isinstance(red, Par):
            v1 = _run(red.left, h, fuel)
            v2 = _run(red.right, h, fuel)
            e = plug(ctx, ValE(PairV(v1, v2)))
        else:
            stepped = head_pure_step(red)
            if stepped is None:
                raise StuckExpr("no step for head redex")
            e = plug(ctx, stepped)


# ---------------------------------------------------------------------------
# rendering

_BINOP_PREC = {"=": 3, "≤": 3, "<": 3, "+": 4, "-": 4, "*": 5}
# levels: 0 seq ;; | 1 par ||| | 2 store <- | 3 cmp | 4 add | 5 mul | 6 prefix | 7 app | 8 atom


def render_val(v: Val, sorts=None) -> str:
    if isinstance(v, IntV):
        return f"#{v.value}"
    if isinstance(v, BoolV):
        return "#true" if v.value else "#false"
    if isinstance(v, UnitV):
        return "#()"
    if isinstance(v, LocV):
        return f"#{v.name}"
    if isinstance(v, PairV):
        return f"({render_val(v.fst, sorts)}, {render_val(v.snd, sorts)})"
    if isinstance(v, SymV):
        return render_value_term(v.term, sorts)
    if isinstance(v, ClosV):
        inner = Rec(v.self_name, v.binder, v.body)
        return render_expr(inner, sorts, 8)
    raise TypeError(v)


def render_expr(e: Expr, sorts=None, prec: int = 0) -> str:
    def paren(s: str, lvl: int) -> str:
        return f"({s})" if lvl < prec else s

    if isinstance(e, ValE):
        return render_val(e.value, sorts)
    if isinstance(e, Var):
        return f'"{e.name}"'
    if isinstance(e, Rec):
        b = f'"{e.binder}"' if e.binder is not None else "<>"
        if e.self_name is None:
            return paren(f"λ: {b}, {render_expr(e.body, sorts, 0)}", 0)
        return paren(f'rec: "{e.self_name}" {b} := {render_expr(e.body, sorts, 0)}', 0)
    if isinstance(e, App):
        return paren(f"{render_expr(e.fn, sorts, 7)} {render_expr(e.arg, sorts, 8)}", 7)
    if isinstance(e, DefApp):
        if not e.args:
            return e.name
        args = " ".join(render_term(a, sorts, 99) for a in e.args)
        return paren(f"{e.name} {args}", 7)
    if isinstance(e, Let):
        b = f'"{e.binder}"' if e.binder is not None else "<>"
        return paren(
            f"let: {b} := {render_expr(e.bound, sorts, 1)} in {render_expr(e.body, sorts, 0)}", 0
        )
    if isinstance(e, If):
        return paren(
            f"if: {render_expr(e.cond, sorts, 1)} then {render_expr(e.then, sorts, 1)} "
            f"else {render_expr(e.els, sorts, 1)}",
            0,
        )
    if isinstance(e, BinOp):
        p = _BINOP_PREC[e.op]
        return paren(
            f"{render_expr(e.left, sorts, p)} {e.op} {render_expr(e.right, sorts, p + 1)}", p
        )
    if isinstance(e, Pair):
        return f"({render_expr(e.left, sorts, 0)}, {render_expr(e.right, sorts, 0)})"
    if isinstance(e, Fst):
        return paren(f"Fst {render_expr(e.arg, sorts, 8)}", 7)
    if isinstance(e, Snd):
        return paren(f"Snd {render_expr(e.arg, sorts, 8)}", 7)
    if isinstance(e, Alloc):
        return paren(f"ref {render_expr(e.arg, sorts, 8)}", 6)
    if isinstance(e, Load):
        return paren(f"!{render_expr(e.arg, sorts, 8)}", 6)
    if isinstance(e, Store):
        return paren(f"{render_expr(e.dst, sorts, 3)} <- {render_expr(e.src, sorts, 3)}", 2)
    if isinstance(e, Seq):
        return paren(f"{render_expr(e.first, sorts, 1)};; {render_expr(e.second, sorts, 0)}", 0)
    if isinstance(e, Par):
        return paren(f"{render_expr(e.left, sorts, 2)} ||| {render_expr(e.right, sorts, 2)}", 1)
    if isinstance(e, Fork):
        return paren(f"fork {render_expr(e.arg, sorts, 8)}", 7)
    raise TypeError(e)
