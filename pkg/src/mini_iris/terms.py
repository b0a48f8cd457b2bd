"""Sorts and first-order pure terms.

Terms are the pure (meta-level) expressions that appear inside ⌜φ⌝
formulas, on the right of ↦, as ghost-variable contents and as arguments
of postcondition predicates.  They are shared between the assertion
language and the symbolic values of the program language.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping


class Sort(enum.Enum):
    INT = "Z"
    BOOL = "bool"
    LOC = "loc"
    VAL = "val"
    GNAME = "gname"
    PROP = "iProp"
    PRED = "val → iProp"  # postcondition predicates (kernel-generated only)

    def __str__(self) -> str:
        return self.value


#: binder-annotation spellings accepted in scripts
SORT_NAMES = {
    "Z": Sort.INT,
    "ZO": Sort.INT,  # the OFE-of-Z spelling from ghost-state contexts
    "nat": Sort.INT,
    "bool": Sort.BOOL,
    "loc": Sort.LOC,
    "val": Sort.VAL,
    "gname": Sort.GNAME,
    "iProp": Sort.PROP,
}


class SortError(Exception):
    pass


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class IntLit(Term):
    value: int


@dataclass(frozen=True)
class BoolLit(Term):
    value: bool


@dataclass(frozen=True)
class UnitLit(Term):
    pass


@dataclass(frozen=True)
class TVar(Term):
    name: str


@dataclass(frozen=True)
class BinT(Term):
    op: str  # one of + - *
    left: Term
    right: Term


@dataclass(frozen=True)
class PairT(Term):
    left: Term
    right: Term


def term_vars(t: Term) -> set[str]:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, BinT):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, PairT):
        return term_vars(t.left) | term_vars(t.right)
    return set()


def term_subst(t: Term, x: str, r: Term) -> Term:
    if isinstance(t, TVar):
        return r if t.name == x else t
    if isinstance(t, BinT):
        return fold(BinT(t.op, term_subst(t.left, x, r), term_subst(t.right, x, r)))
    if isinstance(t, PairT):
        return PairT(term_subst(t.left, x, r), term_subst(t.right, x, r))
    return t


def fold(t: Term) -> Term:
    """Constant-fold integer arithmetic; leaves symbolic terms alone."""
    if isinstance(t, BinT):
        l, r = fold(t.left), fold(t.right)
        if isinstance(l, IntLit) and isinstance(r, IntLit):
            if t.op == "+":
                return IntLit(l.value + r.value)
            if t.op == "-":
                return IntLit(l.value - r.value)
            if t.op == "*":
                return IntLit(l.value * r.value)
        return BinT(t.op, l, r)
    if isinstance(t, PairT):
        return PairT(fold(t.left), fold(t.right))
    return t


_PREC = {"+": 1, "-": 1, "*": 2}


def render_term(t: Term, sorts: Mapping[str, Sort] | None = None, prec: int = 0) -> str:
    """Render a term in bare (formula) position, e.g. ``n + 1`` or ``(a, b)``."""
    sorts = sorts or {}
    if isinstance(t, IntLit):
        return str(t.value)
    if isinstance(t, BoolLit):
        return "true" if t.value else "false"
    if isinstance(t, UnitLit):
        return "()"
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, PairT):
        return f"({render_term(t.left, sorts)}, {render_term(t.right, sorts)})"
    if isinstance(t, BinT):
        p = _PREC[t.op]
        s = f"{render_term(t.left, sorts, p)} {t.op} {render_term(t.right, sorts, p + 1)}"
        return f"({s})" if p < prec else s
    raise TypeError(t)


def render_value_term(t: Term, sorts: Mapping[str, Sort] | None = None) -> str:
    """Render a term in value position, e.g. ``#n``, ``#(n + 1)``, ``(#a, #b)``."""
    sorts = sorts or {}
    if isinstance(t, IntLit):
        return f"#{t.value}"
    if isinstance(t, BoolLit):
        return "#true" if t.value else "#false"
    if isinstance(t, UnitLit):
        return "#()"
    if isinstance(t, TVar):
        if sorts.get(t.name) == Sort.VAL:
            return t.name
        return f"#{t.name}"
    if isinstance(t, PairT):
        return f"({render_value_term(t.left, sorts)}, {render_value_term(t.right, sorts)})"
    if isinstance(t, BinT):
        return f"#({render_term(t, sorts)})"
    raise TypeError(t)


def infer_sort(t: Term, sorts: Mapping[str, Sort]) -> Sort | None:
    """Best-effort sort of a term; None when it cannot be determined."""
    if isinstance(t, IntLit):
        return Sort.INT
    if isinstance(t, BoolLit):
        return Sort.BOOL
    if isinstance(t, UnitLit):
        return Sort.VAL
    if isinstance(t, PairT):
        return Sort.VAL
    if isinstance(t, BinT):
        return Sort.INT
    if isinstance(t, TVar):
        return sorts.get(t.name)
    return None
