"""Surface syntax for expressions, terms and propositions.

Both the unicode spellings from the listings (λ:, ↦, ⌜⌝, ∗, -∗, ∃, ▷, ●E)
and documented ASCII fallbacks (fun:, |->, [! !], *, -*, exists, |>, auth)
are accepted.  See docs/grammar.md for the EBNF.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import lang, props
from .terms import BinT, BoolLit, IntLit, PairT, Sort, SORT_NAMES, Term, TVar, UnitLit


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Tok:
    kind: str  # INT IDENT STRING SYM EOF
    value: str
    line: int
    col: int


_SYMBOLS = [
    "{{{", "}}}", "|==>", "|||", "-∗", "-*", "->", "|->", "|>", ";;", "<-",
    "<=", ":=", "{{", "}}", "[!", "!]", "<>", "↦", "⌜", "⌝", "∃", "∀", "▷",
    "∗", "∧", "∨", "→", "¬", "●E", "◯E", "λ", "\\", "/\\", "\\/", "~", "(",
    ")", "[", "]", "{", "}", ",", ";", ":", "=", "≤", "<", ">", "+", "-",
    "*", "!", "#", "%", "&", "|", ".", "⟨", "⟩", "⊢", "ε",
]


def _is_ident_start(c: str) -> bool:
    return c == "_" or (c.isalpha() and c not in "λε")


def _is_ident_char(c: str) -> bool:
    return c == "_" or c == "'" or c.isdigit() or (c.isalpha() and c not in "λε")


def tokenize(text: str, line0: int = 1) -> list[Tok]:
    toks: list[Tok] = []
    i, line, col = 0, line0, 1
    n = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = text[i]
        if c.isspace():
            advance(1)
            continue
        if text.startswith("(*", i):
            depth, j = 1, i + 2
            while j < n and depth:
                if text.startswith("(*", j):
                    depth += 1
                    j += 2
                elif text.startswith("*)", j):
                    depth -= 1
                    j += 2
                else:
                    j += 1
            advance(j - i)
            continue
        if text.startswith("|={", i):  # any mask form collapses to the update token
            j = text.find("}=>", i)
            if j < 0:
                raise ParseError("unterminated |={...}=>", line, col)
            toks.append(Tok("SYM", "|==>", line, col))
            advance(j + 3 - i)
            continue
        if c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise ParseError("unterminated string", line, col)
            toks.append(Tok("STRING", text[i + 1 : j], line, col))
            advance(j + 1 - i)
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Tok("INT", text[i:j], line, col))
            advance(j - i)
            continue
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            toks.append(Tok("IDENT", text[i:j], line, col))
            advance(j - i)
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Tok("SYM", sym, line, col))
                advance(len(sym))
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Tok("EOF", "", line, col))
    return toks


_NORMALIZE = {
    "-*": "-∗", "|->": "↦", "|>": "▷", "<=": "≤", "/\\": "∧", "\\/": "∨",
    "~": "¬", "->": "→", "\\": "λ",
}


@dataclass
class Env:
    """Name resolution context for parsing."""

    expr_defs: dict[str, "object"] = field(default_factory=dict)  # name -> DefinitionItem
    prop_defs: dict[str, "object"] = field(default_factory=dict)
    sorts: dict[str, Sort] = field(default_factory=dict)

    def child(self, extra: dict[str, Sort]) -> "Env":
        merged = dict(self.sorts)
        merged.update(extra)
        return Env(self.expr_defs, self.prop_defs, merged)


class Parser:
    def __init__(self, toks: list[Tok], env: Env | None = None):
        self.toks = toks
        self.pos = 0
        self.env = env or Env()
        self._hash_embedded: set[str] = set()

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Tok:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.peek()
        self.pos += 1
        return t

    def at_sym(self, *syms: str) -> bool:
        t = self.peek()
        if t.kind != "SYM":
            return False
        v = _NORMALIZE.get(t.value, t.value)
        return v in syms or t.value in syms

    def at_ident(self, *names: str) -> bool:
        t = self.peek()
        return t.kind == "IDENT" and (not names or t.value in names)

    def eat_sym(self, sym: str) -> Tok:
        if not self.at_sym(sym):
            t = self.peek()
            raise ParseError(f"expected {sym!r}, found {t.value!r}", t.line, t.col)
        return self.next()

    def eat_ident(self, *names: str) -> str:
        t = self.peek()
        if t.kind != "IDENT" or (names and t.value not in names):
            raise ParseError(f"expected identifier, found {t.value!r}", t.line, t.col)
        self.next()
        return t.value

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    def skip_scope(self) -> None:
        """Skip %I/%E/%Z/%V scope annotations."""
        while self.at_sym("%") and self.peek(1).kind == "IDENT" and self.peek(1).value in (
            "I", "E", "Z", "V",
        ):
            self.next()
            self.next()

    def dotted_ident(self) -> str:
        name = self.eat_ident()
        while self.at_sym(".") and self.peek(1).kind == "IDENT":
            self.next()
            name += "." + self.eat_ident()
        return name

    # -- terms -------------------------------------------------------------

    def term(self) -> Term:
        return self.term_add()

    def term_add(self) -> Term:
        t = self.term_mul()
        while self.at_sym("+", "-"):
            op = self.next().value
            t = BinT(op, t, self.term_mul())
        return t

    def term_mul(self) -> Term:
        t = self.term_atom()
        while self.at_sym("*", "∗") and self.peek().value == "*":
            self.next()
            t = BinT("*", t, self.term_atom())
        return t

    def term_atom(self) -> Term:
        t = self.peek()
        if t.kind == "INT":
            self.next()
            return IntLit(int(t.value))
        if self.at_sym("-") and self.peek(1).kind == "INT":
            self.next()
            return IntLit(-int(self.next().value))
        if self.at_ident("true"):
            self.next()
            return BoolLit(True)
        if self.at_ident("false"):
            self.next()
            return BoolLit(False)
        if t.kind == "IDENT":
            self.next()
            return TVar(t.value)
        if self.at_sym("#"):
            self.next()
            return self.hash_literal_term()
        if self.at_sym("("):
            self.next()
            if self.at_sym(")"):
                self.next()
                return UnitLit()
            inner = self.term()
            if self.at_sym(","):
                self.next()
                snd = self.term()
                self.eat_sym(")")
                self.skip_type_ascription()
                return PairT(inner, snd)
            self.eat_sym(")")
            self.skip_type_ascription()
            return inner
        self.fail(f"expected a term, found {t.value!r}")

    def skip_type_ascription(self) -> None:
        self.skip_scope()

    def hash_literal_term(self) -> Term:
        """The body of a #-literal, as a term (for value positions)."""
        t = self.peek()
        if t.kind == "INT":
            self.next()
            return IntLit(int(t.value))
        if self.at_ident("true"):
            self.next()
            return BoolLit(True)
        if self.at_ident("false"):
            self.next()
            return BoolLit(False)
        if t.kind == "IDENT":
            self.next()
            self._hash_embedded.add(t.value)
            return TVar(t.value)
        if self.at_sym("("):
            self.next()
            if self.at_sym(")"):
                self.next()
                return UnitLit()
            inner = self.term_with_ascription()
            self.eat_sym(")")
            return inner
        if self.at_sym("-"):
            self.next()
            lit = self.peek()
            if lit.kind == "INT":
                self.next()
                return IntLit(-int(lit.value))
        self.fail("expected a literal after '#'")

    def term_with_ascription(self) -> Term:
        t = self.term()
        if self.at_sym(":"):  # (0 : ZO) style ascriptions are recorded and dropped
            self.next()
            self.eat_ident()
        return t

    def value_term(self) -> Term:
        """A term in value position: #lit, bare val-variable, or pair."""
        if self.at_sym("#"):
            self.next()
            return self.hash_literal_term()
        if self.at_sym("("):
            self.next()
            fst = self.value_term()
            self.eat_sym(",")
            snd = self.value_term()
            self.eat_sym(")")
            self.skip_scope()
            return PairT(fst, snd)
        if self.peek().kind == "IDENT":
            return TVar(self.next().value)
        self.fail("expected a value")

    # -- expressions ---------------------------------------------------------

    def expr(self) -> lang.Expr:
        return self.expr_seq()

    def expr_seq(self) -> lang.Expr:
        e = self.expr_par()
        if self.at_sym(";;"):
            self.next()
            return lang.Seq(e, self.expr_seq())
        return e

    def expr_par(self) -> lang.Expr:
        e = self.expr_store()
        while self.at_sym("|||"):
            self.next()
            e = lang.Par(e, self.expr_store())
        return e

    def expr_store(self) -> lang.Expr:
        e = self.expr_cmp()
        if self.at_sym("<-"):
            self.next()
            return lang.Store(e, self.expr_cmp())
        return e

    def expr_cmp(self) -> lang.Expr:
        e = self.expr_add()
        if self.at_sym("=", "≤", "<"):
            op = _NORMALIZE.get(self.peek().value, self.peek().value)
            self.next()
            return lang.BinOp(op, e, self.expr_add())
        return e

    def expr_add(self) -> lang.Expr:
        e = self.expr_mul()
        while self.at_sym("+", "-"):
            op = self.next().value
            e = lang.BinOp(op, e, self.expr_mul())
        return e

    def expr_mul(self) -> lang.Expr:
        e = self.expr_app()
        while self.peek().kind == "SYM" and self.peek().value == "*":
            self.next()
            e = lang.BinOp("*", e, self.expr_app())
        return e

    def expr_app(self) -> lang.Expr:
        e = self.expr_item()
        while self.starts_expr_item():
            e = lang.App(e, self.expr_item())
        return e

    def expr_item(self) -> lang.Expr:
        """A prefix chain applied to one atom: !e, ref e, Fst e, Snd e."""
        if self.at_sym("!"):
            self.next()
            return lang.Load(self.expr_item())
        if self.at_ident("ref"):
            self.next()
            return lang.Alloc(self.expr_item())
        if self.at_ident("Fst"):
            self.next()
            return lang.Fst(self.expr_item())
        if self.at_ident("Snd"):
            self.next()
            return lang.Snd(self.expr_item())
        return self.expr_atom()

    def starts_expr_item(self) -> bool:
        t = self.peek()
        if t.kind == "STRING":
            return True
        if t.kind == "IDENT":
            return t.value not in ("in", "then", "else", "RET")
        return self.at_sym("#", "(", "λ", "!")

    def expr_atom(self) -> lang.Expr:
        t = self.peek()
        if self.at_sym("#"):
            self.next()
            term = self.hash_literal_term()
            return lang.ValE(lang.val_of_term(term, self.env.sorts))
        if t.kind == "STRING":
            self.next()
            return lang.Var(t.value)
        if self.at_sym("λ") or self.at_ident("fun") and self.peek(1).kind == "SYM" and self.peek(1).value == ":":
            self.next()
            self.eat_sym(":")
            binders: list[Optional[str]] = []
            while True:
                if self.peek().kind == "STRING":
                    binders.append(self.next().value)
                elif self.at_sym("<>"):
                    self.next()
                    binders.append(None)
                else:
                    break
            if not binders:
                self.fail("expected a binder after λ:")
            self.eat_sym(",")
            body = self.expr_seq()
            for b in reversed(binders):
                body = lang.Rec(None, b, body)
            return body
        if self.at_ident("rec") and self.peek(1).kind == "SYM" and self.peek(1).value == ":":
            self.next()
            self.next()
            self_name = self.next().value if self.peek().kind == "STRING" else self.fail("expected name")
            binder: Optional[str]
            if self.peek().kind == "STRING":
                binder = self.next().value
            elif self.at_sym("<>"):
                self.next()
                binder = None
            else:
                self.fail("expected a binder")
            self.eat_sym(":=")
            return lang.Rec(self_name, binder, self.expr_seq())
        if self.at_ident("let") and self.peek(1).kind == "SYM" and self.peek(1).value == ":":
            self.next()
            self.next()
            if self.peek().kind == "STRING":
                binder = self.next().value
            elif self.at_sym("<>"):
                self.next()
                binder = None
            else:
                self.fail("expected a binder")
            self.eat_sym(":=")
            bound = self.expr_par()
            self.eat_ident("in")
            body = self.expr_seq()
            return lang.Let(binder, bound, body)
        if self.at_ident("if") and self.peek(1).kind == "SYM" and self.peek(1).value == ":":
            self.next()
            self.next()
            cond = self.expr_par()
            self.eat_ident("then")
            then = self.expr_par()
            self.eat_ident("else")
            els = self.expr_par()
            return lang.If(cond, then, els)
        if t.kind == "IDENT":
            name = self.next().value
            if name in self.env.expr_defs:
                item = self.env.expr_defs[name]
                args = []
                for _ in item.params:  # type: ignore[attr-defined]
                    args.append(self.def_arg_term())
                return make_defapp(item, tuple(args), self.env)
            sort = self.env.sorts.get(name)
            if sort == Sort.LOC:
                return lang.ValE(lang.LocV(name))
            return lang.ValE(lang.SymV(TVar(name)))
        if self.at_sym("("):
            self.next()
            if self.at_sym(")"):
                self.next()
                return lang.ValE(lang.UnitV())
            e = self.expr_seq()
            if self.at_sym(","):
                self.next()
                snd = self.expr_seq()
                self.eat_sym(")")
                self.skip_scope()
                return lang.Pair(e, snd)
            self.eat_sym(")")
            self.skip_scope()
            return e
        self.fail(f"expected an expression, found {t.value!r}")

    def def_arg_term(self) -> Term:
        t = self.peek()
        if t.kind == "IDENT":
            self.next()
            return TVar(t.value)
        if t.kind == "INT":
            self.next()
            return IntLit(int(t.value))
        if self.at_sym("#"):
            self.next()
            return self.hash_literal_term()
        if self.at_sym("("):
            self.next()
            inner = self.term_with_ascription()
            self.eat_sym(")")
            return inner
        self.fail("expected a definition argument")

    # -- pure formulas -------------------------------------------------------

    def form(self) -> props.PureForm:
        f = self.form_or()
        if self.at_sym("→"):
            self.next()
            return props.ImplF(f, self.form())
        return f

    def form_or(self) -> props.PureForm:
        f = self.form_and()
        while self.at_sym("∨"):
            self.next()
            f = props.OrF(f, self.form_and())
        return f

    def form_and(self) -> props.PureForm:
        f = self.form_atom()
        while self.at_sym("∧"):
            self.next()
            f = props.AndF(f, self.form_atom())
        return f

    def form_atom(self) -> props.PureForm:
        if self.at_sym("¬"):
            self.next()
            return props.NotF(self.form_atom())
        if self.at_ident("True"):
            self.next()
            return props.TrueF()
        if self.at_ident("False"):
            self.next()
            return props.FalseF()
        if self.at_sym("(") and self._paren_is_formula():
            self.next()
            f = self.form()
            self.eat_sym(")")
            self.skip_scope()
            return f
        left = self.term()
        if self.at_sym("="):
            self.next()
            return props.Eq(left, self.term())
        if self.at_sym("≤"):
            self.next()
            return props.Le(left, self.term())
        if self.at_sym("<"):
            self.next()
            return props.Lt(left, self.term())
        self.fail("expected a comparison")

    def _paren_is_formula(self) -> bool:
        # distinguish (a + b) = c [term parens] from (a = b) [formula parens]
        depth = 0
        k = self.pos
        while k < len(self.toks):
            t = self.toks[k]
            if t.kind == "SYM" and t.value == "(":
                depth += 1
            elif t.kind == "SYM" and t.value == ")":
                depth -= 1
                if depth == 0:
                    return False
            elif depth == 1 and t.kind == "SYM" and t.value in ("=", "≤", "<", "<="):
                return True
            k += 1
        return False

    # -- propositions ----------------------------------------------------------

    def prop(self) -> props.Prop:
        return self.prop_quant()

    def prop_quant(self) -> props.Prop:
        if self.at_sym("∃") or self.at_ident("exists"):
            self.next()
            binders = self.prop_binders()
            self.eat_sym(",")
            body = self.prop_quant_with(binders)
            for name, sort in reversed(binders):
                body = props.Exists(name, sort, body)
            return body
        if self.at_sym("∀") or self.at_ident("forall"):
            self.next()
            binders = self.prop_binders()
            self.eat_sym(",")
            body = self.prop_quant_with(binders)
            for name, sort in reversed(binders):
                if sort is Sort.VAL and _uses_pred(body, name):
                    sort = Sort.PRED
                body = props.Forall(name, sort, body)
            return body
        return self.prop_wand()

    def prop_quant_with(self, binders: list[tuple[str, Sort]]) -> props.Prop:
        saved = self.env
        self.env = self.env.child({n: s for n, s in binders})
        try:
            return self.prop_quant()
        finally:
            self.env = saved

    def prop_binders(self) -> list[tuple[str, Sort]]:
        out: list[tuple[str, Sort]] = []
        while True:
            if self.at_sym("("):
                self.next()
                names = [self.eat_ident()]
                while self.peek().kind == "IDENT":
                    names.append(self.eat_ident())
                self.eat_sym(":")
                sort = self.parse_sort()
                self.eat_sym(")")
                out.extend((n, sort) for n in names)
            elif self.peek().kind == "IDENT" and not self.at_ident("exists", "forall"):
                names = [self.eat_ident()]
                while self.peek().kind == "IDENT":
                    names.append(self.eat_ident())
                if self.at_sym(":"):
                    self.next()
                    sort = self.parse_sort()
                else:
                    sort = Sort.VAL
                out.extend((n, sort) for n in names)
            else:
                break
            if not (self.at_sym("(") or self.peek().kind == "IDENT"):
                break
        if not out:
            self.fail("expected binders")
        return out

    def parse_sort(self) -> Sort:
        name = self.eat_ident()
        if name not in SORT_NAMES:
            self.fail(f"unknown sort {name!r}")
        return SORT_NAMES[name]

    def prop_wand(self) -> props.Prop:
        p = self.prop_conj()
        if self.at_sym("-∗"):
            self.next()
            return props.Wand(p, self.prop_quant())
        if self.at_sym("→"):
            self.next()
            return props.Impl(p, self.prop_quant())
        return p

    def prop_conj(self) -> props.Prop:
        p = self.prop_sep()
        while self.at_sym("∧", "∨"):
            op = _NORMALIZE.get(self.peek().value, self.peek().value)
            self.next()
            q = self.prop_sep()
            p = props.And(p, q) if op == "∧" else props.Or(p, q)
        return p

    def prop_sep(self) -> props.Prop:
        p = self.prop_atom()
        if self.at_sym("∗") or (self.peek().kind == "SYM" and self.peek().value == "*"):
            self.next()
            return props.Sep(p, self.prop_sep())
        return p

    def prop_atom(self) -> props.Prop:
        t = self.peek()
        if self.at_sym("⟨"):
            self.fail("atomic triples ⟨P⟩ e ⟨Q⟩ are recognized but unsupported")
        # bare pure formulas (Coq-level statements without the ⌜⌝ embedding)
        if t.kind == "INT" or (
            t.kind == "IDENT"
            and t.value not in ("True", "False", "WP", "inv", "own", "exists", "forall")
            and t.value not in self.env.prop_defs
        ):
            save = self.pos
            try:
                return props.Pure(self.form())
            except ParseError:
                self.pos = save
        if self.at_sym("⌜"):
            self.next()
            f = self.form()
            self.eat_sym("⌝")
            self.skip_scope()
            return props.Pure(f)
        if self.at_sym("[!"):
            self.next()
            f = self.form()
            self.eat_sym("!]")
            self.skip_scope()
            return props.Pure(f)
        if self.at_sym("▷"):
            self.next()
            return props.Later(self.prop_atom())
        if self.at_sym("|==>"):
            self.next()
            return props.Upd(self.prop_atom())
        if self.at_ident("True"):
            self.next()
            return props.TrueP()
        if self.at_ident("False"):
            self.next()
            return props.FalseP()
        if self.at_sym("{{{"):
            return self.triple()
        if self.at_ident("WP"):
            self.next()
            expr = self.expr_seq()
            self.eat_sym("{{")
            binder = self.eat_ident()
            self.eat_sym(",")
            saved = self.env
            self.env = self.env.child({binder: Sort.VAL})
            try:
                post = self.prop()
            finally:
                self.env = saved
            self.eat_sym("}}")
            return props.WP(expr, binder, post)
        if self.at_ident("inv"):
            self.next()
            ns = self.dotted_ident()
            body = self.prop_atom()
            return props.Inv(ns, body)
        if self.at_ident("own"):
            self.next()
            gname = TVar(self.eat_ident())
            self.eat_sym("(")
            if self.at_sym("●E"):
                kind = "auth"
                self.next()
            elif self.at_sym("◯E"):
                kind = "frag"
                self.next()
            elif self.at_ident("auth"):
                kind = "auth"
                self.next()
            elif self.at_ident("frag"):
                kind = "frag"
                self.next()
            else:
                self.fail("expected ●E/◯E (auth/frag)")
            value = self.term_with_ascription()
            self.eat_sym(")")
            return props.Own(gname, kind, value)
        if t.kind == "IDENT":
            name = self.next().value
            if name in self.env.prop_defs:
                item = self.env.prop_defs[name]
                args = []
                for _ in item.params:  # type: ignore[attr-defined]
                    args.append(self.def_arg_term())
                return expand_prop_def(item, tuple(args))
            if self.at_sym("↦"):
                self.next()
                lsort = self.env.sorts.get(name)
                if lsort is not None and lsort not in (Sort.LOC, Sort.VAL):
                    self.fail(f"{name} : {lsort} cannot be on the left of ↦")
                return props.PointsTo(TVar(name), self.value_term())
            if self.at_sym("#", "(") or self.peek().kind == "IDENT":
                arg = self.value_term()
                return props.PredApp(name, arg)
            self.fail(f"unknown proposition {name!r}")
        if self.at_sym("("):
            self.next()
            p = self.prop()
            self.eat_sym(")")
            self.skip_scope()
            return p
        self.fail(f"expected a proposition, found {t.value!r}")

    def triple(self) -> props.Triple:
        self.eat_sym("{{{")
        pre = self.prop()
        self.eat_sym("}}}")
        expr = self.expr_seq()
        self.eat_sym("{{{")
        binders: list[tuple[str, Sort]] = []
        # optional binder prefix:  x y,  or (x : S) …,  closed by RET
        while not self.at_ident("RET"):
            if self.at_sym("("):
                self.next()
                names = [self.eat_ident()]
                while self.peek().kind == "IDENT":
                    names.append(self.eat_ident())
                self.eat_sym(":")
                sort = self.parse_sort()
                self.eat_sym(")")
                binders.extend((n, sort) for n in names)
                if self.at_sym(","):
                    self.next()
            elif self.peek().kind == "IDENT":
                binders.append((self.eat_ident(), Sort.VAL))
                if self.at_sym(","):
                    self.next()
            else:
                self.fail("expected RET in triple postcondition")
        self.eat_ident("RET")
        saved = self.env
        self.env = self.env.child({n: s for n, s in binders})
        try:
            ret = self.value_term()
            self.eat_sym(";")
            post = self.prop()
        finally:
            self.env = saved
        self.eat_sym("}}}")
        # sort inference for bare binders: a #x embedding or arithmetic use
        # marks the binder as an integer, a bare RET binder is a value
        fixed: list[tuple[str, Sort]] = []
        for n, s in binders:
            if s is Sort.VAL and (n in self._hash_embedded or _used_as_int(post, n)):
                fixed.append((n, Sort.INT))
            else:
                fixed.append((n, s))
        return props.Triple(pre, expr, tuple(fixed), ret, post)


def _uses_pred(p: props.Prop, name: str) -> bool:
    if isinstance(p, props.PredApp):
        return p.pred == name
    if isinstance(p, (props.And, props.Or, props.Impl, props.Sep, props.Wand)):
        return _uses_pred(p.left, name) or _uses_pred(p.right, name)
    if isinstance(p, (props.Forall, props.Exists)):
        return p.binder != name and _uses_pred(p.body, name)
    if isinstance(p, (props.Later, props.Upd, props.Inv)):
        return _uses_pred(p.body, name)
    if isinstance(p, props.WP):
        return _uses_pred(p.post, name)
    if isinstance(p, props.Triple):
        return _uses_pred(p.pre, name) or _uses_pred(p.post, name)
    return False


def _used_as_int(p: props.Prop, name: str) -> bool:
    found = False

    def walk_form(f: props.PureForm) -> None:
        nonlocal found
        if isinstance(f, (props.Eq, props.Le, props.Lt)):
            for side in (f.left, f.right):
                if _term_uses_arith(side, name) or (
                    isinstance(f, (props.Le, props.Lt)) and TVar(name) in (f.left, f.right)
                ):
                    found = True
        elif isinstance(f, (props.AndF, props.OrF, props.ImplF)):
            walk_form(f.left)
            walk_form(f.right)
        elif isinstance(f, props.NotF):
            walk_form(f.arg)

    def walk(p: props.Prop) -> None:
        if isinstance(p, props.Pure):
            walk_form(p.form)
        elif isinstance(p, (props.And, props.Or, props.Impl, props.Sep, props.Wand)):
            walk(p.left)
            walk(p.right)
        elif isinstance(p, (props.Forall, props.Exists)):
            if p.binder != name:
                walk(p.body)
        elif isinstance(p, (props.Later, props.Upd)):
            walk(p.body)
        elif isinstance(p, props.Inv):
            walk(p.body)
        elif isinstance(p, props.PointsTo):
            if _term_uses_arith(p.val, name):
                found = True

    walk(p)
    return found


def _term_uses_arith(t: Term, name: str) -> bool:
    if isinstance(t, BinT):
        from .terms import term_vars

        return name in term_vars(t)
    return False


def make_defapp(item, args: tuple[Term, ...], env: Env) -> lang.Expr:
    """Expand an expression definition application."""
    body = item.body
    for (pname, psort), arg in zip(item.params, args):
        body = lang.expr_subst_term(body, pname, arg, env.sorts)
    return lang.DefApp(item.name, args, body)


def expand_prop_def(item, args: tuple[Term, ...]) -> props.Prop:
    body = item.body
    for (pname, _), arg in zip(item.params, args):
        body = props.prop_subst(body, pname, arg)
    return body


# -- public helpers ----------------------------------------------------------


def parse_expr(text: str, env: Env | None = None) -> lang.Expr:
    p = Parser(tokenize(text), env)
    e = p.expr()
    if p.peek().kind != "EOF":
        p.fail("trailing input after expression")
    return e


def parse_prop(text: str, env: Env | None = None) -> props.Prop:
    p = Parser(tokenize(text), env)
    q = p.prop()
    if p.peek().kind != "EOF":
        p.fail("trailing input after proposition")
    return q


def parse_term(text: str, env: Env | None = None) -> Term:
    p = Parser(tokenize(text), env)
    t = p.term()
    if p.peek().kind != "EOF":
        p.fail("trailing input after term")
    return t
