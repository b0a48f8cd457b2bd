"""Coq-like proof-script files: parsing, execution, reports.

A script is a sequence of header directives (recorded verbatim),
definitions, and lemmas each followed by one Proof…Qed block.  Running a
script replays every proof through the tactic engine and yields a
`CheckReport` with one verdict per lemma plus the rendered state trace.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from . import engine, lang, props, pure_solver, wp
from .engine import GoalTree, IPat, ProofState, TacticFailure, parse_ipat
from .parser import Env, ParseError, Parser, tokenize
from .props import Prop, Triple
from .terms import Sort, Term

HEADER_KEYWORDS = (
    "From", "Require", "Set", "Context", "Notation", "Section", "End",
    "Import", "Export", "Local", "Open", "Opaque", "Hint", "Implicit",
)


@dataclass
class HeaderDirective:
    text: str
    line: int


@dataclass
class DefinitionItem:
    name: str
    params: list[tuple[str, Sort]]
    kind: str  # "expr" | "val" | "prop"
    body: object
    line: int


@dataclass
class Sentence:
    kind: str  # tactic | open | close | bullet
    text: str
    line: int
    span: tuple[int, int]


@dataclass
class LemmaItem:
    name: str
    binders: list[tuple[str, Sort]]
    statement: Prop
    proof: list[Sentence]
    line: int


@dataclass
class Script:
    source: str
    headers: list[HeaderDirective]
    definitions: list[DefinitionItem]
    lemmas: list[LemmaItem]

    def tactic_sentences(self) -> list[tuple[str, Sentence]]:
        return [(lem.name, s) for lem in self.lemmas for s in lem.proof if s.kind == "tactic"]

    def mutants(self) -> list[tuple[str, str, str]]:
        """(lemma, deleted sentence, mutated source) per tactic sentence."""
        out = []
        for lem, s in self.tactic_sentences():
            mutated = self.source[: s.span[0]] + self.source[s.span[1] :]
            out.append((lem, s.text, mutated))
        return out

    def strip_headers(self) -> str:
        text = self.source
        for h in sorted(self.headers, key=lambda h: -h.line):
            text = text.replace(h.text, "", 1)
        return text


# ---------------------------------------------------------------------------
# item scanner


def _scan_items(text: str) -> list[tuple[str, str, int, tuple[int, int]]]:
    """Split source into raw items: (kind, content, line, (start, end))."""
    items = []
    n = len(text)
    i = 0
    line = 1

    def skip_ws(i: int, line: int) -> tuple[int, int]:
        while i < n:
            if text[i] == "\n":
                line += 1
                i += 1
            elif text[i].isspace():
                i += 1
            elif text.startswith("(*", i):
                depth, j = 1, i + 2
                while j < n and depth:
                    if text.startswith("(*", j):
                        depth += 1
                        j += 2
                    elif text.startswith("*)", j):
                        depth -= 1
                        j += 2
                    else:
                        if text[j] == "\n":
                            line += 1
                        j += 1
                i = j
            else:
                break
        return i, line

    while True:
        i, line = skip_ws(i, line)
        if i >= n:
            break
        start, start_line = i, line
        c = text[i]
        if c == "{":
            items.append(("open", "{", line, (i, i + 1)))
            i += 1
            continue
        if c == "}":
            items.append(("close", "}", line, (i, i + 1)))
            i += 1
            continue
        if c in "-+*":
            j = i
            while j < n and text[j] == c:
                j += 1
            if j < n and text[j].isspace():
                items.append(("bullet", text[i:j], line, (i, j)))
                i = j
                continue
        # a sentence: scan to '.' followed by whitespace/EOF, respecting strings
        j = i
        while j < n:
            ch = text[j]
            if ch == '"':
                j += 1
                while j < n and text[j] != '"':
                    j += 1
                j += 1
                continue
            if text.startswith("(*", j):
                depth, k = 1, j + 2
                while k < n and depth:
                    if text.startswith("(*", k):
                        depth += 1
                        k += 2
                    elif text.startswith("*)", k):
                        depth -= 1
                        k += 2
                    else:
                        k += 1
                j = k
                continue
            if ch == ".":
                if j + 1 >= n or text[j + 1].isspace():
                    break
            if ch == "\n":
                line += 1
            j += 1
        if j >= n:
            raise ParseError("unterminated sentence (missing '.')", start_line, 1)
        content = text[start:j]
        items.append(("sentence", content.strip(), start_line, (start, j + 1)))
        i = j + 1
    return items


def parse_script(text: str) -> Script:
    items = _scan_items(text)
    headers: list[HeaderDirective] = []
    definitions: list[DefinitionItem] = []
    lemmas: list[LemmaItem] = []
    env = Env()

    i = 0
    while i < len(items):
        kind, content, line, span = items[i]
        if kind != "sentence":
            raise ParseError(f"unexpected {content!r} outside a proof", line, 1)
        head = content.split(None, 1)[0] if content.split() else ""
        if head in HEADER_KEYWORDS:
            headers.append(HeaderDirective(text[span[0] : span[1]], line))
            i += 1
            continue
        if head == "Definition":
            d = _parse_definition(content, line, env)
            definitions.append(d)
            if d.kind in ("expr", "val"):
                env.expr_defs[d.name] = d
            else:
                env.prop_defs[d.name] = d
            i += 1
            continue
        if head in ("Lemma", "Theorem"):
            name, binders, statement = _parse_lemma_header(content, line, env)
            i += 1
            if i >= len(items) or not items[i][1].startswith("Proof"):
                raise ParseError(f"Lemma {name} must be followed by Proof", line, 1)
            i += 1
            proof: list[Sentence] = []
            closed = False
            while i < len(items):
                k2, c2, l2, sp2 = items[i]
                if k2 == "sentence" and c2 == "Qed":
                    closed = True
                    i += 1
                    break
                if k2 == "sentence":
                    proof.append(Sentence("tactic", c2, l2, sp2))
                else:
                    proof.append(Sentence(k2, c2, l2, sp2))
                i += 1
            if not closed:
                raise ParseError(f"missing Qed for {name}", line, 1)
            lemmas.append(LemmaItem(name, binders, statement, proof, line))
            continue
        raise ParseError(f"unrecognized item {head!r}", line, 1)
    return Script(text, headers, definitions, lemmas)


def _binder_groups(p: Parser) -> list[tuple[str, Sort]]:
    out: list[tuple[str, Sort]] = []
    while p.at_sym("("):
        p.next()
        names = [p.eat_ident()]
        while p.peek().kind == "IDENT":
            names.append(p.eat_ident())
        p.eat_sym(":")
        sort_name = p.eat_ident()
        from .terms import SORT_NAMES

        if sort_name == "namespace":
            sort = Sort.GNAME  # namespaces are mere identifiers; sort is unused
        elif sort_name in SORT_NAMES:
            sort = SORT_NAMES[sort_name]
        else:
            p.fail(f"unknown sort {sort_name!r}")
        p.eat_sym(")")
        out.extend((nm, sort) for nm in names)
    return out


def _parse_definition(content: str, line: int, env: Env) -> DefinitionItem:
    p = Parser(tokenize(content, line), env)
    p.eat_ident("Definition")
    name = p.eat_ident()
    params = _binder_groups(p)
    p.eat_sym(":")
    kind = p.eat_ident()
    if kind not in ("expr", "val", "iProp"):
        p.fail(f"definitions must be expr, val or iProp, not {kind!r}")
    p.eat_sym(":=")
    saved = p.env
    p.env = p.env.child({n: s for n, s in params})
    try:
        body = p.expr() if kind in ("expr", "val") else p.prop()
    finally:
        p.env = saved
    if p.peek().kind != "EOF":
        p.fail("trailing input after definition body")
    if kind in ("expr", "val"):
        try:
            lang.check_par_placement(body)
        except lang.StuckExpr as e:
            raise ParseError(str(e), line, 1)
    return DefinitionItem(name, params, "prop" if kind == "iProp" else kind, body, line)


def _parse_lemma_header(content: str, line: int, env: Env):
    p = Parser(tokenize(content, line), env)
    p.eat_ident("Lemma", "Theorem")
    name = p.eat_ident()
    binders = _binder_groups(p)
    p.eat_sym(":")
    saved = p.env
    p.env = p.env.child({n: s for n, s in binders})
    try:
        statement = p.prop()
    finally:
        p.env = saved
    if p.peek().kind != "EOF":
        p.fail("trailing input after lemma statement")
    if isinstance(statement, props.Triple):
        try:
            lang.check_par_placement(statement.expr)
        except lang.StuckExpr as e:
            raise ParseError(str(e), line, 1)
    return name, binders, statement


# ---------------------------------------------------------------------------
# tactic sentences


@dataclass
class Tac:
    name: str
    args: dict = field(default_factory=dict)


def _split_chain(text: str) -> list[str]:
    parts: list[str] = []
    depth = 0
    cur = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == '"':
            cur.append(c)
            i += 1
            while i < len(text) and text[i] != '"':
                cur.append(text[i])
                i += 1
            if i < len(text):
                cur.append('"')
                i += 1
            continue
        if c in "([":
            depth += 1
        elif c in ")]":
            depth -= 1
        if c == ";" and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
            i += 1
            continue
        cur.append(c)
        i += 1
    parts.append("".join(cur).strip())
    return [p for p in parts if p]


def _bracket_groups(s: str) -> list[list[str]]:
    """Parse a specialization string like "[Ha Hb] []" into name groups."""
    groups: list[list[str]] = []
    i = 0
    while i < len(s):
        if s[i].isspace():
            i += 1
            continue
        if s[i] != "[":
            raise TacticFailure("with", f"expected '[' in pattern {s!r}", "BadPattern")
        j = s.index("]", i)
        names = s[i + 1 : j].split()
        groups.append(names)
        i = j + 1
    return groups


class ScriptEnv:
    """Definitions and proved lemmas available while running a script."""

    def __init__(self) -> None:
        self.env = Env()
        self.lemmas: dict[str, tuple[list[tuple[str, Sort]], Prop]] = {}

    def add_definition(self, d: DefinitionItem) -> None:
        if d.kind in ("expr", "val"):
            self.env.expr_defs[d.name] = d
        else:
            self.env.prop_defs[d.name] = d

    def add_lemma(self, name: str, binders: list[tuple[str, Sort]], statement: Prop) -> None:
        self.lemmas[name] = (binders, statement)


def parse_tactic(text: str, senv: ScriptEnv, sorts: dict[str, Sort]) -> Tac:
    env = senv.env.child(sorts)
    p = Parser(tokenize(text), env)
    t = p.peek()
    if t.kind != "IDENT":
        p.fail(f"expected a tactic, found {t.value!r}")
    name = p.next().value

    def pattern_string() -> IPat:
        if p.at_sym("%"):
            p.next()
            return IPat("pure", p.eat_ident())
        if p.peek().kind == "STRING":
            pats = parse_ipat(p.next().value)
            if len(pats) != 1:
                raise TacticFailure(name, "expected a single pattern", "BadPattern")
            return pats[0]
        p.fail("expected an intro pattern")

    if name == "iIntros":
        binders: list[str] = []
        pats: list[IPat] = []
        while True:
            if p.at_sym("("):
                p.next()
                while p.peek().kind == "IDENT":
                    binders.append(p.eat_ident())
                p.eat_sym(")")
            elif p.peek().kind == "STRING":
                pats.extend(parse_ipat(p.next().value))
            else:
                break
        return Tac("iIntros", {"binders": binders, "pats": pats})
    if name == "iDestruct" or name == "iPoseProof":
        if p.at_sym("(") :
            p.next()
            inner = p.eat_ident()
            if inner == "ghost_var_agree":
                p.eat_ident("with")
                hyps = p.next().value.split()
                p.eat_sym(")")
                p.eat_ident("as")
                pat = pattern_string()
                return Tac("ghost_var_agree", {"h1": hyps[0], "h2": hyps[1], "pat": pat})
            p.fail(f"unsupported proof-mode term {inner!r}")
        src = p.next()
        if src.kind != "STRING":
            # a lemma reference
            lemma = src.value
            p.eat_ident("as")
            bs: list[str] = []
            if p.at_sym("("):
                p.next()
                while p.peek().kind == "IDENT":
                    bs.append(p.eat_ident())
                p.eat_sym(")")
            pat = pattern_string()
            return Tac("iPoseProofLemma", {"lemma": lemma, "binders": bs, "pat": pat})
        p.eat_ident("as")
        bs = []
        if p.at_sym("("):
            p.next()
            while p.peek().kind == "IDENT":
                bs.append(p.eat_ident())
            p.eat_sym(")")
        pat = pattern_string()
        return Tac(
            "iDestruct" if name == "iDestruct" else "iPoseProofHyp",
            {"hyp": src.value, "binders": bs, "pat": pat},
        )
    if name == "iRename":
        old = p.next().value
        p.eat_ident("into")
        new = p.next().value
        return Tac("iRename", {"old": old, "new": new})
    if name == "iClear":
        names = []
        if p.at_sym("("):
            p.next()
            while p.peek().kind == "IDENT":
                names.append(p.eat_ident())
            p.eat_sym(")")
        if p.peek().kind == "STRING":
            names.extend(p.next().value.split())
        return Tac("iClear", {"names": names})
    if name == "iExact":
        return Tac("iExact", {"hyp": p.next().value})
    if name == "iApply":
        if p.peek().kind == "STRING":
            return Tac("iApply", {"hyp": p.next().value})
        if p.at_sym("("):
            p.next()
            src = p.next().value
            groups: list[list[str]] = []
            if p.at_ident("with"):
                p.next()
                groups = _bracket_groups(p.next().value)
            p.eat_sym(")")
            return Tac("iApply", {"hyp": src, "groups": groups})
        return Tac("iApplyLemma", {"lemma": p.eat_ident()})
    if name in ("iSplitL", "iSplitR"):
        names = p.next().value.split() if p.peek().kind == "STRING" else []
        return Tac(name, {"names": names})
    if name == "iSplit":
        return Tac("iSplit", {})
    if name == "iExists":
        witnesses: list[Optional[Term]] = []
        while True:
            if p.peek().kind == "IDENT" and p.peek().value == "_" or p.at_sym("_"):
                p.next()
                witnesses.append(None)
            elif p.peek().kind == "SYM" and p.peek().value == "(":
                p.next()
                witnesses.append(p.term_with_ascription())
                p.eat_sym(")")
            else:
                witnesses.append(p.term())
            if p.at_sym(","):
                p.next()
                continue
            break
        return Tac("iExists", {"witnesses": witnesses})
    if name in ("iLeft", "iRight", "iPureIntro", "iExFalso", "iModIntro", "iNext"):
        return Tac(name, {})
    if name == "iAssert":
        p.eat_sym("(")
        prop = p.prop()
        p.eat_sym(")")
        p.skip_scope()
        with_names: list[str] = []
        if p.at_ident("with"):
            p.next()
            groups = _bracket_groups(p.next().value)
            with_names = groups[0] if groups else []
        p.eat_ident("as")
        pat = pattern_string()
        return Tac("iAssert", {"prop": prop, "with": with_names, "pat": pat})
    if name == "iFrame":
        names: list[str] = []
        selectors: set[str] = set()
        if p.peek().kind == "STRING":
            for piece in p.next().value.split():
                if piece in ("∗", "*", "%", "#"):
                    selectors.add("∗" if piece == "*" else piece)
                else:
                    names.append(piece)
        return Tac("iFrame", {"names": names, "selectors": selectors})
    if name == "iMod":
        if p.peek().kind == "STRING":
            hyp = p.next().value
            p.eat_ident("as")
            bs = []
            if p.at_sym("("):
                p.next()
                while p.peek().kind == "IDENT":
                    bs.append(p.eat_ident())
                p.eat_sym(")")
            pat = pattern_string()
            return Tac("iModHyp", {"hyp": hyp, "binders": bs, "pat": pat})
        p.eat_sym("(")
        if p.peek().kind == "STRING":  # iMod ("Hclose" with "[…]") as "_"
            hyp = p.next().value
            with_names = []
            if p.at_ident("with"):
                p.next()
                groups = _bracket_groups(p.next().value)
                with_names = groups[0] if groups else []
            p.eat_sym(")")
            p.eat_ident("as")
            pat = pattern_string()
            return Tac("invClose", {"hyp": hyp, "with": with_names, "pat": pat})
        inner = p.eat_ident()
        if inner == "ghost_var_alloc":
            init = p.def_arg_term()
            p.eat_sym(")")
            p.eat_ident("as")
            p.eat_sym("(")
            gname = p.eat_ident()
            p.eat_sym(")")
            pat = pattern_string()
            return Tac("ghostAlloc", {"init": init, "gname": gname, "pat": pat})
        if inner == "ghost_var_update":
            h1 = p.next().value
            h2 = p.next().value
            new = p.def_arg_term()
            p.eat_sym(")")
            if p.at_ident("as"):
                p.next()
                pattern_string()
            return Tac("ghostUpdate", {"h1": h1, "h2": h2, "new": new})
        if inner == "inv_alloc":
            ns = p.dotted_ident()
            if p.peek().kind == "IDENT" and p.peek().value == "_" or p.at_sym("_"):
                p.next()  # the mask argument is cosmetic
            p.eat_sym("(")
            body = p.prop()
            p.eat_sym(")")
            p.skip_scope()
            with_names = []
            if p.at_ident("with"):
                p.next()
                groups = _bracket_groups(p.next().value)
                with_names = groups[0] if groups else []
            p.eat_sym(")")
            p.eat_ident("as")
            pat = pattern_string()
            return Tac("invAlloc", {"ns": ns, "body": body, "with": with_names, "pat": pat})
        p.fail(f"unsupported iMod form {inner!r}")
    if name == "iInv":
        ns = p.dotted_ident()
        p.eat_ident("as")
        h = p.next().value
        hclose = p.next().value
        return Tac("iInv", {"ns": ns, "h": h, "hclose": hclose})
    if name in ("wp_pures", "wp_pure", "wp_let", "wp_seq", "wp_op", "wp_rec", "wp_lam",
                "wp_if", "wp_proj", "wp_load", "wp_store"):
        return Tac("wp_rec" if name == "wp_lam" else name, {})
    if name == "wp_alloc":
        loc = p.eat_ident()
        p.eat_ident("as")
        hyp = p.next().value
        return Tac("wp_alloc", {"loc": loc, "hyp": hyp})
    if name == "wp_bind":
        p.eat_sym("(")
        pat_expr = p.expr()
        p.eat_sym(")")
        p.skip_scope()
        return Tac("wp_bind", {"pattern": pat_expr})
    if name == "wp_apply":
        if p.at_sym("("):
            p.next()
            lemma = p.eat_ident()
            groups = []
            if p.at_ident("with"):
                p.next()
                groups = _bracket_groups(p.next().value)
            p.eat_sym(")")
            return Tac("wp_apply", {"lemma": lemma, "groups": groups})
        return Tac("wp_apply", {"lemma": p.eat_ident(), "groups": []})
    if name == "intros":
        names = []
        while p.peek().kind == "IDENT":
            names.append(p.eat_ident())
        return Tac("intros", {"names": names})
    if name == "destruct":
        return Tac("destruct", {"var": p.eat_ident()})
    if name in ("left", "right", "split"):
        return Tac(name, {})
    if name == "done":
        return Tac("done", {})
    if name in ("auto", "eauto", "lia"):
        with_frame = False
        if p.at_ident("with"):
            p.next()
            hint = p.eat_ident()
            with_frame = hint == "iFrame"
        return Tac(name, {"with_frame": with_frame})
    if name == "subst":
        names = []
        while p.peek().kind == "IDENT":
            names.append(p.eat_ident())
        return Tac("subst", {"names": names})
    if name == "rewrite":
        eq = p.eat_ident()
        target = None
        if p.at_ident("in"):
            p.next()
            target = p.eat_ident()
        return Tac("rewrite", {"eq": eq, "target": target})
    if name == "unfold":
        p.dotted_ident()
        return Tac("skip", {})  # definitions are kept unfolded internally
    p.fail(f"unknown tactic {name!r}")


# ---------------------------------------------------------------------------
# dispatch


def _iris_done(state: ProofState) -> list[ProofState]:
    if state.pure_goal is not None:
        return pure_solver.t_done(state)
    g = state.goal
    if isinstance(g, props.TrueP):
        state.drop_spatial_affine("done")
        return []
    for h in state.persistent:
        if props.alpha_equal(h.prop, g):
            state.drop_spatial_affine("done")
            return []
    for h in state.spatial:
        if props.alpha_equal(h.prop, g):
            state.spatial.remove(h)
            state.drop_spatial_affine("done")
            return []
    raise TacticFailure("done", "goal is not trivially closed", "NotSolved")


def _iris_eauto(state: ProofState, with_frame: bool) -> list[ProofState]:
    if state.pure_goal is not None:
        return pure_solver.t_auto(state)
    if with_frame:
        try:
            engine.frame_cancel(state, "eauto")
        except TacticFailure:
            pass
        if isinstance(state.goal, props.TrueP) or not props.sep_flatten(state.goal):
            state.drop_spatial_affine("eauto")
            return []
    if isinstance(state.goal, props.Pure):
        engine.t_pure_intro(state)
        return pure_solver.t_auto(state)
    return _iris_done(state)


def run_tactic(state: ProofState, tac: Tac, senv: ScriptEnv) -> list[ProofState]:
    a = tac.args
    n = tac.name
    if n == "skip":
        return [state]
    if state.pure_goal is not None and n not in (
        "intros", "destruct", "left", "right", "split", "done", "auto", "eauto", "lia",
        "subst", "rewrite",
    ):
        raise TacticFailure(n, "only pure tactics apply to a pure Coq goal", "NotIrisGoal")
    if n == "iIntros":
        return engine.t_intros(state, a["binders"], a["pats"])
    if n == "iDestruct":
        return engine.t_destruct(state, a["hyp"], a["binders"], a["pat"])
    if n == "iPoseProofHyp":
        h = state.find_spatial(a["hyp"]) or state.find_persistent(a["hyp"])
        if h is None:
            raise TacticFailure("iPoseProof", f"no hypothesis {a['hyp']!r}", "NoSuchHypothesis")
        return engine.t_pose_proof(state, h.prop, a["binders"], a["pat"])
    if n == "iPoseProofLemma":
        stmt = _lemma_prop(senv, a["lemma"])
        return engine.t_pose_proof(state, stmt, a["binders"], a["pat"])
    if n == "ghost_var_agree":
        return wp.t_ghost_var_agree(state, a["h1"], a["h2"], a["pat"])
    if n == "iRename":
        return engine.t_rename(state, a["old"], a["new"])
    if n == "iClear":
        return engine.t_clear(state, a["names"])
    if n == "iExact":
        return engine.t_exact(state, a["hyp"])
    if n == "iApply":
        return engine.t_apply(state, a["hyp"], spec_groups=a.get("groups"))
    if n == "iApplyLemma":
        stmt = _lemma_prop(senv, a["lemma"])
        return engine.t_apply(state, a["lemma"], lemma=stmt)
    if n in ("iSplitL", "iSplitR"):
        return engine.t_split(state, n, a["names"])
    if n == "iSplit":
        return engine.t_split_plain(state)
    if n == "iExists":
        return engine.t_exists(state, a["witnesses"])
    if n == "iLeft" or n == "iRight":
        return engine.t_left_right(state, n)
    if n == "iPureIntro":
        return [engine.t_pure_intro(state)]
    if n == "iExFalso":
        return engine.t_exfalso(state)
    if n == "iModIntro":
        return engine.t_modintro(state)
    if n == "iNext":
        return engine.t_next(state)
    if n == "iAssert":
        return engine.t_assert(state, a["prop"], a["with"], a["pat"])
    if n == "iFrame":
        names = a["names"] or None
        engine.frame_cancel(state, "iFrame", names=names, selectors=a["selectors"])
        if not props.sep_flatten(state.goal):
            state.drop_spatial_affine("iFrame")
            return []
        return [state]
    if n == "iModHyp":
        return wp.t_mod_elim_hyp(state, a["hyp"], a["binders"], a["pat"])
    if n == "invClose":
        return wp.t_inv_close(state, a["hyp"], a["with"], a["pat"])
    if n == "ghostAlloc":
        return wp.t_ghost_var_alloc(state, a["init"], a["gname"], a["pat"])
    if n == "ghostUpdate":
        return wp.t_ghost_var_update(state, a["h1"], a["h2"], a["new"])
    if n == "invAlloc":
        return wp.t_inv_alloc(state, a["ns"], a["body"], a["with"], a["pat"])
    if n == "iInv":
        return wp.t_inv_open(state, a["ns"], a["h"], a["hclose"])
    if n == "wp_pures":
        return wp.t_wp_pures(state)
    if n == "wp_pure":
        return wp.t_wp_pure(state)
    if n == "wp_let":
        return wp.t_wp_let(state)
    if n == "wp_seq":
        return wp.t_wp_seq(state)
    if n == "wp_op":
        return wp.t_wp_op(state)
    if n == "wp_rec":
        return wp.t_wp_rec(state)
    if n == "wp_if":
        return wp.t_wp_if(state)
    if n == "wp_proj":
        return wp.t_wp_proj(state)
    if n == "wp_load":
        return wp.t_wp_load(state)
    if n == "wp_store":
        return wp.t_wp_store(state)
    if n == "wp_alloc":
        return wp.t_wp_alloc(state, a["loc"], a["hyp"])
    if n == "wp_bind":
        return wp.t_wp_bind(state, a["pattern"])
    if n == "wp_apply":
        if a["lemma"] == "wp_par":
            groups = a["groups"] or [[], []]
            if len(groups) != 2:
                raise TacticFailure("wp_apply", "wp_par needs two groups", "ArityMismatch")
            return wp.t_wp_par(state, groups[0], groups[1])
        binders, stmt = _lemma_triple(senv, a["lemma"])
        return wp.t_wp_apply(state, stmt, binders, a["groups"])
    if n == "intros":
        return pure_solver.t_intros(state, a["names"])
    if n == "destruct":
        return pure_solver.t_destruct_bool(state, a["var"])
    if n == "left" or n == "right":
        return pure_solver.t_left_right(state, n)
    if n == "split":
        return pure_solver.t_split(state)
    if n == "done":
        return _iris_done(state)
    if n == "auto":
        return pure_solver.t_auto(state)
    if n == "eauto":
        return _iris_eauto(state, a["with_frame"])
    if n == "lia":
        return pure_solver.t_lia(state)
    if n == "subst":
        out = [state]
        for nm in a["names"]:
            nxt: list[ProofState] = []
            for st in out:
                nxt.extend(pure_solver.t_subst(st, nm))
            out = nxt
        return out
    if n == "rewrite":
        if a["target"] is None:
            raise TacticFailure("rewrite", "goal rewriting is not supported; use `rewrite H in H'`",
                                "Unsupported")
        return pure_solver.t_rewrite_in(state, a["eq"], a["target"])
    raise TacticFailure(n, "tactic not implemented", "Unknown")


def _lemma_prop(senv: ScriptEnv, name: str) -> Prop:
    if name not in senv.lemmas:
        raise TacticFailure("iApply", f"unknown lemma {name!r}", "NoSuchLemma")
    binders, stmt = senv.lemmas[name]
    if isinstance(stmt, Triple):
        stmt = wp.unfold_triple(stmt)
    for b, s in reversed(binders):
        stmt = props.Forall(b, s, stmt)
    return stmt


def _lemma_triple(senv: ScriptEnv, name: str) -> tuple[list[tuple[str, Sort]], Triple]:
    if name not in senv.lemmas:
        raise TacticFailure("wp_apply", f"unknown lemma {name!r}", "NoSuchLemma")
    binders, stmt = senv.lemmas[name]
    if not isinstance(stmt, Triple):
        raise TacticFailure("wp_apply", f"{name} is not a triple", "ShapeMismatch")
    return binders, stmt


# ---------------------------------------------------------------------------
# applying sentences to a goal tree


def apply_leaf(tree: GoalTree, idx: int, tac: Tac, senv: ScriptEnv, label: str) -> int:
    leaf = tree.leaves[idx]
    state = leaf.state.copy()
    subs = run_tactic(state, tac, senv)
    if not subs:
        if state.open_invs:
            raise TacticFailure(
                label, f"invariant {state.open_invs[-1][0]} is still open",
                "InvariantStillOpen",
            )
        leaf.state = state
        leaf.proved = True
        leaf.provenance = label
        return 0
    tree.leaves[idx : idx + 1] = [engine.Leaf(s, provenance=label) for s in subs]
    return len(subs)


def apply_sentence(tree: GoalTree, sentence: str, senv: ScriptEnv) -> None:
    """Apply one tactic sentence (possibly a `;` chain) to the tree in place.

    Chained tactics apply to every subgoal the previous element produced;
    a `first T` element applies only to the first of them.
    """
    pieces = _split_chain(sentence)
    targets: list[engine.Leaf] = [tree.leaves[tree.focused()]]
    for piece in pieces:
        first_only = False
        if piece == "first" or piece.startswith("first "):
            first_only = True
            piece = piece[5:].strip()
            if piece.startswith("(") and piece.endswith(")"):
                piece = piece[1:-1].strip()
        if not targets:
            break  # every goal already discharged: the rest is vacuous
        sorts = targets[0].state.sorts()
        tac = parse_tactic(piece, senv, sorts)
        apply_to = targets[:1] if first_only else targets
        rest = targets[1:] if first_only else []
        produced: list[engine.Leaf] = []
        for leaf in apply_to:
            if leaf.proved:
                continue
            idx = tree.leaves.index(leaf)
            made = apply_leaf(tree, idx, tac, senv, piece)
            if made:
                produced.extend(tree.leaves[idx : idx + made])
        targets = [l for l in produced + rest if not l.proved]


# ---------------------------------------------------------------------------
# reports


@dataclass
class LemmaResult:
    name: str
    verdict: str  # proved | failed | incomplete
    error: Optional[str] = None
    failed_at: Optional[tuple[int, str]] = None
    trace: list[str] = field(default_factory=list)
    drops: list[str] = field(default_factory=list)


@dataclass
class CheckReport:
    results: list[LemmaResult]
    elapsed: float = 0.0

    @property
    def all_proved(self) -> bool:
        return all(r.verdict == "proved" for r in self.results)

    def text(self, strict_linear: bool = False) -> str:
        lines = []
        for r in self.results:
            if r.verdict == "proved":
                lines.append(f"Lemma {r.name}: proved")
            elif r.verdict == "incomplete":
                lines.append(f"Lemma {r.name}: incomplete (unproven goals remain at Qed)")
            else:
                line, text = r.failed_at or (0, "?")
                lines.append(f"Lemma {r.name}: failed at line {line} [{text}]: {r.error}")
            if strict_linear:
                for d in r.drops:
                    lines.append(f"  linear lint: {d}")
        return "\n".join(lines)


def run_lemma(
    lemma: LemmaItem, senv: ScriptEnv, trace: bool = False, ascii_mode: bool = False
) -> LemmaResult:
    tree = GoalTree(wp.initial_state(lemma.statement, lemma.binders))
    result = LemmaResult(lemma.name, "incomplete")
    for s in lemma.proof:
        try:
            if s.kind == "open":
                tree.open_brace()
            elif s.kind == "close":
                tree.close_brace()
            elif s.kind == "bullet":
                tree.bullet()
            else:
                apply_sentence(tree, s.text, senv)
                if trace:
                    result.trace.append(tree.render(ascii_mode))
        except (TacticFailure, ParseError, lang.StuckExpr) as e:
            result.verdict = "failed"
            result.error = str(e)
            result.failed_at = (s.line, s.text)
            return result
    result.drops = sorted(
        {d for leaf in tree.leaves for d in leaf.state.drops}
    )
    if tree.complete and not tree.brace_stack:
        if any(leaf.state.open_invs for leaf in tree.leaves):
            result.verdict = "failed"
            result.error = "an invariant is still open at Qed"
            return result
        result.verdict = "proved"
    return result


def run_script(script: Script, trace: bool = False, ascii_mode: bool = False) -> CheckReport:
    t0 = time.perf_counter()
    results: list[LemmaResult] = []
    senv = ScriptEnv()
    items = sorted(
        [(d.line, 0, "def", d) for d in script.definitions]
        + [(l.line, 1, "lem", l) for l in script.lemmas],
        key=lambda it: (it[0], it[1]),
    )
    for _, _, kind, item in items:
        if kind == "def":
            senv.add_definition(item)
            continue
        res = run_lemma(item, senv, trace, ascii_mode)
        results.append(res)
        if res.verdict == "proved":
            senv.add_lemma(item.name, item.binders, item.statement)
    return CheckReport(results, time.perf_counter() - t0)


def check_text(text: str, trace: bool = False, ascii_mode: bool = False) -> CheckReport:
    return run_script(parse_script(text), trace, ascii_mode)
