"""In-memory interactive proof sessions shared by the REPL and the service.

A session pins one lemma of one script; each applied sentence snapshots the
whole goal tree, so undo is exact.  Sessions are independent: all state
transitions go through pure tree copies, and the store serializes access
per session.
"""
from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field

from . import script as scriptmod
from .engine import GoalTree, NothingToUndo, PureVar, TacticFailure
from .parser import ParseError
from .props import render_form, render_prop


class UnknownLemma(Exception):
    pass


class SessionComplete(Exception):
    pass


@dataclass
class Session:
    id: str
    lemma: str
    senv: scriptmod.ScriptEnv
    trees: list[GoalTree]
    created: float = field(default_factory=time.monotonic)
    touched: float = field(default_factory=time.monotonic)
    last_error: dict | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def tree(self) -> GoalTree:
        return self.trees[-1]

    @property
    def history_depth(self) -> int:
        return len(self.trees) - 1


def state_dto(tree: GoalTree, error: dict | None = None, ascii_mode: bool = False) -> dict:
    entries = []
    goals = []
    unproven = tree.unproven()
    if unproven:
        st = tree.leaves[unproven[0]].state
        sorts = st.sorts()
        for e in st.pure_ctx:
            if isinstance(e, PureVar):
                entries.append({"name": e.name, "text": str(e.sort), "kind": "pure"})
            else:
                entries.append(
                    {"name": e.name, "text": render_form(e.form, sorts), "kind": "pure"}
                )
        for h in st.persistent:
            entries.append(
                {"name": h.name, "text": render_prop(h.prop, sorts), "kind": "persistent"}
            )
        for h in st.spatial:
            entries.append(
                {"name": h.name, "text": render_prop(h.prop, sorts), "kind": "spatial"}
            )
        for i in unproven:
            leaf = tree.leaves[i].state
            if leaf.pure_goal is not None:
                goals.append(render_form(leaf.pure_goal, leaf.sorts()))
            else:
                goals.append(render_prop(leaf.goal, leaf.sorts()))
        open_invs = [ns for ns, _ in st.open_invs]
    else:
        open_invs = []
    return {
        "version": 1,
        "entries": entries,
        "goals": goals,
        "focus": 0 if unproven else -1,
        "open_invariants": open_invs,
        "complete": not unproven,
        "rendered": tree.render(ascii_mode),
        "error": error,
    }


class SessionStore:
    def __init__(self, idle_timeout_secs: int = 3600):
        self.idle_timeout_secs = idle_timeout_secs
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    # -- helpers -----------------------------------------------------------

    def lemma_names(self, text: str) -> list[str]:
        sc = scriptmod.parse_script(text)
        return [l.name for l in sc.lemmas]

    def _build(self, text: str, lemma: str) -> tuple[scriptmod.ScriptEnv, GoalTree]:
        sc = scriptmod.parse_script(text)
        senv = scriptmod.ScriptEnv()
        target = None
        for item in sorted(
            [(d.line, 0, "def", d) for d in sc.definitions]
            + [(l.line, 1, "lem", l) for l in sc.lemmas],
            key=lambda it: (it[0], it[1]),
        ):
            if item[2] == "def":
                senv.add_definition(item[3])
                continue
            if item[3].name == lemma:
                target = item[3]
                break
            res = scriptmod.run_lemma(item[3], senv)
            if res.verdict == "proved":
                senv.add_lemma(item[3].name, item[3].binders, item[3].statement)
        if target is None:
            raise UnknownLemma(lemma)
        from . import wp

        tree = GoalTree(wp.initial_state(target.statement, target.binders))
        return senv, tree

    def _evict(self) -> None:
        now = time.monotonic()
        with self._lock:
            dead = [
                sid
                for sid, s in self._sessions.items()
                if now - s.touched > self.idle_timeout_secs
            ]
            for sid in dead:
                del self._sessions[sid]

    def _get(self, sid: str) -> Session:
        self._evict()
        with self._lock:
            if sid not in self._sessions:
                raise KeyError(sid)
            return self._sessions[sid]

    # -- operations ----------------------------------------------------------

    def create(self, text: str, lemma: str) -> tuple[str, dict]:
        senv, tree = self._build(text, lemma)
        sid = secrets.token_hex(12)
        sess = Session(sid, lemma, senv, [tree])
        with self._lock:
            self._sessions[sid] = sess
        return sid, state_dto(tree)

    def apply(self, sid: str, text: str) -> dict:
        sess = self._get(sid)
        with sess.lock:
            sess.touched = time.monotonic()
            if sess.tree.complete:
                raise SessionComplete(sid)
            sentence = text.strip()
            if sentence.endswith("."):
                sentence = sentence[:-1].strip()
            try:
                tree = sess.tree.copy()
                if sentence == "{":
                    tree.open_brace()
                elif sentence == "}":
                    tree.close_brace()
                elif sentence and all(c == sentence[0] for c in sentence) and sentence[0] in "-+*":
                    tree.bullet()
                else:
                    scriptmod.apply_sentence(tree, sentence, sess.senv)
            except (TacticFailure, ParseError) as e:
                code = getattr(e, "code", "ParseError")
                sess.last_error = {"code": code, "message": str(e)}
                return state_dto(sess.tree, sess.last_error)
            sess.trees.append(tree)
            sess.last_error = None
            return state_dto(tree)

    def undo(self, sid: str) -> dict:
        sess = self._get(sid)
        with sess.lock:
            sess.touched = time.monotonic()
            if len(sess.trees) <= 1:
                raise NothingToUndo()
            sess.trees.pop()
            sess.last_error = None
            return state_dto(sess.tree)

    def get_state(self, sid: str) -> dict:
        sess = self._get(sid)
        return state_dto(sess.tree, sess.last_error)
