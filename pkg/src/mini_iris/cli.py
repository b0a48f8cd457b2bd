"""Command line interface.

Exit codes: 0 all proofs check, 1 proof failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import sys

from . import script as scriptmod
from .parser import ParseError


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def cmd_check(args) -> int:
    status = 0
    out = []
    for path in args.files:
        try:
            report = scriptmod.check_text(_read(path))
        except OSError as e:
            print(f"cannot read {path}: {e}", file=sys.stderr)
            return 2
        except ParseError as e:
            out.append(f"== {path} ==")
            out.append(f"parse error: {e}")
            print("\n".join(out))
            return 2
        out.append(f"== {path} ==")
        out.append(report.text(strict_linear=args.strict_linear))
        if not report.all_proved:
            status = 1
    print("\n".join(out))
    return status


def cmd_trace(args) -> int:
    try:
        sc = scriptmod.parse_script(_read(args.file))
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    senv = scriptmod.ScriptEnv()
    target = None
    for item in sorted(
        [(d.line, 0, "def", d) for d in sc.definitions]
        + [(l.line, 1, "lem", l) for l in sc.lemmas],
        key=lambda it: (it[0], it[1]),
    ):
        if item[2] == "def":
            senv.add_definition(item[3])
        elif item[3].name == args.lemma:
            target = item[3]
            break
        else:
            res = scriptmod.run_lemma(item[3], senv)
            if res.verdict == "proved":
                senv.add_lemma(item[3].name, item[3].binders, item[3].statement)
    if target is None:
        print(f"no lemma named {args.lemma}", file=sys.stderr)
        return 2
    res = scriptmod.run_lemma(target, senv, trace=True, ascii_mode=args.ascii)
    print("\n====\n".join(res.trace))
    if res.verdict != "proved":
        print(f"(verdict: {res.verdict}: {res.error or ''})", file=sys.stderr)
        return 1
    return 0


def cmd_repl(args) -> int:
    from .props import to_ascii
    from .session import SessionStore

    store = SessionStore()
    text = _read(args.file)
    try:
        names = store.lemma_names(text)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    lemma = args.lemma or (names[0] if names else None)
    if lemma is None:
        print("script has no lemmas", file=sys.stderr)
        return 2

    def show(block: str) -> None:
        print(to_ascii(block) if args.ascii else block)

    sid, dto = store.create(text, lemma)
    print(f"interactive proof of {lemma}; 'undo' retracts, 'quit' exits")
    show(dto["rendered"])
    while True:
        try:
            line = input("tactic> ").strip()
        except EOFError:
            return 0
        if not line:
            continue
        if line in ("quit", "exit"):
            return 0
        if line == "undo":
            try:
                dto = store.undo(sid)
            except Exception as e:  # noqa: BLE001
                print(f"error: {e}")
                continue
            show(dto["rendered"])
            continue
        dto = store.apply(sid, line)
        if dto.get("error"):
            print(f"error: {dto['error']['message']}")
        show(dto["rendered"])
        if dto["complete"]:
            print("(proof complete; Qed would be accepted)")


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(idle_timeout_secs=args.idle_timeout_secs, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="mini-iris")
    ap.add_argument("--ascii", action="store_true", help="force ASCII rendering")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p_check = sub.add_parser("check", help="batch-check proof scripts")
    p_check.add_argument("files", nargs="+")
    p_check.add_argument("--strict-linear", action="store_true",
                         help="report spatial hypotheses dropped by affinity")
    p_check.set_defaults(fn=cmd_check)

    p_trace = sub.add_parser("trace", help="print the state after every tactic")
    p_trace.add_argument("file")
    p_trace.add_argument("--lemma", required=True)
    p_trace.set_defaults(fn=cmd_trace)

    p_repl = sub.add_parser("repl", help="interactive tactic loop")
    p_repl.add_argument("file")
    p_repl.add_argument("--lemma")
    p_repl.set_defaults(fn=cmd_repl)

    p_serve = sub.add_parser("serve", help="start the proof session service")
    p_serve.add_argument("--port", type=int, default=7831)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--idle-timeout-secs", type=int, default=3600)
    p_serve.add_argument("--ui-dir", default=None, help="static UI bundle to serve at /")
    p_serve.set_defaults(fn=cmd_serve)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
