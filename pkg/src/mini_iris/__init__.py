"""mini-iris: a miniature Iris-style separation-logic proof assistant."""

from importlib import resources


def corpus_files() -> list[tuple[str, str]]:
    """Bundled example scripts as (name, text), sorted by name."""
    out = []
    root = resources.files(__package__) / "corpus"
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".v"):
            out.append((entry.name[:-2], entry.read_text(encoding="utf-8")))
    return out
