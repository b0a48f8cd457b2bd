from __future__ import annotations

import pathlib

import pytest

CORPUS = pathlib.Path(__file__).resolve().parents[1] / "src" / "mini_iris" / "corpus"
GOLDEN = pathlib.Path(__file__).resolve().parent / "golden"


def corpus_text(name: str) -> str:
    return (CORPUS / f"{name}.v").read_text(encoding="utf-8")


@pytest.fixture
def incr_text() -> str:
    return corpus_text("incr")


@pytest.fixture
def bank_text() -> str:
    return corpus_text("bank")
