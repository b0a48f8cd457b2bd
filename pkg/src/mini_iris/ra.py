"""Unital resource algebras and the exclusive-authoritative instance over Z.

The composition operator is total: combinations that make no sense yield the
distinguished ``INVALID`` element instead of failing, which keeps the axioms
unconditional.  Frame-preserving updates are characterized in closed form
here; the test suite re-derives the characterization by enumerating frames
over a finite sub-carrier.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable


@dataclass(frozen=True)
class RaSpec:
    """A (unital) resource algebra presented by its operations."""

    name: str
    op: Callable[[object, object], object]
    valid: Callable[[object], bool]
    unit: object


@dataclass(frozen=True)
class ExclAuthElem:
    """Element of the excl-auth RA over integers.

    kind is one of "unit", "auth", "frag", "both", "invalid"; ``auth``/``frag``
    carry one integer, ``both`` carries (authoritative, fragment).
    """

    kind: str
    a: int | None = None
    f: int | None = None

    def __repr__(self) -> str:
        if self.kind == "unit":
            return "ε"
        if self.kind == "auth":
            return f"●E {self.a}"
        if self.kind == "frag":
            return f"◯E {self.f}"
        if self.kind == "both":
            return f"●E {self.a} ⋅ ◯E {self.f}"
        return "⊥"


UNIT = ExclAuthElem("unit")
INVALID = ExclAuthElem("invalid")


def auth(z: int) -> ExclAuthElem:
    return ExclAuthElem("auth", a=z)


def frag(z: int) -> ExclAuthElem:
    return ExclAuthElem("frag", f=z)


def both(a: int, f: int) -> ExclAuthElem:
    return ExclAuthElem("both", a=a, f=f)


def ra_op(x: ExclAuthElem, y: ExclAuthElem) -> ExclAuthElem:
    if x.kind == "unit":
        return y
    if y.kind == "unit":
        return x
    if x.kind == "invalid" or y.kind == "invalid":
        return INVALID
    if x.kind == "auth" and y.kind == "frag":
        return both(x.a, y.f)
    if x.kind == "frag" and y.kind == "auth":
        return both(y.a, x.f)
    # auth·auth, frag·frag, both·anything-but-unit: exclusive ownership clash
    return INVALID


def ra_valid(x: ExclAuthElem) -> bool:
    if x.kind == "invalid":
        return False
    if x.kind == "both":
        return x.a == x.f
    return True


EXCL_AUTH = RaSpec("excl-auth(Z)", ra_op, ra_valid, UNIT)


def fp_update(x: ExclAuthElem, y: ExclAuthElem) -> bool:
    """True iff every frame valid with x stays valid with y.

    Closed form; `fp_update_enum` below is the definitional check used to
    validate it over finite carriers.
    """
    if not any_valid_frame(x):
        return True
    if x.kind == "unit":
        return y.kind == "unit"
    if x.kind == "auth":  # frames: ε and ◯E x — dropping to ε stays compatible
        return y.kind == "unit" or (y.kind == "auth" and y.a == x.a)
    if x.kind == "frag":
        return y.kind == "unit" or (y.kind == "frag" and y.f == x.f)
    if x.kind == "both":  # full ownership: only the empty frame composes
        return ra_valid(y)
    return True


def any_valid_frame(x: ExclAuthElem) -> bool:
    if x.kind == "invalid":
        return False
    if x.kind == "both":
        return x.a == x.f
    return True


def fp_update_enum(x: ExclAuthElem, y: ExclAuthElem, frames: Iterable[ExclAuthElem]) -> bool:
    """Definitional frame-preserving update over an explicit frame set."""
    return all(ra_valid(ra_op(y, f)) for f in frames if ra_valid(ra_op(x, f)))


def finite_carrier(lo: int = -2, hi: int = 2) -> list[ExclAuthElem]:
    zs = range(lo, hi + 1)
    elems: list[ExclAuthElem] = [UNIT, INVALID]
    elems += [auth(z) for z in zs]
    elems += [frag(z) for z in zs]
    elems += [both(a, f) for a in zs for f in zs]
    return elems


def check_ra_axioms(spec: RaSpec, elems: list) -> list[str]:
    """Return the names of any violated RA axioms over the given elements."""
    bad: list[str] = []
    op, valid, unit = spec.op, spec.valid, spec.unit
    if not valid(unit):
        bad.append("RA-VALID-ID")
    for a in elems:
        if op(unit, a) != a:
            bad.append("RA-ID")
            break
    for a in elems:
        for b in elems:
            if op(a, b) != op(b, a):
                bad.append("RA-COMM")
                break
            if valid(op(a, b)) and not valid(a):
                bad.append("RA-VALID-OP")
                break
        else:
            continue
        break
    for a in elems:
        for b in elems:
            for c in elems:
                if op(op(a, b), c) != op(a, op(b, c)):
                    bad.append("RA-ASSOC")
                    return bad
    return bad
