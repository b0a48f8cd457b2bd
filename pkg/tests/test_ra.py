"""Resource algebra: the five axioms, agreement, frame-preserving updates.

The closed-form `fp_update` is validated against `fp_update_enum`, the
definitional frame enumeration, over the whole finite sub-carrier.
"""
from __future__ import annotations

import random

from mini_iris.ra import (
    EXCL_AUTH,
    INVALID,
    UNIT,
    auth,
    both,
    check_ra_axioms,
    finite_carrier,
    fp_update,
    fp_update_enum,
    frag,
    ra_op,
    ra_valid,
)

CARRIER = finite_carrier(-2, 2)


def test_carrier_is_large_enough():
    # ≥ 625 op pairs required by the acceptance suite
    assert len(CARRIER) ** 2 >= 625


def test_axioms_exhaustive_on_finite_carrier():
    assert check_ra_axioms(EXCL_AUTH, CARRIER) == []


def test_axioms_randomized_big_integers():
    rng = random.Random(20240817)

    def rand_elem():
        k = rng.randrange(5)
        z = rng.randrange(-(10**18), 10**18)
        w = rng.randrange(-(10**18), 10**18)
        return [UNIT, INVALID, auth(z), frag(z), both(z, w)][k]

    checked = 0
    for _ in range(10_000):
        a, b, c = rand_elem(), rand_elem(), rand_elem()
        assert ra_op(ra_op(a, b), c) == ra_op(a, ra_op(b, c))  # RA-ASSOC
        assert ra_op(a, b) == ra_op(b, a)  # RA-COMM
        assert ra_op(UNIT, a) == a  # RA-ID
        if ra_valid(ra_op(a, b)):
            assert ra_valid(a)  # RA-VALID-OP
        checked += 1
    assert ra_valid(UNIT)  # RA-VALID-ID
    assert checked == 10_000


def test_op_examples():
    assert ra_op(auth(0), frag(0)) == both(0, 0)
    assert ra_valid(ra_op(auth(0), frag(0)))
    assert ra_op(UNIT, frag(5)) == frag(5)
    # derived from the axioms: two authoritative parts can never combine
    assert ra_op(auth(1), auth(2)) == INVALID
    assert ra_op(frag(1), frag(1)) == INVALID
    assert ra_op(both(0, 0), auth(1)) == INVALID
    assert ra_op(INVALID, UNIT) == INVALID


def test_valid_examples():
    assert ra_valid(UNIT)
    assert ra_valid(both(3, 3))
    assert not ra_valid(both(3, 4))
    assert not ra_valid(INVALID)


def test_agreement_forced_by_validity():
    for a in range(-2, 3):
        for b in range(-2, 3):
            assert ra_valid(ra_op(auth(a), frag(b))) == (a == b)
    assert ra_valid(ra_op(auth(10**30), frag(10**30)))
    assert not ra_valid(ra_op(auth(10**30), frag(10**30 + 1)))


def test_fp_update_matches_frame_enumeration():
    # definitional oracle: quantify over every frame in the finite carrier
    for a in CARRIER:
        for b in CARRIER:
            assert fp_update(a, b) == fp_update_enum(a, b, CARRIER), (a, b)


def test_fp_update_examples():
    assert fp_update(both(0, 0), both(7, 7))
    assert not fp_update(auth(0), auth(1))  # the frame ◯E 0 breaks it
    for a in CARRIER:
        assert fp_update(a, a)  # reflexivity


def test_fp_update_preorder():
    sample = [UNIT, INVALID, auth(0), auth(1), frag(0), both(0, 0), both(1, 1), both(0, 1)]
    for a in sample:
        assert fp_update(a, a)
        for b in sample:
            for c in sample:
                if fp_update(a, b) and fp_update(b, c):
                    assert fp_update(a, c), (a, b, c)
