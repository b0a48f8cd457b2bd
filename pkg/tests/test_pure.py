"""Pure-goal solver: tactics, linear arithmetic, finite-model soundness."""
from __future__ import annotations

import itertools

import pytest

from mini_iris import pure_solver
from mini_iris.engine import ProofState, PureHyp, PureVar, TacticFailure
from mini_iris.props import AndF, Eq, ImplF, Le, Lt, OrF, Pure, PureForm
from mini_iris.pure_solver import eval_form, lia_prove, t_auto, t_destruct_bool, t_done
from mini_iris.terms import BinT, BoolLit, IntLit, Sort, TVar


def pure_state(vars_: dict[str, Sort], hyps: dict[str, PureForm], goal: PureForm) -> ProofState:
    st = ProofState()
    for n, s in vars_.items():
        st.pure_ctx.append(PureVar(n, s))
    for n, f in hyps.items():
        st.pure_ctx.append(PureHyp(n, f))
    st.pure_goal = goal
    return st


def add(a, b):
    return BinT("+", a, b)


# ---------------------------------------------------------------------------
# the finite-model oracle used throughout: a claim `hyps ⊢ goal` is sound if
# every assignment over small ranges satisfying the hyps satisfies the goal


def finite_model_valid(vars_: dict[str, Sort], hyps: list[PureForm], goal: PureForm) -> bool:
    names = list(vars_)
    domains = []
    for n in names:
        if vars_[n] is Sort.BOOL:
            domains.append([True, False])
        else:
            domains.append(list(range(-3, 4)))
    for combo in itertools.product(*domains):
        env = dict(zip(names, combo))
        try:
            if all(eval_form(h, env) for h in hyps) and not eval_form(goal, env):
                return False
        except KeyError:
            return False
    return True


def assert_solver_sound(vars_, hyps, goal, solver) -> None:
    st = pure_state(vars_, {f"H{i}": h for i, h in enumerate(hyps)}, goal)
    assert solver(st) == []
    assert finite_model_valid(vars_, hyps, goal), "solver claimed an invalid goal!"


# ---------------------------------------------------------------------------


def test_destruct_bool_dichotomy():
    goal = OrF(Eq(TVar("b"), BoolLit(True)), Eq(TVar("b"), BoolLit(False)))
    st = pure_state({"b": Sort.BOOL}, {}, goal)
    cases = t_destruct_bool(st, "b")
    assert len(cases) == 2
    true_case, false_case = cases
    assert true_case.pure_goal == OrF(
        Eq(BoolLit(True), BoolLit(True)), Eq(BoolLit(True), BoolLit(False))
    )
    # left/done on the true case, right/done on the false case
    (s1,) = pure_solver.t_left_right(true_case, "left")
    assert t_done(s1) == []
    (s2,) = pure_solver.t_left_right(false_case, "right")
    assert t_done(s2) == []
    assert finite_model_valid({"b": Sort.BOOL}, [], goal)


def test_rewrite_transitivity():
    st = pure_state(
        {"x": Sort.INT, "y": Sort.INT, "z": Sort.INT},
        {"Hxy": Eq(TVar("x"), TVar("y")), "Hyz": Eq(TVar("y"), TVar("z"))},
        Eq(TVar("x"), TVar("z")),
    )
    (st2,) = pure_solver.t_rewrite_in(st, "Hyz", "Hxy")
    assert st2.find_pure_hyp("Hxy").form == Eq(TVar("x"), TVar("z"))
    assert t_done(st2) == []
    assert finite_model_valid(
        {"x": Sort.INT, "y": Sort.INT, "z": Sort.INT},
        [Eq(TVar("x"), TVar("y")), Eq(TVar("y"), TVar("z"))],
        Eq(TVar("x"), TVar("z")),
    )


def test_le_reflexive_by_auto():
    assert_solver_sound({"n": Sort.INT}, [], Le(TVar("n"), TVar("n")), t_auto)


def test_auto_uses_hypothesis():
    assert_solver_sound(
        {"n": Sort.INT, "m": Sort.INT},
        [Le(TVar("n"), TVar("m"))],
        Le(TVar("n"), TVar("m")),
        t_auto,
    )


def test_lia_monotone_step():
    assert_solver_sound(
        {"n": Sort.INT, "m": Sort.INT},
        [Le(TVar("n"), TVar("m"))],
        Le(TVar("n"), add(TVar("m"), IntLit(1))),
        t_auto,
    )


def test_lia_strict_combination():
    assert_solver_sound(
        {"a": Sort.INT, "b": Sort.INT},
        [Lt(TVar("a"), TVar("b")), Le(IntLit(0), TVar("a"))],
        Lt(IntLit(0), add(TVar("b"), IntLit(0))),
        t_auto,
    )


def test_lia_equality_goal():
    assert_solver_sound(
        {"a": Sort.INT, "b": Sort.INT},
        [Eq(TVar("a"), TVar("b")), Eq(TVar("b"), IntLit(2))],
        Eq(add(TVar("a"), IntLit(1)), IntLit(3)),
        t_auto,
    )


def test_lia_does_not_prove_false_things():
    st = pure_state(
        {"n": Sort.INT, "m": Sort.INT},
        {"H": Le(TVar("n"), TVar("m"))},
        Le(TVar("m"), TVar("n")),
    )
    with pytest.raises(TacticFailure):
        t_auto(st)
    st2 = pure_state({"n": Sort.INT}, {}, Lt(TVar("n"), TVar("n")))
    with pytest.raises(TacticFailure):
        pure_solver.t_lia(st2)


def test_done_ground_arithmetic():
    st = pure_state({}, {}, Eq(add(IntLit(0), IntLit(0)), IntLit(0)))
    assert t_done(st) == []
    st2 = pure_state({}, {}, Eq(IntLit(1), IntLit(2)))
    with pytest.raises(TacticFailure):
        t_done(st2)


def test_done_does_not_case_split_disjunctions():
    goal = OrF(Eq(BoolLit(True), BoolLit(True)), Eq(BoolLit(True), BoolLit(False)))
    st = pure_state({}, {}, goal)
    with pytest.raises(TacticFailure):
        t_done(st)  # requires an explicit left/right


def test_subst_eliminates_variable():
    st = pure_state(
        {"n": Sort.INT},
        {"Hn": Eq(TVar("n"), IntLit(0))},
        Le(IntLit(0), add(TVar("n"), IntLit(1))),
    )
    (st2,) = pure_solver.t_subst(st, "n")
    assert st2.find_pure_hyp("Hn") is None
    assert st2.pure_goal == Le(IntLit(0), IntLit(1))
    assert t_done(st2) == []


def test_implication_chaining():
    st = pure_state(
        {"a": Sort.INT},
        {
            "H1": Eq(TVar("a"), IntLit(1)),
            "H2": ImplF(Eq(TVar("a"), IntLit(1)), Le(TVar("a"), IntLit(5))),
        },
        Le(TVar("a"), IntLit(5)),
    )
    assert t_auto(st) == []
    assert finite_model_valid(
        {"a": Sort.INT},
        [Eq(TVar("a"), IntLit(1)),
         ImplF(Eq(TVar("a"), IntLit(1)), Le(TVar("a"), IntLit(5)))],
        Le(TVar("a"), IntLit(5)),
    )


def test_lia_prove_cross_checked_by_finite_model():
    # every claim lia makes over these templates is re-verified exhaustively
    vars_ = {"n": Sort.INT, "m": Sort.INT}
    hyp_pool = [
        Le(TVar("n"), TVar("m")),
        Lt(TVar("n"), TVar("m")),
        Eq(TVar("n"), TVar("m")),
        Le(IntLit(0), TVar("n")),
    ]
    goal_pool = [
        Le(TVar("n"), add(TVar("m"), IntLit(1))),
        Le(TVar("n"), TVar("m")),
        Lt(TVar("n"), add(TVar("m"), IntLit(2))),
        Eq(TVar("n"), add(TVar("m"), IntLit(0))),
        Le(TVar("m"), TVar("n")),
        Lt(IntLit(-1), TVar("n")),
    ]
    claims = 0
    for r in range(len(hyp_pool) + 1):
        for hyps in itertools.combinations(hyp_pool, r):
            for goal in goal_pool:
                if lia_prove(list(hyps), goal):
                    claims += 1
                    assert finite_model_valid(vars_, list(hyps), goal), (hyps, goal)
    assert claims > 10  # the solver is not vacuously silent
