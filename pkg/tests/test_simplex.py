"""Bounded-simplex contract tests, checked against brute-force enumeration."""

import math
import random

import numpy as np
import pytest

from prodplan.simplex import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    LpError,
    SimplexConfig,
    solve_lp,
)

from oracles import random_lp, vertex_enumeration_solve

FORCE_SIMPLEX = SimplexConfig(backend="simplex")


def build_lp(c, a, senses, b):
    m, n = a.shape
    lp = LinearProgram(n)
    lp.set_objective(list(c))
    for i in range(m):
        coeffs = {j: a[i, j] for j in range(n) if a[i, j] != 0}
        lp.add_constraint(coeffs, senses[i], b[i])
    return lp


def test_textbook_corner_point():
    # max 3x + 2y s.t. x + y <= 4, x <= 2, x,y >= 0  ->  x=2, y=2, value 10.
    lp = LinearProgram(2)
    lp.set_objective([-3.0, -2.0])
    lp.add_constraint({0: 1.0, 1: 1.0}, "<=", 4.0)
    lp.add_constraint({0: 1.0}, "<=", 2.0)
    sol = solve_lp(lp, FORCE_SIMPLEX)
    assert sol.status == OPTIMAL
    assert sol.objective_value == pytest.approx(-10.0, abs=1e-9)
    assert sol.x == pytest.approx([2.0, 2.0], abs=1e-9)


def test_infeasible_pair_of_bounds():
    lp = LinearProgram(1)
    lp.add_constraint({0: 1.0}, ">=", 1.0)
    lp.add_constraint({0: 1.0}, "<=", 0.0)
    assert solve_lp(lp, FORCE_SIMPLEX).status == INFEASIBLE


def test_unbounded_below():
    lp = LinearProgram(1)
    lp.set_objective([-1.0])
    sol = solve_lp(lp, FORCE_SIMPLEX)
    assert sol.status == UNBOUNDED


def test_upper_bounds_and_bound_flip():
    # min -x - y with x in [0, 3], y in [0, 2], x + y <= 4 -> x=3, y=1? No:
    # optimum is x=2,y=2 or x=3,y=1, both value -4? x+y<=4 binds: value -4.
    lp = LinearProgram(2)
    lp.set_objective([-1.0, -1.0])
    lp.set_bounds(0, 0.0, 3.0)
    lp.set_bounds(1, 0.0, 2.0)
    lp.add_constraint({0: 1.0, 1: 1.0}, "<=", 4.0)
    sol = solve_lp(lp, FORCE_SIMPLEX)
    assert sol.status == OPTIMAL
    assert sol.objective_value == pytest.approx(-4.0, abs=1e-9)


def test_free_variable_equality():
    # min x + y s.t. x - y = 3, y free, x >= 0 -> x=0, y=-3, value -3.
    lp = LinearProgram(2)
    lp.set_objective([1.0, 1.0])
    lp.set_bounds(1, None, None)
    lp.add_constraint({0: 1.0, 1: -1.0}, "=", 3.0)
    sol = solve_lp(lp, FORCE_SIMPLEX)
    assert sol.status == OPTIMAL
    assert sol.objective_value == pytest.approx(-3.0, abs=1e-8)


def test_fixed_variable():
    lp = LinearProgram(2)
    lp.set_objective([1.0, -2.0])
    lp.set_bounds(0, 2.0, 2.0)
    lp.set_bounds(1, 0.0, 5.0)
    lp.add_constraint({0: 1.0, 1: 1.0}, "<=", 6.0)
    sol = solve_lp(lp, FORCE_SIMPLEX)
    assert sol.status == OPTIMAL
    assert sol.x == pytest.approx([2.0, 4.0], abs=1e-9)


def test_rejects_nan_and_bad_dimensions():
    lp = LinearProgram(2)
    with pytest.raises(LpError):
        lp.set_objective([1.0, float("nan")])
    with pytest.raises(LpError):
        lp.add_constraint({5: 1.0}, "<=", 1.0)
    with pytest.raises(LpError):
        lp.add_constraint({0: float("inf")}, "<=", 1.0)
    with pytest.raises(LpError):
        lp.set_bounds(0, 3.0, 1.0)


def test_debug_dump_mentions_every_row():
    lp = LinearProgram(2)
    lp.set_objective([1.0, 2.0])
    lp.add_constraint({0: 1.0, 1: 1.0}, "<=", 4.0)
    text = lp.to_debug_text()
    assert "min:" in text and "r0:" in text and "x1 in" in text


def test_determinism_on_fixed_instance():
    rng = random.Random(7)
    c, a, senses, b = random_lp(rng)
    sols = [solve_lp(build_lp(c, a, senses, b), FORCE_SIMPLEX) for _ in range(3)]
    assert len({s.status for s in sols}) == 1
    if sols[0].status == OPTIMAL:
        for s in sols[1:]:
            assert np.array_equal(s.x, sols[0].x)
            assert s.iterations == sols[0].iterations


def test_random_lps_match_enumeration_oracle():
    rng = random.Random(12345)
    checked = 0
    for _ in range(60):
        c, a, senses, b = random_lp(rng)
        lp = build_lp(c, a, senses, b)
        sol = solve_lp(lp, FORCE_SIMPLEX)
        status, value = vertex_enumeration_solve(c, a, senses, b)
        assert sol.status == status, lp.to_debug_text()
        if status == OPTIMAL:
            assert sol.objective_value == pytest.approx(value, abs=1e-6), lp.to_debug_text()
            # Feasibility of the returned point.
            x = sol.x
            assert np.all(x >= -1e-7)
            for i in range(a.shape[0]):
                lhs = float(a[i] @ x)
                if senses[i] == "<=":
                    assert lhs <= b[i] + 1e-6
                elif senses[i] == ">=":
                    assert lhs >= b[i] - 1e-6
                else:
                    assert lhs == pytest.approx(b[i], abs=1e-6)
        checked += 1
    assert checked == 60


def test_iteration_count_stays_bounded():
    rng = random.Random(99)
    for _ in range(40):
        c, a, senses, b = random_lp(rng)
        lp = build_lp(c, a, senses, b)
        sol = solve_lp(lp, FORCE_SIMPLEX)
        m, n = a.shape
        assert sol.iterations < 10 * (m + n) + 20


def test_complementary_slackness_at_optimum():
    rng = random.Random(4242)
    seen = 0
    while seen < 25:
        c, a, senses, b = random_lp(rng)
        lp = build_lp(c, a, senses, b)
        sol = solve_lp(lp, FORCE_SIMPLEX)
        if sol.status != OPTIMAL:
            continue
        seen += 1
        x, y = sol.x, sol.duals
        for i in range(a.shape[0]):
            slack = b[i] - float(a[i] @ x)
            # y_i * (a_i x - b_i) ~ 0 and sign condition per sense.
            assert abs(y[i] * slack) < 1e-6
            if senses[i] == "<=":
                assert y[i] <= 1e-6
            elif senses[i] == ">=":
                assert y[i] >= -1e-6
        # Reduced-cost sign at active lower bounds.
        for j in range(len(x)):
            if x[j] < 1e-9:
                assert sol.reduced_costs[j] >= -1e-6
            elif sol.reduced_costs[j] > 1e-6:
                # A positive reduced cost only at the lower bound.
                assert x[j] < 1e-6


def test_highs_backend_agrees_on_smalls():
    rng = random.Random(31)
    for _ in range(20):
        c, a, senses, b = random_lp(rng)
        lp = build_lp(c, a, senses, b)
        mine = solve_lp(lp, FORCE_SIMPLEX)
        highs = solve_lp(lp, SimplexConfig(backend="highs"))
        assert mine.status == highs.status
        if mine.status == OPTIMAL:
            assert mine.objective_value == pytest.approx(highs.objective_value, abs=1e-6)
