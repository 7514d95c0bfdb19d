"""Independent brute-force oracles used by the test suite.

These deliberately share no code with the solvers they check. The LP oracle
classifies and solves small minimization LPs over x >= 0 by enumerating all
basic solutions of the slack form (vertices), with unboundedness decided by
enumerating the normalized recession cone. Exact for any instance small
enough to enumerate.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

FEAS_TOL = 1e-7


def _basic_solutions(a_full: np.ndarray, b: np.ndarray, m: int):
    """Yield (basis_columns, x_basic) for every nonsingular m-column basis."""
    total = a_full.shape[1]
    combos = list(itertools.combinations(range(total), m))
    mats = np.stack([a_full[:, list(c)] for c in combos])
    dets = np.abs(np.linalg.det(mats))
    ok = dets > 1e-9
    if not np.any(ok):
        return
    rhs = np.broadcast_to(b, (int(ok.sum()), m))[..., None]
    sols = np.linalg.solve(mats[ok], rhs)[..., 0]
    for combo, x in zip(np.array(combos)[ok], sols):
        yield combo, x


def _slack_bounds(senses):
    """Per-row slack feasibility interval (lo, hi)."""
    bounds = []
    for s in senses:
        if s == "<=":
            bounds.append((0.0, math.inf))
        elif s == ">=":
            bounds.append((-math.inf, 0.0))
        else:
            bounds.append((0.0, 0.0))
    return bounds


def vertex_enumeration_solve(c, a, senses, b, tol=FEAS_TOL):
    """Solve min c'x s.t. A x (senses) b, x >= 0 by total enumeration.

    Returns (status, objective_value_or_None). Status is one of
    "optimal", "infeasible", "unbounded".
    """
    c = np.asarray(c, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = a.shape
    slack = _slack_bounds(senses)
    a_full = np.hstack([a, np.eye(m)])

    best = None
    for cols, x in _basic_solutions(a_full, b, m):
        feasible = True
        val = 0.0
        for j, xj in zip(cols, x):
            if j < n:
                if xj < -tol:
                    feasible = False
                    break
                val += c[j] * xj
            else:
                lo, hi = slack[j - n]
                if xj < lo - tol or xj > hi + tol:
                    feasible = False
                    break
        if feasible and (best is None or val < best):
            best = val

    if best is None:
        return "infeasible", None
    if _has_improving_ray(c, a, senses, tol):
        return "unbounded", None
    return "optimal", best


def _has_improving_ray(c, a, senses, tol):
    """Check for d >= 0, sum d = 1, A d (senses vs 0), c'd < 0."""
    m, n = a.shape
    # Rows: the m homogeneous rows plus the normalization equality.
    a2 = np.vstack([a, np.ones((1, n))])
    b2 = np.zeros(m + 1)
    b2[m] = 1.0
    senses2 = list(senses) + ["="]
    slack = _slack_bounds(senses2)
    a_full = np.hstack([a2, np.eye(m + 1)])

    for cols, x in _basic_solutions(a_full, b2, m + 1):
        feasible = True
        val = 0.0
        for j, xj in zip(cols, x):
            if j < n:
                if xj < -tol:
                    feasible = False
                    break
                val += c[j] * xj
            else:
                lo, hi = slack[j - n]
                if xj < lo - tol or xj > hi + tol:
                    feasible = False
                    break
        if feasible and val < -1e-6:
            return True
    return False


def random_lp(rng, max_vars=6, max_rows=6):
    """A random small LP over x >= 0 with integer data in [-5, 5].

    Returns (c, a, senses, b) ready for both the oracle and LinearProgram.
    """
    n = rng.randint(2, max_vars)
    m = rng.randint(1, max_rows)
    c = np.array([rng.randint(-5, 5) for _ in range(n)], dtype=float)
    a = np.array([[rng.randint(-5, 5) for _ in range(n)] for _ in range(m)], dtype=float)
    senses = [rng.choice(["<=", "<=", ">=", "="]) for _ in range(m)]
    b = np.array([rng.randint(-5, 10) for _ in range(m)], dtype=float)
    return c, a, senses, b


# ---------------------------------------------------------------------------
# Exhaustive planning oracle: enumerates every feasible integer production
# matrix day by day (DP over end-of-day net positions). Independent of the
# hybrid solver; only the objective *definition* (scales, weights, serving
# semantics) is shared, since both sides must optimize the same function.


def exhaustive_plan_optimum(dataset, config):
    """Exact optimum of the integer planning problem by enumeration.

    Requires a horizon below one week-pair (no smoothing term) and a small
    instance. Returns the optimal objective value.
    """
    from prodplan.planner import objective_scales

    products = sorted(dataset.products)
    pidx = {p: i for i, p in enumerate(products)}
    n = len(products)
    horizon = config.horizon
    assert horizon < 14, "oracle assumes no week-over-week smoothing term"

    w_delay, w_prod, w_inv, _w_smooth = config.objective_weights
    s_delay, s_prod, s_inv, _s_smooth = objective_scales(dataset, config)

    demand = np.zeros((n, horizon))
    for pid, series in config.demand.items():
        demand[pidx[pid], : len(series)] = series
    init = np.zeros(n)
    for pid, v in config.initial_inventory.items():
        init[pidx[pid]] = v

    rank = np.array([dataset.products[p].priority for p in products])
    prio_w = (n - rank + 1) / n
    hold = np.array([dataset.products[p].unit_holding_cost for p in products])

    children = [[] for _ in range(n)]
    for e in dataset.bom_edges:
        children[pidx[e.parent]].append((pidx[e.child], e.quantity_per))

    banned = dataset.banned_parents()
    cells = []  # (pi, factory_id, cost)
    for pid in products:
        if pid in banned:
            continue
        for fid in sorted(dataset.products[pid].unit_production_cost):
            cells.append((pidx[pid], fid, dataset.products[pid].unit_production_cost[fid]))

    cs_by_factory = {}
    for cs in config.capacity_sets:
        cs_by_factory.setdefault(cs.factory, []).append(cs)
    rate_of = {(r.product, r.capacity_set): r.rate for r in dataset.usage_rates}

    # Generous per-product production cap: own demand plus parent pull.
    ub = np.zeros(n)
    remaining = demand.sum(axis=1)
    order = list(range(n))
    # ancestors first: iterate until fixpoint (tiny n)
    for _ in range(n + 1):
        for pi in order:
            pull = remaining[pi]
            for e in dataset.bom_edges:
                if pidx[e.child] == pi:
                    pull += e.quantity_per * ub[pidx[e.parent]]
            ub[pi] = pull

    def day_options(t):
        """All feasible integer production vectors for day t."""
        holidays = config.holidays
        caps = {}
        for fac, sets in cs_by_factory.items():
            for cs in sets:
                cap = 0.0 if t in holidays.get(fac, frozenset()) else cs.daily_capacity[t]
                caps[cs.id] = cap
        options = []

        def rec(k, vec, used):
            if k == len(cells):
                options.append(tuple(vec))
                return
            pi, fid, _cost = cells[k]
            if t in config.holidays.get(fid, frozenset()):
                rec(k + 1, vec + [0], used)
                return
            max_q = int(ub[pi])
            q = 0
            while q <= max_q:
                new_used = dict(used)
                ok = True
                for cs in cs_by_factory.get(fid, []):
                    r = rate_of.get((products[pi], cs.id))
                    if r is None:
                        continue
                    u = new_used.get(cs.id, 0.0) + r * q
                    if u > caps[cs.id] + 1e-9:
                        ok = False
                        break
                    new_used[cs.id] = u
                if not ok:
                    break
                rec(k + 1, vec + [q], new_used)
                q += 1

        rec(0, [], {})
        return options

    options_per_day = [day_options(t) for t in range(horizon)]

    from functools import lru_cache

    @lru_cache(maxsize=None)
    def best(t, net):
        if t == horizon:
            return 0.0
        net_arr = np.array(net, dtype=float)
        inv_prev = np.maximum(net_arr, 0.0)
        best_val = math.inf
        for vec in options_per_day[t]:
            prod = np.zeros(n)
            cost_prod = 0.0
            for (pi, _fid, cost), q in zip(cells, vec):
                prod[pi] += q
                cost_prod += cost * q
            cons = np.zeros(n)
            for pi in range(n):
                if prod[pi]:
                    for ci, qper in children[pi]:
                        cons[ci] += qper * prod[pi]
            if np.any(inv_prev + prod - cons < -1e-9):
                continue
            net_new = net_arr + prod - cons - demand[:, t]
            inv_new = np.maximum(net_new, 0.0)
            bl_new = np.maximum(-net_new, 0.0)
            day_cost = (
                w_delay * float(prio_w @ bl_new) / s_delay
                + w_prod * cost_prod / s_prod
                + w_inv * float(hold @ inv_new) / s_inv
            )
            tail = best(t + 1, tuple(net_new))
            if day_cost + tail < best_val:
                best_val = day_cost + tail
        return best_val

    return best(0, tuple(init))
