"""Self-contained bounded-variable primal simplex solver.

The solver implements a revised simplex over the computational form
``A x + s = b`` with one slack per row and explicit [lo, hi] bounds on every
variable. Phase 1 uses artificial columns only for rows whose slack cannot
absorb the initial residual. Pricing is Dantzig (most negative reduced cost)
with a Bland's-rule fallback after ``3 * (rows + cols)`` iterations, which
guarantees termination.

Very large instances (vars + rows above ``SimplexConfig.highs_threshold``)
are delegated to scipy's HiGHS behind the same ``solve_lp`` contract; the
in-repo simplex is the default and the only backend exercised by the solver
test suite. A plain-text dump of any instance is available through
``LinearProgram.to_debug_text`` (format documented in docs/lp-debug-format.md).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_SENSES = ("<=", "=", ">=")


class LpError(ValueError):
    """Malformed linear program (dimension mismatch, NaN/inf coefficient)."""


class SolverError(RuntimeError):
    """Numerical failure inside the solver (should not happen on sane data)."""


@dataclass
class SimplexConfig:
    eps_feas: float = 1e-7
    eps_opt: float = 1e-7
    max_iterations: int | None = None  # default 50*(m+n) + 1000
    bland_after: int | None = None  # default 3*(m+n)
    refactor_every: int = 100
    backend: str = "auto"  # auto | simplex | highs
    highs_threshold: int = 2500  # vars + rows above which auto picks highs


class LinearProgram:
    """Minimization LP: c'x subject to row senses and variable bounds.

    Rows are stored sparsely as (indices, values) list pairs. Bounds default
    to [0, +inf). All coefficients must be finite.
    """

    def __init__(self, num_vars: int):
        if num_vars < 0:
            raise LpError("num_vars must be >= 0")
        self.num_vars = num_vars
        self.objective = np.zeros(num_vars)
        self.lower = np.zeros(num_vars)
        self.upper = np.full(num_vars, np.inf)
        self.row_cols: list[list[int]] = []
        self.row_vals: list[list[float]] = []
        self.senses: list[str] = []
        self.rhs: list[float] = []

    @property
    def num_rows(self) -> int:
        return len(self.senses)

    def set_objective(self, coeffs: Iterable[float] | Mapping[int, float]) -> None:
        if isinstance(coeffs, Mapping):
            for j, c in coeffs.items():
                self.set_objective_coeff(j, c)
            return
        arr = np.asarray(list(coeffs), dtype=float)
        if arr.shape != (self.num_vars,):
            raise LpError(f"objective length {arr.shape} != num_vars {self.num_vars}")
        if not np.all(np.isfinite(arr)):
            raise LpError("objective has non-finite coefficients")
        self.objective = arr

    def set_objective_coeff(self, j: int, c: float) -> None:
        self._check_var(j)
        if not math.isfinite(c):
            raise LpError(f"objective coefficient for var {j} is not finite")
        self.objective[j] = c

    def set_bounds(self, j: int, lo: float | None, hi: float | None) -> None:
        self._check_var(j)
        lo_v = -np.inf if lo is None else float(lo)
        hi_v = np.inf if hi is None else float(hi)
        if math.isnan(lo_v) or math.isnan(hi_v):
            raise LpError(f"bounds for var {j} contain NaN")
        if lo_v > hi_v:
            raise LpError(f"var {j}: lower bound {lo_v} > upper bound {hi_v}")
        self.lower[j] = lo_v
        self.upper[j] = hi_v

    def add_constraint(
        self,
        coeffs: Mapping[int, float] | Iterable[tuple[int, float]],
        sense: str,
        rhs: float,
    ) -> int:
        if sense not in _SENSES:
            raise LpError(f"unknown sense {sense!r}")
        if not math.isfinite(rhs):
            raise LpError("rhs is not finite")
        items = sorted(coeffs.items()) if isinstance(coeffs, Mapping) else sorted(coeffs)
        cols = [j for j, _ in items]
        vals = [float(v) for _, v in items]
        if cols and (cols[0] < 0 or cols[-1] >= self.num_vars):
            raise LpError("constraint references a variable out of range")
        if len(set(cols)) != len(cols):
            raise LpError("constraint has duplicate variable entries")
        if not all(map(math.isfinite, vals)):
            raise LpError("constraint has non-finite coefficients")
        self.row_cols.append(cols)
        self.row_vals.append(vals)
        self.senses.append(sense)
        self.rhs.append(float(rhs))
        return self.num_rows - 1

    def dense_matrix(self) -> np.ndarray:
        a = np.zeros((self.num_rows, self.num_vars))
        for i, (cols, vals) in enumerate(zip(self.row_cols, self.row_vals)):
            a[i, cols] = vals
        return a

    def to_debug_text(self) -> str:
        """Plain-text dump: one `min:` line, one line per row, one per bound."""
        parts = [f"lp vars={self.num_vars} rows={self.num_rows}"]
        obj = " + ".join(
            f"{self.objective[j]:g}*x{j}" for j in range(self.num_vars) if self.objective[j]
        )
        parts.append(f"min: {obj or '0'}")
        for i in range(self.num_rows):
            terms = " + ".join(
                f"{v:g}*x{j}" for j, v in zip(self.row_cols[i], self.row_vals[i])
            )
            parts.append(f"r{i}: {terms or '0'} {self.senses[i]} {self.rhs[i]:g}")
        for j in range(self.num_vars):
            parts.append(f"x{j} in [{self.lower[j]:g}, {self.upper[j]:g}]")
        return "\n".join(parts)

    def _check_var(self, j: int) -> None:
        if not 0 <= j < self.num_vars:
            raise LpError(f"variable index {j} out of range")


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: np.ndarray | None
    objective_value: float
    iterations: int
    duals: np.ndarray | None = None  # one per row; None for the highs backend
    reduced_costs: np.ndarray | None = None


def solve_lp(lp: LinearProgram, config: SimplexConfig | None = None) -> LpSolution:
    """Solve a minimization LP.

    status == "optimal" guarantees primal feasibility within eps_feas and
    optimality within eps_opt; the result is deterministic for a fixed
    instance.
    """
    cfg = config or SimplexConfig()
    backend = cfg.backend
    if backend == "auto":
        backend = "highs" if lp.num_vars + lp.num_rows > cfg.highs_threshold else "simplex"
    if backend == "highs":
        return _solve_highs(lp)
    if backend != "simplex":
        raise LpError(f"unknown backend {backend!r}")
    return _BoundedSimplex(lp, cfg).solve()


def _solve_highs(lp: LinearProgram) -> LpSolution:
    from scipy import sparse
    from scipy.optimize import linprog

    n = lp.num_vars
    ub_rows, ub_b, eq_rows, eq_b = [], [], [], []
    for i in range(lp.num_rows):
        cols, vals, sense, b = lp.row_cols[i], lp.row_vals[i], lp.senses[i], lp.rhs[i]
        if sense == "=":
            eq_rows.append((cols, vals))
            eq_b.append(b)
        elif sense == "<=":
            ub_rows.append((cols, vals))
            ub_b.append(b)
        else:
            ub_rows.append((cols, [-v for v in vals]))
            ub_b.append(-b)

    def build(rows):
        data, ri, ci = [], [], []
        for k, (cols, vals) in enumerate(rows):
            ri.extend([k] * len(cols))
            ci.extend(cols)
            data.extend(vals)
        return sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), n))

    # Dual simplex degrades badly on large staircase balance structures;
    # interior point stays fast, and the caller floors the solution anyway.
    method = "highs-ipm" if lp.num_vars + lp.num_rows > 20000 else "highs"
    res = linprog(
        c=lp.objective,
        A_ub=build(ub_rows) if ub_rows else None,
        b_ub=np.array(ub_b) if ub_b else None,
        A_eq=build(eq_rows) if eq_rows else None,
        b_eq=np.array(eq_b) if eq_b else None,
        bounds=list(zip(lp.lower, lp.upper)),
        method=method,
    )
    iterations = int(getattr(res, "nit", 0) or 0)
    if res.status == 0:
        return LpSolution(OPTIMAL, np.asarray(res.x), float(res.fun), iterations)
    if res.status == 2:
        return LpSolution(INFEASIBLE, None, math.inf, iterations)
    if res.status == 3:
        return LpSolution(UNBOUNDED, None, -math.inf, iterations)
    raise SolverError(f"highs backend failed: status {res.status} ({res.message})")


class _BoundedSimplex:
    """Two-phase bounded-variable revised simplex on a dense tableau."""

    def __init__(self, lp: LinearProgram, cfg: SimplexConfig):
        self.cfg = cfg
        self.n_struct = lp.num_vars
        self.m = lp.num_rows
        n, m = self.n_struct, self.m

        # Columns: structurals, then one slack per row, then artificials.
        slack_lo = np.zeros(m)
        slack_hi = np.zeros(m)
        for i, sense in enumerate(lp.senses):
            if sense == "<=":
                slack_lo[i], slack_hi[i] = 0.0, np.inf
            elif sense == ">=":
                slack_lo[i], slack_hi[i] = -np.inf, 0.0
            else:
                slack_lo[i] = slack_hi[i] = 0.0
        self.lower = np.concatenate([lp.lower, slack_lo])
        self.upper = np.concatenate([lp.upper, slack_hi])
        self.a = np.zeros((m, n + m))
        for i, (cols, vals) in enumerate(zip(lp.row_cols, lp.row_vals)):
            self.a[i, cols] = vals
            self.a[i, n + i] = 1.0
        self.b = np.array(lp.rhs, dtype=float)
        self.c_real = np.concatenate([lp.objective, np.zeros(m)])
        self.iterations = 0

    def solve(self) -> LpSolution:
        n, m = self.n_struct, self.m
        eps = self.cfg.eps_feas

        if m == 0:
            return self._solve_unconstrained()

        # Nonbasic starting values: finite lower bound, else finite upper, else 0.
        v = np.where(
            np.isfinite(self.lower),
            self.lower,
            np.where(np.isfinite(self.upper), self.upper, 0.0),
        )
        resid = self.b - self.a @ v

        basis = np.empty(m, dtype=np.int64)
        art_cols: list[np.ndarray] = []
        art_idx: list[int] = []
        x_basic = np.empty(m)
        next_col = self.a.shape[1]
        for i in range(m):
            s = n + i
            s_val = v[s] + resid[i]
            if self.lower[s] - eps <= s_val <= self.upper[s] + eps:
                basis[i] = s
                x_basic[i] = s_val
            else:
                col = np.zeros(m)
                col[i] = 1.0 if resid[i] >= 0 else -1.0
                art_cols.append(col)
                art_idx.append(next_col)
                basis[i] = next_col
                x_basic[i] = abs(resid[i])
                next_col += 1

        n_art = len(art_idx)
        if n_art:
            self.a = np.hstack([self.a, np.column_stack(art_cols)])
            self.lower = np.concatenate([self.lower, np.zeros(n_art)])
            self.upper = np.concatenate([self.upper, np.full(n_art, np.inf)])
            self.c_real = np.concatenate([self.c_real, np.zeros(n_art)])
            v = np.concatenate([v, np.zeros(n_art)])

        total = self.a.shape[1]
        self.v = v
        self.basis = basis
        self.x_basic = x_basic
        self.is_basic = np.zeros(total, dtype=bool)
        self.is_basic[basis] = True
        self.binv = self._factorize()

        if n_art:
            c1 = np.zeros(total)
            c1[art_idx] = 1.0
            status = self._iterate(c1, allow_unbounded=False)
            if status != OPTIMAL:
                raise SolverError("phase 1 did not terminate cleanly")
            art_mask = np.zeros(total, dtype=bool)
            art_mask[art_idx] = True
            infeas = float(np.sum(np.maximum(self.x_basic[art_mask[self.basis]], 0.0)))
            if infeas > math.sqrt(eps):
                return LpSolution(INFEASIBLE, None, math.inf, self.iterations)
            # Pin artificials at zero for phase 2.
            self.lower[art_idx] = 0.0
            self.upper[art_idx] = 0.0
            self.v[art_idx] = 0.0
            self.x_basic[art_mask[self.basis]] = 0.0

        status = self._iterate(self.c_real, allow_unbounded=True)
        if status == UNBOUNDED:
            return LpSolution(UNBOUNDED, None, -math.inf, self.iterations)

        x_full = self.v.copy()
        x_full[self.basis] = self.x_basic
        x = x_full[:n]
        obj = float(self.c_real[:n] @ x)
        y = self.c_real[self.basis] @ self.binv
        reduced = self.c_real - y @ self.a
        return LpSolution(OPTIMAL, x, obj, self.iterations, duals=y.copy(), reduced_costs=reduced[: n])

    def _solve_unconstrained(self) -> LpSolution:
        n = self.n_struct
        x = np.empty(n)
        c = self.c_real[:n]
        for j in range(n):
            if c[j] > 0:
                if not np.isfinite(self.lower[j]):
                    return LpSolution(UNBOUNDED, None, -math.inf, 0)
                x[j] = self.lower[j]
            elif c[j] < 0:
                if not np.isfinite(self.upper[j]):
                    return LpSolution(UNBOUNDED, None, -math.inf, 0)
                x[j] = self.upper[j]
            else:
                x[j] = self.lower[j] if np.isfinite(self.lower[j]) else min(0.0, self.upper[j])
        return LpSolution(OPTIMAL, x, float(c @ x), 0, duals=np.zeros(0), reduced_costs=c.copy())

    def _factorize(self) -> np.ndarray:
        try:
            return np.linalg.inv(self.a[:, self.basis])
        except np.linalg.LinAlgError as exc:
            raise SolverError("singular basis") from exc

    def _iterate(self, c: np.ndarray, allow_unbounded: bool) -> str:
        m = self.m
        eps_opt = self.cfg.eps_opt
        size = self.m + self.n_struct
        bland_after = self.cfg.bland_after or 3 * size
        max_iter = self.cfg.max_iterations or (50 * size + 1000)
        phase_start = self.iterations
        since_refactor = 0

        while True:
            if self.iterations - phase_start > max_iter:
                raise SolverError("iteration limit exceeded")
            y = c[self.basis] @ self.binv
            d = c - y @ self.a
            can_up = (~self.is_basic) & (d < -eps_opt) & (self.v < self.upper - 1e-12)
            can_dn = (~self.is_basic) & (d > eps_opt) & (self.v > self.lower + 1e-12)
            candidates = np.flatnonzero(can_up | can_dn)
            if candidates.size == 0:
                return OPTIMAL

            use_bland = (self.iterations - phase_start) >= bland_after
            if use_bland:
                j = int(candidates[0])
            else:
                j = int(candidates[np.argmax(np.abs(d[candidates]))])
            direction = 1.0 if can_up[j] else -1.0

            w = self.binv @ self.a[:, j]
            g = direction * w
            t_flip = (
                (self.upper[j] - self.v[j]) if direction > 0 else (self.v[j] - self.lower[j])
            )

            t_best = t_flip
            leave = -1
            tol = 1e-11
            for i in range(m):
                gi = g[i]
                if gi > tol:
                    lo = self.lower[self.basis[i]]
                    if not np.isfinite(lo):
                        continue
                    t_i = (self.x_basic[i] - lo) / gi
                elif gi < -tol:
                    hi = self.upper[self.basis[i]]
                    if not np.isfinite(hi):
                        continue
                    t_i = (self.x_basic[i] - hi) / gi
                else:
                    continue
                if t_i < 0.0:
                    t_i = 0.0
                if t_i < t_best - 1e-12:
                    t_best = t_i
                    leave = i
                elif leave >= 0 and t_i <= t_best + 1e-12:
                    if use_bland:
                        if self.basis[i] < self.basis[leave]:
                            leave = i
                    elif abs(g[i]) > abs(g[leave]):
                        leave = i

            if not np.isfinite(t_best):
                if allow_unbounded:
                    return UNBOUNDED
                raise SolverError("unbounded direction in phase 1")

            self.iterations += 1
            if leave < 0:
                # Bound flip: entering variable runs to its opposite bound.
                self.v[j] += direction * t_best
                self.x_basic -= t_best * g
                continue

            enter_val = self.v[j] + direction * t_best
            left_var = self.basis[leave]
            self.v[left_var] = (
                self.lower[left_var] if g[leave] > 0 else self.upper[left_var]
            )
            self.x_basic -= t_best * g
            self.x_basic[leave] = enter_val
            self.is_basic[left_var] = False
            self.is_basic[j] = True
            self.basis[leave] = j

            wr = w[leave]
            if abs(wr) < 1e-12:
                self.binv = self._factorize()
            else:
                pivrow = self.binv[leave] / wr
                self.binv -= np.outer(w, pivrow)
                self.binv[leave] = pivrow
            since_refactor += 1
            if since_refactor >= self.cfg.refactor_every:
                self.binv = self._factorize()
                self.x_basic = self.binv @ (self.b - self.a @ self._nonbasic_values())
                since_refactor = 0

    def _nonbasic_values(self) -> np.ndarray:
        full = self.v.copy()
        full[self.basis] = 0.0
        return full
