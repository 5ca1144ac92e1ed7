"""Dense two-phase revised simplex.

The solver keeps an explicit basis inverse and prices every column with one
matrix-vector product per iteration, so problems with a handful of rows and
a very large number of columns stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
REFACTOR_EVERY = 64

LE, GE, EQ = "<=", ">=", "="
_SENSES = {LE, GE, EQ}


class LpError(Exception):
    """Malformed linear program."""


class LpNumericalError(LpError):
    """The simplex iteration lost numerical control (singular basis, stalling)."""


@dataclass(frozen=True)
class LinearProgram:
    """maximize c @ x  s.t.  A[i] @ x (<=|>=|=) b[i],  lower <= x <= upper."""

    c: np.ndarray
    A: np.ndarray
    senses: tuple[str, ...]
    b: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        n = c.size
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        if A.ndim != 2 or A.shape[1] != n:
            raise LpError(f"constraint matrix shape {A.shape} does not match {n} variables")
        m = A.shape[0]
        senses = self.senses
        if isinstance(senses, str):
            senses = (senses,) * m
        senses = tuple(senses)
        if len(senses) != m or not set(senses) <= _SENSES:
            raise LpError(f"need {m} relations drawn from {sorted(_SENSES)}")
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if b.size != m:
            raise LpError(f"right-hand side has {b.size} entries, expected {m}")
        lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float).reshape(-1)
        upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).reshape(-1)
        if lower.size != n or upper.size != n:
            raise LpError("bound vectors must have one entry per variable")
        for name, arr in (("c", c), ("A", A), ("b", b)):
            if not np.all(np.isfinite(arr)):
                raise LpError(f"{name} contains non-finite coefficients")
        if np.any(lower == np.inf) or np.any(upper == -np.inf) or np.any(lower > upper):
            raise LpError("inconsistent variable bounds")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def max_violation(self, x: np.ndarray) -> float:
        """Largest constraint or bound violation of `x` (0 when feasible)."""
        x = np.asarray(x, dtype=float)
        viol = [0.0]
        if self.n_rows:
            lhs = self.A @ x
            s = np.array(self.senses)
            diff = lhs - self.b
            viol.append(float(np.max(np.where(s == LE, diff, 0.0), initial=0.0)))
            viol.append(float(np.max(np.where(s == GE, -diff, 0.0), initial=0.0)))
            viol.append(float(np.max(np.where(s == EQ, np.abs(diff), 0.0), initial=0.0)))
        viol.append(float(np.max(self.lower - x, initial=0.0)))
        viol.append(float(np.max(x - self.upper, initial=0.0)))
        return max(viol)


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    value: float
    iterations: int = 0
    basis: list[int] = field(default_factory=list, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _StandardForm:
    """maximize c @ z  s.t.  A z = b, z >= 0, b >= 0, plus the map back to x."""

    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        lo, up = lp.lower, lp.upper
        # x = shift + signed combination of the z columns
        self.shift = np.zeros(n)
        self.recover: list[tuple[int, int, float]] = []  # (x index, z index, sign)
        c_parts: list[float] = []
        A_cols: list[np.ndarray] = []
        extra_rows: list[tuple[int, float]] = []  # (z index, upper bound on z)
        z = 0
        for j in range(n):
            a, cj = lp.A[:, j], lp.c[j]
            if np.isfinite(lo[j]):
                self.shift[j] = lo[j]
                self.recover.append((j, z, 1.0))
                A_cols.append(a)
                c_parts.append(cj)
                if np.isfinite(up[j]):
                    extra_rows.append((z, up[j] - lo[j]))
                z += 1
            elif np.isfinite(up[j]):
                self.shift[j] = up[j]
                self.recover.append((j, z, -1.0))
                A_cols.append(-a)
                c_parts.append(-cj)
                z += 1
            else:
                self.recover.append((j, z, 1.0))
                self.recover.append((j, z + 1, -1.0))
                A_cols.extend([a, -a])
                c_parts.extend([cj, -cj])
                z += 2
        n_struct = z
        m0 = lp.n_rows
        A_struct = np.column_stack(A_cols) if A_cols else np.zeros((m0, 0))
        b = lp.b - lp.A @ self.shift
        senses = list(lp.senses)
        rows = [A_struct]
        if extra_rows:
            ub = np.zeros((len(extra_rows), n_struct))
            for i, (zi, _) in enumerate(extra_rows):
                ub[i, zi] = 1.0
            rows.append(ub)
            b = np.concatenate([b, [u for _, u in extra_rows]])
            senses += [LE] * len(extra_rows)
        A = np.vstack(rows) if rows else np.zeros((0, n_struct))
        m = A.shape[0]

        n_slack = sum(s != EQ for s in senses)
        S = np.zeros((m, n_slack))
        k = 0
        slack_of_row = [-1] * m
        for i, s in enumerate(senses):
            if s == LE:
                S[i, k] = 1.0
            elif s == GE:
                S[i, k] = -1.0
            else:
                continue
            slack_of_row[i] = n_struct + k
            k += 1
        A = np.hstack([A, S])
        flip = b < 0
        A[flip] *= -1.0
        b = np.where(flip, -b, b)

        self.A = A
        self.b = b
        self.c = np.concatenate([np.asarray(c_parts, dtype=float), np.zeros(n_slack)])
        self.m = m
        self.n_struct = n_struct
        # rows whose slack enters with +1 can start with that slack basic
        self.start_basis: list[int | None] = []
        for i in range(m):
            j = slack_of_row[i]
            self.start_basis.append(j if j >= 0 and A[i, j] > 0 else None)

    def to_x(self, zvec: np.ndarray) -> np.ndarray:
        x = self.shift.copy()
        for j, zi, sign in self.recover:
            x[j] += sign * zvec[zi]
        return x


class _Simplex:
    """Revised simplex on  max c@z, A z = b, z >= 0  starting from a feasible basis."""

    def __init__(self, A: np.ndarray, b: np.ndarray, basis: list[int], eligible: np.ndarray):
        self.A = A
        self.b = b
        self.m, self.n = A.shape
        self.basis = list(basis)
        self.eligible = eligible
        self.iterations = 0
        self.refactor()

    def refactor(self) -> None:
        if self.m == 0:
            self.Binv = np.zeros((0, 0))
            self.xB = np.zeros(0)
            return
        B = self.A[:, self.basis]
        try:
            cond = np.linalg.cond(B)
            if not np.isfinite(cond) or cond > 1e13:
                raise np.linalg.LinAlgError(f"condition number {cond:.3g}")
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise LpNumericalError(
                f"singular basis after {self.iterations} pivots "
                f"(m={self.m}, basis={self.basis[:12]}{'...' if self.m > 12 else ''}): {exc}"
            ) from None
        self.xB = self.Binv @ self.b
        self.xB[(self.xB < 0) & (self.xB > -FEAS_TOL)] = 0.0

    def run(self, c: np.ndarray, max_iter: int) -> str:
        m, n = self.m, self.n
        bland = False
        degenerate_streak = 0
        stall_limit = 2 * (m + n)
        since_refactor = 0
        scale = max(1.0, float(np.max(np.abs(c), initial=0.0)))
        while True:
            if self.iterations >= max_iter:
                raise LpNumericalError(f"iteration limit {max_iter} reached (m={m}, n={n})")
            cB = c[self.basis]
            y = cB @ self.Binv if m else np.zeros(0)
            d = c - y @ self.A if m else c.copy()
            d[~self.eligible] = -np.inf
            d[self.basis] = -np.inf
            if bland:
                cand = np.flatnonzero(d > PIVOT_TOL * scale)
                if cand.size == 0:
                    return "optimal"
                j = int(cand[0])
            else:
                j = int(np.argmax(d))
                if not d[j] > PIVOT_TOL * scale:
                    return "optimal"
            alpha = self.Binv @ self.A[:, j]
            pos = np.flatnonzero(alpha > PIVOT_TOL)
            if pos.size == 0:
                return "unbounded"
            ratios = self.xB[pos] / alpha[pos]
            tmin = ratios.min()
            ties = pos[ratios <= tmin + 1e-12 * max(1.0, abs(tmin))]
            if bland:
                r = int(min(ties, key=lambda i: self.basis[i]))
            else:
                r = int(ties[np.argmax(alpha[ties])])
            self._pivot(r, j, alpha)
            self.iterations += 1
            since_refactor += 1
            if tmin <= PIVOT_TOL:
                degenerate_streak += 1
                if degenerate_streak > stall_limit:
                    bland = True
            else:
                degenerate_streak = 0
            if since_refactor >= REFACTOR_EVERY:
                self.refactor()
                since_refactor = 0

    def _pivot(self, r: int, j: int, alpha: np.ndarray) -> None:
        piv = alpha[r]
        row = self.Binv[r] / piv
        xr = self.xB[r] / piv
        self.Binv -= np.outer(alpha, row)
        self.Binv[r] = row
        self.xB -= alpha * xr
        self.xB[r] = xr
        self.xB[(self.xB < 0) & (self.xB > -FEAS_TOL)] = 0.0
        self.basis[r] = j

    def primal(self) -> np.ndarray:
        z = np.zeros(self.n)
        z[self.basis] = self.xB
        return z


def solve_lp(lp: LinearProgram, max_iter: int | None = None) -> LpSolution:
    """Solve `lp` with the two-phase primal simplex.

    Dantzig pricing is used until the number of consecutive degenerate pivots
    exceeds twice the problem size; from then on Bland's rule guarantees
    termination.  Raises LpNumericalError when the basis becomes singular.
    """
    sf = _StandardForm(lp)
    m = sf.m
    n_real = sf.A.shape[1]
    if max_iter is None:
        max_iter = 50 * (m + n_real) + 1000

    need_art = [i for i, j in enumerate(sf.start_basis) if j is None]
    n_art = len(need_art)
    A = np.hstack([sf.A, np.zeros((m, n_art))])
    basis = []
    k = 0
    for i, j in enumerate(sf.start_basis):
        if j is None:
            A[i, n_real + k] = 1.0
            basis.append(n_real + k)
            k += 1
        else:
            basis.append(j)
    n_tot = n_real + n_art
    eligible = np.ones(n_tot, dtype=bool)
    simplex = _Simplex(A, sf.b, basis, eligible)

    if n_art:
        c1 = np.zeros(n_tot)
        c1[n_real:] = -1.0
        simplex.run(c1, max_iter)
        infeas = float(np.sum(simplex.primal()[n_real:]))
        if infeas > FEAS_TOL * (1.0 + float(np.max(np.abs(sf.b), initial=0.0))):
            return LpSolution("infeasible", None, float("nan"), simplex.iterations)
        _drive_out_artificials(simplex, n_real)
        eligible[n_real:] = False

    c2 = np.concatenate([sf.c, np.zeros(n_art)])
    status = simplex.run(c2, max_iter)
    if status == "unbounded":
        return LpSolution("unbounded", None, float("inf"), simplex.iterations)
    simplex.refactor()
    zvec = simplex.primal()
    zvec[zvec < 0] = 0.0
    x = sf.to_x(zvec[: sf.n_struct])
    viol = lp.max_violation(x)
    if viol > FEAS_TOL * (1.0 + float(np.max(np.abs(lp.b), initial=0.0))):
        raise LpNumericalError(f"optimal basis violates constraints by {viol:.3g}")
    return LpSolution("optimal", x, float(lp.c @ x), simplex.iterations, list(simplex.basis))


def _drive_out_artificials(simplex: _Simplex, n_real: int) -> None:
    """Pivot zero-level artificials out of the basis where a real column allows it.

    Artificials that cannot leave sit on redundant rows and stay at zero.
    """
    for r in range(simplex.m):
        if simplex.basis[r] < n_real:
            continue
        row = simplex.Binv[r] @ simplex.A[:, :n_real]
        cand = np.abs(row)
        in_basis = [j for j in simplex.basis if j < n_real]
        cand[in_basis] = 0.0
        j = int(np.argmax(cand)) if cand.size else -1
        if j >= 0 and cand[j] > 1e-7:
            alpha = simplex.Binv @ simplex.A[:, j]
            simplex._pivot(r, j, alpha)
    simplex.refactor()


def dual_bound(lp: LinearProgram, y: Sequence[float]) -> float:
    """Dual bound b @ y for a maximisation LP with x >= 0.

    `y` must be dual feasible: y_i >= 0 on <= rows, y_i <= 0 on >= rows and
    A.T @ y >= c.  Raises LpError when it is not.
    """
    y = np.asarray(y, dtype=float)
    s = np.array(lp.senses)
    if np.any((s == LE) & (y < -1e-12)) or np.any((s == GE) & (y > 1e-12)):
        raise LpError("dual multipliers have the wrong sign")
    if np.any(lp.A.T @ y < lp.c - 1e-12):
        raise LpError("dual multipliers do not cover the objective")
    if np.any(lp.lower != 0) or np.any(np.isfinite(lp.upper)):
        raise LpError("dual bound helper expects x >= 0 with no upper bounds")
    return float(lp.b @ y)
