"""Maximum eps-feasible subsystem of ``A x >= 0`` over the probability simplex."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bicriteria import GRID_BUDGET, KUniformGrid
from .core import Instance, ValidationError
from .lp import LinearProgram, solve_lp
from .voting import KVotingObjective, vote_margins

COUNT_TOL = 1e-9
MAX_BRUTE_ROWS = 20


@dataclass(frozen=True, eq=False)
class MfsInstance:
    A: np.ndarray
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise ValidationError("matrix must be 2-D with at least one row and column")
        if not np.all(np.isfinite(A)):
            raise ValidationError("matrix entries must be finite")
        if self.lo > self.hi:
            raise ValidationError("entry range is empty")
        if A.min() < self.lo - 1e-12 or A.max() > self.hi + 1e-12:
            raise ValidationError(f"matrix entries fall outside the declared range [{self.lo}, {self.hi}]")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def n_row(self) -> int:
        return self.A.shape[0]

    @property
    def n_col(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True, eq=False)
class MfsSolution:
    x: np.ndarray
    satisfied: int
    k_used: int


def count_satisfied(inst: MfsInstance, x, slack: float) -> int:
    """Number of rows with (A x)_i >= -slack."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != inst.n_col:
        raise ValidationError(f"x has {x.size} entries; matrix has {inst.n_col} columns")
    return int(np.count_nonzero(inst.A @ x >= -slack - COUNT_TOL))


def mfs_k(n_row: int, eps: float, entry_range: float) -> int:
    """Grid resolution so that some k-uniform x loses at most eps on every row
    that the optimum satisfies (Hoeffding plus a union bound)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return max(1, math.ceil(entry_range**2 * math.log(n_row) / (2 * eps**2)))


def solve_mfs_kuniform(inst: MfsInstance, eps: float, budget: int = GRID_BUDGET, k: int | None = None) -> MfsSolution:
    """Best k-uniform x at slack eps; first best in grid order wins ties."""
    if k is None:
        k = mfs_k(inst.n_row, eps, inst.hi - inst.lo)
    grid = KUniformGrid(inst.n_col, k, budget)
    X = grid.points()
    counts = np.count_nonzero(X @ inst.A.T >= -eps - COUNT_TOL, axis=1)
    best = int(np.argmax(counts))
    return MfsSolution(x=X[best].copy(), satisfied=int(counts[best]), k_used=k)


def _rows_feasible(A: np.ndarray) -> bool:
    n_col = A.shape[1]
    lp = LinearProgram(
        c=np.zeros(n_col),
        A=np.vstack([A, np.ones((1, n_col))]),
        senses=(">=",) * A.shape[0] + ("=",),
        b=np.concatenate([np.zeros(A.shape[0]), [1.0]]),
    )
    return solve_lp(lp).status == "optimal"


def kstar_bruteforce(inst: MfsInstance, max_rows: int = MAX_BRUTE_ROWS) -> int:
    """Largest number of rows simultaneously satisfiable with zero slack."""
    if inst.n_row > max_rows:
        raise ValidationError(f"{inst.n_row} rows is too many for subset enumeration (max {max_rows})")
    for size in range(inst.n_row, 0, -1):
        for rows in itertools.combinations(range(inst.n_row), size):
            if _rows_feasible(inst.A[list(rows)]):
                return size
    return 0


def voting_to_mfs(instance: Instance, objective: KVotingObjective | None = None) -> MfsInstance:
    """Row r, column theta: u^r_theta(a_0) - u^r_theta(a_1).

    The declared range is the tightest one containing the entries.
    """
    if objective is None:
        objective = KVotingObjective(1, (0,) * instance.n_receivers)
    A = vote_margins(instance, objective)
    return MfsInstance(A, float(A.min()), float(A.max()))
