"""Bi-criteria approximation through k-uniform posteriors.

Every posterior on the grid of k-uniform distributions is scored by the
sender's tie-breaking oracle on its eps-best-response set; an LP then picks
the best distribution over grid posteriors whose mean is the prior, and the
result is turned back into a direct scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .core import TIE_TOL, DirectScheme, Instance, Posterior, SenderObjective, make_scheme
from .exact import BudgetExceeded
from .lp import LinearProgram, LpNumericalError, solve_lp

GRID_BUDGET = 10**7


def compute_k(n_receivers: int, max_actions: int, delta: float, eps: float) -> int:
    """ceil(32 ln(4 n rho / delta) / eps^2): grid resolution for an
    alpha(1 - delta)-approximate eps-persuasive scheme."""
    if n_receivers < 1 or max_actions < 1:
        raise ValueError("need at least one receiver and one action")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.ceil(32 * math.log(4 * n_receivers * max_actions / delta) / eps**2)


def grid_size(d: int, k: int) -> int:
    return math.comb(k + d - 1, d - 1)


@lru_cache(maxsize=32)
def _compositions(k: int, d: int) -> np.ndarray:
    # first coordinate descending, then recursively the same on the rest
    if d == 1:
        return np.array([[k]], dtype=np.int64)
    blocks = []
    for first in range(k, -1, -1):
        rest = _compositions(k - first, d - 1)
        blocks.append(np.hstack([np.full((rest.shape[0], 1), first, dtype=np.int64), rest]))
    out = np.vstack(blocks)
    out.setflags(write=False)
    return out


class KUniformGrid:
    """All distributions over d outcomes whose entries are multiples of 1/k.

    Iteration yields exact ``Fraction`` tuples in lexicographic order of the
    numerators, largest first coordinate first.
    """

    def __init__(self, d: int, k: int, budget: int = GRID_BUDGET):
        if d < 1 or k < 1:
            raise ValueError("d and k must be positive")
        size = grid_size(d, k)
        if size > budget:
            raise BudgetExceeded(f"k-uniform grid has {size} points (d={d}, k={k}); budget is {budget}")
        self.d, self.k = d, k

    def __len__(self) -> int:
        return grid_size(self.d, self.k)

    def numerators(self) -> np.ndarray:
        return _compositions(self.k, self.d)

    def points(self) -> np.ndarray:
        return self.numerators() / self.k

    def __iter__(self) -> Iterator[tuple[Fraction, ...]]:
        for row in self.numerators():
            yield tuple(Fraction(int(n), self.k) for n in row)

    def posteriors(self) -> Iterator[Posterior]:
        for row in self.points():
            yield Posterior(row)


def enumerate_k_uniform(d: int, k: int, budget: int = GRID_BUDGET) -> KUniformGrid:
    return KUniformGrid(d, k, budget)


@dataclass(frozen=True, eq=False)
class BicriteriaResult:
    gamma: dict[tuple[Fraction, ...], float]
    scheme: DirectScheme
    value: float
    k_used: int
    grid_size: int
    guarantee: bool  # False when k was overridden below the theoretical value


def evaluate_grid(instance: Instance, objective: SenderObjective, P: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Oracle profile g(p, M_eps(p)) and its p-expected payoff for each row of P."""
    masks = []
    for U in instance.utilities:
        eu = P @ U
        masks.append(eu >= eu.max(axis=1, keepdims=True) - eps - TIE_TOL)
    profiles = objective.select_many(P, masks)
    F = objective.payoff_matrix(profiles, instance.n_states)
    return profiles, np.einsum("ij,ij->i", P, F)


def solve_bicriteria(
    instance: Instance,
    objective: SenderObjective,
    eps: float,
    delta: float = 0.5,
    k_override: int | None = None,
    budget: int = GRID_BUDGET,
) -> BicriteriaResult:
    """alpha(1 - delta)-approximate, eps-persuasive scheme over k-uniform posteriors.

    With ``k_override`` the grid resolution is fixed by the caller and eps may
    be zero; the approximation guarantee then no longer applies.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if k_override is None:
        k = compute_k(instance.n_receivers, instance.max_actions, delta, eps)
    else:
        if k_override < 1:
            raise ValueError("k_override must be positive")
        k = int(k_override)
    theoretical = k_override is None
    grid = KUniformGrid(instance.n_states, k, budget)
    nums = grid.numerators()
    P = nums / k
    profiles, values = evaluate_grid(instance, objective, P, eps)

    mu = instance.prior
    sol = solve_lp(LinearProgram(c=values, A=P.T, senses="=", b=mu))
    if sol.status != "optimal":
        # the simplex vertices are always on the grid, so mu is reachable
        raise LpNumericalError(f"posterior decomposition LP reported {sol.status}")
    gamma = np.clip(sol.x, 0.0, None)
    support = np.flatnonzero(gamma > 1e-12)

    rows: dict[tuple[int, ...], np.ndarray] = {}
    for i in support:
        a = tuple(int(x) for x in profiles[i])
        rows.setdefault(a, np.zeros(instance.n_states))
        rows[a] += gamma[i] * P[i]
    phi = np.array(list(rows.values())) / mu
    phi /= phi.sum(axis=0, keepdims=True)
    scheme = make_scheme(instance, list(zip(rows.keys(), phi)))
    gamma_map = {
        tuple(Fraction(int(n), k) for n in nums[i]): float(gamma[i]) for i in support
    }
    return BicriteriaResult(
        gamma=gamma_map,
        scheme=scheme,
        value=float(values @ gamma),
        k_used=k,
        grid_size=len(grid),
        guarantee=theoretical,
    )
