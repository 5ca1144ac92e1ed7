"""Optimal direct public scheme via the LP over all action profiles.

Only usable when ``n_states * prod(n_actions)`` is small: every
(state, profile) pair becomes a variable.
"""

from __future__ import annotations

import numpy as np

from .core import DirectScheme, Instance, SenderObjective, make_scheme
from .lp import LinearProgram, LpNumericalError, solve_lp

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    """Enumeration would exceed the configured size budget."""


def build_exact_lp(
    instance: Instance,
    objective: SenderObjective,
    eps: float = 0.0,
    budget: int = DEFAULT_BUDGET,
) -> tuple[LinearProgram, list[tuple[int, ...]]]:
    """LP with one variable phi_theta(a) per state and profile (state-major).

    Rows: for every profile a, receiver r and a' != a^r,
    ``sum_theta mu_theta phi_theta(a) (u(a^r) - u(a')) >= -eps``; then one
    ``sum_a phi_theta(a) = 1`` row per state.  Returns the LP and the profile
    list fixing the column order.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    d = instance.n_states
    n_prof = instance.n_profiles
    required = d * n_prof
    if required > budget:
        raise BudgetExceeded(f"exact LP needs {required} variables; budget is {budget} (raise it to >= {required})")

    profiles = list(instance.profiles())
    P = np.array(profiles, dtype=int).reshape(n_prof, instance.n_receivers)
    mu = instance.prior
    n_vars = d * n_prof

    F = objective.payoff_matrix(P, d)  # (n_prof, d)
    c = (F * mu).T.reshape(-1)  # index theta * n_prof + j

    n_ic = n_prof * sum(k - 1 for k in instance.n_actions)
    A = np.zeros((n_ic + d, n_vars))
    cols = np.arange(d) * n_prof
    i = 0
    for j, a in enumerate(profiles):
        for r, U in enumerate(instance.utilities):
            for dev in range(U.shape[1]):
                if dev != a[r]:
                    A[i, cols + j] = mu * (U[:, a[r]] - U[:, dev])
                    i += 1
    for t in range(d):
        A[n_ic + t, t * n_prof:(t + 1) * n_prof] = 1.0
    senses = (">=",) * n_ic + ("=",) * d
    b = np.concatenate([np.full(n_ic, -float(eps)), np.ones(d)])
    return LinearProgram(c=c, A=A, senses=senses, b=b), profiles


def solve_optimal_scheme(
    instance: Instance,
    objective: SenderObjective,
    eps: float = 0.0,
    budget: int = DEFAULT_BUDGET,
) -> tuple[DirectScheme, float]:
    """Optimal eps-persuasive direct scheme and its value."""
    lp, profiles = build_exact_lp(instance, objective, eps, budget)
    sol = solve_lp(lp)
    if sol.status != "optimal":
        # the uninformative scheme is always feasible and f is bounded
        raise LpNumericalError(f"exact persuasion LP reported {sol.status}")
    d, n_prof = instance.n_states, len(profiles)
    phi = np.clip(sol.x.reshape(d, n_prof), 0.0, None)
    phi /= phi.sum(axis=1, keepdims=True)
    phi[phi < 1e-13] = 0.0
    support = np.flatnonzero(phi.sum(axis=0) > 0)
    scheme = make_scheme(instance, [(profiles[j], phi[:, j]) for j in support])
    return scheme, sol.value
