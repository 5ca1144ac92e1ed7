"""Monte Carlo play of a committed scheme and brute-force probes for tests."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import TIE_TOL, DirectScheme, Instance, SenderObjective, expected_sender_utility
from .exact import BudgetExceeded
from .voting import KVotingObjective, vote_margins


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    seed: int
    empirical_sender_utility: float
    expected_sender_utility: float
    receiver_regret: list[float]
    obedience_rate: list[float]
    signal_counts: list[int]

    def to_dict(self) -> dict:
        return asdict(self)


def _played_profile(instance: Instance, p: np.ndarray, rec: tuple[int, ...], eps: float) -> tuple[list[int], list[float]]:
    played, regret = [], []
    for r, eu in enumerate(instance.expected_utilities(p)):
        best = eu.max()
        if eu[rec[r]] >= best - eps - TIE_TOL:
            a = rec[r]
        else:
            a = int(np.flatnonzero(eu >= best - TIE_TOL)[0])
        played.append(a)
        regret.append(float(best - eu[a]))
    return played, regret


def simulate(
    instance: Instance,
    objective: SenderObjective,
    scheme: DirectScheme,
    trials: int,
    seed: int = 0,
    eps: float = 0.0,
) -> SimulationReport:
    """Play the protocol ``trials`` times: draw a state, draw a signal, let
    every receiver update and respond, record the sender's payoff.

    A receiver follows its recommendation when it is an eps-best response to
    the posterior, otherwise it plays its lowest-index best response.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d, S = instance.n_states, scheme.n_signals
    mu = instance.prior
    joint = scheme.probs * mu
    post = joint / joint.sum(axis=1, keepdims=True)

    played = np.empty((S, instance.n_receivers), dtype=int)
    regret = np.empty((S, instance.n_receivers))
    for s, rec in enumerate(scheme.profiles):
        a, g = _played_profile(instance, post[s], rec, eps)
        played[s], regret[s] = a, g
    payoff = objective.payoff_matrix(played, d)  # (S, d)
    obey = played == np.array(scheme.profiles, dtype=int)

    rng = np.random.Generator(np.random.PCG64(seed))
    theta = rng.choice(d, size=trials, p=mu)
    u = rng.random(trials)
    cdf = np.cumsum(scheme.probs, axis=0)  # (S, d)
    cdf[-1] = 1.0
    sig = np.empty(trials, dtype=int)
    for t in range(d):
        idx = np.flatnonzero(theta == t)
        sig[idx] = np.minimum(np.searchsorted(cdf[:, t], u[idx], side="right"), S - 1)

    counts = np.bincount(sig, minlength=S)
    return SimulationReport(
        trials=int(trials),
        seed=int(seed),
        empirical_sender_utility=float(payoff[sig, theta].mean()),
        expected_sender_utility=expected_sender_utility(instance, objective, scheme),
        receiver_regret=(counts @ regret / trials).tolist(),
        obedience_rate=(counts @ obey / trials).tolist(),
        signal_counts=counts.tolist(),
    )


def posterior_grid_opt(instance: Instance, objective: KVotingObjective, resolution: int) -> float:
    """1.0 if some posterior with entries in multiples of 1/resolution gets at
    least ``threshold`` exact-best-response votes, else 0.0.

    An upper-bound probe: when it returns 0 no scheme can win with positive
    probability (up to grid resolution).
    """
    d = instance.n_states
    if d > 4:
        raise BudgetExceeded("grid probe supports at most 4 states")
    if not 1 <= resolution <= 100:
        raise BudgetExceeded("resolution must lie in [1, 100]")
    M = vote_margins(instance, objective)
    axes = np.meshgrid(*([np.arange(resolution + 1)] * (d - 1)), indexing="ij")
    free = np.stack([ax.reshape(-1) for ax in axes], axis=1) if d > 1 else np.zeros((1, 0), dtype=int)
    last = resolution - free.sum(axis=1)
    ok = last >= 0
    nums = np.hstack([free[ok], last[ok, None]])
    w = (nums / resolution) @ M.T
    votes = np.count_nonzero(w >= -TIE_TOL, axis=1)
    return 1.0 if np.any(votes >= objective.threshold) else 0.0
