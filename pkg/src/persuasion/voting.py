"""k-voting sender objective.

Each receiver chooses between the sender's preferred candidate and one
alternative; the sender gets 1 when at least ``threshold`` receivers vote for
the preferred candidate and 0 otherwise, in every state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import TIE_TOL, BRSet, Instance, Profile, SenderObjective, ValidationError, as_posterior


@dataclass(frozen=True)
class KVotingObjective(SenderObjective):
    threshold: int
    preferred: tuple[int, ...]

    def __post_init__(self):
        n = len(self.preferred)
        if n < 1:
            raise ValidationError("k-voting needs at least one receiver")
        if not 1 <= self.threshold <= n:
            raise ValidationError(f"threshold must lie in [1, {n}], got {self.threshold}")

    @classmethod
    def for_instance(cls, instance: Instance, threshold: int, preferred: str | Sequence[str] | None = None) -> KVotingObjective:
        """Resolve preferred action names (one shared name or one per receiver).

        Without names the first action of every receiver is the preferred one.
        """
        n = instance.n_receivers
        if preferred is None:
            idx = (0,) * n
        else:
            names = [preferred] * n if isinstance(preferred, str) else list(preferred)
            if len(names) != n:
                raise ValidationError(f"need one preferred action per receiver ({n})")
            idx = tuple(instance.profile_from_names(names))
        return cls(int(threshold), idx)

    def votes(self, profile: Profile) -> int:
        return sum(a == a0 for a, a0 in zip(profile, self.preferred))

    def payoff(self, state: int, profile: Profile) -> float:
        return f_voting(self, profile)

    def select(self, p, Z: BRSet) -> Profile:
        return g_voting(self, p, Z)

    def payoff_matrix(self, profiles: np.ndarray, n_states: int) -> np.ndarray:
        profiles = np.asarray(profiles, dtype=int).reshape(len(profiles), -1)
        wins = (profiles == np.array(self.preferred)).sum(axis=1) >= self.threshold
        return np.repeat(wins.astype(float)[:, None], n_states, axis=1)

    def select_many(self, P: np.ndarray, masks: Sequence[np.ndarray]) -> np.ndarray:
        out = np.empty((P.shape[0], len(masks)), dtype=int)
        for r, m in enumerate(masks):
            a0 = self.preferred[r]
            out[:, r] = np.where(m[:, a0], a0, np.argmax(m, axis=1))
        return out


def f_voting(objective: KVotingObjective, profile: Profile) -> float:
    """1.0 when at least ``threshold`` receivers play their preferred action."""
    return 1.0 if objective.votes(profile) >= objective.threshold else 0.0


def g_voting(objective: KVotingObjective, p, Z: BRSet) -> Profile:
    """Preferred action wherever it is allowed, else the lowest-index allowed action.

    f only counts preferred votes, so this maximises f over the product of Z.
    """
    return tuple(a0 if a0 in z else min(z) for a0, z in zip(objective.preferred, Z.sets))


def vote_margins(instance: Instance, objective: KVotingObjective) -> np.ndarray:
    """Matrix of u^r_theta(a_0) - u^r_theta(a_1); shape (n_receivers, n_states)."""
    rows = []
    for r, U in enumerate(instance.utilities):
        if U.shape[1] != 2:
            raise ValidationError(
                f"receiver {instance.receivers[r]!r} has {U.shape[1]} actions; k-voting needs 2"
            )
        a0 = objective.preferred[r]
        rows.append(U[:, a0] - U[:, 1 - a0])
    return np.array(rows)


def count_W(instance: Instance, objective: KVotingObjective, p, eps: float = 0.0) -> int:
    """Receivers whose expected margin for the preferred candidate is >= -eps."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    p = as_posterior(p).p
    w = vote_margins(instance, objective) @ p
    return int(np.count_nonzero(w >= -eps - TIE_TOL))
