"""Persuasion instances, posteriors, best responses and direct signaling schemes.

Utilities may be any finite reals; persuasiveness slack and the ε of an
ε-best-response are measured in the same units as the utilities.
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

TIE_TOL = 1e-9
PROB_TOL = 1e-9

Profile = tuple[int, ...]


class ValidationError(ValueError):
    """Input does not describe a valid instance, scheme or posterior."""


class SignalNeverSent(ValueError):
    """Bayes update requested for a signal of probability zero."""


@dataclass(frozen=True, eq=False)
class Instance:
    """States with a full-support prior and receivers with finite action sets.

    ``utilities[r]`` is a ``(n_states, n_actions[r])`` array holding
    ``u^r_theta(a)``.
    """

    states: tuple[str, ...]
    prior: np.ndarray
    receivers: tuple[str, ...]
    actions: tuple[tuple[str, ...], ...]
    utilities: tuple[np.ndarray, ...]

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_receivers(self) -> int:
        return len(self.receivers)

    @property
    def n_actions(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.actions)

    @property
    def max_actions(self) -> int:
        return max(self.n_actions)

    @property
    def n_profiles(self) -> int:
        return math.prod(self.n_actions)

    def profiles(self) -> Iterator[Profile]:
        """All action profiles, lexicographic in receiver action indices."""
        return itertools.product(*(range(k) for k in self.n_actions))

    def profile_names(self, profile: Profile) -> list[str]:
        return [self.actions[r][a] for r, a in enumerate(profile)]

    def profile_from_names(self, names: Sequence[str]) -> Profile:
        if len(names) != self.n_receivers:
            raise ValidationError(f"profile needs {self.n_receivers} actions, got {len(names)}")
        out = []
        for r, name in enumerate(names):
            try:
                out.append(self.actions[r].index(name))
            except ValueError:
                raise ValidationError(
                    f"receiver {self.receivers[r]!r} has no action {name!r}"
                ) from None
        return tuple(out)

    def expected_utilities(self, p: np.ndarray) -> list[np.ndarray]:
        """Per receiver, the vector of expected utilities of each action under p."""
        return [p @ U for U in self.utilities]

    def permuted(self, state_order: Sequence[int], receiver_order: Sequence[int]) -> Instance:
        s, r = list(state_order), list(receiver_order)
        return Instance(
            states=tuple(self.states[i] for i in s),
            prior=self.prior[s],
            receivers=tuple(self.receivers[i] for i in r),
            actions=tuple(self.actions[i] for i in r),
            utilities=tuple(self.utilities[i][s] for i in r),
        )


def validate_instance(
    states: Sequence[str],
    prior: Sequence[float],
    receivers: Sequence[str],
    actions: Sequence[Sequence[str]],
    utilities: Sequence[Sequence[Sequence[float]]],
) -> Instance:
    """Build an :class:`Instance`, raising :class:`ValidationError` on bad input.

    ``utilities[r][theta][a]`` is receiver r's payoff for action a in state theta.
    """
    states = tuple(str(s) for s in states)
    receivers = tuple(str(r) for r in receivers)
    if not states:
        raise ValidationError("need at least one state")
    if len(set(states)) != len(states):
        raise ValidationError("state identifiers must be unique")
    if not receivers:
        raise ValidationError("need at least one receiver")
    if len(set(receivers)) != len(receivers):
        raise ValidationError("receiver identifiers must be unique")
    try:
        mu = np.asarray(prior, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"prior is not numeric: {exc}") from None
    if mu.size != len(states):
        raise ValidationError(f"prior has {mu.size} entries for {len(states)} states")
    if not np.all(np.isfinite(mu)):
        raise ValidationError("prior entries must be finite")
    if np.any(mu <= 0):
        raise ValidationError("prior must have full support (every entry > 0)")
    if abs(mu.sum() - 1.0) > PROB_TOL:
        raise ValidationError(f"prior must sum to 1 (sums to {mu.sum():.12g})")
    if len(actions) != len(receivers) or len(utilities) != len(receivers):
        raise ValidationError("actions and utilities need one entry per receiver")

    acts, utils = [], []
    d = len(states)
    for r, name in enumerate(receivers):
        a = tuple(str(x) for x in actions[r])
        if not a:
            raise ValidationError(f"receiver {name!r} has an empty action set")
        if len(set(a)) != len(a):
            raise ValidationError(f"receiver {name!r} has duplicate action identifiers")
        rows = utilities[r]
        if len(rows) != d or any(len(row) != len(a) for row in rows):
            raise ValidationError(
                f"receiver {name!r}: utility matrix must be {d} states x {len(a)} actions"
            )
        try:
            U = np.array(rows, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"receiver {name!r}: missing or non-numeric utility ({exc})") from None
        if not np.all(np.isfinite(U)):
            raise ValidationError(f"receiver {name!r}: utilities must be finite")
        U.setflags(write=False)
        acts.append(a)
        utils.append(U)
    mu.setflags(write=False)
    return Instance(states, mu, receivers, tuple(acts), tuple(utils))


@dataclass(frozen=True, eq=False)
class Posterior:
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float).reshape(-1)
        if p.size == 0 or not np.all(np.isfinite(p)):
            raise ValidationError("posterior must be a non-empty finite vector")
        if np.any(p < -PROB_TOL) or abs(p.sum() - 1.0) > PROB_TOL:
            raise ValidationError("posterior must be a probability vector")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def __len__(self) -> int:
        return self.p.size


def as_posterior(p) -> Posterior:
    return p if isinstance(p, Posterior) else Posterior(p)


@dataclass(frozen=True, eq=False)
class DirectScheme:
    """A sparse direct public scheme.

    Signal ``s`` recommends ``profiles[s]`` and is sent in state theta with
    probability ``probs[s, theta]``; every column of ``probs`` sums to one.
    """

    profiles: tuple[Profile, ...]
    probs: np.ndarray

    @property
    def n_signals(self) -> int:
        return len(self.profiles)

    def signal_probabilities(self, prior: np.ndarray) -> np.ndarray:
        """Unconditional probability of each signal."""
        return self.probs @ prior

    def as_dict(self) -> dict[Profile, np.ndarray]:
        return {a: self.probs[s] for s, a in enumerate(self.profiles)}


def make_scheme(instance: Instance, signals: Mapping[Profile, Sequence[float]] | Sequence[tuple[Profile, Sequence[float]]]) -> DirectScheme:
    """Validate and build a scheme from ``profile -> per-state probabilities``.

    Repeated profiles are merged; all-zero signals are dropped.
    """
    items = signals.items() if isinstance(signals, Mapping) else signals
    d = instance.n_states
    merged: dict[Profile, np.ndarray] = {}
    for profile, row in items:
        profile = tuple(int(a) for a in profile)
        if len(profile) != instance.n_receivers or any(
            not 0 <= a < k for a, k in zip(profile, instance.n_actions)
        ):
            raise ValidationError(f"invalid action profile {profile}")
        row = np.asarray(row, dtype=float).reshape(-1)
        if row.size != d or not np.all(np.isfinite(row)):
            raise ValidationError(f"profile {profile}: need {d} finite probabilities")
        if np.any(row < -PROB_TOL):
            raise ValidationError(f"profile {profile}: negative probability")
        merged[profile] = merged.get(profile, np.zeros(d)) + np.clip(row, 0.0, None)
    keep = [a for a, row in merged.items() if np.any(row > 0)]
    if not keep:
        raise ValidationError("scheme sends no signal")
    probs = np.array([merged[a] for a in keep])
    totals = probs.sum(axis=0)
    if np.any(np.abs(totals - 1.0) > PROB_TOL):
        bad = int(np.argmax(np.abs(totals - 1.0)))
        raise ValidationError(
            f"signal probabilities in state {instance.states[bad]!r} sum to {totals[bad]:.12g}"
        )
    probs.setflags(write=False)
    return DirectScheme(tuple(keep), probs)


def bayes_posterior(instance: Instance, scheme: DirectScheme, profile: Profile) -> Posterior:
    """p_theta = mu_theta phi_theta(a) / sum_theta mu_theta phi_theta(a)."""
    profile = tuple(profile)
    try:
        s = scheme.profiles.index(profile)
    except ValueError:
        raise SignalNeverSent(f"signal never sent: {profile}") from None
    joint = instance.prior * scheme.probs[s]
    total = joint.sum()
    if total <= 0:
        raise SignalNeverSent(f"signal never sent: {profile}")
    return Posterior(joint / total)


@dataclass(frozen=True)
class BRSet:
    """Per receiver, the non-empty set of (approximately) optimal action indices."""

    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        if any(not z for z in self.sets):
            raise ValidationError("every receiver needs a non-empty response set")

    def __getitem__(self, r: int) -> frozenset[int]:
        return self.sets[r]

    def __len__(self) -> int:
        return len(self.sets)

    def contains(self, profile: Profile) -> bool:
        return all(a in z for a, z in zip(profile, self.sets))

    def profiles(self) -> Iterator[Profile]:
        return itertools.product(*(sorted(z) for z in self.sets))

    def issubset(self, other: BRSet) -> bool:
        return all(a <= b for a, b in zip(self.sets, other.sets))


def eps_br_set(instance: Instance, p, eps: float) -> BRSet:
    """Actions within ``eps`` of each receiver's best expected utility under p."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    p = as_posterior(p).p
    if p.size != instance.n_states:
        raise ValidationError("posterior dimension does not match the instance")
    sets = []
    for eu in instance.expected_utilities(p):
        sets.append(frozenset(np.flatnonzero(eu >= eu.max() - eps - TIE_TOL).tolist()))
    return BRSet(tuple(sets))


def br_set(instance: Instance, p) -> BRSet:
    """Exact best-response set (ties within TIE_TOL)."""
    return eps_br_set(instance, p, 0.0)


def persuasiveness_slack(instance: Instance, scheme: DirectScheme) -> float:
    """min over signals a, receivers r and deviations a' != a^r of
    sum_theta mu_theta phi_theta(a) (u^r_theta(a^r) - u^r_theta(a')).

    The scheme is eps-persuasive iff the result is >= -eps.  Returns +inf when
    no receiver has an alternative action.
    """
    joint = scheme.probs * instance.prior  # (S, d)
    worst = math.inf
    for r, U in enumerate(instance.utilities):
        if U.shape[1] < 2:
            continue
        gains = joint @ U  # (S, n_actions): sum_theta joint * u(a')
        rec = np.array([a[r] for a in scheme.profiles])
        own = gains[np.arange(len(rec)), rec]
        diff = own[:, None] - gains
        diff[np.arange(len(rec)), rec] = np.inf
        worst = min(worst, float(diff.min()))
    return worst


def expected_sender_utility(instance: Instance, objective: SenderObjective, scheme: DirectScheme) -> float:
    """sum over theta, a of mu_theta phi_theta(a) f_theta(a)."""
    F = objective.payoff_matrix(np.array(scheme.profiles, dtype=int), instance.n_states)
    return float(np.sum(scheme.probs * instance.prior * F))


def uninformative_scheme(instance: Instance, objective: SenderObjective | None = None) -> DirectScheme:
    """Always send the same recommendation: a best response at the prior.

    With an objective the recommendation is chosen by its tie-breaking oracle.
    """
    Z = br_set(instance, instance.prior)
    a = objective.select(instance.prior, Z) if objective else tuple(min(z) for z in Z.sets)
    return make_scheme(instance, {tuple(a): np.ones(instance.n_states)})


def full_information_scheme(instance: Instance, objective: SenderObjective | None = None) -> DirectScheme:
    """Reveal the state: in state theta recommend a best response to theta."""
    signals: dict[Profile, np.ndarray] = {}
    d = instance.n_states
    for t in range(d):
        e = np.zeros(d)
        e[t] = 1.0
        Z = br_set(instance, e)
        a = tuple(objective.select(e, Z)) if objective else tuple(min(z) for z in Z.sets)
        signals.setdefault(a, np.zeros(d))[t] += 1.0
    return make_scheme(instance, signals)


class SenderObjective(ABC):
    """Sender utility f_theta(a) together with a tie-breaking oracle g(p, Z).

    ``select`` must be deterministic and return a profile inside Z whose
    p-expected payoff is at least ``alpha`` times the best one in Z.
    """

    alpha: float = 1.0

    @abstractmethod
    def payoff(self, state: int, profile: Profile) -> float:
        ...

    @abstractmethod
    def select(self, p: np.ndarray, Z: BRSet) -> Profile:
        ...

    def payoff_matrix(self, profiles: np.ndarray, n_states: int) -> np.ndarray:
        """f_theta(a) for each row a of ``profiles``; shape (len(profiles), n_states)."""
        out = np.empty((len(profiles), n_states))
        for i, a in enumerate(profiles):
            a = tuple(int(x) for x in a)
            for t in range(n_states):
                out[i, t] = self.payoff(t, a)
        return out

    def select_many(self, P: np.ndarray, masks: Sequence[np.ndarray]) -> np.ndarray:
        """Vectorised ``select``: ``masks[r][i, a]`` marks a in Z^r for posterior P[i]."""
        out = np.empty((P.shape[0], len(masks)), dtype=int)
        for i in range(P.shape[0]):
            Z = BRSet(tuple(frozenset(np.flatnonzero(m[i]).tolist()) for m in masks))
            out[i] = self.select(P[i], Z)
        return out
