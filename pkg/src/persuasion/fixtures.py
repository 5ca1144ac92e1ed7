"""Instance generators: the three-voter election example and seeded random families."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .core import DirectScheme, Instance, make_scheme
from .io import format_number, instance_from_dict
from .voting import KVotingObjective


def example_document(threshold: int = 2) -> dict:
    """Three voters, states A/B/C with a uniform prior; each voter likes a0
    only in "their" state and mildly dislikes a1 everywhere."""
    states = ["A", "B", "C"]
    third = format_number(1 / 3)
    receivers = []
    for r in range(3):
        rows = [[1 if t == r else -1, -0.25] for t in range(3)]
        receivers.append({"name": str(r + 1), "actions": ["a0", "a1"], "utilities": rows})
    return {
        "states": [{"name": s, "prior": third} for s in states],
        "receivers": receivers,
        "objective": {"type": "k-voting", "params": {"threshold": threshold, "preferred_action": "a0"}},
    }


def example_instance(threshold: int = 2) -> tuple[Instance, KVotingObjective]:
    inst, obj = instance_from_dict(example_document(threshold))
    return inst, obj


def example_scheme(instance: Instance) -> DirectScheme:
    """"not A" / "not B" / "not C": each state is ruled out with probability 1/2
    in each of the two other signals, and the signal recommends a0 to the two
    voters whose states remain possible."""
    signals = {}
    for excluded in range(3):
        profile = tuple(1 if r == excluded else 0 for r in range(3))
        signals[profile] = [0.0 if t == excluded else 0.5 for t in range(3)]
    return make_scheme(instance, signals)


def example_scheme_document() -> dict:
    return {
        "signals": [
            {
                "profile": ["a1" if r == excluded else "a0" for r in range(3)],
                "prob_per_state": {s: (0 if t == excluded else 0.5) for t, s in enumerate("ABC")},
            }
            for excluded in range(3)
        ]
    }


def random_voting_document(n_receivers: int, n_states: int, seed: int, threshold: int | None = None) -> dict:
    """Binary-action receivers with utilities uniform in [-1, 1] (4 decimals)
    and a prior with integer weights 1..9."""
    rng = np.random.default_rng(seed)
    weights = rng.integers(1, 10, size=n_states)
    total = int(weights.sum())
    prior = [format_number(float(Fraction(int(w), total))) for w in weights]
    receivers = []
    for r in range(n_receivers):
        U = np.round(rng.uniform(-1, 1, size=(n_states, 2)), 4)
        receivers.append({
            "name": f"r{r + 1}",
            "actions": ["a0", "a1"],
            "utilities": [[format_number(u) for u in row] for row in U],
        })
    if threshold is None:
        threshold = int(rng.integers(1, n_receivers + 1))
    return {
        "states": [{"name": f"s{t + 1}", "prior": prior[t]} for t in range(n_states)],
        "receivers": receivers,
        "objective": {"type": "k-voting", "params": {"threshold": threshold, "preferred_action": "a0"}},
    }


def random_mfs_document(n_row: int, n_col: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    A = np.round(rng.uniform(-1, 1, size=(n_row, n_col)), 4)
    return {"matrix": [[format_number(v) for v in row] for row in A], "range": [-1, 1]}
