import itertools

import numpy as np
from hypothesis import strategies as st

from persuasion.core import make_scheme, validate_instance


@st.composite
def instances(draw, max_receivers=3, max_actions=3, max_states=3, binary=False):
    d = draw(st.integers(1, max_states))
    n = draw(st.integers(1, max_receivers))
    weights = draw(st.lists(st.integers(1, 9), min_size=d, max_size=d))
    prior = np.array(weights, float) / sum(weights)
    acts, utils = [], []
    for r in range(n):
        k = 2 if binary else draw(st.integers(1, max_actions))
        acts.append([f"a{i}" for i in range(k)])
        vals = draw(st.lists(st.integers(-8, 8), min_size=d * k, max_size=d * k))
        utils.append((np.array(vals, float) / 8).reshape(d, k).tolist())
    return validate_instance(
        [f"s{t}" for t in range(d)], prior, [f"r{r}" for r in range(n)], acts, utils
    )


@st.composite
def schemes(draw, instance, max_signals=4):
    profiles = list(instance.profiles())
    chosen = draw(st.lists(st.sampled_from(profiles), min_size=1, max_size=max_signals, unique=True))
    d = instance.n_states
    probs = np.array(
        [draw(st.lists(st.integers(0, 5), min_size=d, max_size=d)) for _ in chosen], float
    )
    probs[0] += 1  # every state sends something
    probs /= probs.sum(axis=0, keepdims=True)
    return make_scheme(instance, list(zip(chosen, probs)))


@st.composite
def instance_and_scheme(draw, **kw):
    inst = draw(instances(**kw))
    return inst, draw(schemes(inst))


posteriors = lambda d: st.lists(st.integers(0, 20), min_size=d, max_size=d).filter(any).map(  # noqa: E731
    lambda v: np.array(v, float) / sum(v)
)
