import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import best_responses
from persuasion.core import (
    SignalNeverSent,
    ValidationError,
    bayes_posterior,
    br_set,
    eps_br_set,
    expected_sender_utility,
    full_information_scheme,
    make_scheme,
    persuasiveness_slack,
    uninformative_scheme,
    validate_instance,
)
from persuasion.fixtures import example_instance, example_scheme
from persuasion.voting import KVotingObjective
from strategies import instance_and_scheme, instances, posteriors

A0, A1 = 0, 1


@pytest.fixture
def example():
    return example_instance(2)


def one_receiver(prior, rows, actions=("x", "y")):
    return validate_instance([f"s{i}" for i in range(len(prior))], prior, ["r"], [list(actions)], [rows])


class TestValidateInstance:
    def test_example_is_valid(self, example):
        inst, _ = example
        assert inst.n_states == 3 and inst.n_receivers == 3
        assert inst.n_actions == (2, 2, 2)
        np.testing.assert_allclose(inst.prior, [1 / 3] * 3)
        assert inst.utilities[0][0, A0] == 1 and inst.utilities[0][0, A1] == -0.25

    def test_zero_prior_entry(self):
        with pytest.raises(ValidationError, match="full support"):
            one_receiver([0.5, 0.5, 0], [[0, 0]] * 3)

    def test_prior_not_normalised(self):
        with pytest.raises(ValidationError, match="sum to 1"):
            one_receiver([0.4, 0.4, 0.4], [[0, 0]] * 3)

    def test_missing_utility(self):
        with pytest.raises(ValidationError):
            one_receiver([0.5, 0.5], [[0, 0], [0]])
        with pytest.raises(ValidationError):
            one_receiver([0.5, 0.5], [[0, None], [0, 1]])

    def test_empty_action_set(self):
        with pytest.raises(ValidationError, match="empty action set"):
            validate_instance(["s"], [1.0], ["r"], [[]], [[[]]])

    def test_duplicate_identifiers(self):
        with pytest.raises(ValidationError):
            validate_instance(["s", "s"], [0.5, 0.5], ["r"], [["x"]], [[[0], [0]]])
        with pytest.raises(ValidationError):
            one_receiver([1.0], [[0, 0]], actions=("x", "x"))

    def test_non_finite_utility(self):
        with pytest.raises(ValidationError):
            one_receiver([1.0], [[0, math.inf]])

    def test_values_are_read_only(self, example):
        inst, _ = example
        with pytest.raises(ValueError):
            inst.prior[0] = 1.0


class TestBayesPosterior:
    def test_not_b_signal(self, example):
        inst, _ = example
        scheme = example_scheme(inst)
        # "not B" recommends a1 to voter 2 only
        p = bayes_posterior(inst, scheme, (A0, A1, A0)).p
        np.testing.assert_allclose(p, [0.5, 0, 0.5])

    def test_uninformative_returns_prior(self, example):
        inst, _ = example
        scheme = make_scheme(inst, {(A1, A1, A1): [1, 1, 1]})
        np.testing.assert_allclose(bayes_posterior(inst, scheme, (A1, A1, A1)).p, inst.prior)

    def test_fully_informative_point_mass(self, example):
        inst, _ = example
        scheme = make_scheme(inst, {(A0, A1, A1): [1, 0, 0], (A1, A0, A1): [0, 1, 0], (A1, A1, A0): [0, 0, 1]})
        np.testing.assert_allclose(bayes_posterior(inst, scheme, (A0, A1, A1)).p, [1, 0, 0])

    def test_signal_never_sent(self, example):
        inst, _ = example
        scheme = make_scheme(inst, {(A1, A1, A1): [1, 1, 1]})
        with pytest.raises(SignalNeverSent, match="signal never sent"):
            bayes_posterior(inst, scheme, (A0, A0, A0))

    @settings(max_examples=150, deadline=None)
    @given(instance_and_scheme())
    def test_mixing_reconstructs_prior(self, pair):
        inst, scheme = pair
        total = np.zeros(inst.n_states)
        for s, a in enumerate(scheme.profiles):
            pr = float(inst.prior @ scheme.probs[s])
            if pr > 0:
                total += pr * bayes_posterior(inst, scheme, a).p
        np.testing.assert_allclose(total, inst.prior, atol=1e-6)


class TestBestResponse:
    def test_prior_everyone_votes_a1(self, example):
        inst, _ = example
        Z = br_set(inst, inst.prior)
        assert Z.sets == (frozenset({A1}),) * 3

    def test_half_a_half_c(self, example):
        inst, _ = example
        Z = br_set(inst, [0.5, 0, 0.5])
        assert Z.sets == (frozenset({A0}), frozenset({A1}), frozenset({A0}))

    def test_single_state(self):
        inst = one_receiver([1.0], [[0.3, 0.7]])
        assert br_set(inst, [1.0]).sets == (frozenset({1}),)
        inst = one_receiver([1.0], [[0.7, 0.7]])
        assert br_set(inst, [1.0]).sets == (frozenset({0, 1}),)

    def test_eps_examples(self, example):
        inst, _ = example
        p = [0.5, 0, 0.5]
        assert eps_br_set(inst, p, 0.1)[1] == frozenset({A1})
        assert eps_br_set(inst, p, 1.0)[1] == frozenset({A0, A1})
        assert eps_br_set(inst, p, 0.0) == br_set(inst, p)

    def test_negative_eps(self, example):
        inst, _ = example
        with pytest.raises(ValueError):
            eps_br_set(inst, inst.prior, -0.1)

    @settings(max_examples=150, deadline=None)
    @given(instances(), st.data())
    def test_matches_loop_oracle_and_nests(self, inst, data):
        p = data.draw(posteriors(inst.n_states))
        e1, e2 = sorted(data.draw(st.lists(st.sampled_from([0, 0.05, 0.125, 0.3, 1.0]), min_size=2, max_size=2)))
        raw = [U.tolist() for U in inst.utilities]
        for eps in (0.0, e1, e2):
            assert list(eps_br_set(inst, p, eps).sets) == best_responses(raw, p, eps)
        assert eps_br_set(inst, p, e1).issubset(eps_br_set(inst, p, e2))
        assert br_set(inst, p) == eps_br_set(inst, p, 0.0)

    @settings(max_examples=100, deadline=None)
    @given(instances(), st.data())
    def test_argmax_exactness(self, inst, data):
        p = data.draw(posteriors(inst.n_states))
        Z = br_set(inst, p)
        for r, eu in enumerate(inst.expected_utilities(p)):
            best = eu.max()
            for a, v in enumerate(eu):
                if a in Z[r]:
                    assert v >= best - 1e-9
                else:
                    assert v < best - 1e-9


class TestSlackAndValue:
    def test_table_scheme_is_persuasive(self, example):
        inst, obj = example
        scheme = example_scheme(inst)
        slack = persuasiveness_slack(inst, scheme)
        # receiver 2 on "not A": (1/3)(1/2)(5/4) + (1/3)(1/2)(-3/4) = 1/12
        assert slack == pytest.approx(1 / 12)
        assert expected_sender_utility(inst, obj, scheme) == pytest.approx(1.0)

    def test_dominated_recommendation(self, example):
        inst, _ = example
        # in state A, a0 is strictly worse than a1 for voters 2 and 3
        scheme = make_scheme(inst, {(A0, A0, A0): [1, 0, 0], (A1, A1, A1): [0, 1, 1]})
        assert persuasiveness_slack(inst, scheme) < 0

    def test_no_deviation_gives_infinity(self):
        inst = validate_instance(["s", "t"], [0.5, 0.5], ["r"], [["only"]], [[[0.1], [0.9]]])
        scheme = make_scheme(inst, {(0,): [1, 1]})
        assert persuasiveness_slack(inst, scheme) == math.inf

    def test_full_information_scores_zero(self, example):
        inst, obj = example
        assert expected_sender_utility(inst, obj, full_information_scheme(inst, obj)) == 0.0

    def test_all_a0_with_unanimity(self, example):
        inst, _ = example
        obj = KVotingObjective(3, (A0, A0, A0))
        scheme = make_scheme(inst, {(A0, A0, A0): [1, 1, 1]})
        assert expected_sender_utility(inst, obj, scheme) == pytest.approx(1.0)
        assert persuasiveness_slack(inst, scheme) < 0

    def test_uninformative_recommends_prior_best_response(self, example):
        inst, obj = example
        scheme = uninformative_scheme(inst, obj)
        assert scheme.profiles == ((A1, A1, A1),)
        assert persuasiveness_slack(inst, scheme) >= 0

    @settings(max_examples=100, deadline=None)
    @given(instance_and_scheme(), st.data())
    def test_slack_permutation_invariant(self, pair, data):
        inst, scheme = pair
        s_perm = data.draw(st.permutations(range(inst.n_states)))
        r_perm = data.draw(st.permutations(range(inst.n_receivers)))
        other = inst.permuted(s_perm, r_perm)
        moved = make_scheme(
            other,
            [(tuple(a[i] for i in r_perm), scheme.probs[k][list(s_perm)]) for k, a in enumerate(scheme.profiles)],
        )
        a, b = persuasiveness_slack(inst, scheme), persuasiveness_slack(other, moved)
        assert a == b or a == pytest.approx(b, abs=1e-12)

    def test_make_scheme_rejects_bad_rows(self, example):
        inst, _ = example
        with pytest.raises(ValidationError):
            make_scheme(inst, {(A0, A0, A0): [0.5, 1, 1]})
        with pytest.raises(ValidationError):
            make_scheme(inst, {(A0, A0, 2): [1, 1, 1]})
        with pytest.raises(ValidationError):
            make_scheme(inst, {(A0, A0, A0): [-0.5, 1, 1], (A1, A1, A1): [1.5, 0, 0]})
