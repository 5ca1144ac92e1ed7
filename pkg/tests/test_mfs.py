import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import grid_points
from persuasion.core import ValidationError, validate_instance
from persuasion.fixtures import example_instance
from persuasion.mfs import (
    MfsInstance,
    count_satisfied,
    kstar_bruteforce,
    mfs_k,
    solve_mfs_kuniform,
    voting_to_mfs,
)
from persuasion.voting import KVotingObjective, count_W

SWAP = [[1, -1], [-1, 1]]


class TestCountSatisfied:
    def test_examples(self):
        assert count_satisfied(MfsInstance([[1]]), [1], 0) == 1
        assert count_satisfied(MfsInstance([[-1]]), [1], 0) == 0
        assert count_satisfied(MfsInstance([[-1]]), [1], 1) == 1
        assert count_satisfied(MfsInstance(SWAP), [2 / 3, 1 / 3], 0.5) == 2

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            count_satisfied(MfsInstance(SWAP), [1.0], 0)

    def test_range_checked(self):
        with pytest.raises(ValidationError):
            MfsInstance([[2.0]])
        MfsInstance([[2.0]], lo=-2, hi=2)


class TestKStar:
    def test_examples(self):
        assert kstar_bruteforce(MfsInstance(SWAP)) == 2
        assert kstar_bruteforce(MfsInstance([[-1]])) == 0
        assert kstar_bruteforce(MfsInstance([[1, 0], [0, 1]])) == 2

    def test_row_limit(self):
        with pytest.raises(ValidationError):
            kstar_bruteforce(MfsInstance(np.zeros((21, 2))))

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_fine_grid_lower_bound(self, seed):
        # any grid point is a witness, so the grid count never exceeds k*
        rng = np.random.default_rng(seed)
        A = rng.uniform(-1, 1, size=(int(rng.integers(1, 6)), int(rng.integers(1, 4))))
        inst = MfsInstance(A)
        best = max(int(np.count_nonzero(A @ x >= 0)) for x in grid_points(A.shape[1], 30))
        assert kstar_bruteforce(inst) >= best


class TestKUniformSolver:
    def test_swap(self):
        sol = solve_mfs_kuniform(MfsInstance(SWAP), 0.5)
        assert sol.satisfied == 2
        assert count_satisfied(MfsInstance(SWAP), sol.x, 0.5) == 2

    def test_all_negative(self):
        for eps in (0.1, 0.5, 0.9):
            assert solve_mfs_kuniform(MfsInstance([[-1, -1]]), eps).satisfied == 0

    def test_single_column(self):
        A = [[0.3], [-0.2], [-0.6]]
        sol = solve_mfs_kuniform(MfsInstance(A), 0.25)
        np.testing.assert_array_equal(sol.x, [1.0])
        assert sol.satisfied == 2

    def test_k_formula(self):
        assert mfs_k(6, 0.25, 2.0) == int(np.ceil(4 * np.log(6) / (2 * 0.0625)))
        assert mfs_k(1, 0.5, 2.0) == 1

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        inst = MfsInstance(rng.uniform(-1, 1, size=(5, 3)))
        a, b = solve_mfs_kuniform(inst, 0.25), solve_mfs_kuniform(inst, 0.25)
        np.testing.assert_array_equal(a.x, b.x)
        assert a.satisfied == b.satisfied

    @settings(max_examples=60, deadline=None)
    @given(
        st.integers(1, 6).flatmap(
            lambda r: st.integers(1, 4).flatmap(
                lambda c: st.lists(st.lists(st.floats(-1, 1), min_size=c, max_size=c), min_size=r, max_size=r)
            )
        ),
        st.sampled_from([0.25, 0.5]),
    )
    def test_dominates_oracle(self, rows, eps):
        inst = MfsInstance(np.array(rows))
        sol = solve_mfs_kuniform(inst, eps)
        assert count_satisfied(inst, sol.x, eps) == sol.satisfied
        assert sol.satisfied >= kstar_bruteforce(inst)


class TestBridge:
    def test_example_rows(self):
        inst, obj = example_instance()
        A = voting_to_mfs(inst, obj).A
        np.testing.assert_allclose(A[0], [5 / 4, -3 / 4, -3 / 4])
        assert A.shape == (3, 3)

    def test_indifferent_receivers(self):
        inst = validate_instance(["s", "t"], [0.5, 0.5], ["r1", "r2"], [["a0", "a1"]] * 2,
                                 [[[0.1, 0.1], [0.4, 0.4]], [[0, 0], [1, 1]]])
        m = voting_to_mfs(inst)
        assert not m.A.any()
        for x in ([1, 0], [0.3, 0.7], [0, 1]):
            assert count_satisfied(m, x, 0) == 2

    def test_three_actions_rejected(self):
        inst = validate_instance(["s"], [1.0], ["r"], [["x", "y", "z"]], [[[0, 0, 0]]])
        with pytest.raises(ValidationError):
            voting_to_mfs(inst)

    @pytest.mark.parametrize("eps", [0.0, 0.1, 0.5])
    def test_counts_agree(self, eps):
        inst, obj = example_instance()
        m = voting_to_mfs(inst, obj)
        rng = np.random.default_rng(11)
        for p in rng.dirichlet(np.ones(3), size=100):
            assert count_satisfied(m, p, eps) == count_W(inst, obj, p, eps)

    def test_respects_preferred_action(self):
        inst, _ = example_instance()
        obj = KVotingObjective(1, (1, 0, 0))
        np.testing.assert_allclose(voting_to_mfs(inst, obj).A[0], [-5 / 4, 3 / 4, 3 / 4])
