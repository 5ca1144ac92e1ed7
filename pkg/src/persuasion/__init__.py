"""Public Bayesian persuasion without inter-agent externalities."""

from .bicriteria import BicriteriaResult, KUniformGrid, compute_k, enumerate_k_uniform, solve_bicriteria
from .core import (
    BRSet,
    DirectScheme,
    Instance,
    Posterior,
    SenderObjective,
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
from .exact import BudgetExceeded, build_exact_lp, solve_optimal_scheme
from .fixtures import example_instance, example_scheme
from .harness import posterior_grid_opt, simulate
from .lp import LinearProgram, LpSolution, solve_lp
from .mfs import MfsInstance, MfsSolution, count_satisfied, kstar_bruteforce, solve_mfs_kuniform, voting_to_mfs
from .voting import KVotingObjective, count_W, f_voting, g_voting

__all__ = [name for name in dir() if not name.startswith("_")]
