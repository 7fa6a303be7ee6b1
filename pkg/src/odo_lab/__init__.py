"""Online Single / Double Oracle learners for two-player zero-sum matrix games."""

from .game import (
    ContractError,
    JointSolution,
    NonConvergenceError,
    best_response,
    epsilon_best_response,
    expected_loss,
    exploitability,
    loss_vector,
    solve_zero_sum_ne,
    support,
)
from .games import GameSpec, generate, kuhn_normal_form, load_csv, random_matrix, save_csv
from .learners import FpState, MwuState, RegretLedger, fp_step, mwu_rate, mwu_step, record, regret
from .meta import (
    OdoTrace,
    ProdState,
    double_oracle,
    fp_selfplay,
    mwu_selfplay,
    odo_selfplay,
    oso_prod_step,
    prod_init,
    selfplay,
)
from .oso import OsoState, alpha_schedule, oso_init, oso_step, oso_threshold_step

__version__ = "0.1.0"
