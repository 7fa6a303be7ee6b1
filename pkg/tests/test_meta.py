import math

import numpy as np
import pytest

from odo_lab.game import ContractError, pure, solve_zero_sum_ne, uniform
from odo_lab.games import matching_pennies, random_matrix, rps
from odo_lab.learners import FIXED_HORIZON, MwuState, RegretLedger, record, regret
from odo_lab.meta import (
    FixedStrategy,
    double_oracle,
    fp_selfplay,
    mwu_selfplay,
    odo_selfplay,
    oso_prod_step,
    prod_init,
    prod_rate,
)
from odo_lab.oso import oso_init


def selfplay_bound(k1, k2, T):
    term = lambda k: math.sqrt(k * math.log(k) / (2 * T))
    return term(k1) + term(k2) + 2 * (k1 + k2) / T


# ODO self-play ---------------------------------------------------------------------

def test_odo_rps_converges_to_uniform():
    trace, sol = odo_selfplay(rps(), 10_000, log_every=1000)
    assert sol.exploitability <= 0.05
    np.testing.assert_allclose(sol.row_strategy, uniform(3), atol=0.05)
    np.testing.assert_allclose(sol.col_strategy, uniform(3), atol=0.05)
    assert [r.t for r in trace.rows] == [1] + list(range(1000, 10_001, 1000))


def test_odo_single_round_plays_init():
    A = random_matrix(5, 4, 0)
    _, sol = odo_selfplay(A, 1, init=(3, 2))
    np.testing.assert_array_equal(sol.row_strategy, pure(3, 5))
    np.testing.assert_array_equal(sol.col_strategy, pure(2, 4))


def test_odo_within_rate_bound_on_30x30():
    A = random_matrix(30, 30, 2)
    T = 50_000
    trace, sol = odo_selfplay(A, T, log_every=5000)
    f = trace.final
    assert sol.exploitability <= selfplay_bound(f.k_row, f.k_col, T)


@pytest.mark.parametrize("seed", range(5))
def test_odo_trace_invariants(seed):
    A = random_matrix(15, 12, 100 + seed)
    trace, sol = odo_selfplay(A, 3000, log_every=100, seed=seed)
    rows = trace.rows
    assert all(a.k_row <= b.k_row and a.k_col <= b.k_col for a, b in zip(rows, rows[1:]))
    assert all(a.oracle_calls <= b.oracle_calls for a, b in zip(rows, rows[1:]))
    assert rows[-1].exploitability <= rows[0].exploitability
    assert rows[-1].exploitability == sol.exploitability


def test_mwu_and_fp_selfplay_on_pennies():
    _, sol = mwu_selfplay(matching_pennies(), 5000)
    assert sol.exploitability <= 0.05
    trace, sol = fp_selfplay(matching_pennies(), 5000)
    assert sol.exploitability <= 0.05
    # FP calls one oracle per seat per round
    assert trace.final.oracle_calls == 2 * 5000


def test_selfplay_target_first_hit():
    trace, _ = odo_selfplay(rps(), 2000, target=0.1)
    assert trace.first_hit is not None and trace.first_hit <= 2000
    trace, _ = odo_selfplay(rps(), 5, target=1e-12)
    assert trace.first_hit is None


# Double Oracle -----------------------------------------------------------------------

def test_do_rps_hand_trace():
    sol, state, iterations = double_oracle(rps(), init=(0, 0))
    assert sorted(state.row_set) == [0, 1, 2] and sorted(state.col_set) == [0, 1, 2]
    np.testing.assert_allclose(sol.row_strategy, uniform(3), atol=1e-8)
    np.testing.assert_allclose(sol.col_strategy, uniform(3), atol=1e-8)
    # at most three expansions per player, plus the final check
    assert iterations <= 4


def test_do_pure_saddle_terminates_immediately():
    A = np.array([[0.5, 0.3, 0.4],
                  [0.7, 0.6, 0.9],
                  [0.6, 0.2, 0.8]])
    # A[0, 0] is the largest entry of its row and the smallest of its column
    assert A[0].max() == A[:, 0].min() == A[0, 0]
    sol, state, iterations = double_oracle(A, init=(0, 0))
    assert iterations == 1
    assert state.row_set == [0] and state.col_set == [0]
    assert sol.exploitability == 0.0


def test_do_random_20x20_matches_full_solve():
    A = random_matrix(20, 20, 42)
    sol, state, iterations = double_oracle(A, ne_tol=1e-8)
    assert sol.exploitability <= 1e-8
    assert iterations <= 40
    assert sol.value == pytest.approx(solve_zero_sum_ne(A).value, abs=1e-7)


@pytest.mark.parametrize("eps", [0.01, 0.05])
def test_do_eps_soundness(eps):
    for seed in range(10):
        A = random_matrix(15, 12, seed)
        sol, state, iterations = double_oracle(A, 1e-8, eps, rng=np.random.default_rng(seed))
        assert sol.exploitability <= 1e-8 + 2 * eps
        assert iterations <= 15 + 12


def test_do_contract():
    with pytest.raises(ContractError):
        double_oracle(rps(), ne_tol=0)
    with pytest.raises(ContractError):
        double_oracle(rps(), br_eps=-1)
    with pytest.raises(ContractError):
        double_oracle(rps(), init=(3, 0))


# OSO-Prod -------------------------------------------------------------------------------

def test_prod_defaults():
    T = 1000
    s = prod_init(4, T)
    eta = 0.5 * math.sqrt(math.log(T) / T)
    assert s.eta == pytest.approx(eta)
    assert (s.w_oso, s.w_b) == pytest.approx((eta, 1 - eta))
    assert prod_rate(1) == 0.5
    with pytest.raises(ContractError):
        prod_init(4, T, eta=0.6)
    with pytest.raises(ContractError):
        prod_init(4, T, eta=0.1, w_oso=0.0)


def test_prod_zero_eta_keeps_mixture():
    rng = np.random.default_rng(0)
    s = prod_init(3, 100, eta=0.0, w_oso=0.3, w_b=0.7, sub_b=FixedStrategy([0.2, 0.2, 0.6]))
    for _ in range(50):
        oso_prod_step(s, rng.random(3))
        assert (s.w_oso, s.w_b) == (0.3, 0.7)
        assert s.mixture() == pytest.approx(0.3)


def test_prod_equal_sub_learners_play_their_strategy():
    rng = np.random.default_rng(1)
    s = prod_init(5, 200, sub_b=oso_init(5, 0))
    for _ in range(200):
        _, out = oso_prod_step(s, rng.random(5))
        np.testing.assert_allclose(out, s.sub_oso.strategy(), atol=1e-15)


def test_prod_shifts_weight_to_better_sub_learner():
    # B always plays the action that never loses; OSO starts on the bad one
    T = 400
    s = prod_init(2, T, start=0, sub_b=FixedStrategy(pure(1, 2)))
    loss_oso = loss_b = 0.0
    for _ in range(T):
        loss = np.array([1.0, 0.0])
        loss_oso += s.sub_oso.strategy() @ loss
        loss_b += s.sub_b.strategy() @ loss
        oso_prod_step(s, loss)
    assert loss_b < loss_oso
    assert s.w_b / (s.w_oso + s.w_b) >= s.w_oso / (s.w_oso + s.w_b)


def test_prod_weights_stay_positive_over_long_run():
    rng = np.random.default_rng(5)
    T = 20_000
    s = prod_init(4, T, eta=0.5)
    for _ in range(T):
        oso_prod_step(s, rng.random(4))
        assert s.w_oso > 0 and s.w_b > 0


def test_prod_regret_close_to_mwu_on_random_losses():
    rng = np.random.default_rng(8)
    T, n = 5000, 6
    L = rng.random((T, n))
    prod = prod_init(n, T)
    mwu = MwuState.uniform(n, FIXED_HORIZON, horizon=T)
    lp, lm = RegretLedger.new(n), RegretLedger.new(n)
    for loss in L:
        record(lp, prod.strategy(), loss)
        record(lm, mwu.strategy(), loss)
        oso_prod_step(prod, loss)
        mwu.update(loss)
    assert regret(lp) <= regret(lm) + 2 * math.sqrt(T * math.log(T)) + 2 * prod.sub_oso.k
