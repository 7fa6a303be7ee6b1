"""Two-seat drivers: ODO / MWU / FP self-play, Double Oracle and OSO-Prod."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .game import (
    ContractError,
    JointSolution,
    LP_TOL,
    as_payoff_matrix,
    best_response,
    column_view,
    epsilon_best_response,
    exploitability,
    pure,
    solve_zero_sum_ne,
)
from .learners import FIXED_HORIZON, FpState, MwuState, RegretLedger, fp_step, record, regret
from .oso import EXACT, OsoState, oso_init


@dataclass(frozen=True)
class TraceRow:
    t: int
    exploitability: float
    k_row: int
    k_col: int
    value: float
    oracle_calls: int
    regret_row: float
    regret_col: float
    payoff: float = math.nan
    elapsed_ms: float = 0.0


@dataclass
class OdoTrace:
    rows: list[TraceRow] = field(default_factory=list)
    row_learner: object = None
    col_learner: object = None
    first_hit: int | None = None

    @property
    def final(self) -> TraceRow:
        return self.rows[-1]


def _k(learner, default: int) -> int:
    return learner.k if isinstance(learner, OsoState) else default


def _oracle_calls(learner) -> int:
    return learner.oracle_calls if isinstance(learner, OsoState) else 0


def selfplay(A, row, col, T: int, log_every: int | None = None,
             oracle_calls=None, target: float | None = None) -> tuple[OdoTrace, JointSolution]:
    """Run two loss-minimising learners against each other for ``T`` rounds.

    ``row`` and ``col`` follow the learner protocol (``strategy()`` /
    ``update(loss)``); the column learner sees ``column_view(A)`` losses.
    Logged exploitability is that of the *time-averaged* strategies, recorded
    at ``t = 1``, every ``log_every`` rounds and at ``T``. With ``target`` set,
    the first round whose averages are within ``target`` is stored in
    ``trace.first_hit`` (checked every round until hit).
    """
    if T < 1:
        raise ContractError("T must be >= 1")
    A = as_payoff_matrix(A)
    n, m = A.shape
    log_every = log_every or T
    led_row, led_col = RegretLedger.new(n), RegretLedger.new(m)
    sum_pi, sum_c = np.zeros(n), np.zeros(m)
    trace = OdoTrace(row_learner=row, col_learner=col)
    t0 = time.perf_counter()
    for t in range(1, T + 1):
        pi, c = row.strategy(), col.strategy()
        sum_pi += pi
        sum_c += c
        l_row = A @ c
        l_col = 1.0 - pi @ A
        record(led_row, pi, l_row)
        record(led_col, c, l_col)
        if hasattr(row, "observe"):
            row.observe(c)
            col.observe(pi)
        row.update(l_row)
        col.update(l_col)
        if target is not None and trace.first_hit is None:
            if exploitability(A, sum_pi / t, sum_c / t) <= target:
                trace.first_hit = t
        if t == 1 or t % log_every == 0 or t == T:
            pbar, cbar = sum_pi / t, sum_c / t
            calls = oracle_calls() if oracle_calls else _oracle_calls(row) + _oracle_calls(col)
            trace.rows.append(TraceRow(
                t, exploitability(A, pbar, cbar), _k(row, n), _k(col, m),
                float(pbar @ A @ cbar), calls, regret(led_row), regret(led_col),
                1.0 - led_row.incurred / t, (time.perf_counter() - t0) * 1e3,
            ))
    pbar, cbar = sum_pi / T, sum_c / T
    sol = JointSolution(pbar, cbar, float(pbar @ A @ cbar), exploitability(A, pbar, cbar))
    return trace, sol


def odo_selfplay(A, T: int, init: tuple[int, int] = (0, 0), seed: int = 0,
                 log_every: int | None = None, mode: str = EXACT, eps: float = 0.0,
                 eps_mode: str = "adversarial", cadence: int = 10, alpha=None,
                 target: float | None = None) -> tuple[OdoTrace, JointSolution]:
    """Both seats run Online Single Oracle (= Online Double Oracle)."""
    A = as_payoff_matrix(A)
    n, m = A.shape
    rng_row, rng_col = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    extra = {} if alpha is None else {"alpha": alpha}
    row = oso_init(n, init[0], mode, eps=eps, eps_mode=eps_mode, cadence=cadence, rng=rng_row, **extra)
    col = oso_init(m, init[1], mode, eps=eps, eps_mode=eps_mode, cadence=cadence, rng=rng_col, **extra)
    return selfplay(A, row, col, T, log_every, target=target)


def mwu_selfplay(A, T: int, log_every: int | None = None, rate_mode: str = FIXED_HORIZON,
                 target: float | None = None) -> tuple[OdoTrace, JointSolution]:
    A = as_payoff_matrix(A)
    n, m = A.shape
    row = MwuState.uniform(n, rate_mode, horizon=T)
    col = MwuState.uniform(m, rate_mode, horizon=T)
    return selfplay(A, row, col, T, log_every, target=target)


class FpSeat:
    """Fictitious play in the self-play loop.

    Plays ``init`` in round 1, afterwards the pure best response returned by
    :func:`fp_step` against the opponent's empirical average.
    """

    def __init__(self, A: np.ndarray, init: int = 0):
        self.A = A
        self.state = FpState.new(*A.shape)
        self.action = init
        self._opp = None

    def strategy(self) -> np.ndarray:
        return pure(self.action, self.A.shape[0])

    def observe(self, opp_strategy) -> None:
        self._opp = opp_strategy

    def update(self, loss) -> None:
        _, self.action = fp_step(self.state, self.A, self._opp)


def fp_selfplay(A, T: int, init: tuple[int, int] = (0, 0), log_every: int | None = None,
                target: float | None = None) -> tuple[OdoTrace, JointSolution]:
    A = as_payoff_matrix(A)
    row, col = FpSeat(A, init[0]), FpSeat(column_view(A), init[1])
    return selfplay(A, row, col, T, log_every, oracle_calls=lambda: row.state.t + col.state.t,
                    target=target)


class FixedStrategy:
    """A learner that never moves (e.g. a precomputed equilibrium strategy)."""

    def __init__(self, p):
        self.p = np.asarray(p, dtype=float)

    def strategy(self) -> np.ndarray:
        return self.p

    def update(self, loss) -> None:
        pass


@dataclass
class DoState:
    row_set: list[int]
    col_set: list[int]
    subgame_solution: JointSolution | None = None
    trace: list[TraceRow] = field(default_factory=list)


def _embed(p: np.ndarray, idx: list[int], dim: int) -> np.ndarray:
    out = np.zeros(dim)
    out[idx] = p
    return out


def double_oracle(A, ne_tol: float = LP_TOL, br_eps: float = 0.0, init: tuple[int, int] = (0, 0),
                  eps_mode: str = "adversarial", rng=None) -> tuple[JointSolution, DoState, int]:
    """Classic Double Oracle with exact (``br_eps=0``) or ``br_eps``-best responses.

    Returns the embedded subgame equilibrium at termination, the final
    restricted sets and the number of subgame solves.
    """
    if ne_tol <= 0 or br_eps < 0:
        raise ContractError("double_oracle needs ne_tol > 0 and br_eps >= 0")
    A = as_payoff_matrix(A)
    n, m = A.shape
    B = column_view(A)
    if not (0 <= init[0] < n and 0 <= init[1] < m):
        raise ContractError(f"initial strategies {init} outside the game")
    state = DoState([init[0]], [init[1]])
    calls = 0
    iterations = 0
    while True:
        iterations += 1
        sub = solve_zero_sum_ne(A[np.ix_(state.row_set, state.col_set)], ne_tol)
        state.subgame_solution = sub
        pi = _embed(sub.row_strategy, state.row_set, n)
        c = _embed(sub.col_strategy, state.col_set, m)
        if br_eps > 0:
            a, _ = epsilon_best_response(A @ c, br_eps, eps_mode, rng)
            b, _ = epsilon_best_response(B @ pi, br_eps, eps_mode, rng)
        else:
            a, _ = best_response(A @ c)
            b, _ = best_response(B @ pi)
        calls += 2
        state.trace.append(TraceRow(iterations, exploitability(A, pi, c), len(state.row_set),
                                    len(state.col_set), float(pi @ A @ c), calls, math.nan, math.nan))
        grew = False
        if a not in state.row_set:
            state.row_set.append(a)
            grew = True
        if b not in state.col_set:
            state.col_set.append(b)
            grew = True
        if not grew:
            break
    sol = JointSolution(pi, c, float(pi @ A @ c), exploitability(A, pi, c))
    return sol, state, iterations


@dataclass
class ProdState:
    eta: float
    w_oso: float
    w_b: float
    sub_oso: OsoState
    sub_b: object

    def mixture(self) -> float:
        """Probability mass on the OSO sub-learner."""
        return self.w_oso / (self.w_oso + self.w_b)

    def strategy(self) -> np.ndarray:
        p = self.mixture()
        return p * self.sub_oso.strategy() + (1.0 - p) * self.sub_b.strategy()

    def update(self, loss) -> None:
        oso_prod_step(self, loss)


def prod_rate(T: int) -> float:
    """Meta learning rate ``0.5 * sqrt(ln T / T)``."""
    if T < 1:
        raise ContractError("T must be >= 1")
    return 0.5 * math.sqrt(math.log(T) / T) if T > 1 else 0.5


def prod_init(n: int, T: int, start: int = 0, *, eta: float | None = None, sub_b=None,
              w_oso: float | None = None, w_b: float | None = None) -> ProdState:
    """OSO-Prod over ``n`` strategies; ``sub_b`` defaults to full-set MWU for horizon ``T``."""
    if eta is None:
        eta = prod_rate(T)
    if not 0.0 <= eta <= 0.5:
        raise ContractError(f"eta must lie in [0, 1/2], got {eta}")
    w_oso = eta if w_oso is None else w_oso
    w_b = 1.0 - eta if w_b is None else w_b
    if w_oso <= 0 or w_b <= 0:
        raise ContractError("initial meta-weights must be positive")
    if sub_b is None:
        sub_b = MwuState.uniform(n, FIXED_HORIZON, horizon=T)
    return ProdState(eta, w_oso, w_b, oso_init(n, start), sub_b)


def oso_prod_step(state: ProdState, loss) -> tuple[ProdState, np.ndarray]:
    loss = np.asarray(loss, dtype=float)
    state.w_oso *= 1.0 - state.eta * float(state.sub_oso.strategy() @ loss)
    state.w_b *= 1.0 - state.eta * float(np.asarray(state.sub_b.strategy()) @ loss)
    top = max(state.w_oso, state.w_b)
    if top < 1e-100:
        state.w_oso /= top
        state.w_b /= top
    state.sub_oso.update(loss)
    state.sub_b.update(loss)
    return state, state.strategy()
