"""Baseline learners (MWU, fictitious play) and regret bookkeeping.

All learners minimise loss for the row seat; use
:func:`odo_lab.game.column_view` for the column seat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import ContractError, best_response, loss_vector, normalise, uniform

FIXED_HORIZON = "fixed"
ANYTIME = "anytime"


def mwu_rate(k: int, mode: str = ANYTIME, t: int = 1, horizon: int | None = None) -> float:
    """Hedge learning rate for ``k`` experts.

    ``fixed`` uses ``sqrt(8 ln k / T)`` for a known horizon ``T`` (which gives
    the classic ``sqrt(T ln k / 2)`` regret bound); ``anytime`` substitutes the
    current step ``t`` for ``T``.
    """
    if k < 1 or t < 1:
        raise ContractError("mwu_rate needs k >= 1 and t >= 1")
    if k == 1:
        return 0.0
    if mode == FIXED_HORIZON:
        if horizon is None or horizon < 1:
            raise ContractError("fixed-horizon rate needs horizon >= 1")
        return math.sqrt(8.0 * math.log(k) / horizon)
    if mode == ANYTIME:
        return math.sqrt(8.0 * math.log(k) / t)
    raise ContractError(f"unknown rate mode {mode!r}")


@dataclass
class MwuState:
    """Multiplicative weights over ``len(weights)`` experts.

    Weights are kept in closed form, ``prior * exp(-mu_t * cumulative_loss)``.
    For a constant rate this is exactly the incremental update
    ``w <- w * exp(-mu * loss)``; for the anytime schedule it is the variant
    whose regret guarantee survives a decreasing rate. ``step`` counts updates
    since the last (re)start and ``rate`` overrides the schedule when set.
    """

    weights: np.ndarray
    step: int = 0
    rate_mode: str = ANYTIME
    horizon: int | None = None
    rate: float | None = None
    prior: np.ndarray | None = None
    cum_loss: np.ndarray | None = None

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.prior is None:
            self.prior = self.weights.copy()
        if self.cum_loss is None:
            self.cum_loss = np.zeros_like(self.weights)

    @classmethod
    def uniform(cls, k: int, rate_mode: str = ANYTIME, horizon: int | None = None,
                rate: float | None = None) -> "MwuState":
        return cls(uniform(k), 0, rate_mode, horizon, rate)

    def rate_at(self, t: int) -> float:
        if self.rate is not None:
            return self.rate
        return mwu_rate(self.weights.size, self.rate_mode, t, self.horizon)

    # learner protocol used by the meta drivers
    def strategy(self) -> np.ndarray:
        return self.weights

    def update(self, loss) -> None:
        mwu_step(self, loss)


def mwu_step(state: MwuState, loss) -> MwuState:
    """One exponential-weights update, in place. Returns ``state``."""
    loss = np.asarray(loss, dtype=float)
    if loss.shape != state.weights.shape:
        raise ContractError(f"loss has shape {loss.shape}, weights have {state.weights.shape}")
    state.step += 1
    state.cum_loss += loss
    # strategy for round step+1 uses that round's rate
    mu = state.rate_at(state.step + 1)
    if mu > 0.0:
        # shifting by the min keeps exp() away from underflow on long runs
        z = state.cum_loss - state.cum_loss.min()
        state.weights = normalise(state.prior * np.exp(-mu * z))
    return state


@dataclass
class FpState:
    """Classical fictitious play: pure best response to the opponent's average."""

    br_counts: np.ndarray
    opp_cumulative: np.ndarray
    t: int = 0

    @classmethod
    def new(cls, n: int, m: int) -> "FpState":
        return cls(np.zeros(n, dtype=np.int64), np.zeros(m), 0)

    def average(self) -> np.ndarray:
        """Empirical frequency of the learner's own best responses."""
        if self.t == 0:
            raise ContractError("fictitious play has not moved yet")
        return self.br_counts / self.t


def fp_step(state: FpState, A: np.ndarray, opp_strategy) -> tuple[FpState, int]:
    opp_strategy = np.asarray(opp_strategy, dtype=float)
    if opp_strategy.shape != state.opp_cumulative.shape or A.shape != (state.br_counts.size, opp_strategy.size):
        raise ContractError("fictitious play dimensions do not match the payoff matrix")
    state.opp_cumulative += opp_strategy
    state.t += 1
    a, _ = best_response(loss_vector(A, state.opp_cumulative / state.t))
    state.br_counts[a] += 1
    return state, a


@dataclass
class RegretLedger:
    """Cumulative losses for external regret against the full pure-strategy set."""

    per_action: np.ndarray
    incurred: float = 0.0
    t: int = 0

    @classmethod
    def new(cls, n: int) -> "RegretLedger":
        return cls(np.zeros(n))

    def regret(self) -> float:
        return regret(self)


def record(ledger: RegretLedger, pi, loss) -> RegretLedger:
    pi = np.asarray(pi, dtype=float)
    loss = np.asarray(loss, dtype=float)
    if pi.shape != ledger.per_action.shape or loss.shape != ledger.per_action.shape:
        raise ContractError("ledger records need full-set strategy and loss vectors")
    ledger.incurred += float(pi @ loss)
    ledger.per_action += loss
    ledger.t += 1
    return ledger


def regret(ledger: RegretLedger) -> float:
    """``R_T``: incurred loss minus the best fixed pure strategy's loss."""
    if ledger.t == 0:
        raise ContractError("regret is undefined before the first round")
    return ledger.incurred - float(ledger.per_action.min())
