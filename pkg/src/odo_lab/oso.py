"""Online Single Oracle: windowed MWU over a growing effective strategy set.

The learner mixes only over ``effective_set``. Each round it observes the full
loss vector, updates the running loss of the current time window and asks a
best-response oracle (over *all* pure strategies) for the best reply to the
window's average loss. A reply outside the effective set is appended, a new
window opens and MWU restarts uniformly over the enlarged set; the new mixture
is played from the next round on.

Three modes share this loop:

``exact``
    exact best response every round.
``epsilon``
    an ``eps``-best response (adversarial or random choice among admissible
    replies) stands in for the exact oracle.
``threshold``
    the oracle runs every ``cadence`` rounds of a window and the reply is only
    added when the window's regret gap against the full set reaches
    ``alpha(window_index, rounds_in_window)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .game import ContractError, EPS_MODES, best_response, epsilon_best_response
from .learners import ANYTIME, MwuState, mwu_step

EXACT = "exact"
THRESHOLD = "threshold"
EPSILON = "epsilon"
MODES = (EXACT, THRESHOLD, EPSILON)


def alpha_schedule(window_index: int, offset: int) -> float:
    """Default admission threshold: square root of the position in the window."""
    if offset < 0:
        raise ContractError("window offset must be >= 0")
    return math.sqrt(offset)


@dataclass(frozen=True)
class WindowRecord:
    window_index: int
    length: int
    added_strategy: int | None
    window_regret: float


@dataclass
class OsoState:
    n: int
    effective_set: list[int]
    mwu: MwuState
    window_index: int = 1
    window_start: int = 0
    window_loss_sum: np.ndarray = None
    global_step: int = 0
    mode: str = EXACT
    eps: float = 0.0
    eps_mode: str = "adversarial"
    cadence: int = 10
    alpha: Callable[[int, int], float] = alpha_schedule
    rng: np.random.Generator | None = None
    oracle_calls: int = 0
    window_incurred: float = 0.0
    history: list[WindowRecord] = field(default_factory=list)
    _member: np.ndarray = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return len(self.effective_set)

    def contains(self, i: int) -> bool:
        return bool(self._member[i])

    def strategy(self) -> np.ndarray:
        """Current mixture embedded in the full simplex (zero off the effective set)."""
        p = np.zeros(self.n)
        p[self.effective_set] = self.mwu.weights
        return p

    def update(self, loss) -> None:
        if self.mode == THRESHOLD:
            oso_threshold_step(self, loss)
        else:
            oso_step(self, loss)

    def windows(self) -> list[WindowRecord]:
        """Closed windows plus the currently open one (if it has any rounds)."""
        out = list(self.history)
        length = self.global_step - self.window_start
        if length:
            gap = self.window_incurred - float(self.window_loss_sum.min())
            out.append(WindowRecord(self.window_index, length, None, gap))
        return out


def oso_init(n: int, start: int = 0, mode: str = EXACT, *, eps: float = 0.0,
             eps_mode: str = "adversarial", cadence: int = 10,
             alpha: Callable[[int, int], float] = alpha_schedule,
             rng: np.random.Generator | None = None) -> OsoState:
    if not 0 <= start < n:
        raise ContractError(f"start index {start} outside [0, {n})")
    if mode not in MODES:
        raise ContractError(f"unknown OSO mode {mode!r}")
    if eps < 0:
        raise ContractError("eps must be >= 0")
    if eps_mode not in EPS_MODES:
        raise ContractError(f"unknown epsilon oracle mode {eps_mode!r}")
    if cadence < 1:
        raise ContractError("cadence must be >= 1")
    if mode == EPSILON and eps_mode == "random" and rng is None:
        raise ContractError("random epsilon oracle needs an rng")
    member = np.zeros(n, dtype=bool)
    member[start] = True
    return OsoState(
        n=n,
        effective_set=[start],
        mwu=MwuState.uniform(1, ANYTIME),
        window_loss_sum=np.zeros(n),
        mode=mode,
        eps=eps,
        eps_mode=eps_mode,
        cadence=cadence,
        alpha=alpha,
        rng=rng,
        _member=member,
    )


def _observe(state: OsoState, loss) -> np.ndarray:
    loss = np.asarray(loss, dtype=float)
    if loss.shape != (state.n,):
        raise ContractError(f"loss has shape {loss.shape}, expected ({state.n},)")
    state.window_incurred += float(state.mwu.weights @ loss[state.effective_set])
    state.global_step += 1
    state.window_loss_sum += loss
    return loss


def _open_window(state: OsoState, a: int) -> None:
    length = state.global_step - state.window_start
    gap = state.window_incurred - float(state.window_loss_sum.min())
    state.history.append(WindowRecord(state.window_index, length, a, gap))
    state.effective_set.append(a)
    state._member[a] = True
    state.mwu = MwuState.uniform(len(state.effective_set), ANYTIME)
    state.window_index += 1
    state.window_start = state.global_step
    state.window_loss_sum = np.zeros(state.n)
    state.window_incurred = 0.0


def oso_step(state: OsoState, loss) -> tuple[OsoState, np.ndarray]:
    """Observe ``loss`` for the strategy just played; return the next strategy."""
    if state.mode == THRESHOLD:
        raise ContractError("threshold-mode state must be stepped with oso_threshold_step")
    loss = _observe(state, loss)
    avg = state.window_loss_sum / (state.global_step - state.window_start)
    state.oracle_calls += 1
    if state.mode == EPSILON:
        a, _ = epsilon_best_response(avg, state.eps, state.eps_mode, state.rng)
    else:
        a, _ = best_response(avg)
    if state._member[a]:
        mwu_step(state.mwu, loss[state.effective_set])
    else:
        _open_window(state, a)
    return state, state.strategy()


def oso_threshold_step(state: OsoState, loss) -> tuple[OsoState, np.ndarray, bool]:
    """Slowly-adding variant; also reports whether the full-set oracle ran."""
    if state.mode != THRESHOLD:
        raise ContractError("oso_threshold_step needs a threshold-mode state")
    loss = _observe(state, loss)
    offset = state.global_step - state.window_start
    called = offset % state.cadence == 0
    add = None
    if called:
        state.oracle_calls += 1
        a, _ = best_response(state.window_loss_sum / offset)
        if not state._member[a]:
            s = state.window_loss_sum
            gap = float(s[state.effective_set].min() - s[a])
            if gap >= state.alpha(state.window_index, offset):
                add = a
    if add is None:
        mwu_step(state.mwu, loss[state.effective_set])
    else:
        _open_window(state, add)
    return state, state.strategy(), called
