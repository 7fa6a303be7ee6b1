"""Matrix-game primitives: losses, best responses, exploitability, LP solver.

Conventions
-----------
``A[i, j]`` is the *row* player's loss in ``[0, 1]`` when row ``i`` meets
column ``j``. The column player's loss is ``1 - A[i, j]``. Any learner that
minimises loss for the row seat can play the column seat on
:func:`column_view` (``B = 1 - A.T``).

Exploitability of a joint profile ``(pi, c)`` is

    max_j (pi^T A)[j] - min_i (A c)[i]

i.e. the sum of both players' best-response gains. It is zero exactly at a
Nash equilibrium. This is the usual NashConv-style measure; some sources
halve it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

SIMPLEX_ATOL = 1e-9
SUPPORT_TOL = 1e-6
LP_TOL = 1e-8


class ContractError(ValueError):
    """An argument violated a documented precondition (shape, range, ...)."""


class NonConvergenceError(RuntimeError):
    """The NE solver could not reach the requested tolerance.

    ``best`` holds the best iterate found (a :class:`JointSolution`) or None.
    """

    def __init__(self, message: str, best: "JointSolution | None" = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class JointSolution:
    row_strategy: np.ndarray
    col_strategy: np.ndarray
    value: float
    exploitability: float


def as_payoff_matrix(A) -> np.ndarray:
    """Validate and return ``A`` as a 2-D float array with entries in [0, 1]."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ContractError(f"payoff matrix must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ContractError("payoff matrix contains non-finite entries")
    bad = np.argwhere((A < 0.0) | (A > 1.0))
    if bad.size:
        i, j = bad[0]
        raise ContractError(f"payoff entry A[{i},{j}] = {A[i, j]!r} outside [0, 1]")
    return A


def check_strategy(p, dim: int | None = None, name: str = "strategy") -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ContractError(f"{name} must be a non-empty vector")
    if dim is not None and p.size != dim:
        raise ContractError(f"{name} has dimension {p.size}, expected {dim}")
    if np.any(p < -SIMPLEX_ATOL) or abs(p.sum() - 1.0) > SIMPLEX_ATOL:
        raise ContractError(f"{name} is not a probability vector (sum={p.sum()!r}, min={p.min()!r})")
    return p


def normalise(p: np.ndarray) -> np.ndarray:
    """Clip tiny negatives and rescale onto the simplex."""
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def pure(i: int, dim: int) -> np.ndarray:
    p = np.zeros(dim)
    p[i] = 1.0
    return p


def uniform(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / dim)


def column_view(A: np.ndarray) -> np.ndarray:
    """Loss matrix seen from the column seat: ``B[j, i] = 1 - A[i, j]``."""
    return 1.0 - np.asarray(A).T


def loss_vector(A: np.ndarray, c) -> np.ndarray:
    """Row losses ``A @ c`` against column mixture ``c``."""
    A = np.asarray(A)
    c = np.asarray(c, dtype=float)
    if c.ndim != 1 or c.size != A.shape[1]:
        raise ContractError(f"column strategy has dimension {c.size}, matrix has {A.shape[1]} columns")
    return A @ c


def expected_loss(pi, A: np.ndarray, c) -> float:
    A = np.asarray(A)
    pi = np.asarray(pi, dtype=float)
    if pi.ndim != 1 or pi.size != A.shape[0]:
        raise ContractError(f"row strategy has dimension {pi.size}, matrix has {A.shape[0]} rows")
    return float(pi @ loss_vector(A, c))


def best_response(loss) -> tuple[int, float]:
    """Lowest-index argmin of ``loss`` and the minimum value."""
    loss = np.asarray(loss, dtype=float)
    if loss.ndim != 1 or loss.size == 0:
        raise ContractError("best_response needs a non-empty loss vector")
    i = int(np.argmin(loss))
    return i, float(loss[i])


EPS_MODES = ("adversarial", "random")


def epsilon_best_response(loss, eps: float, mode: str = "adversarial", rng=None) -> tuple[int, float]:
    """An index whose loss is within ``eps`` of the minimum.

    ``adversarial`` returns the admissible index with the largest loss (lowest
    index on ties); ``random`` draws uniformly from the admissible set using
    ``rng``. With ``eps == 0`` both reduce to :func:`best_response`.
    """
    if eps < 0:
        raise ContractError(f"eps must be >= 0, got {eps}")
    if mode not in EPS_MODES:
        raise ContractError(f"unknown epsilon oracle mode {mode!r}")
    i_best, v_best = best_response(loss)
    if eps == 0:
        return i_best, v_best
    loss = np.asarray(loss, dtype=float)
    admissible = np.flatnonzero(loss <= v_best + eps)
    if mode == "adversarial":
        i = int(admissible[np.argmax(loss[admissible])])
    else:
        if rng is None:
            raise ContractError("random epsilon oracle needs an rng")
        i = int(rng.choice(admissible))
    return i, float(loss[i])


def exploitability(A: np.ndarray, pi, c) -> float:
    A = np.asarray(A)
    pi = np.asarray(pi, dtype=float)
    c = np.asarray(c, dtype=float)
    if pi.ndim != 1 or pi.size != A.shape[0]:
        raise ContractError(f"row strategy has dimension {pi.size}, matrix has {A.shape[0]} rows")
    if c.ndim != 1 or c.size != A.shape[1]:
        raise ContractError(f"column strategy has dimension {c.size}, matrix has {A.shape[1]} columns")
    gap = float(np.max(pi @ A) - np.min(A @ c))
    # max_j (pi^T A)_j >= pi^T A c >= min_i (A c)_i; only rounding can push it below 0
    return max(gap, 0.0)


def support(pi, tol: float = SUPPORT_TOL) -> list[int]:
    if tol < 0:
        raise ContractError("support tolerance must be >= 0")
    return [int(i) for i in np.flatnonzero(np.asarray(pi) > tol)]


def _minimax_lp(A: np.ndarray) -> np.ndarray:
    """Row strategy minimising the worst-case column loss, via HiGHS."""
    n, m = A.shape
    # variables: pi_0..pi_{n-1}, v ; minimise v s.t. A^T pi <= v
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    a_ub = np.hstack([A.T, -np.ones((m, 1))])
    a_eq = np.hstack([np.ones((1, n)), np.zeros((1, 1))])
    bounds = [(0.0, None)] * n + [(None, None)]
    res = linprog(
        cost, A_ub=a_ub, b_ub=np.zeros(m), A_eq=a_eq, b_eq=[1.0], bounds=bounds,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise NonConvergenceError(f"minimax LP failed: {res.message}")
    return normalise(res.x[:n])


def solve_zero_sum_ne(A, tol: float = LP_TOL) -> JointSolution:
    """Nash equilibrium of the zero-sum game with row-loss matrix ``A``.

    Solves the row player's minimax LP and the column player's (on
    ``1 - A.T``) separately, then verifies the pair: the returned solution's
    exploitability is guaranteed to be ``<= tol``, otherwise
    :class:`NonConvergenceError` is raised carrying the LP iterate.
    """
    if tol <= 0:
        raise ContractError("tol must be > 0")
    A = as_payoff_matrix(A)
    n, m = A.shape
    if n == 1 or m == 1:
        # degenerate: the single-strategy side is forced, the other best-responds
        if n == 1:
            pi, c = np.ones(1), pure(int(np.argmax(A[0])), m)
        else:
            pi, c = pure(int(np.argmin(A[:, 0])), n), np.ones(1)
    else:
        pi = _minimax_lp(A)
        c = _minimax_lp(column_view(A))
    sol = JointSolution(pi, c, float(pi @ A @ c), exploitability(A, pi, c))
    if sol.exploitability > tol:
        raise NonConvergenceError(
            f"LP solution exploitability {sol.exploitability:.3e} exceeds tol {tol:.1e}", best=sol
        )
    return sol
