"""Game instances: seeded random matrices, canonical games, Kuhn poker, CSV I/O.

Random matrices come from numpy's PCG64 generator (``default_rng(seed)``),
whose ``random()`` draws use the 53-bit mantissa construction, so a seed
gives the same matrix on every platform.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .game import ContractError, as_payoff_matrix

KINDS = ("random", "rps", "matching_pennies", "biased_rps", "kuhn", "csv")


class MatrixFormatError(ValueError):
    """A matrix file could not be parsed or holds entries outside [0, 1]."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        where = "" if line is None else f"line {line}" + ("" if col is None else f", column {col}")
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line
        self.col = col


@dataclass
class GameSpec:
    kind: str
    rows: int | None = None
    cols: int | None = None
    weights: tuple[float, ...] | None = None
    path: str | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ContractError(f"unknown game kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind == "random" and not (self.rows and self.cols and self.rows >= 1 and self.cols >= 1):
            raise ContractError("random games need rows >= 1 and cols >= 1")
        if self.kind == "biased_rps":
            if not self.weights or len(self.weights) != 3 or min(self.weights) <= 0:
                raise ContractError("biased_rps needs three positive weights")
        if self.kind == "csv" and not self.path:
            raise ContractError("csv games need a path")


@dataclass
class Game:
    """A payoff matrix plus the metadata stored in its ``.meta`` sidecar.

    Entries map back to native units (row-player loss) as
    ``offset + scale * entry``.
    """

    matrix: np.ndarray
    kind: str
    seed: int = 0
    offset: float = 0.0
    scale: float = 1.0
    row_labels: list[str] = field(default_factory=list)
    col_labels: list[str] = field(default_factory=list)

    def native(self, value: float) -> float:
        return self.offset + self.scale * value

    def meta(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "offset": self.offset,
            "scale": self.scale,
            "row_labels": self.row_labels,
            "col_labels": self.col_labels,
        }


RPS_LABELS = ["Rock", "Paper", "Scissors"]


def rps() -> np.ndarray:
    # row loss: tie 0.5, row wins 0, row loses 1
    return np.array([[0.5, 1.0, 0.0],
                     [0.0, 0.5, 1.0],
                     [1.0, 0.0, 0.5]])


def matching_pennies() -> np.ndarray:
    # row wants to match
    return np.array([[0.0, 1.0],
                     [1.0, 0.0]])


def biased_rps(weights) -> np.ndarray:
    """RPS where beating the opponent with action ``i`` is worth ``weights[i]``."""
    w = np.asarray(weights, dtype=float)
    payoff = np.zeros((3, 3))
    for i in range(3):
        beats = (i + 2) % 3  # Rock beats Scissors, Paper beats Rock, ...
        payoff[i, beats] = w[i]
        payoff[beats, i] = -w[i]
    return 0.5 - payoff / (2.0 * w.max())


def random_matrix(n: int, m: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).random((n, m))


# Kuhn poker ---------------------------------------------------------------

KUHN_CARDS = "JQK"
KUHN_OFFSET = -2.0
KUHN_SCALE = 4.0


def _kuhn_p1_payoff(c1: int, c2: int, p1: tuple, p2: tuple) -> float:
    """Chips won by player 1 for one deal.

    ``p1[card] = (bets_first, calls_after_check_bet)``;
    ``p2[card] = (bets_after_check, calls_after_bet)``.
    """
    showdown = 1 if c1 > c2 else -1
    bet_first, call_late = p1[c1]
    bet_after_check, call_bet = p2[c2]
    if bet_first:
        return 2 * showdown if call_bet else 1
    if not bet_after_check:
        return showdown
    return 2 * showdown if call_late else -1


def _kuhn_plans():
    # one binary choice per (card, decision context): 2^6 plans per player
    return list(itertools.product(itertools.product((0, 1), repeat=2), repeat=3))


def _plan_label(plan, first: str, second: str) -> str:
    return " ".join(f"{KUHN_CARDS[c]}:{first[a]}{second[b]}" for c, (a, b) in enumerate(plan))


def kuhn_normal_form() -> Game:
    """Kuhn poker in normal form: 64 x 64 deterministic plans.

    Player 1 (rows) picks check/bet first and fold/call after check-bet for
    each card; player 2 picks check/bet after a check and fold/call after a
    bet. Entries are player 1's expected chip loss over the six equally
    likely deals, rescaled from [-2, 2] by ``(x + 2) / 4``.
    """
    plans = _kuhn_plans()
    deals = [(a, b) for a in range(3) for b in range(3) if a != b]
    A = np.empty((len(plans), len(plans)))
    for i, p1 in enumerate(plans):
        for j, p2 in enumerate(plans):
            won = sum(_kuhn_p1_payoff(c1, c2, p1, p2) for c1, c2 in deals) / len(deals)
            A[i, j] = (-won - KUHN_OFFSET) / KUHN_SCALE
    return Game(
        A, "kuhn", 0, KUHN_OFFSET, KUHN_SCALE,
        [_plan_label(p, "cb", "fc") for p in plans],
        [_plan_label(p, "cb", "fc") for p in plans],
    )


def generate(spec: GameSpec) -> Game:
    """Build the game described by ``spec``; a pure function of the spec."""
    spec.validate()
    if spec.kind == "random":
        return Game(random_matrix(spec.rows, spec.cols, spec.seed), "random", spec.seed)
    if spec.kind == "rps":
        return Game(rps(), "rps", spec.seed, row_labels=RPS_LABELS, col_labels=RPS_LABELS)
    if spec.kind == "matching_pennies":
        labels = ["Heads", "Tails"]
        return Game(matching_pennies(), "matching_pennies", spec.seed, row_labels=labels, col_labels=labels)
    if spec.kind == "biased_rps":
        return Game(biased_rps(spec.weights), "biased_rps", spec.seed,
                    row_labels=RPS_LABELS, col_labels=RPS_LABELS)
    if spec.kind == "kuhn":
        return kuhn_normal_form()
    game = load_game(spec.path)
    game.seed = spec.seed
    return game


def restrict_columns(A, size: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Keep ``size`` uniformly sampled columns (sorted); return them and their indices."""
    A = np.asarray(A)
    m = A.shape[1]
    if not 1 <= size <= m:
        raise ContractError(f"restriction size {size} outside [1, {m}]")
    kept = np.sort(np.random.default_rng(seed).choice(m, size=size, replace=False))
    return A[:, kept], kept


# CSV ------------------------------------------------------------------------

def save_csv(A, path) -> None:
    A = as_payoff_matrix(A)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in A:
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")


def load_csv(path) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            values = []
            for colno, field_ in enumerate(line.split(","), start=1):
                try:
                    x = float(field_)
                except ValueError:
                    raise MatrixFormatError(f"cannot parse {field_!r} as a number", lineno, colno) from None
                if not 0.0 <= x <= 1.0:
                    raise MatrixFormatError(f"entry {x!r} outside [0, 1]", lineno, colno)
                values.append(x)
            if rows and len(values) != len(rows[0]):
                raise MatrixFormatError(f"expected {len(rows[0])} entries, found {len(values)}", lineno)
            rows.append(values)
    if not rows:
        raise MatrixFormatError(f"{os.fspath(path)} holds no matrix rows")
    return np.array(rows, dtype=float)


def save_game(game: Game, path) -> None:
    """Write ``path`` (CSV) and ``path.meta`` (JSON sidecar)."""
    save_csv(game.matrix, path)
    with open(f"{os.fspath(path)}.meta", "w", encoding="utf-8") as fh:
        json.dump(game.meta(), fh, indent=2)
        fh.write("\n")


def load_game(path) -> Game:
    A = load_csv(path)
    meta_path = f"{os.fspath(path)}.meta"
    if not os.path.exists(meta_path):
        return Game(A, "csv")
    with open(meta_path, encoding="utf-8") as fh:
        meta = json.load(fh)
    return Game(A, meta.get("kind", "csv"), meta.get("seed", 0), meta.get("offset", 0.0),
                meta.get("scale", 1.0), meta.get("row_labels", []), meta.get("col_labels", []))
