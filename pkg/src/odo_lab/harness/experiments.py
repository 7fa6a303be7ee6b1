"""Experiment runners behind the ``odo-lab`` subcommands.

Every experiment is split into independent cells (one per seed, or per
(rows, cols, seed) for the sweep). Cells run in a process pool capped by
``ODO_LAB_THREADS`` and their results are written by the parent in cell
order, so output files do not depend on scheduling.

Outputs, in ``cfg.output``:

``<id>.jsonl``
    one :class:`MetricsRow` per line.
``<id>_summary.csv``
    one row per cell (columns depend on the experiment).
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..game import JointSolution, solve_zero_sum_ne
from ..games import generate, random_matrix, restrict_columns, save_game
from ..learners import FIXED_HORIZON, MwuState
from ..meta import (
    FixedStrategy,
    TraceRow,
    double_oracle,
    fp_selfplay,
    mwu_selfplay,
    odo_selfplay,
    selfplay,
)
from ..oso import EPSILON, EXACT, THRESHOLD, oso_init
from .config import ConfigError, ExperimentConfig


@dataclass
class MetricsRow:
    experiment: str
    seed: int
    algorithm: str
    t: int
    exploitability: float
    k_row: int
    k_col: int
    value: float
    payoff: float | None
    regret: float | None
    oracle_calls: int
    elapsed_ms: float | None

    def to_json(self) -> str:
        d = asdict(self)
        for key, v in d.items():
            if isinstance(v, float) and math.isnan(v):
                d[key] = None
        return json.dumps(d)


TIMING_FIELDS = ("elapsed_ms",)


def _rows(cfg: ExperimentConfig, seed: int, algorithm: str, trace_rows: list[TraceRow]) -> list[MetricsRow]:
    return [
        MetricsRow(cfg.experiment_id, seed, algorithm, r.t, r.exploitability, r.k_row, r.k_col,
                   r.value, r.payoff, r.regret_row, r.oracle_calls,
                   round(r.elapsed_ms, 3) if cfg.timing else None)
        for r in trace_rows
    ]


def run_algorithm(cfg: ExperimentConfig, A: np.ndarray, algorithm: str, seed: int,
                  target: float | None = None) -> tuple[list[TraceRow], JointSolution, int | None]:
    """One self-play (or Double Oracle) run; returns trace rows, final solution, first hit."""
    init = (cfg.init_row, cfg.init_col)
    if algorithm in ("do", "do_eps"):
        eps = cfg.eps if algorithm == "do_eps" else 0.0
        sol, state, _ = double_oracle(A, cfg.ne_tol, eps, init, cfg.eps_mode, np.random.default_rng(seed))
        hit = next((r.t for r in state.trace if target is not None and r.exploitability <= target), None)
        return state.trace, sol, hit
    if algorithm == "mwu":
        trace, sol = mwu_selfplay(A, cfg.T, cfg.log_every, target=target)
    elif algorithm == "fp":
        trace, sol = fp_selfplay(A, cfg.T, init, cfg.log_every, target=target)
    else:
        mode = {"odo": EXACT, "odo_threshold": THRESHOLD, "odo_eps": EPSILON}[algorithm]
        trace, sol = odo_selfplay(A, cfg.T, init, seed, cfg.log_every, mode, cfg.eps, cfg.eps_mode,
                                  cfg.cadence, target=target)
    return trace.rows, sol, trace.first_hit


# cells ----------------------------------------------------------------------

def _solve_cell(cfg: ExperimentConfig, seed: int):
    A = generate(cfg.game_spec(seed)).matrix
    metrics, summary = [], []
    for alg in cfg.algorithms:
        rows, sol, _ = run_algorithm(cfg, A, alg, seed)
        metrics += _rows(cfg, seed, alg, rows)
        summary.append({
            "seed": seed, "algorithm": alg, "t": rows[-1].t, "exploitability": sol.exploitability,
            "value": sol.value, "row_strategy": " ".join(repr(float(x)) for x in sol.row_strategy),
            "col_strategy": " ".join(repr(float(x)) for x in sol.col_strategy),
        })
    return metrics, summary


def _race_cell(cfg: ExperimentConfig, seed: int):
    A = generate(cfg.game_spec(seed)).matrix
    metrics, summary = [], []
    for alg in cfg.algorithms:
        rows, sol, hit = run_algorithm(cfg, A, alg, seed, target=cfg.target)
        metrics += _rows(cfg, seed, alg, rows)
        summary.append({"seed": seed, "algorithm": alg, "target": cfg.target,
                        "steps_to_target": "" if hit is None else hit,
                        "final_t": rows[-1].t, "final_exploitability": sol.exploitability})
    return metrics, summary


def oso_vs_mwu(A: np.ndarray, T: int, log_every: int | None = None, start: int = 0):
    """OSO on the row seat against full-set MWU (fixed horizon ``T``) on the column seat."""
    n, m = A.shape
    row = oso_init(n, start)
    col = MwuState.uniform(m, FIXED_HORIZON, horizon=T)
    trace, sol = selfplay(A, row, col, T, log_every)
    return trace, sol, row


def _ksweep_cell(cfg: ExperimentConfig, cell: tuple[int, int, int]):
    n, m, seed = cell
    A = random_matrix(n, m, cfg.game_seed + seed)
    trace, sol, row = oso_vs_mwu(A, cfg.T, cfg.log_every, min(cfg.init_row, n - 1))
    metrics = _rows(cfg, seed, f"oso_vs_mwu[{n}x{m}]", trace.rows)
    return metrics, [{"n": n, "m": m, "seed": seed, "k": row.k, "T_used": trace.final.t,
                      "exploitability": sol.exploitability}]


def _exploit_cell(cfg: ExperimentConfig, seed: int, A: np.ndarray, ne_row: np.ndarray):
    Ar, kept = restrict_columns(A, cfg.restrict, seed)
    m = Ar.shape[1]
    oso_trace, _, row = oso_vs_mwu(Ar, cfg.T, cfg.log_every, cfg.init_row)
    ne_trace, _ = selfplay(Ar, FixedStrategy(ne_row), MwuState.uniform(m, FIXED_HORIZON, horizon=cfg.T),
                           cfg.T, cfg.log_every)
    metrics = _rows(cfg, seed, "oso", oso_trace.rows) + _rows(cfg, seed, "ne_fixed", ne_trace.rows)
    oso_pay, ne_pay = oso_trace.final.payoff, ne_trace.final.payoff
    return metrics, [{"seed": seed, "kept_columns": " ".join(map(str, kept)), "oso_payoff": oso_pay,
                      "ne_payoff": ne_pay, "oso_wins": int(oso_pay > ne_pay), "k_row": row.k}]


# plumbing -------------------------------------------------------------------

def worker_count() -> int:
    cap = os.environ.get("ODO_LAB_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def _map(fn, cfg: ExperimentConfig, cells, *extra):
    """``[fn(cfg, cell, *extra) for cell in cells]``, possibly in worker processes."""
    workers = min(worker_count(), len(cells))
    if workers <= 1:
        return [fn(cfg, c, *extra) for c in cells]
    with ProcessPoolExecutor(workers) as pool:
        futures = [pool.submit(fn, cfg, c, *extra) for c in cells]
        return [f.result() for f in futures]


@dataclass
class ExperimentResult:
    metrics: list[MetricsRow]
    summary: list[dict]
    metrics_path: Path | None = None
    summary_path: Path | None = None


def _write(cfg: ExperimentConfig, results) -> ExperimentResult:
    metrics = [row for cell_metrics, _ in results for row in cell_metrics]
    summary = [row for _, cell_summary in results for row in cell_summary]
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    mpath = out / f"{cfg.experiment_id}.jsonl"
    spath = out / f"{cfg.experiment_id}_summary.csv"
    with open(mpath, "w", encoding="utf-8", newline="\n") as fh:
        for row in metrics:
            fh.write(row.to_json() + "\n")
    with open(spath, "w", encoding="utf-8", newline="") as fh:
        if summary:
            writer = csv.DictWriter(fh, fieldnames=list(summary[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(summary)
    return ExperimentResult(metrics, summary, mpath, spath)


def run_solve(cfg: ExperimentConfig) -> ExperimentResult:
    return _write(cfg, _map(_solve_cell, cfg, cfg.seeds))


def run_race(cfg: ExperimentConfig) -> ExperimentResult:
    return _write(cfg, _map(_race_cell, cfg, cfg.seeds))


def run_ksweep(cfg: ExperimentConfig) -> ExperimentResult:
    cells = [(n, m, s) for m in cfg.sweep_cols for n in cfg.sweep_rows for s in cfg.seeds]
    return _write(cfg, _map(_ksweep_cell, cfg, cells))


def run_exploit(cfg: ExperimentConfig) -> ExperimentResult:
    A = generate(cfg.game_spec()).matrix
    if cfg.restrict > A.shape[1]:
        raise ConfigError(f"restrict = {cfg.restrict} exceeds the game's {A.shape[1]} columns")
    ne_row = solve_zero_sum_ne(A, cfg.ne_tol).row_strategy
    return _write(cfg, _map(_exploit_cell, cfg, cfg.seeds, A, ne_row))


def run_gen(cfg: ExperimentConfig) -> Path:
    """Write the configured game (first seed) to ``output`` as CSV + ``.meta``."""
    game = generate(cfg.game_spec(cfg.seeds[0]))
    path = Path(cfg.output)
    if path.suffix != ".csv":
        path.mkdir(parents=True, exist_ok=True)
        path = path / f"{cfg.experiment_id if cfg.id else cfg.game}.csv"
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
    save_game(game, path)
    return path


RUNNERS = {
    "solve": run_solve,
    "race": run_race,
    "ksweep": run_ksweep,
    "exploit": run_exploit,
}


def summarise_ksweep(summary: list[dict]) -> dict[tuple[int, int], float]:
    """Mean final k per (m, n)."""
    acc: dict[tuple[int, int], list[int]] = {}
    for row in summary:
        acc.setdefault((row["m"], row["n"]), []).append(row["k"])
    return {key: float(np.mean(v)) for key, v in sorted(acc.items())}
