"""Experiment configuration: a flat ``key = value`` text format.

Grammar (one entry per line)::

    line    := blank | comment | entry
    comment := '#' <anything>
    entry   := key '=' value          # surrounding whitespace is ignored
    key     := [a-z_]+
    list    := item (',' item)*       # for list-valued keys
    range   := int '..' int           # inclusive, allowed for ``seeds``

Later entries override earlier ones; ``--set key=value`` on the command line
is applied after the file. Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from ..games import KINDS, GameSpec

EXPERIMENTS = ("solve", "ksweep", "race", "exploit", "gen")
ALGORITHMS = ("odo", "odo_threshold", "odo_eps", "mwu", "fp", "do", "do_eps")
DEFAULT_T = {"race": 100_000}


class ConfigError(ValueError):
    pass


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _words(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class ExperimentConfig:
    experiment: str = "solve"
    id: str = ""
    game: str = "rps"
    rows: int = 10
    cols: int = 10
    weights: list[float] = field(default_factory=lambda: [1.0, 1.0, 1.0])
    path: str = ""
    game_seed: int = 0
    algorithms: list[str] = field(default_factory=lambda: ["odo"])
    T: int | None = None  # None: 100000 for race, 10000 otherwise
    seeds: list[int] = field(default_factory=lambda: [0])
    log_every: int = 1000
    output: str = "results"
    init_row: int = 0
    init_col: int = 0
    eps: float = 0.05
    eps_mode: str = "adversarial"
    cadence: int = 10
    ne_tol: float = 1e-8
    target: float = 0.1
    sweep_rows: list[int] = field(default_factory=lambda: [10, 50, 200, 1000])
    sweep_cols: list[int] = field(default_factory=lambda: [5, 10])
    restrict: int = 20
    timing: bool = True

    @property
    def experiment_id(self) -> str:
        return self.id or self.experiment

    def game_spec(self, run_seed: int = 0) -> GameSpec:
        """Game for one run; random games are reseeded per run as ``game_seed + run_seed``."""
        seed = self.game_seed + run_seed if self.game == "random" else self.game_seed
        return GameSpec(self.game, self.rows, self.cols, tuple(self.weights), self.path or None, seed)

    def validate(self) -> "ExperimentConfig":
        problems = []
        if self.T is None:
            self.T = DEFAULT_T.get(self.experiment, 10_000)
        if self.experiment not in EXPERIMENTS:
            problems.append(f"experiment must be one of {', '.join(EXPERIMENTS)}")
        if self.game not in KINDS:
            problems.append(f"game must be one of {', '.join(KINDS)}")
        if self.game == "csv" and not self.path:
            problems.append("game = csv needs path")
        if self.game == "csv" and self.path and not Path(self.path).is_file():
            problems.append(f"path {self.path!r} does not exist")
        if self.game == "random" and (self.rows < 1 or self.cols < 1):
            problems.append("rows and cols must be >= 1")
        if self.game == "biased_rps" and (len(self.weights) != 3 or min(self.weights) <= 0):
            problems.append("weights must be three positive numbers")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            problems.append(f"unknown algorithms {bad}; expected from {', '.join(ALGORITHMS)}")
        if not self.algorithms and self.experiment in ("solve", "race"):
            problems.append("algorithms must not be empty")
        if self.T < 1:
            problems.append("T must be >= 1")
        if not self.seeds:
            problems.append("seeds must not be empty")
        if self.log_every < 1:
            problems.append("log_every must be >= 1")
        if self.eps < 0:
            problems.append("eps must be >= 0")
        if self.eps_mode not in ("adversarial", "random"):
            problems.append("eps_mode must be adversarial or random")
        if self.cadence < 1:
            problems.append("cadence must be >= 1")
        if self.ne_tol <= 0:
            problems.append("ne_tol must be > 0")
        if self.target <= 0:
            problems.append("target must be > 0")
        if self.experiment == "ksweep" and (not self.sweep_rows or not self.sweep_cols
                                            or min(self.sweep_rows + self.sweep_cols) < 1):
            problems.append("sweep_rows and sweep_cols need positive sizes")
        if self.restrict < 1:
            problems.append("restrict must be >= 1")
        if problems:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))
        return self


_PARSERS = {
    int: int,
    "int | None": int,
    float: float,
    str: str,
    bool: _bool,
    "list[int]": _ints,
    "list[float]": _floats,
    "list[str]": _words,
}


def _field_types() -> dict:
    out = {}
    for f in fields(ExperimentConfig):
        t = f.type if isinstance(f.type, str) else f.type.__name__
        out[f.name] = {"int": int, "float": float, "str": str, "bool": bool}.get(t, t)
    return out


def apply(cfg: ExperimentConfig, key: str, value: str, where: str = "") -> None:
    types = _field_types()
    key = key.strip()
    if key not in types:
        raise ConfigError(f"{where}unknown key {key!r}")
    try:
        setattr(cfg, key, _PARSERS[types[key]](value.strip()))
    except ValueError as exc:
        raise ConfigError(f"{where}bad value for {key!r}: {exc}") from None


def parse_text(text: str, cfg: ExperimentConfig | None = None, source: str = "<config>") -> ExperimentConfig:
    cfg = cfg or ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        apply(cfg, key, value, f"{source}:{lineno}: ")
    return cfg


def load_config(path: str | None, overrides=(), experiment: str | None = None) -> ExperimentConfig:
    """Read ``path`` (optional), apply ``key=value`` overrides, validate."""
    cfg = ExperimentConfig()
    if experiment:
        cfg.experiment = experiment
    if path:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        parse_text(text, cfg, path)
        if experiment:
            cfg.experiment = experiment
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        apply(cfg, key, value, "--set: ")
    return cfg.validate()
