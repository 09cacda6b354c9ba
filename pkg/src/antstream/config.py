"""Run configuration: flat key=value files plus command-line overrides.

Precedence is CLI overrides > config file > defaults. Validation collects
every violation before failing, so a bad config reports all its problems
at once. The emitted manifest is itself a loadable config, which is what
makes re-running a manifest reproduce a run exactly.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from .behavior import AGGREGATIONS

DEFAULTS: dict[str, str] = {
    "name": "run",
    # habitat
    "width": "57",
    "height": "57",
    # movement kinetics
    "beta": "3.5",
    "delta": "0.2",
    "eta": "0.07",
    "kappa": "0.015",
    "w_table": "1.0,0.5,0.25,0.08333333333333333,0.05",
    # pick/drop thresholds
    "theta_count": "5.0",
    "steepness": "2.0",
    "k1": "0.1",
    "k2": "0.15",
    "aggregation": "max",
    # colony
    "ants": "auto",
    # data source
    "data": "synthetic",
    "csv_path": "",
    "csv_dim": "0",
    "classes": "4",
    "per_class": "200",
    "dim": "2",
    "spread": "0.1",
    # schedule & horizon
    "schedule": "batch",
    "horizon": "1000000",
    "checkpoints": "auto",
    # evaluation
    "knn_k": "3",
    "test_fraction": "0.2",
    "n_subsets": "10",
    "patch_size": "8",
    # run identity
    "seed": "1",
    "out": "runs",
}


class ConfigError(Exception):
    """Invalid configuration; `problems` lists every violation found."""

    def __init__(self, problems: list[str]):
        super().__init__("invalid configuration:\n  " + "\n  ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class RunConfig:
    name: str
    width: int
    height: int
    beta: float
    delta: float
    eta: float
    kappa: float
    w_table: tuple[float, float, float, float, float]
    theta_count: float
    steepness: float
    k1: float
    k2: float
    aggregation: str
    ants: int | None  # None means the workload-scaled default
    data: str
    csv_path: str
    csv_dim: int
    classes: int
    per_class: int
    dim: int
    spread: float
    schedule: str
    horizon: int
    checkpoints: tuple[int, ...] | None  # None means log-spaced defaults
    knn_k: int
    test_fraction: float
    n_subsets: int
    patch_size: int
    seed: int
    out: str

    def raw(self) -> dict[str, str]:
        """Canonical string form of every effective parameter."""
        return {
            "name": self.name,
            "width": str(self.width),
            "height": str(self.height),
            "beta": repr(self.beta),
            "delta": repr(self.delta),
            "eta": repr(self.eta),
            "kappa": repr(self.kappa),
            "w_table": ",".join(repr(w) for w in self.w_table),
            "theta_count": repr(self.theta_count),
            "steepness": repr(self.steepness),
            "k1": repr(self.k1),
            "k2": repr(self.k2),
            "aggregation": self.aggregation,
            "ants": "auto" if self.ants is None else str(self.ants),
            "data": self.data,
            "csv_path": self.csv_path,
            "csv_dim": str(self.csv_dim),
            "classes": str(self.classes),
            "per_class": str(self.per_class),
            "dim": str(self.dim),
            "spread": repr(self.spread),
            "schedule": self.schedule,
            "horizon": str(self.horizon),
            "checkpoints": (
                "auto"
                if self.checkpoints is None
                else ",".join(str(c) for c in self.checkpoints)
            ),
            "knn_k": str(self.knn_k),
            "test_fraction": repr(self.test_fraction),
            "n_subsets": str(self.n_subsets),
            "patch_size": str(self.patch_size),
            "seed": str(self.seed),
            "out": self.out,
        }

    def replace(self, **overrides: str) -> "RunConfig":
        merged = self.raw()
        merged.update(overrides)
        return parse_config(merged)

    def hash(self) -> str:
        """Short identity hash over everything except the output root."""
        raw = {k: v for k, v in self.raw().items() if k != "out"}
        text = "\n".join(f"{k}={v}" for k, v in sorted(raw.items()))
        return hashlib.sha256(text.encode()).hexdigest()[:8]


def read_config_file(path) -> dict[str, str]:
    """Parse `key=value` lines; `#` starts a comment, blanks are ignored."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError([f"{path}:{lineno}: expected key=value, got {line!r}"])
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def load_config(path=None, overrides: dict[str, str] | None = None) -> RunConfig:
    values = dict(DEFAULTS)
    if path is not None:
        from_file = read_config_file(path)
        # file paths inside a config resolve relative to the config file
        base = Path(path).parent
        for key in ("schedule", "csv_path"):
            v = from_file.get(key, "")
            if v and v != "batch" and not Path(v).is_absolute() and (base / v).exists():
                from_file[key] = str(base / v)
        values.update(from_file)
    if overrides:
        values.update(overrides)
    return parse_config(values)


def parse_config(values: dict[str, str]) -> RunConfig:
    problems: list[str] = []
    unknown = set(values) - set(DEFAULTS)
    if unknown:
        problems.append(f"unknown keys: {', '.join(sorted(unknown))}")

    def take(key, conv, check=None, message=""):
        try:
            v = conv(values.get(key, DEFAULTS[key]))
        except (ValueError, TypeError):
            problems.append(f"{key}: cannot parse {values.get(key)!r}")
            return None
        if check is not None and not check(v):
            problems.append(f"{key}={v}: {message}")
        return v

    width = take("width", int, lambda v: v >= 3, "grid side must be >= 3")
    height = take("height", int, lambda v: v >= 3, "grid side must be >= 3")
    beta = take("beta", float, lambda v: v > 0, "must be > 0")
    delta = take("delta", float, lambda v: v >= 0, "must be >= 0")
    eta = take("eta", float, lambda v: v > 0, "must be > 0")
    kappa = take("kappa", float, lambda v: 0 <= v <= 1, "must lie in [0, 1]")
    w_table = take(
        "w_table",
        _parse_floats,
        lambda v: len(v) == 5 and all(w > 0 for w in v),
        "needs 5 strictly positive weights",
    )
    theta_count = take("theta_count", float, lambda v: v > 0, "must be > 0")
    steepness = take("steepness", float, lambda v: v > 1, "must be > 1")
    k1 = take("k1", float, lambda v: v > 0, "must be > 0")
    k2 = take("k2", float, lambda v: v > 0, "must be > 0")
    aggregation = take(
        "aggregation", str, lambda v: v in AGGREGATIONS, f"must be one of {AGGREGATIONS}"
    )
    ants = take(
        "ants",
        _parse_auto_int,
        lambda v: v is None or v > 0,
        "must be a positive integer or 'auto'",
    )
    data = take("data", str, lambda v: v in ("synthetic", "csv"), "must be synthetic or csv")
    csv_path = values.get("csv_path", "")
    csv_dim = take("csv_dim", int)
    if data == "csv":
        if not csv_path:
            problems.append("csv_path: required when data=csv")
        if csv_dim is not None and csv_dim < 1:
            problems.append("csv_dim: must be >= 1 when data=csv")
    classes = take("classes", int, lambda v: v >= 1, "must be >= 1")
    per_class = take("per_class", int, lambda v: v >= 1, "must be >= 1")
    dim = take("dim", int, lambda v: v >= 1, "must be >= 1")
    spread = take("spread", float, lambda v: v >= 0, "must be >= 0")
    schedule = values.get("schedule", DEFAULTS["schedule"])
    if schedule != "batch" and not Path(schedule).exists():
        problems.append(f"schedule: no such file {schedule!r} (and not 'batch')")
    horizon = take("horizon", int, lambda v: v >= 0, "must be >= 0")
    checkpoints = take(
        "checkpoints",
        _parse_auto_ints,
        lambda v: v is None or all(c >= 0 for c in v),
        "must be nonnegative integers or 'auto'",
    )
    knn_k = take("knn_k", int, lambda v: v >= 1, "must be >= 1")
    test_fraction = take("test_fraction", float, lambda v: 0 < v < 1, "must lie in (0, 1)")
    n_subsets = take("n_subsets", int, lambda v: v >= 1, "must be >= 1")
    patch_size = take("patch_size", int, lambda v: v >= 1, "must be >= 1")
    seed = take("seed", int)
    out = values.get("out", DEFAULTS["out"])
    name = values.get("name", DEFAULTS["name"])

    if problems:
        raise ConfigError(problems)
    return RunConfig(
        name=name,
        width=width,
        height=height,
        beta=beta,
        delta=delta,
        eta=eta,
        kappa=kappa,
        w_table=tuple(w_table),
        theta_count=theta_count,
        steepness=steepness,
        k1=k1,
        k2=k2,
        aggregation=aggregation,
        ants=ants,
        data=data,
        csv_path=csv_path,
        csv_dim=csv_dim,
        classes=classes,
        per_class=per_class,
        dim=dim,
        spread=spread,
        schedule=schedule,
        horizon=horizon,
        checkpoints=None if checkpoints is None else tuple(sorted(set(checkpoints))),
        knn_k=knn_k,
        test_fraction=test_fraction,
        n_subsets=n_subsets,
        patch_size=patch_size,
        seed=seed,
        out=out,
    )


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _parse_auto_int(text: str) -> int | None:
    return None if text == "auto" else int(text)


def _parse_auto_ints(text: str) -> list[int] | None:
    return None if text == "auto" else [int(v) for v in text.split(",") if v.strip()]
