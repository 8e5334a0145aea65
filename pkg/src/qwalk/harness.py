"""Goodness-of-fit tests, reports and reproducible experiment runs."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import stats


class ConfigError(ValueError):
    pass


class PoolingError(ValueError):
    pass


@dataclass
class TestReport:
    name: str
    statistic: float
    value: float  # p-value or discrepancy, depending on ``metric``
    threshold: float
    metric: str = "p_value"  # "p_value" passes when value > threshold, "discrepancy" when value < threshold
    runtime: float = 0.0
    ledger: dict = field(default_factory=dict)
    passed: bool = field(init=False)

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.metric == "p_value":
            self.passed = bool(self.value > self.threshold)
        elif self.metric == "discrepancy":
            self.passed = bool(self.value < self.threshold)
        else:
            raise ValueError(f"unknown metric {self.metric!r}")

    def line(self) -> str:
        op = ">" if self.metric == "p_value" else "<"
        word = "PASS" if self.passed else "FAIL"
        return f"{word} {self.name}: {self.metric}={self.value:.4g} ({op} {self.threshold:g}), stat={self.statistic:.4g}"

    def row(self) -> dict:
        return {
            "name": self.name,
            "metric": self.metric,
            "value": repr(float(self.value)),
            "threshold": repr(float(self.threshold)),
            "statistic": repr(float(self.statistic)),
            "passed": int(self.passed),
        }


# -- statistics ------------------------------------------------------------------------------

def ks_test(sample, cdf: Callable, threshold: float = 0.01, name: str = "ks") -> TestReport:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value."""
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    t0 = time.perf_counter()
    res = stats.kstest(x, cdf, method="asymp")
    return TestReport(name, float(res.statistic), float(res.pvalue), threshold, "p_value",
                      time.perf_counter() - t0, {"n": int(x.size)})


def pool_cells(observed, expected, min_expected: float = 5.0) -> tuple[np.ndarray, np.ndarray]:
    """Merge cells with expected count < min_expected into one pooled cell.

    If the pooled cell itself stays below the minimum it is merged into the
    smallest remaining cell.
    """
    obs = np.asarray(observed, dtype=float)
    exp = np.asarray(expected, dtype=float)
    small = exp < min_expected
    if not small.any():
        return obs, exp
    po, pe = obs[small].sum(), exp[small].sum()
    obs, exp = obs[~small], exp[~small]
    if pe >= min_expected or obs.size == 0:
        return np.append(obs, po), np.append(exp, pe)
    i = int(np.argmin(exp))
    obs = obs.copy()
    exp = exp.copy()
    obs[i] += po
    exp[i] += pe
    return obs, exp


def chi_square(observed, expected_probs, n: int | None = None, threshold: float = 0.01,
               min_expected: float = 5.0, name: str = "chi2", pool: bool = True) -> TestReport:
    """Pearson chi-square with (cells - 1) degrees of freedom.

    When the listed probabilities do not exhaust the law (truncated supports),
    the missing mass becomes one more cell holding the unlisted observations.
    """
    t0 = time.perf_counter()
    obs = np.asarray(observed, dtype=float).ravel()
    p = np.asarray(expected_probs, dtype=float).ravel()
    if obs.shape != p.shape:
        raise ValueError("observed and expected must have the same shape")
    n = int(obs.sum()) if n is None else int(n)
    rest = 1.0 - p.sum()
    if rest > 1e-12 or obs.sum() < n:
        obs = np.append(obs, n - obs.sum())
        p = np.append(p, max(rest, 0.0))
    exp = p * n
    if pool:
        obs, exp = pool_cells(obs, exp, min_expected)
    if np.any(exp < min_expected):
        raise PoolingError("cells with expected count below the minimum remain after pooling")
    if exp.size < 2:
        raise PoolingError("need at least two cells")
    stat = float(((obs - exp) ** 2 / exp).sum())
    dof = exp.size - 1
    pval = float(stats.chi2.sf(stat, dof))
    return TestReport(name, stat, pval, threshold, "p_value", time.perf_counter() - t0,
                      {"cells": int(exp.size), "dof": int(dof), "n": n})


def discrepancy_report(name: str, value: float, threshold: float, **ledger) -> TestReport:
    return TestReport(name, float(value), float(value), threshold, "discrepancy", 0.0, dict(ledger))


def ecdf(sample) -> Callable:
    x = np.sort(np.asarray(sample, dtype=float).ravel())

    def f(v):
        return np.searchsorted(x, v, side="right") / x.size

    return f


def jitter(values, rng: np.random.Generator) -> np.ndarray:
    """Spread integer data uniformly over unit cells (continuity correction for KS on lattices)."""
    v = np.asarray(values, dtype=float)
    return v + rng.uniform(-0.5, 0.5, size=v.shape)


def counts_for(values: np.ndarray, support: Sequence) -> np.ndarray:
    """Occurrences of each support element among ``values`` (rows compared as tuples)."""
    values = np.asarray(values)
    if values.ndim == 1:
        support = np.asarray(support)
        uniq, cnt = np.unique(values, return_counts=True)
        lookup = dict(zip(uniq.tolist(), cnt.tolist()))
        return np.array([lookup.get(s, 0) for s in support.tolist()], dtype=float)
    uniq, cnt = np.unique(values, axis=0, return_counts=True)
    lookup = {tuple(u): c for u, c in zip(uniq.tolist(), cnt.tolist())}
    return np.array([lookup.get(tuple(s), 0) for s in np.asarray(support).tolist()], dtype=float)


# -- configuration and runs -----------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    experiment: str
    seed: int
    params: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    output: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if "experiment" not in d:
            raise ConfigError("config needs an 'experiment' name")
        if d.get("seed") is None:
            raise ConfigError("config needs an explicit integer 'seed'")
        unknown = set(d) - {"experiment", "seed", "params", "thresholds", "output"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(str(d["experiment"]), int(d["seed"]), dict(d.get("params", {})),
                   dict(d.get("thresholds", {})), d.get("output"))

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def canonical(self) -> str:
        d = asdict(self)
        d.pop("output")
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:12]


@dataclass
class ExperimentResult:
    reports: list[TestReport]
    tables: dict[str, tuple[list[str], list[list]]]
    run_dir: Path | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    path.write_text(buf.getvalue())


def run_experiment(config: ExperimentConfig | dict, out_root: str | Path | None = None) -> ExperimentResult:
    """Run a registered experiment; write inputs, results and the truncation ledger to a run directory."""
    from .acceptance import REGISTRY

    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    fn = REGISTRY.get(config.experiment)
    if fn is None:
        raise ConfigError(f"unknown experiment {config.experiment!r}; known: {sorted(REGISTRY)}")
    t0 = time.perf_counter()
    try:
        reports, tables = fn(config.params, config.thresholds, config.seed)
    except Exception as exc:  # add context, keep the original type
        raise type(exc)(f"experiment {config.experiment}: {exc}") from exc
    elapsed = time.perf_counter() - t0
    result = ExperimentResult(reports, tables)
    root = out_root if out_root is not None else config.output
    if root is not None:
        run_dir = Path(root) / f"{config.experiment}-{config.digest}"
        run_dir.mkdir(parents=True, exist_ok=True)
        (run_dir / "config.json").write_text(config.canonical() + "\n")
        _write_csv(run_dir / "results.csv", ["name", "metric", "value", "threshold", "statistic", "passed"],
                   [list(r.row().values()) for r in reports])
        ledger_rows = [[r.name, k, v if not isinstance(v, float) else float(v)] for r in reports for k, v in sorted(r.ledger.items())]
        _write_csv(run_dir / "ledger.csv", ["name", "key", "value"], ledger_rows)
        for tname, (header, rows) in tables.items():
            _write_csv(run_dir / f"{tname}.csv", header, rows)
        # wall-clock times are kept out of the CSV files so reruns are byte-identical
        (run_dir / "timing.json").write_text(json.dumps({"total_seconds": elapsed}) + "\n")
        result.run_dir = run_dir
    return result


__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "PoolingError",
    "TestReport",
    "chi_square",
    "counts_for",
    "discrepancy_report",
    "ecdf",
    "jitter",
    "ks_test",
    "pool_cells",
    "run_experiment",
]
