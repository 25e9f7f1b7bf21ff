"""Experiment harness: config parsing, seeded batch execution, statistics, CSV emission.

Config files are flat INI-style text, one section per experiment plus an
optional [harness] section for batch-level settings:

    [harness]
    runs = 20
    seed = 42
    out = results

    [rastrigin-dispersion]
    algo = dsdpso
    function = f7
    dim = 30

Unknown keys are rejected, duplicate keys are a parse error, and every value
is range-checked before any run starts.  Run r of every experiment draws its
seed from (master seed, r) alone, so all algorithms see identical initial
populations on paired runs.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from .dispersion import DispersionConfig
from .errors import ConfigError
from .optimizers import OptimizerConfig, RunRecord, run_config
from .rng import run_seed

HARNESS_SECTION = "harness"

_HARNESS_KEYS = {"runs", "seed", "out", "curves", "plots"}

# file key -> (target, field name, converter)
_EXPERIMENT_KEYS = {
    "algo": ("run", "algo", str),
    "function": ("run", "function", str),
    "dim": ("run", "dim", int),
    "pop": ("run", "m", int),
    "iters": ("run", "max_iter", int),
    "c1": ("run", "c1", float),
    "c2": ("run", "c2", float),
    "w_start": ("run", "w_start", float),
    "w_end": ("run", "w_end", float),
    "dms_group_size": ("run", "dms_group_size", int),
    "dms_regroup_period": ("run", "dms_regroup_period", int),
    "period": ("dispersion", "period", int),
    "rate": ("dispersion", "rate", float),
    "archive": ("dispersion", "archive_capacity", int),
    "policy": ("dispersion", "policy", str),
    "init_velocity": ("dispersion", "initial_velocity", str),
    "post_regime": ("dispersion", "post_regime", str),
    "candidates": ("dispersion", "candidate_count", int),
    "improvement_delta": ("dispersion", "improvement_delta", float),
    "idle_threshold": ("dispersion", "idle_threshold", int),
    "weight_alpha": ("dispersion", "weight_alpha", float),
    "crossover_prob": ("dispersion", "crossover_prob", float),
    "mutation_prob": ("dispersion", "mutation_prob", float),
    "mutation_sigma": ("dispersion", "mutation_sigma_frac", float),
}

_REQUIRED_EXPERIMENT_KEYS = ("algo", "function", "dim")

_BOOL_VALUES = {"1": True, "true": True, "on": True, "yes": True,
                "0": False, "false": False, "off": False, "no": False}


@dataclass
class ExperimentSpec:
    """A parsed batch: experiment templates plus batch-level settings."""

    experiments: list[tuple[str, OptimizerConfig]]
    runs: int = 20
    master_seed: int = 0
    out_dir: str = "results"
    emit_curves: bool = True
    render_plots: bool = True


@dataclass
class StatRow:
    algo: str
    function: str
    dim: int
    mean: float
    std_dev: float
    p_value: float | None   # None where no reference comparison applies
    n_runs: int


def _convert(section: str, key: str, raw: str, conv):
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} as {conv.__name__}") from None


def _parse_bool(section: str, key: str, raw: str) -> bool:
    try:
        return _BOOL_VALUES[raw.strip().lower()]
    except KeyError:
        raise ConfigError(f"[{section}] {key}: expected a boolean, got {raw!r}") from None


def load_config(path) -> ExperimentSpec:
    """Parse and validate a config file into an ExperimentSpec."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle, source=str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}") from exc

    if parser.defaults():
        raise ConfigError("a DEFAULT section is not supported; put keys in named sections")

    spec = ExperimentSpec(experiments=[])
    if parser.has_section(HARNESS_SECTION):
        for key, raw in parser.items(HARNESS_SECTION):
            if key not in _HARNESS_KEYS:
                raise ConfigError(f"[{HARNESS_SECTION}] unknown key {key!r}")
            if key == "runs":
                spec.runs = _convert(HARNESS_SECTION, key, raw, int)
            elif key == "seed":
                spec.master_seed = _convert(HARNESS_SECTION, key, raw, int)
            elif key == "out":
                spec.out_dir = raw
            elif key == "curves":
                spec.emit_curves = _parse_bool(HARNESS_SECTION, key, raw)
            elif key == "plots":
                spec.render_plots = _parse_bool(HARNESS_SECTION, key, raw)

    for section in parser.sections():
        if section == HARNESS_SECTION:
            continue
        run_kwargs: dict = {}
        disp_kwargs: dict = {}
        for key, raw in parser.items(section):
            if key not in _EXPERIMENT_KEYS:
                raise ConfigError(f"[{section}] unknown key {key!r}")
            target, name, conv = _EXPERIMENT_KEYS[key]
            value = _convert(section, key, raw, conv)
            (run_kwargs if target == "run" else disp_kwargs)[name] = value
        for key in _REQUIRED_EXPERIMENT_KEYS:
            if _EXPERIMENT_KEYS[key][1] not in run_kwargs:
                raise ConfigError(f"[{section}] missing required key {key!r}")
        cfg = OptimizerConfig(dispersion=DispersionConfig(**disp_kwargs), **run_kwargs)
        cfg.validate()
        spec.experiments.append((section, cfg))

    if not spec.experiments:
        raise ConfigError("config file defines no experiments")
    if spec.runs < 1:
        raise ConfigError(f"runs must be >= 1, got {spec.runs}")
    if spec.master_seed < 0:
        raise ConfigError(f"seed must be >= 0, got {spec.master_seed}")
    triples = [(cfg.algo, cfg.function, cfg.dim) for _, cfg in spec.experiments]
    if len(set(triples)) != len(triples):
        raise ConfigError("duplicate (algo, function, dim) experiments would collide in the output files")
    return spec


def run_experiment(spec: ExperimentSpec):
    """Execute every experiment for every run index.

    Returns (records, stats, failures); a failing run is reported in failures
    and the remaining runs still execute.
    """
    if spec.runs < 1:
        raise ConfigError(f"runs must be >= 1, got {spec.runs}")
    records: list[RunRecord] = []
    failures: list[tuple[str, int, str]] = []
    for label, template in spec.experiments:
        for r in range(spec.runs):
            cfg = replace(template, seed=run_seed(spec.master_seed, r))
            try:
                record = run_config(cfg)
            except Exception as exc:  # keep going; the batch report carries the failure
                failures.append((label, r, f"{type(exc).__name__}: {exc}"))
                continue
            record.run_index = r
            records.append(record)
    return records, compute_stats(records), failures


def aggregate_stats(finals) -> tuple[float, float]:
    """Mean and sample standard deviation (n - 1 denominator; zero for a single value)."""
    finals = np.asarray(finals, dtype=float)
    if finals.size == 0:
        raise ValueError("no values to aggregate")
    mean = float(finals.mean())
    std = float(finals.std(ddof=1)) if finals.size > 1 else 0.0
    return mean, std


def rank_sum_pvalue(a, b) -> float:
    """Two-sided rank-sum test p-value with midrank tie handling.

    Small samples (either side below ten) are scored by exhaustive enumeration
    of rank assignments; larger ones by the normal approximation with tie
    correction.  Indistinguishable pooled samples give p = 1.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = a.shape[0], b.shape[0]
    if min(n1, n2) < 2:
        raise ValueError("need at least two observations per sample")
    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        return 1.0
    ranks = rankdata(pooled)
    observed = ranks[:n1].sum()
    expected = n1 * (n1 + n2 + 1) / 2.0

    if min(n1, n2) >= 10:
        n = n1 + n2
        _, counts = np.unique(pooled, return_counts=True)
        tie_term = float(np.sum(counts**3 - counts)) / (n * (n - 1))
        variance = n1 * n2 / 12.0 * ((n + 1) - tie_term)
        if variance <= 0:
            return 1.0
        z = abs(observed - expected) / math.sqrt(variance)
        return min(1.0, math.erfc(z / math.sqrt(2.0)))

    deviation = abs(observed - expected)
    extreme = 0
    total = 0
    for chosen in combinations(range(n1 + n2), n1):
        total += 1
        if abs(ranks[list(chosen)].sum() - expected) >= deviation - 1e-12:
            extreme += 1
    return extreme / total


def compute_stats(records: list[RunRecord]) -> list[StatRow]:
    """Summary rows per (algo, function, dim); p-values compare finals against dsdpso's."""
    groups: dict[tuple[str, str, int], list[float]] = {}
    for rec in records:
        groups.setdefault((rec.algo, rec.function, rec.dim), []).append(rec.final_best)
    rows = []
    for (algo, function, dim), finals in sorted(groups.items()):
        mean, std = aggregate_stats(finals)
        p_value = None
        reference = groups.get(("dsdpso", function, dim))
        if algo != "dsdpso" and reference is not None and len(finals) >= 2 and len(reference) >= 2:
            p_value = rank_sum_pvalue(finals, reference)
        rows.append(StatRow(algo, function, dim, mean, std, p_value, len(finals)))
    return rows


def _fmt(x: float) -> str:
    # six significant digits, scientific
    return f"{x:.5e}"


def emit_results(records: list[RunRecord], stats: list[StatRow], out_dir,
                 emit_curves: bool = True) -> list[Path]:
    """Write summary.csv and (optionally) one curve file per run; returns the written paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []

    lines = ["algo,function,dim,runs,mean,std,p_value"]
    for row in sorted(stats, key=lambda s: (s.algo, s.function, s.dim)):
        p = "na" if row.p_value is None else _fmt(row.p_value)
        lines.append(f"{row.algo},{row.function},{row.dim},{row.n_runs},"
                     f"{_fmt(row.mean)},{_fmt(row.std_dev)},{p}")
    summary = out / "summary.csv"
    summary.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(summary)

    if emit_curves:
        curve_dir = out / "curves"
        curve_dir.mkdir(parents=True, exist_ok=True)
        for rec in sorted(records, key=lambda r: (r.algo, r.function, r.run_index)):
            body = ["iteration,best_fitness,diversity"]
            body.extend(
                f"{i + 1},{_fmt(rec.best_curve[i])},{_fmt(rec.diversity_curve[i])}"
                for i in range(rec.best_curve.shape[0])
            )
            path = curve_dir / f"{rec.algo}_{rec.function}_{rec.run_index}.csv"
            path.write_text("\n".join(body) + "\n", encoding="utf-8")
            written.append(path)
    return written
