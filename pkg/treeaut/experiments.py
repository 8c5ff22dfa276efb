"""
Monte-Carlo check of the log-normal limit laws.

``run_clt_experiment`` samples trees for every size on the grid, records
log|Aut| per sample (optionally as CSV), then fits the mean and variance
slopes against n and runs Anderson-Darling on the standardized values at the
largest size. Sampling and analysis are separate passes, so a CSV written
once can be re-analysed with ``read_samples_csv`` and ``summarize_samples``.
"""

import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, TextIO, Tuple

import numpy as np
from scipy import stats

from .automorphism import log_aut_rooted, log_aut_unrooted
from .config import ExperimentDefaults
from .constants import GW_PRESETS, Family
from .errors import ConfigError, UnattainableSizeError
from .offspring import get_preset
from .random_stream import MAX_SEED, RandomStream
from .samplers import (
    sample_conditioned_gw,
    sample_labeled_tree,
    sample_rooted_polya,
    sample_unrooted_polya,
)

logger = logging.getLogger(__name__)

CSV_HEADER = ("family", "n", "sample_index", "log_aut")

# Sampler settings a run may override.
SAMPLER_OVERRIDES = ("rejection_budget", "unrooted_budget_factor", "polya_table_size")

# Degenerate families where log|Aut| is identically zero.
DEGENERATE_FAMILIES = ("paths",)


@dataclass
class ExperimentConfig:
    """One Monte-Carlo run: a family, a size grid and a sample count per size."""
    family: str
    sizes: List[int]
    samples: int
    seed: int
    workers: int = ExperimentDefaults.workers
    output: Optional[str] = None
    chunk_size: int = ExperimentDefaults.chunk_size
    audit_fraction: float = ExperimentDefaults.audit_fraction
    significance: float = ExperimentDefaults.significance
    overrides: Dict[str, int] = field(default_factory=dict)

    def validate(self) -> None:
        """
        Raises:
            ConfigError: On an unknown or degenerate family or an invalid number.
        """
        if self.family in DEGENERATE_FAMILIES:
            raise ConfigError(f"Family {self.family!r} has Phi = 1 + z; log|Aut| is identically 0")
        try:
            Family(self.family)
        except ValueError:
            raise ConfigError(
                f"Unknown family {self.family!r}; choose from {', '.join(f.value for f in Family)}"
            )
        if not self.sizes:
            raise ConfigError("At least one size is required")
        if any(n < 1 for n in self.sizes):
            raise ConfigError(f"Sizes must be >= 1, got {self.sizes}")
        if len(set(self.sizes)) != len(self.sizes):
            raise ConfigError(f"Sizes must be distinct, got {self.sizes}")
        if self.samples < 1:
            raise ConfigError(f"Samples must be >= 1, got {self.samples}")
        if not 0 <= self.seed < MAX_SEED:
            raise ConfigError(f"Seed must fit in 64 bits, got {self.seed}")
        if self.workers < 1 or self.chunk_size < 1:
            raise ConfigError(f"Workers and chunk size must be >= 1, got {self.workers}, {self.chunk_size}")
        if not 0.0 <= self.audit_fraction <= 1.0:
            raise ConfigError(f"Audit fraction must lie in [0, 1], got {self.audit_fraction}")
        if not 0.0 < self.significance < 1.0:
            raise ConfigError(f"Significance must lie in (0, 1), got {self.significance}")
        unknown = set(self.overrides) - set(SAMPLER_OVERRIDES)
        if unknown:
            raise ConfigError(f"Unknown sampler overrides: {', '.join(sorted(unknown))}")


class SampleRecord(NamedTuple):
    family: str
    n: int
    sample_index: int
    log_aut: float
    audit_gap: Optional[float] = None


@dataclass
class SizeSummary:
    n: int
    samples: int
    mean: float
    variance: float


@dataclass
class CltReport:
    """Moments per size, fitted slopes and the normality test at the largest size."""
    family: str
    sizes: List[SizeSummary]
    mean_slope: float
    mean_slope_se: float
    mean_intercept: float
    variance_slope: float
    variance_slope_se: float
    variance_intercept: float
    ad_statistic: float
    ad_critical: float
    p_value: float
    normal: bool
    significance: float
    audited: int = 0
    audit_failures: int = 0

    def mean_slope_consistent(self, expected: float, tolerance_se: float = 3.0) -> bool:
        return abs(self.mean_slope - expected) <= tolerance_se * self.mean_slope_se

    def variance_slope_consistent(self, expected: float, relative: float = 0.1) -> bool:
        return abs(self.variance_slope - expected) <= relative * abs(expected)

    @property
    def passed(self) -> bool:
        return self.normal and self.audit_failures == 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def sample_log_aut(family: Family, n: int, rng: RandomStream, overrides: Dict[str, int]) -> Tuple[float, object]:
    """log|Aut| of one random tree, with the tree itself."""
    if family is Family.LABELED_ROOTED:
        tree = sample_labeled_tree(n, rng, rooted=True)
        return log_aut_rooted(tree), tree
    if family is Family.LABELED_UNROOTED:
        tree = sample_labeled_tree(n, rng)
        return log_aut_unrooted(tree), tree
    if family is Family.POLYA_ROOTED:
        tree = sample_rooted_polya(n, rng, overrides.get("polya_table_size"))
        return log_aut_rooted(tree), tree
    if family is Family.POLYA_UNROOTED:
        tree = sample_unrooted_polya(
            n, rng, overrides.get("unrooted_budget_factor"), overrides.get("polya_table_size")
        )
        return log_aut_unrooted(tree), tree
    tree = sample_conditioned_gw(get_preset(GW_PRESETS[family]), n, rng, overrides.get("rejection_budget"))
    return log_aut_rooted(tree), tree


def _sample_chunk(task: tuple) -> List[SampleRecord]:
    """Worker entry point: samples ``start..stop-1`` of one size."""
    family_name, n, size_index, start, stop, seed, audit_fraction, overrides = task
    family = Family(family_name)
    root = RandomStream(seed)
    records = []
    for index in range(start, stop):
        rng = root.substream(size_index, index)
        value, tree = sample_log_aut(family, n, rng, overrides)
        gap = None
        if family is Family.LABELED_UNROOTED and rng.random() < audit_fraction:
            rooted = tree.rooted_at(int(rng.integers(0, n)))
            gap = value - log_aut_rooted(rooted)
        records.append(SampleRecord(family_name, n, index, value, gap))
    return records


def _check_attainable(family: Family, sizes: Iterable[int]) -> None:
    if family not in GW_PRESETS:
        return
    dist = get_preset(GW_PRESETS[family])
    for n in sizes:
        if not dist.attainable(n):
            raise UnattainableSizeError(n, family.value)


def collect_samples(config: ExperimentConfig) -> List[SampleRecord]:
    """
    Draw every sample of the run, ordered by (size, sample index).

    Sample i at size index k always uses sub-stream (k, i), so the result
    does not depend on the worker count or chunking.
    """
    config.validate()
    family = Family(config.family)
    _check_attainable(family, config.sizes)
    tasks = [
        (family.value, n, k, start, min(start + config.chunk_size, config.samples),
         config.seed, config.audit_fraction, dict(config.overrides))
        for k, n in enumerate(config.sizes)
        for start in range(0, config.samples, config.chunk_size)
    ]
    logger.info(
        f"Sampling {family.value}: sizes {config.sizes}, {config.samples} samples each, "
        f"{len(tasks)} tasks on {config.workers} worker(s)"
    )
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = list(pool.map(_sample_chunk, tasks))
    else:
        chunks = [_sample_chunk(task) for task in tasks]
    order = {n: k for k, n in enumerate(config.sizes)}
    records = [record for chunk in chunks for record in chunk]
    records.sort(key=lambda r: (order[r.n], r.sample_index))
    return records


def write_samples_csv(records: Sequence[SampleRecord], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow((r.family, r.n, r.sample_index, repr(float(r.log_aut))))


def read_samples_csv(stream: TextIO) -> Tuple[str, Dict[int, np.ndarray]]:
    """
    Family name and log|Aut| values per size from a samples CSV.

    Raises:
        ConfigError: On a wrong header or rows from several families.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if tuple(header or ()) != CSV_HEADER:
        raise ConfigError(f"Expected CSV header {','.join(CSV_HEADER)}, got {header}")
    family = None
    values: Dict[int, List[float]] = {}
    for row in reader:
        if not row:
            continue
        if family is None:
            family = row[0]
        elif row[0] != family:
            raise ConfigError(f"CSV mixes families {family!r} and {row[0]!r}")
        values.setdefault(int(row[1]), []).append(float(row[3]))
    return family or "", {n: np.asarray(v) for n, v in values.items()}


def fit_slope(ns: Sequence[float], values: Sequence[float], errors: Sequence[float]) -> Tuple[float, float, float]:
    """
    Weighted least-squares line through (n, value); returns (slope, slope SE, intercept).

    A single point gives a line through the origin.
    """
    x = np.asarray(ns, dtype=float)
    y = np.asarray(values, dtype=float)
    se = np.maximum(np.asarray(errors, dtype=float), 1e-12)
    if len(x) == 1:
        return float(y[0] / x[0]), float(se[0] / x[0]), 0.0
    design = np.column_stack([np.ones_like(x), x])
    w = 1.0 / se ** 2
    cov = np.linalg.inv(design.T @ (design * w[:, None]))
    intercept, slope = cov @ (design.T @ (w * y))
    return float(slope), float(math.sqrt(max(cov[1, 1], 0.0))), float(intercept)


def anderson_darling_p_value(statistic: float, sample_size: int) -> float:
    """p-value of the normality A**2 with estimated mean and variance (Stephens' approximation)."""
    a = statistic * (1.0 + 0.75 / sample_size + 2.25 / sample_size ** 2)
    if a >= 0.6:
        p = math.exp(1.2937 - 5.709 * a + 0.0186 * a * a)
    elif a >= 0.34:
        p = math.exp(0.9177 - 4.279 * a - 1.38 * a * a)
    elif a >= 0.2:
        p = 1.0 - math.exp(-8.318 + 42.796 * a - 59.938 * a * a)
    else:
        p = 1.0 - math.exp(-13.436 + 101.14 * a - 223.73 * a * a)
    return min(max(p, 0.0), 1.0)


def _normality(values: np.ndarray, significance: float) -> Tuple[float, float, float]:
    """(A**2, critical value at ``significance``, p-value) for the standardized values."""
    sd = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    if len(values) < 8 or sd == 0.0:
        return math.inf, 0.0, 0.0
    result = stats.anderson((values - values.mean()) / sd, dist="norm")
    levels = np.asarray(result.significance_level) / 100.0
    critical = float(result.critical_values[int(np.argmin(np.abs(levels - significance)))])
    statistic = float(result.statistic)
    return statistic, critical, anderson_darling_p_value(statistic, len(values))


def summarize_samples(family: str, samples: Dict[int, np.ndarray], significance: float = ExperimentDefaults.significance) -> CltReport:
    """Aggregation pass over raw log|Aut| values grouped by size."""
    if not samples:
        raise ConfigError("No samples to summarize")
    sizes = []
    for n in sorted(samples):
        values = np.asarray(samples[n], dtype=float)
        variance = float(np.var(values, ddof=1)) if len(values) > 1 else 0.0
        sizes.append(SizeSummary(n, len(values), float(values.mean()), variance))
    ns = [s.n for s in sizes]
    mean_se = [math.sqrt(s.variance / s.samples) for s in sizes]
    var_se = [s.variance * math.sqrt(2.0 / max(s.samples - 1, 1)) for s in sizes]
    mean_slope, mean_slope_se, mean_intercept = fit_slope(ns, [s.mean for s in sizes], mean_se)
    var_slope, var_slope_se, var_intercept = fit_slope(ns, [s.variance for s in sizes], var_se)
    statistic, critical, p_value = _normality(np.asarray(samples[ns[-1]], dtype=float), significance)
    report = CltReport(
        family=family,
        sizes=sizes,
        mean_slope=mean_slope,
        mean_slope_se=mean_slope_se,
        mean_intercept=mean_intercept,
        variance_slope=var_slope,
        variance_slope_se=var_slope_se,
        variance_intercept=var_intercept,
        ad_statistic=statistic,
        ad_critical=critical,
        p_value=p_value,
        normal=p_value > significance,
        significance=significance,
    )
    logger.info(
        f"{family}: mean slope {mean_slope:.6f} +- {mean_slope_se:.6f}, "
        f"variance slope {var_slope:.6f} +- {var_slope_se:.6f}, AD p = {p_value:.4f}"
    )
    return report


def run_clt_experiment(config: ExperimentConfig) -> CltReport:
    """
    Sample, optionally write the raw CSV, and summarize.

    For labeled-unrooted runs a subsample is audited against
    0 <= log|Aut unrooted| - log|Aut rooted at a random vertex| <= ln n.
    """
    records = collect_samples(config)
    if config.output == "-":
        write_samples_csv(records, sys.stdout)
    elif config.output:
        with open(config.output, "w", newline="") as f:
            write_samples_csv(records, f)
        logger.info(f"Wrote {len(records)} samples to {config.output}")

    grouped: Dict[int, List[float]] = {}
    for r in records:
        grouped.setdefault(r.n, []).append(r.log_aut)
    report = summarize_samples(config.family, {n: np.asarray(v) for n, v in grouped.items()}, config.significance)

    audits = [r for r in records if r.audit_gap is not None]
    failures = [r for r in audits if not -1e-9 <= r.audit_gap <= math.log(r.n) + 1e-9]
    for r in failures:
        logger.warning(f"Audit failed at n={r.n}, sample {r.sample_index}: gap {r.audit_gap:.6f}")
    report.audited = len(audits)
    report.audit_failures = len(failures)
    return report
