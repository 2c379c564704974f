"""Monte Carlo for solution counts in the binomial random set ``[n]_p``.

Seeding: trial ``t`` of a run with master seed ``s`` draws from
``numpy.random.PCG64(numpy.random.SeedSequence(s, spawn_key=(t,)))``, and
row ``r`` of a threshold sweep uses ``spawn_key=(r, t)``.  An element
``v`` of ``[n]`` is included iff the ``v``-th draw of ``Generator.random(n)``
is below ``p``.  Both numpy pieces are documented as stable across
versions, so a seed pins every sampled set regardless of how trials are
split across worker processes.
"""

from __future__ import annotations

import math
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import census
from .census import SolutionList, SupportTable
from .errors import DegenerateVariance, PreconditionError
from .partitions import PartitionFamily
from .system_properties import (
    SystemSpec,
    check_theorem_preconditions,
    contract,
    density,
    fraction_str,
    is_positive,
)

# regime cutoffs for the finite-n tag
SPARSE_P = 0.2
DENSE_P = 0.8
# n(1-p) or n p^c at or below this is reported as bounded
BOUNDED_AT = 10.0
LOW_POWER_TRIALS = 100


@dataclass(frozen=True)
class TrialConfig:
    n: int
    p: float
    trials: int
    master_seed: int
    moment_max_k: int = 6

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.moment_max_k < 3:
            raise ValueError("moment_max_k must be at least 3")


@dataclass
class SampleSet:
    n: int
    membership: np.ndarray  # bool, index 0 unused

    def __contains__(self, v: int) -> bool:
        return 1 <= v <= self.n and bool(self.membership[v])

    def __len__(self) -> int:
        return int(self.membership.sum())

    def elements(self) -> list[int]:
        return np.nonzero(self.membership)[0].tolist()

    @classmethod
    def from_elements(cls, n: int, elements) -> "SampleSet":
        member = np.zeros(n + 1, dtype=bool)
        member[list(elements)] = True
        member[0] = False
        return cls(n, member)


def _rng(seed: int, key: tuple[int, ...] = ()) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def _draw(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    member = np.zeros(n + 1, dtype=bool)
    member[1:] = rng.random(n) < p
    return member


def sample_set(n: int, p: float, seed: int) -> SampleSet:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    return SampleSet(n, _draw(_rng(seed), n, p))


def count_in_sample(sols: SolutionList, family: Optional[PartitionFamily], s: SampleSet) -> int:
    """Type-family solutions whose whole support lies in ``s``."""
    if s.n != sols.n:
        raise ValueError(f"sample over [{s.n}] for solutions in [{sols.n}]")
    return sols.support_table(sols.typed_mask(family)).count_in(s.membership)


# --- trial execution -------------------------------------------------------

_WORKER_TABLE: Optional[SupportTable] = None


def _init_worker(table: SupportTable) -> None:
    global _WORKER_TABLE
    _WORKER_TABLE = table


def _count_range(args) -> list[int]:
    n, p, seed, prefix, start, stop = args
    table = _WORKER_TABLE
    return [table.count_in(_draw(_rng(seed, prefix + (t,)), n, p)) for t in range(start, stop)]


def simulate_counts(table: SupportTable, n: int, p: float, seed: int, trials: int,
                    workers: int = 1, prefix: tuple[int, ...] = ()) -> np.ndarray:
    """Counts for trials ``0..trials-1``, in trial order."""
    if workers <= 1 or trials < 2:
        _init_worker(table)
        return np.array(_count_range((n, p, seed, prefix, 0, trials)), dtype=np.int64)
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    jobs = [(n, p, seed, prefix, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    ctx = mp.get_context("fork")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx,
                             initializer=_init_worker, initargs=(table,)) as pool:
        parts = list(pool.map(_count_range, jobs))
    return np.array([c for part in parts for c in part], dtype=np.int64)


# --- statistics ------------------------------------------------------------

def normal_cdf(z: float) -> float:
    # erfc keeps full relative precision in both tails
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def ks_distance(z: Sequence[float]) -> float:
    """Sup distance between the empirical CDF of ``z`` and the standard normal."""
    zs = np.sort(np.asarray(z, dtype=float))
    T = len(zs)
    F = np.array([normal_cdf(v) for v in zs])
    i = np.arange(1, T + 1)
    return float(max(np.max(i / T - F), np.max(F - (i - 1) / T)))


def normal_moment(k: int) -> int:
    """``E[Z^k]`` for standard normal Z: ``(k-1)!!`` for even k, else 0."""
    if k % 2:
        return 0
    return math.prod(range(k - 1, 0, -2))


def moment_goal(k: int) -> Fraction:
    """``k! / ((k/2)! 2^(k/2))`` for even ``k``, 0 for odd."""
    if k % 2:
        return Fraction(0)
    return Fraction(math.factorial(k), math.factorial(k // 2) * 2 ** (k // 2))


def moment_estimator_variance(k: int, exact_standardization: bool) -> Fraction:
    """Asymptotic variance (times T) of the k-th standardized sample moment
    under normality.

    With known mean and variance this is ``Var(Z^k)``.  With sample mean
    and variance plugged in, the influence function is
    ``z^k - mu_k - k mu_{k-1} z - (k/2) mu_k (z^2 - 1)``.
    """
    mu = normal_moment
    if exact_standardization:
        return Fraction(mu(2 * k) - mu(k) ** 2)
    poly = {k: Fraction(1), 0: Fraction(-mu(k)) + Fraction(k, 2) * mu(k),
            1: Fraction(-k * mu(k - 1)), 2: -Fraction(k, 2) * mu(k)}
    sq: dict[int, Fraction] = {}
    for a, ca in poly.items():
        for b, cb in poly.items():
            sq[a + b] = sq.get(a + b, Fraction(0)) + ca * cb
    return sum((c * mu(e) for e, c in sq.items()), Fraction(0))


def regime(n: int, p: float) -> str:
    if p <= SPARSE_P:
        return "case3"
    if p >= DENSE_P:
        return "case2"
    return "case1"


@dataclass
class MomentReport:
    n: int
    p: float
    trials: int
    master_seed: int
    moment_max_k: int
    empirical_mean: float
    empirical_variance: float
    skewness: float
    excess_kurtosis: float
    standardized_moments: dict[int, float]
    standardization: str
    ks_distance: float
    regime: str
    n_one_minus_p: float
    np_density: dict[str, Optional[float]]
    exact_mean: Optional[Fraction] = None
    exact_variance: Optional[Fraction] = None
    flags: dict[str, bool] = field(default_factory=dict)
    preconditions: Optional[dict] = None
    counts: Optional[list[int]] = None

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "p": self.p,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "moment_max_k": self.moment_max_k,
            "empirical_mean": self.empirical_mean,
            "empirical_variance": self.empirical_variance,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "standardized_moments": {str(k): v for k, v in self.standardized_moments.items()},
            "standardization": self.standardization,
            "ks_distance": self.ks_distance,
            "regime": self.regime,
            "n_one_minus_p": self.n_one_minus_p,
            "np_density": self.np_density,
            "exact_mean": None if self.exact_mean is None else float(self.exact_mean),
            "exact_variance": None if self.exact_variance is None else float(self.exact_variance),
            "exact_mean_fraction": None if self.exact_mean is None else fraction_str(self.exact_mean),
            "exact_variance_fraction":
                None if self.exact_variance is None else fraction_str(self.exact_variance),
            "flags": self.flags,
            "preconditions": self.preconditions,
        }
        if self.counts is not None:
            out["counts"] = self.counts
        return out


def summarize(counts: np.ndarray, cfg: TrialConfig, exact: Optional[tuple[Fraction, Fraction]],
              diagnostics: Optional[dict] = None) -> MomentReport:
    x = np.asarray(counts, dtype=float)
    mean = float(x.mean())
    var = float(((x - mean) ** 2).mean())
    if var == 0.0 or (exact is not None and exact[1] == 0):
        raise DegenerateVariance(f"counts are constant (= {mean}) over {cfg.trials} trials")
    if exact is not None:
        mu, sd = float(exact[0]), math.sqrt(float(exact[1]))
        how = "exact"
    else:
        mu, sd = mean, math.sqrt(var)
        how = "empirical"
    z = (x - mu) / sd
    ze = (x - mean) / math.sqrt(var)
    n, p = cfg.n, cfg.p
    diag = diagnostics or {}
    npc = diag.get("np_density", {})
    flags = {
        "n_one_minus_p_bounded": n * (1 - p) <= BOUNDED_AT,
        "np_density_bounded": any(v is not None and v <= BOUNDED_AT for v in npc.values()),
        "low_power": cfg.trials < LOW_POWER_TRIALS,
    }
    return MomentReport(
        n=n, p=p, trials=cfg.trials, master_seed=cfg.master_seed,
        moment_max_k=cfg.moment_max_k,
        empirical_mean=mean,
        empirical_variance=var,
        skewness=float((ze**3).mean()),
        excess_kurtosis=float((ze**4).mean() - 3.0),
        standardized_moments={k: float((z**k).mean()) for k in range(3, cfg.moment_max_k + 1)},
        standardization=how,
        ks_distance=ks_distance(z),
        regime=regime(n, p),
        n_one_minus_p=n * (1 - p),
        np_density=npc,
        exact_mean=None if exact is None else exact[0],
        exact_variance=None if exact is None else exact[1],
        flags=flags,
        preconditions=diag.get("preconditions"),
        counts=[int(c) for c in counts],
    )


def density_diagnostics(sols: SolutionList, family: Optional[PartitionFamily],
                        n: int, p: float) -> dict[str, Optional[float]]:
    """``n p^c(A_q)`` for every type q that actually occurs among the solutions."""
    present = sols.shape_counts()
    out = {}
    for q in present:
        if family is not None and q not in family:
            continue
        C = contract(sols.A, q)
        out[str(q)] = float(n * p ** float(density(C))) if is_positive(C) else None
    return out


def run_trials(spec: SystemSpec, family: Optional[PartitionFamily], cfg: TrialConfig,
               sols: Optional[SolutionList] = None, workers: int = 1,
               force: bool = False, exact: bool = True) -> MomentReport:
    """Sample ``cfg.trials`` random sets and report the standardized count moments.

    Raises :class:`PreconditionError` if the hypotheses of the normal limit
    fail and ``force`` is not set; the check result is kept in the report
    either way.
    """
    family = PartitionFamily.discrete(spec.m) if family is None else family
    pre = check_theorem_preconditions(spec, family, cfg.n)
    if not pre.passed and not force:
        raise PreconditionError(f"precondition '{pre.failed}' fails")
    pre_d = pre.to_dict()
    pre_d["forced"] = bool(force and not pre.passed)
    if sols is None:
        sols = census.enumerate_solutions(spec, cfg.n)
    mask = sols.typed_mask(family)
    table = sols.support_table(mask)
    counts = simulate_counts(table, cfg.n, cfg.p, cfg.master_seed, cfg.trials, workers)
    moments = None
    if exact:
        pq = Fraction(cfg.p)
        moments = (census.exact_mean(sols, family, pq),
                   census.exact_variance(sols, family, pq, table))
    diag = {"np_density": density_diagnostics(sols, family, cfg.n, cfg.p),
            "preconditions": pre_d}
    return summarize(counts, cfg, moments, diag)


@dataclass
class MomentCheck:
    k: int
    target: float
    estimate: float
    margin: float
    passed: bool


def moment_goal_check(report: MomentReport, k: int, bands: float = 3.0) -> MomentCheck:
    """Compare the k-th standardized moment with its normal value."""
    if k > report.moment_max_k or k < 3:
        raise ValueError(f"k={k} outside 3..{report.moment_max_k}")
    target = float(moment_goal(k))
    est = report.standardized_moments[k]
    v = moment_estimator_variance(k, report.standardization == "exact")
    margin = bands * math.sqrt(float(v) / report.trials)
    return MomentCheck(k, target, est, margin, abs(est - target) <= margin)


@dataclass
class SweepRow:
    exponent: Fraction
    p: float
    mean: float
    variance: float
    zero_fraction: float
    trials: int
    seed: int


SWEEP_HEADER = "exponent,p,mean,variance,zero_fraction,trials,seed"


def threshold_sweep(spec: SystemSpec, family: Optional[PartitionFamily], n: int,
                    exponents: Sequence, trials: int, seed: int,
                    sols: Optional[SolutionList] = None, workers: int = 1) -> list[SweepRow]:
    """For each exponent e set ``p = n^-e`` and record count statistics.

    ``family=None`` counts proper solutions, as in :func:`run_trials`.
    """
    if not exponents:
        raise ValueError("empty exponent grid")
    family = PartitionFamily.discrete(spec.m) if family is None else family
    if sols is None:
        sols = census.enumerate_solutions(spec, n)
    table = sols.support_table(sols.typed_mask(family))
    rows = []
    for r, e in enumerate(exponents):
        e = Fraction(e)
        p = float(n ** -float(e))
        c = simulate_counts(table, n, p, seed, trials, workers, prefix=(r,)).astype(float)
        rows.append(SweepRow(e, p, float(c.mean()), float(c.var()),
                             float((c == 0).mean()), trials, seed))
    return rows


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    lines = [SWEEP_HEADER]
    for row in rows:
        e = row.exponent
        e_txt = str(e.numerator) if e.denominator == 1 else fraction_str(e)
        lines.append(f"{e_txt},{row.p!r},{row.mean!r},{row.variance!r},"
                     f"{row.zero_fraction!r},{row.trials},{row.seed}")
    return "\n".join(lines) + "\n"
