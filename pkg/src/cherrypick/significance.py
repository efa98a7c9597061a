"""One-sided significance tests for published improvements.

All tests take inputs already scaled to unit variance unless they estimate
the variance themselves (the Student-t variants).

The statistic kernels (``*_statistic``) operate on numpy arrays along the
last axis so the simulation harness can evaluate thousands of trials at once
through the same code path as the scalar operations.
"""

import functools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._validation import (
    check_1d,
    check_count,
    check_finite,
    check_nonnegative,
    check_probability,
    check_seed,
)
from .adversary import ImprovementSample
from .distributions import normal_survival, sample_top_k_means, t_survival
from .exceptions import DegenerateInputError, DomainError

DEFAULT_DRAWS = 100_000
_CONSERVATIVE_STREAM = 7
# spread below this fraction of the data's magnitude is rounding noise
_TINY = 1e-13


class TestKind(str, Enum):
    STANDARD_Z = "standard"
    GAP_Z = "gap"
    CONSERVATIVE = "conservative"
    INSPECTOR_Z = "inspector"
    ONE_SAMPLE_T = "t-one"
    TWO_SAMPLE_T = "t-two"


TestKind.__test__ = False  # not a pytest test class


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    std_error: float
    draws: int
    seed: int

    @classmethod
    def from_count(cls, hits, draws, seed):
        est = hits / draws
        return cls(est, math.sqrt(est * (1.0 - est) / draws), draws, seed)


@dataclass(frozen=True)
class TestOutcome:
    statistic: float
    p_value: float
    test_kind: TestKind
    params: dict = field(default_factory=dict)
    monte_carlo: MonteCarloEstimate | None = None

    __test__ = False

    def __post_init__(self):
        check_probability(self.p_value, "p_value")

    def as_dict(self):
        out = {
            "test": self.test_kind.value,
            "statistic": self.statistic,
            "p_value": self.p_value,
            **self.params,
        }
        if self.monte_carlo is not None:
            out["std_error"] = self.monte_carlo.std_error
        return out


# --- statistic kernels --------------------------------------------------------


def gap_statistic(mu_hat, n_publish, mu_gap=0.0):
    return (np.asarray(mu_hat, dtype=float) - mu_gap) * math.sqrt(n_publish)


def inspector_statistic(mu_pub, mu_insp, n_publish, n_inspect):
    diff = np.asarray(mu_pub, dtype=float) - np.asarray(mu_insp, dtype=float)
    return diff / math.sqrt(1.0 / n_publish + 1.0 / n_inspect)


def one_sample_t_statistic(values, mu_gap=0.0):
    """``sqrt(n) (mean - mu_gap) / s`` along the last axis, ``s`` the
    mean-centred unbiased standard deviation."""
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    sd = values.std(axis=-1, ddof=1)
    if np.any(sd <= _TINY * np.abs(values).max(axis=-1)):
        raise DegenerateInputError("sample variance is zero")
    return math.sqrt(n) * (values.mean(axis=-1) - mu_gap) / sd


def two_sample_t_statistic(pub, insp):
    """Pooled-variance two-sample t statistic along the last axis.

    The denominator is the pooled standard deviation (not the pooled
    variance) times ``sqrt(1/n_p + 1/n_i)``, which is what makes the statistic
    t-distributed with ``n_p + n_i - 2`` degrees of freedom.
    """
    pub = np.asarray(pub, dtype=float)
    insp = np.asarray(insp, dtype=float)
    n_p, n_i = pub.shape[-1], insp.shape[-1]
    pooled_var = (
        (n_p - 1) * pub.var(axis=-1, ddof=1) + (n_i - 1) * insp.var(axis=-1, ddof=1)
    ) / (n_p + n_i - 2)
    scale = np.maximum(np.abs(pub).max(axis=-1), np.abs(insp).max(axis=-1))
    if np.any(np.sqrt(pooled_var) <= _TINY * scale):
        raise DegenerateInputError("pooled variance is zero")
    diff = pub.mean(axis=-1) - insp.mean(axis=-1)
    return diff / (np.sqrt(pooled_var) * math.sqrt(1.0 / n_p + 1.0 / n_i))


@functools.lru_cache(maxsize=32)
def top_mean_reference(n_all, n_publish, draws, seed):
    """Sorted Monte-Carlo sample of the top-``n_publish`` mean of ``n_all``
    standard normals. Cached: one reference serves every query with the same
    arguments."""
    ref = np.sort(sample_top_k_means(n_all, n_publish, draws, seed, _CONSERVATIVE_STREAM))
    ref.setflags(write=False)
    return ref


def conservative_hits(mu_hat, n_publish, n_all, draws, seed):
    """Number of reference replicates at or above each ``mu_hat``."""
    ref = top_mean_reference(n_all, n_publish, draws, seed)
    return draws - np.searchsorted(ref, np.asarray(mu_hat, dtype=float), side="left")


# --- public tests -----------------------------------------------------------


def standard_p(mu_hat, n_publish):
    """One-sided z-test of zero mean improvement: ``sf(mu_hat * sqrt(n))``."""
    return _gap_outcome(mu_hat, n_publish, 0.0, TestKind.STANDARD_Z)


def gap_p(mu_hat, n_publish, mu_gap):
    """z-test against the shifted null ``mu = mu_gap``."""
    mu_gap = check_nonnegative(mu_gap, "mu_gap")
    return _gap_outcome(mu_hat, n_publish, mu_gap, TestKind.GAP_Z)


def _gap_outcome(mu_hat, n_publish, mu_gap, kind):
    check_finite(mu_hat, "mu_hat")
    n_publish = check_count(n_publish, "n_publish")
    stat = float(gap_statistic(mu_hat, n_publish, mu_gap))
    params = {"n_publish": n_publish}
    if kind is TestKind.GAP_Z:
        params["mu_gap"] = mu_gap
    return TestOutcome(stat, normal_survival(stat), kind, params)


def conservative_p(mu_hat, n_publish, n_all, draws=DEFAULT_DRAWS, seed=0):
    """Selection-aware p-value ``P[mu_top >= mu_hat]``.

    ``mu_top`` is the mean of the ``n_publish`` largest of ``n_all``
    standard normals, i.e. the best mean a reporter could publish under the
    null. The probability is estimated from ``draws`` seeded replicates; the
    outcome carries the estimate's standard error. Small p-values need
    proportionally more draws to resolve.
    """
    check_finite(mu_hat, "mu_hat")
    n_publish = check_count(n_publish, "n_publish")
    n_all = check_count(n_all, "n_all")
    if n_publish > n_all:
        raise DomainError("n_publish must not exceed n_all")
    draws = check_count(draws, "draws")
    seed = check_seed(seed)
    hits = int(conservative_hits(mu_hat, n_publish, n_all, draws, seed))
    mc = MonteCarloEstimate.from_count(hits, draws, seed)
    params = {"n_publish": n_publish, "n_all": n_all, "draws": draws, "seed": seed}
    return TestOutcome(float(mu_hat), mc.estimate, TestKind.CONSERVATIVE, params, mc)


def inspector_p(mu_pub, mu_insp, n_publish, n_inspect):
    """Two-sample z-test that the published mean exceeds the inspection mean."""
    check_finite(mu_pub, "mu_pub")
    check_finite(mu_insp, "mu_insp")
    n_publish = check_count(n_publish, "n_publish")
    n_inspect = check_count(n_inspect, "n_inspect")
    stat = float(inspector_statistic(mu_pub, mu_insp, n_publish, n_inspect))
    params = {"n_publish": n_publish, "n_inspect": n_inspect}
    return TestOutcome(stat, normal_survival(stat), TestKind.INSPECTOR_Z, params)


def _values(sample, name):
    if isinstance(sample, ImprovementSample):
        sample = sample.values
    arr = check_1d(sample, name)
    if arr.size < 2:
        raise DegenerateInputError(f"{name} needs at least two values")
    return arr


def one_sample_t_p(values, mu_gap=0.0):
    """One-sample t-test of ``mean > mu_gap`` with estimated variance."""
    values = _values(values, "values")
    mu_gap = check_nonnegative(mu_gap, "mu_gap")
    stat = float(one_sample_t_statistic(values, mu_gap))
    dof = values.size - 1
    params = {"n_publish": values.size, "mu_gap": mu_gap, "dof": dof}
    return TestOutcome(stat, t_survival(stat, dof), TestKind.ONE_SAMPLE_T, params)


def two_sample_t_p(pub, insp):
    """Pooled two-sample t-test that the published mean exceeds the inspection mean."""
    pub = _values(pub, "pub")
    insp = _values(insp, "insp")
    stat = float(two_sample_t_statistic(pub, insp))
    dof = pub.size + insp.size - 2
    params = {"n_publish": pub.size, "n_inspect": insp.size, "dof": dof}
    return TestOutcome(stat, t_survival(stat, dof), TestKind.TWO_SAMPLE_T, params)


def decide(outcome, level):
    """Reject when ``p <= level`` (inclusive)."""
    level = check_probability(level, "level")
    p = outcome.p_value if isinstance(outcome, TestOutcome) else outcome
    return bool(p <= level)
