"""Closed-form thresholds of the cherry-picking guarantees, plus validators.

The threshold functions raise :class:`DomainError` on inapplicable inputs.
:func:`bound_report` wraps them and instead returns a report flagged as not
applicable, which is what parameter sweeps want.

Constants are used exactly as stated, not sharpened.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._validation import check_count, check_open_probability, check_seed
from .distributions import (
    beta_mean,
    beta_tail_bound,
    block_uniforms,
    normal_density,
    normal_inv_survival,
    normal_survival,
    uniform_order_statistic_params,
)
from .exceptions import DomainError


class BoundId(str, Enum):
    T1_SINGLE_DATASET = "t1"
    T2_CHERRY_PICK = "t2"
    T3_POWER_LOSS = "t3"
    T4_MIN_GAP = "t4"
    T5_INSPECTOR = "t5"
    MILLS_RATIO = "mills"
    ALPHA_TAIL = "alpha-tail"
    ORDER_STATISTICS = "order-stats"
    BETA_CONCENTRATION = "beta-concentration"


@dataclass(frozen=True)
class BoundReport:
    theorem_id: BoundId
    threshold: float
    preconditions_met: bool
    detail: tuple = field(default_factory=tuple)
    satisfied: bool | None = None

    def as_dict(self):
        out = {
            "bound": self.theorem_id.value,
            "threshold": self.threshold,
            "preconditions_met": self.preconditions_met,
        }
        if self.satisfied is not None:
            out["satisfied"] = self.satisfied
        out.update(dict(self.detail))
        return out


# --- thresholds --------------------------------------------------------------


def t1_false_claim_prob(alpha, n_all):
    """Chance that at least one of ``n_all`` null datasets is significant alone."""
    alpha = check_open_probability(alpha, "alpha")
    n_all = check_count(n_all, "n_all")
    return -math.expm1(n_all * math.log1p(-alpha))


def t2_preconditions(alpha, delta, epsilon, n_publish, n_all):
    """Check when a top-``n_publish`` reporter can force ``p <= alpha``.

    Needs ``n_publish / n_all <= 1/2 - epsilon`` and ``n_publish`` at least
    ``max(log(1/delta) / (2 eps^2), 8 log(1/alpha) / eps^2)``. The report's
    threshold is that minimum ``n_publish``.
    """
    alpha = check_open_probability(alpha, "alpha")
    delta = check_open_probability(delta, "delta")
    if not 0.0 < epsilon < 0.5:
        raise DomainError(f"epsilon must lie in (0, 1/2), got {epsilon!r}")
    n_publish = check_count(n_publish, "n_publish")
    n_all = check_count(n_all, "n_all")

    ratio = n_publish / n_all
    ratio_limit = 0.5 - epsilon
    delta_term = math.log(1.0 / delta) / (2.0 * epsilon**2)
    alpha_term = 8.0 * math.log(1.0 / alpha) / epsilon**2
    min_publish = max(delta_term, alpha_term)
    ratio_ok = ratio <= ratio_limit
    size_ok = n_publish >= min_publish
    detail = (
        ("alpha", alpha), ("delta", delta), ("epsilon", epsilon),
        ("n_publish", n_publish), ("n_all", n_all),
        ("ratio", ratio), ("ratio_limit", ratio_limit), ("ratio_ok", ratio_ok),
        ("delta_term", delta_term), ("alpha_term", alpha_term), ("size_ok", size_ok),
    )
    return BoundReport(BoundId.T2_CHERRY_PICK, min_publish, ratio_ok and size_ok, detail)


def _t3_check(delta, n_publish, n_all):
    delta = check_open_probability(delta, "delta")
    n_publish = check_count(n_publish, "n_publish", 2)
    n_all = check_count(n_all, "n_all", 2)
    if not n_publish < 2 * n_all:
        raise DomainError("requires n_publish < 2 * n_all")
    return delta, n_publish, n_all


def t3_power_threshold(delta, n_publish, n_all):
    """Largest true effect at which the conservative test still misses with
    probability ``1 - delta``: ``isf(r) - isf(delta)``, ``r = n_p / (n_a + 1)``."""
    delta, n_publish, n_all = _t3_check(delta, n_publish, n_all)
    r = n_publish / (n_all + 1)
    if not r < 1.0:
        raise DomainError("n_publish / (n_all + 1) must be below 1")
    return normal_inv_survival(r) - normal_inv_survival(delta)


def t4_min_gap(delta, n_publish, n_all):
    """Minimum required improvement that defeats any top-``n_publish`` choice."""
    delta = check_open_probability(delta, "delta")
    n_publish = check_count(n_publish, "n_publish")
    n_all = check_count(n_all, "n_all")
    if n_publish >= n_all:
        raise DomainError("requires n_publish < n_all")
    return (
        3.0 * math.sqrt(2.0 * math.log(1.0 / delta))
        + 7.0 * math.sqrt(2.0 * math.log(math.e * n_all / n_publish))
        + math.pi / (2.0 * n_publish)
    )


def t5_min_gap(alpha, beta, delta, n_publish):
    """Minimum required improvement under which the inspector catches a
    cherry-picked claim with probability ``1 - delta``."""
    alpha = check_open_probability(alpha, "alpha")
    beta = check_open_probability(beta, "beta")
    delta = check_open_probability(delta, "delta")
    n_publish = check_count(n_publish, "n_publish")
    half = math.sqrt(0.5)
    total = (
        normal_inv_survival(beta)
        + half * normal_inv_survival(alpha)
        + half * normal_inv_survival(delta)
    )
    return total / math.sqrt(n_publish)


_THRESHOLDS = {
    BoundId.T1_SINGLE_DATASET: (t1_false_claim_prob, ("alpha", "n_all")),
    BoundId.T3_POWER_LOSS: (t3_power_threshold, ("delta", "n_publish", "n_all")),
    BoundId.T4_MIN_GAP: (t4_min_gap, ("delta", "n_publish", "n_all")),
    BoundId.T5_INSPECTOR: (t5_min_gap, ("alpha", "beta", "delta", "n_publish")),
}


def bound_report(theorem_id, **params):
    """Evaluate one threshold; inapplicable inputs yield ``preconditions_met=False``
    and a NaN threshold instead of an exception."""
    theorem_id = BoundId(theorem_id)
    if theorem_id is BoundId.T2_CHERRY_PICK:
        names = ("alpha", "delta", "epsilon", "n_publish", "n_all")
        try:
            return t2_preconditions(*(params[k] for k in names))
        except DomainError as exc:
            detail = tuple((k, params.get(k)) for k in names) + (("reason", str(exc)),)
            return BoundReport(theorem_id, math.nan, False, detail)
    if theorem_id not in _THRESHOLDS:
        raise DomainError(f"{theorem_id.value} is a validator, not a threshold")
    func, names = _THRESHOLDS[theorem_id]
    missing = [k for k in names if k not in params]
    if missing:
        raise DomainError(f"missing parameter(s) for {theorem_id.value}: {', '.join(missing)}")
    detail = tuple((k, params[k]) for k in names)
    try:
        value = func(*(params[k] for k in names))
    except DomainError as exc:
        return BoundReport(theorem_id, math.nan, False, detail + (("reason", str(exc)),))
    return BoundReport(theorem_id, value, True, detail)


# --- validators ---------------------------------------------------------------


def validate_mills_ratio(xs):
    """Check ``2/(sqrt(x^2+4)+x) <= sf(x)/pdf(x) <= 2/(sqrt(x^2+2)+x)`` for ``x > 0``."""
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= 0):
        raise DomainError("the Mills ratio bounds are stated for x > 0")
    ratio = normal_survival(xs) / normal_density(xs)
    lower = 2.0 / (np.sqrt(xs * xs + 4.0) + xs)
    upper = 2.0 / (np.sqrt(xs * xs + 2.0) + xs)
    ok = (lower <= ratio) & (ratio <= upper)
    detail = (
        ("points", xs.size),
        ("min_lower_slack", float(np.min(ratio - lower))),
        ("min_upper_slack", float(np.min(upper - ratio))),
        ("violations", int(np.sum(~ok))),
    )
    return BoundReport(BoundId.MILLS_RATIO, math.nan, True, detail, bool(np.all(ok)))


def validate_alpha_tail(alphas):
    """Check ``log(1/a) - log(sqrt(2 pi)) - 1 < x^2 < 2 log(1/a) - log(pi)``
    for ``x = isf(a)`` and ``a`` in (0, 1/2)."""
    alphas = np.asarray(alphas, dtype=float)
    if np.any((alphas <= 0) | (alphas >= 0.5)):
        raise DomainError("alpha must lie in (0, 1/2)")
    x2 = np.square(normal_inv_survival(alphas))
    log_inv = np.log(1.0 / alphas)
    lower = log_inv - 0.5 * math.log(2.0 * math.pi) - 1.0
    upper = 2.0 * log_inv - math.log(math.pi)
    ok = (lower < x2) & (x2 < upper)
    detail = (
        ("points", alphas.size),
        ("min_lower_slack", float(np.min(x2 - lower))),
        ("min_upper_slack", float(np.min(upper - x2))),
        ("violations", int(np.sum(~ok))),
    )
    return BoundReport(BoundId.ALPHA_TAIL, math.nan, True, detail, bool(np.all(ok)))


def _uniform_order_stats(n, trials, seed, stream):
    """Sorted (descending) uniforms, one row per trial."""
    return -np.sort(-block_uniforms(seed, stream, trials, n), axis=1)


def validate_order_statistics(n=10, trials=100_000, seed=0, z=4.0):
    """Compare the empirical mean of each order statistic of ``n`` uniforms
    with its Beta-law mean.

    The ``i``-th largest must match ``Beta(n+1-i, i)``. The detail also
    records how many ranks would fail under the pairing ``Beta(i, n+1-i)``
    for the ``i``-th largest, which is the law of the ``i``-th smallest.
    """
    n = check_count(n, "n")
    trials = check_count(trials, "trials", 2)
    seed = check_seed(seed)
    ordered = _uniform_order_stats(n, trials, seed, 11)
    worst = 0.0
    swapped_failures = 0
    for i in range(1, n + 1):
        a, b = uniform_order_statistic_params(i, n, largest=True)
        var = a * b / ((a + b) ** 2 * (a + b + 1))
        se = math.sqrt(var / trials)
        emp = ordered[:, i - 1].mean()
        worst = max(worst, abs(emp - beta_mean(a, b)) / se)
        if abs(emp - beta_mean(b, a)) > z * se:
            swapped_failures += 1
    detail = (
        ("n", n), ("trials", trials), ("seed", seed),
        ("max_z_score", worst), ("swapped_pairing_failures", swapped_failures),
    )
    return BoundReport(BoundId.ORDER_STATISTICS, z, True, detail, worst <= z)


def validate_beta_concentration(n=10, trials=100_000, seed=0, t_grid=None, z=4.0):
    """Check that each uniform order statistic ``X ~ Beta(a, b)`` satisfies
    ``P[|X - a/(a+b)| > t]`` (each side) ``<= exp(-2 (a+b+1) t^2)`` up to
    ``z`` Monte-Carlo standard errors."""
    n = check_count(n, "n")
    trials = check_count(trials, "trials", 2)
    seed = check_seed(seed)
    t_grid = np.linspace(0.02, 0.5, 25) if t_grid is None else np.asarray(t_grid, dtype=float)
    ordered = _uniform_order_stats(n, trials, seed, 12)
    worst_excess = -math.inf
    for i in range(1, n + 1):
        a, b = uniform_order_statistic_params(i, n, largest=True)
        dev = ordered[:, i - 1] - beta_mean(a, b)
        for t in t_grid:
            bound = float(beta_tail_bound(a, b, t))
            for freq in ((dev > t).mean(), (dev < -t).mean()):
                se = math.sqrt(max(freq * (1.0 - freq), 1.0 / trials) / trials)
                worst_excess = max(worst_excess, (freq - bound) / se)
    detail = (("n", n), ("trials", trials), ("seed", seed), ("max_excess_in_se", worst_excess))
    return BoundReport(BoundId.BETA_CONCENTRATION, z, True, detail, worst_excess <= z)
