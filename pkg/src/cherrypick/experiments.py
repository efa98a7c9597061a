"""Seeded simulations of reporters, tests and inspectors.

Every simulation is a pure function of its :class:`SimulationConfig`. Trial
``i`` draws its numbers from block ``i // BLOCK_SIZE`` of a stream keyed by
``(seed, purpose)``, so results never depend on how trials are scheduled.

Within one run the conservative p-value is evaluated against a single
Monte-Carlo reference of ``mc_draws`` replicates, seeded by ``seed``.
"""

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._validation import (
    check_count,
    check_nonnegative,
    check_open_probability,
    check_positive,
    check_seed,
)
from .adversary import StrategyKind, parse_strategy
from .dataio import normalize_unit_variance
from .distributions import block_normals, block_uniforms, normal_survival, t_survival
from .exceptions import DomainError
from .significance import (
    DEFAULT_DRAWS,
    conservative_hits,
    gap_statistic,
    inspector_statistic,
    one_sample_t_statistic,
    two_sample_t_statistic,
)

# stream identifiers, one per source of randomness
POOL, SELECTION, INSPECTION, RESAMPLE = 1, 2, 3, 4

VARIANCE_MODES = ("known", "unknown")
INSPECTOR_SOURCES = ("fresh", "pool")


@dataclass(frozen=True)
class SimulationConfig:
    n_all: int = 30
    n_publish: int = 10
    n_inspect: int = 10
    mu: float = 0.0
    variance_mode: str = "known"
    sd: float = 1.0
    alpha: float = 0.05
    beta: float = 0.05
    mu_gap: float = 0.5
    trials: int = 1000
    seed: int = 0
    strategy: str = "top_k"
    mc_draws: int = DEFAULT_DRAWS
    inspector_source: str = "fresh"

    def __post_init__(self):
        check_count(self.n_all, "n_all")
        check_count(self.n_publish, "n_publish")
        check_count(self.n_inspect, "n_inspect")
        check_count(self.trials, "trials")
        check_count(self.mc_draws, "mc_draws")
        check_seed(self.seed)
        if self.n_publish > self.n_all:
            raise DomainError("n_publish must not exceed n_all")
        if not math.isfinite(self.mu):
            raise DomainError("mu must be finite")
        check_positive(self.sd, "sd")
        check_open_probability(self.alpha, "alpha")
        check_open_probability(self.beta, "beta")
        check_nonnegative(self.mu_gap, "mu_gap")
        if self.variance_mode not in VARIANCE_MODES:
            raise DomainError(f"variance_mode must be one of {VARIANCE_MODES}")
        if self.variance_mode == "known" and self.sd != 1.0:
            raise DomainError("known-variance mode works on the unit scale; use sd=1")
        if self.inspector_source not in INSPECTOR_SOURCES:
            raise DomainError(f"inspector_source must be one of {INSPECTOR_SOURCES}")
        object.__setattr__(self, "strategy", parse_strategy(self.strategy).value)

    @property
    def known_variance(self):
        return self.variance_mode == "known"

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise DomainError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        return cls(**data)

    def digest(self):
        """Short stable hash of the config, printed next to every result."""
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass(frozen=True)
class Rate:
    """Empirical frequency ``successes / trials`` with its binomial standard error."""

    successes: int
    trials: int

    @property
    def rate(self):
        return self.successes / self.trials if self.trials else math.nan

    @property
    def std_error(self):
        if not self.trials:
            return math.nan
        r = self.rate
        return math.sqrt(r * (1.0 - r) / self.trials)

    @classmethod
    def of(cls, mask):
        mask = np.asarray(mask, dtype=bool)
        return cls(int(mask.sum()), int(mask.size))


@dataclass(frozen=True)
class SimulationResult:
    kind: str
    rates: dict
    config: dict
    extra: dict = field(default_factory=dict)
    per_trial: dict | None = None

    def rows(self):
        """Flat records, one per rate, ready for CSV/JSON output."""
        out = []
        for label, r in self.rates.items():
            row = {"simulation": self.kind, "label": label, **self.extra}
            row.update(rate=r.rate, std_error=r.std_error, successes=r.successes, trials=r.trials)
            row.update(seed=self.config.get("seed"), version=__version__)
            out.append(row)
        return out


# --- trial machinery -------------------------------------------------------------


def _draw_pools(config):
    return config.mu + config.sd * block_normals(config.seed, POOL, config.trials, config.n_all)


def _selection_order(config, pools):
    """Per-row index order: the first ``n_publish`` columns are published."""
    if config.strategy == StrategyKind.TOP_K.value:
        return np.argsort(-pools, axis=1, kind="stable")
    keys = block_uniforms(config.seed, SELECTION, config.trials, pools.shape[1])
    return np.argsort(keys, axis=1, kind="stable")


def _reporter_p(config, published, mu_gap):
    if config.known_variance:
        stat = gap_statistic(published.mean(axis=1), config.n_publish, mu_gap)
        return normal_survival(stat)
    if config.n_publish < 2:
        raise DomainError("the t-tests need n_publish >= 2")
    return t_survival(one_sample_t_statistic(published, mu_gap), config.n_publish - 1)


def _meta(config):
    return {"config_hash": config.digest(), "n_all": config.n_all, "n_publish": config.n_publish}


def run_false_claim(config, conservative=False, keep_trials=False):
    """How often a reporter can claim ``p <= alpha`` from the pool.

    Uses the z-test in known-variance mode and the one-sample t-test
    otherwise. With ``conservative=True`` (known variance only) the rate at
    which the conservative test is fooled is reported as well.
    """
    pools = _draw_pools(config)
    order = _selection_order(config, pools)
    published = np.take_along_axis(pools, order[:, : config.n_publish], axis=1)
    p = _reporter_p(config, published, 0.0)
    rates = {"standard": Rate.of(p <= config.alpha)}
    per_trial = {"p_value": p} if keep_trials else None
    if conservative:
        if not config.known_variance:
            raise DomainError("the conservative test is defined for known variance only")
        hits = conservative_hits(
            published.mean(axis=1), config.n_publish, config.n_all, config.mc_draws, config.seed
        )
        p_con = hits / config.mc_draws
        rates["conservative"] = Rate.of(p_con <= config.alpha)
        if keep_trials:
            per_trial["p_conservative"] = p_con
    return SimulationResult("false-claim", rates, config.as_dict(), _meta(config), per_trial)


def run_power(config, mu_grid):
    """Detection rates of the standard, conservative and gap tests for each
    true effect in ``mu_grid``, with the reporter publishing an unbiased
    sample of ``n_publish`` datasets.

    The same underlying normals are shifted by each ``mu`` so the curves are
    smooth in ``mu``. The conservative test is only run with known variance.
    """
    base = block_normals(config.seed, POOL, config.trials, config.n_publish)
    results = []
    for mu in mu_grid:
        published = mu + config.sd * base
        rates = {
            "standard": Rate.of(_reporter_p(config, published, 0.0) <= config.alpha),
        }
        if config.known_variance:
            hits = conservative_hits(
                published.mean(axis=1), config.n_publish, config.n_all,
                config.mc_draws, config.seed,
            )
            rates["conservative"] = Rate.of(hits / config.mc_draws <= config.alpha)
        rates["gap"] = Rate.of(_reporter_p(config, published, config.mu_gap) <= config.alpha)
        extra = {**_meta(config), "mu": float(mu)}
        results.append(SimulationResult("power", rates, config.replace(mu=float(mu)).as_dict(), extra))
    return results


def _inspection_draws(config, pools, order):
    if config.inspector_source == "fresh":
        return config.mu + config.sd * block_normals(
            config.seed, INSPECTION, config.trials, config.n_inspect
        )
    remaining = order[:, config.n_publish:]
    if remaining.shape[1] < config.n_inspect:
        raise DomainError("the pool is too small to resample n_inspect unpublished datasets")
    keys = block_uniforms(config.seed, RESAMPLE, config.trials, remaining.shape[1])
    pick = np.argsort(keys, axis=1, kind="stable")[:, : config.n_inspect]
    return np.take_along_axis(pools, np.take_along_axis(remaining, pick, axis=1), axis=1)


def run_inspection(config, keep_trials=False):
    """Reporter publishes and runs the gap test; an inspector re-tests.

    ``detection`` is the rate of ``p_inspector <= beta`` among trials whose
    claim passed the gap test at ``alpha``; ``detection_unconditional`` is
    over all trials and ``claim`` is the reporter's own success rate.
    """
    pools = _draw_pools(config)
    order = _selection_order(config, pools)
    published = np.take_along_axis(pools, order[:, : config.n_publish], axis=1)
    inspected = _inspection_draws(config, pools, order)

    claim = _reporter_p(config, published, config.mu_gap) <= config.alpha
    if config.known_variance:
        stat = inspector_statistic(
            published.mean(axis=1), inspected.mean(axis=1), config.n_publish, config.n_inspect
        )
        p_insp = normal_survival(stat)
    else:
        if config.n_inspect < 2:
            raise DomainError("the t-tests need n_inspect >= 2")
        dof = config.n_publish + config.n_inspect - 2
        p_insp = t_survival(two_sample_t_statistic(published, inspected), dof)
    detect = p_insp <= config.beta

    rates = {
        "claim": Rate.of(claim),
        "detection": Rate.of(detect[claim]),
        "detection_unconditional": Rate.of(detect),
    }
    per_trial = {"claim": claim, "p_inspector": p_insp} if keep_trials else None
    return SimulationResult("inspect", rates, config.as_dict(), _meta(config), per_trial)


def run_real_data(values, n_publish, n_inspect, resample_trials, seed, beta=0.05,
                  exclude_published=True):
    """Cherry-pick the top ``n_publish`` of real improvements, then audit.

    ``values`` are normalized to unit sample variance first. Each inspection
    resamples ``n_inspect`` datasets uniformly without replacement from the
    pool, excluding the published ones unless ``exclude_published`` is false.
    """
    sample = normalize_unit_variance(values)
    n_publish = check_count(n_publish, "n_publish")
    n_inspect = check_count(n_inspect, "n_inspect")
    resample_trials = check_count(resample_trials, "resample_trials")
    seed = check_seed(seed)
    beta = check_open_probability(beta, "beta")
    pool = sample.values
    available = pool.size - n_publish if exclude_published else pool.size
    if n_publish > pool.size or n_inspect > available:
        raise DomainError(
            f"pool of {pool.size} is too small for n_publish={n_publish}, n_inspect={n_inspect}"
        )

    order = np.lexsort((np.arange(pool.size), -pool))
    published = pool[order[:n_publish]]
    candidates = pool[order[n_publish:]] if exclude_published else pool
    mu_pub = float(published.mean())
    reporter_p = float(normal_survival(gap_statistic(mu_pub, n_publish)))

    keys = block_uniforms(seed, RESAMPLE, resample_trials, candidates.size)
    picks = candidates[np.argsort(keys, axis=1, kind="stable")[:, :n_inspect]]
    p_insp = normal_survival(inspector_statistic(mu_pub, picks.mean(axis=1), n_publish, n_inspect))

    config = {
        "n_all": int(pool.size), "n_publish": n_publish, "n_inspect": n_inspect,
        "resample_trials": resample_trials, "seed": seed, "beta": beta,
        "exclude_published": exclude_published,
    }
    blob = json.dumps(config, sort_keys=True).encode() + pool.tobytes()
    extra = {
        "config_hash": hashlib.sha256(blob).hexdigest()[:12],
        "reporter_mean": mu_pub,
        "reporter_p": reporter_p,
        "pool_mean": float(pool.mean()),
        "n_inspect": n_inspect,
        "exclude_published": exclude_published,
    }
    return SimulationResult("real-data", {"detection": Rate.of(p_insp <= beta)}, config, extra)
