"""The biased reporter: choosing which datasets to publish."""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._validation import check_1d, check_count, check_positive, check_seed
from .distributions import substream, uniform_open
from .exceptions import DomainError


@dataclass(frozen=True)
class ImprovementSample:
    """Per-dataset improvements ``v_i`` with an optional known standard deviation."""

    values: np.ndarray
    known_sd: float | None = None

    def __post_init__(self):
        values = check_1d(self.values, "values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.known_sd is not None:
            object.__setattr__(self, "known_sd", check_positive(self.known_sd, "known_sd"))

    def __len__(self):
        return self.values.size

    @property
    def mean(self):
        return float(self.values.mean())


class StrategyKind(str, Enum):
    UNBIASED = "unbiased"
    TOP_K = "top_k"


def parse_strategy(value):
    """``StrategyKind`` from its name, raising :class:`DomainError` on unknown names."""
    try:
        return StrategyKind(value)
    except ValueError:
        choices = tuple(k.value for k in StrategyKind)
        raise DomainError(f"strategy must be one of {choices}, got {value!r}") from None


@dataclass(frozen=True)
class ReporterStrategy:
    """How the reporter picks the published subset.

    ``UNBIASED`` draws a uniform subset without replacement from ``seed``;
    ``TOP_K`` publishes the largest improvements.
    """

    kind: StrategyKind = StrategyKind.TOP_K
    seed: int | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "kind", parse_strategy(self.kind))
        if self.kind is StrategyKind.UNBIASED:
            if self.seed is None:
                raise DomainError("an unbiased strategy needs a seed")
            object.__setattr__(self, "seed", check_seed(self.seed))

    @classmethod
    def top_k(cls):
        return cls(StrategyKind.TOP_K)

    @classmethod
    def unbiased(cls, seed):
        return cls(StrategyKind.UNBIASED, seed)


def top_k_indices(values, k):
    """Indices of the ``k`` largest values, ordered by value descending.

    Ties go to the lower original index.
    """
    values = np.asarray(values)
    order = np.lexsort((np.arange(values.size), -values))
    return order[:k]


def random_subset_indices(n, k, rng):
    """Uniform ``k``-subset of ``range(n)`` (order is the draw order)."""
    return np.argsort(uniform_open(rng, n), kind="stable")[:k]


def select_indices(pool, n_publish, strategy):
    """Positions in ``pool`` of the datasets the reporter publishes."""
    if not isinstance(pool, ImprovementSample):
        pool = ImprovementSample(pool)
    n_publish = check_count(n_publish, "n_publish")
    if n_publish > len(pool):
        raise DomainError(f"n_publish={n_publish} exceeds the pool size {len(pool)}")
    if strategy.kind is StrategyKind.TOP_K:
        return top_k_indices(pool.values, n_publish)
    return random_subset_indices(len(pool), n_publish, substream(strategy.seed))


def select(pool, n_publish, strategy):
    """Return the ``n_publish`` values the reporter publishes from ``pool``."""
    if not isinstance(pool, ImprovementSample):
        pool = ImprovementSample(pool)
    idx = select_indices(pool, n_publish, strategy)
    return ImprovementSample(pool.values[idx], pool.known_sd)


def publish_mean(selection):
    values = selection.values if isinstance(selection, ImprovementSample) else selection
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise DomainError("cannot average an empty selection")
    return float(values.mean())
