"""Hypothesis tests and simulations for cherry-picked benchmark results."""

__version__ = "0.1.0"

from .adversary import ImprovementSample, ReporterStrategy, StrategyKind, publish_mean, select
from .exceptions import CherryPickError, DegenerateInputError, DomainError, ParseError
from .significance import (
    MonteCarloEstimate,
    TestKind,
    TestOutcome,
    conservative_p,
    decide,
    gap_p,
    inspector_p,
    one_sample_t_p,
    standard_p,
    two_sample_t_p,
)

__all__ = [
    "CherryPickError",
    "DegenerateInputError",
    "DomainError",
    "ImprovementSample",
    "MonteCarloEstimate",
    "ParseError",
    "ReporterStrategy",
    "StrategyKind",
    "TestKind",
    "TestOutcome",
    "conservative_p",
    "decide",
    "gap_p",
    "inspector_p",
    "one_sample_t_p",
    "publish_mean",
    "select",
    "standard_p",
    "two_sample_t_p",
]
