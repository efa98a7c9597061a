"""scikit-learn compatible wrappers.

These expose the tests as estimators so they can sit in pipelines, be cloned
and have their parameters inspected with ``get_params``. Inputs are 1-d
arrays of per-dataset improvements (a single column 2-d array is accepted).
"""

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .adversary import ReporterStrategy, StrategyKind, parse_strategy, select_indices
from .dataio import normalize_unit_variance
from .exceptions import DomainError
from .significance import (
    DEFAULT_DRAWS,
    conservative_p,
    gap_p,
    inspector_p,
    one_sample_t_p,
    two_sample_t_p,
)


def _column(X):
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise DomainError("expected a single column of improvements")
        X = X[:, 0]
    return X


def _check_variance(variance):
    if variance not in ("known", "unknown"):
        raise DomainError("variance must be 'known' or 'unknown'")


class UnitVarianceScaler(TransformerMixin, BaseEstimator):
    """Scale improvements by the unbiased sample standard deviation seen in ``fit``."""

    def fit(self, X, y=None):
        X = _column(X)
        normalize_unit_variance(X)  # rejects degenerate input
        self.scale_ = float(X.std(ddof=1))
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "scale_")
        return _column(X) / self.scale_

    def inverse_transform(self, X):
        check_is_fitted(self, "scale_")
        return _column(X) * self.scale_


class ReporterSelector(TransformerMixin, BaseEstimator):
    """Keep the ``n_publish`` datasets a reporter would publish.

    ``fit`` records ``selected_indices_``; ``transform`` returns those rows.
    """

    def __init__(self, n_publish=10, strategy="top_k", random_state=0):
        self.n_publish = n_publish
        self.strategy = strategy
        self.random_state = random_state

    def fit(self, X, y=None):
        X = _column(X)
        kind = parse_strategy(self.strategy)
        strategy = (
            ReporterStrategy.top_k() if kind is StrategyKind.TOP_K
            else ReporterStrategy.unbiased(self.random_state)
        )
        self.selected_indices_ = select_indices(X, self.n_publish, strategy)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "selected_indices_")
        return _column(X)[self.selected_indices_]


class ImprovementTest(BaseEstimator):
    """One-sided test that the mean improvement exceeds ``mu_gap``.

    ``variance="known"`` uses the z-test on unit-variance data,
    ``"unknown"`` the one-sample t-test. After ``fit``: ``statistic_``,
    ``p_value_`` and ``significant_``.
    """

    def __init__(self, mu_gap=0.0, alpha=0.05, variance="known"):
        self.mu_gap = mu_gap
        self.alpha = alpha
        self.variance = variance

    def fit(self, X, y=None):
        _check_variance(self.variance)
        X = _column(X)
        if self.variance == "known":
            outcome = gap_p(float(X.mean()), X.size, self.mu_gap)
        else:
            outcome = one_sample_t_p(X, self.mu_gap)
        self.outcome_ = outcome
        self.statistic_ = outcome.statistic
        self.p_value_ = outcome.p_value
        self.significant_ = outcome.p_value <= self.alpha
        self.n_features_in_ = 1
        return self


class ConservativeTest(BaseEstimator):
    """Selection-aware test assuming the published rows are the best
    ``n_publish`` of ``n_all`` null datasets."""

    def __init__(self, n_all=30, alpha=0.05, draws=DEFAULT_DRAWS, random_state=0):
        self.n_all = n_all
        self.alpha = alpha
        self.draws = draws
        self.random_state = random_state

    def fit(self, X, y=None):
        X = _column(X)
        outcome = conservative_p(float(X.mean()), X.size, self.n_all, self.draws, self.random_state)
        self.outcome_ = outcome
        self.p_value_ = outcome.p_value
        self.std_error_ = outcome.monte_carlo.std_error
        self.significant_ = outcome.p_value <= self.alpha
        self.n_features_in_ = 1
        return self


class InspectorAudit(BaseEstimator):
    """Audit published improvements against an inspection sample.

    ``fit`` takes the published values; ``predict`` takes inspection values
    and returns ``True`` when the published mean is significantly higher
    (``p <= beta``), i.e. the selection looks biased.
    """

    def __init__(self, beta=0.05, variance="known"):
        self.beta = beta
        self.variance = variance

    def fit(self, X, y=None):
        _check_variance(self.variance)
        self.published_ = _column(X)
        self.n_features_in_ = 1
        return self

    def test(self, X):
        check_is_fitted(self, "published_")
        inspected = _column(X)
        if self.variance == "known":
            return inspector_p(
                float(self.published_.mean()), float(inspected.mean()),
                self.published_.size, inspected.size,
            )
        return two_sample_t_p(self.published_, inspected)

    def decision_function(self, X):
        return self.test(X).statistic

    def p_value(self, X):
        """p-value of the audit; small means the selection looks biased."""
        return self.test(X).p_value

    def predict(self, X):
        return self.test(X).p_value <= self.beta
