"""Input validation helpers."""

import math
import numbers

import numpy as np

from .exceptions import DomainError

MAX_SEED = 2**64


def check_finite(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return x


def check_count(n, name="n", minimum=1):
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {n!r}")
    if n < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {n}")
    return int(n)


def check_open_probability(p, name="p"):
    """Require a scalar strictly inside (0, 1)."""
    if not isinstance(p, numbers.Real) or not (0.0 < p < 1.0):
        raise DomainError(f"{name} must lie in (0, 1), got {p!r}")
    return float(p)


def check_probability(p, name="p"):
    if not isinstance(p, numbers.Real) or not (0.0 <= p <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {p!r}")
    return float(p)


def check_positive(x, name="x"):
    if not isinstance(x, numbers.Real) or not math.isfinite(x) or x <= 0:
        raise DomainError(f"{name} must be a positive finite number, got {x!r}")
    return float(x)


def check_nonnegative(x, name="x"):
    if not isinstance(x, numbers.Real) or not math.isfinite(x) or x < 0:
        raise DomainError(f"{name} must be a nonnegative finite number, got {x!r}")
    return float(x)


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise DomainError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed < MAX_SEED:
        raise DomainError("seed must be a 64-bit unsigned integer")
    return int(seed)


def check_1d(values, name="values", min_length=1):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional")
    if arr.size < min_length:
        raise DomainError(f"{name} needs at least {min_length} element(s)")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr
