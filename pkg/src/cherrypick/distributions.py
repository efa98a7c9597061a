"""Special functions and seeded samplers for the standard normal and Student-t.

Every function accepts either a scalar or an array-like and returns the same
shape (a Python ``float`` for scalar input).

Random streams come from numpy's counter-based Philox generator keyed by a
``SeedSequence`` built from ``(seed, *key)``. Simulations split their trials
into fixed-size blocks and give every block its own key, so a block can be
generated on any worker and the aggregate stays bit-identical to a serial run.
"""

import math

import numpy as np
from scipy import special

from ._validation import check_count, check_finite, check_positive, check_seed
from .exceptions import DomainError

SQRT_2PI = math.sqrt(2.0 * math.pi)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

#: Trials per random block in the simulation samplers. Part of the
#: reproducibility contract: changing it changes every simulated number.
BLOCK_SIZE = 1024

# Acklam's rational approximation to the lower-tail normal quantile.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def _as_output(value, scalar):
    return float(value) if scalar else value


def _prepare(x, name):
    scalar = np.ndim(x) == 0
    arr = np.asarray(x, dtype=float)
    check_finite(arr, name)
    return arr, scalar


def _check_open_unit(p, name="p"):
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError(f"{name} must lie strictly inside (0, 1)")
    return arr, np.ndim(p) == 0


def _check_dof(dof):
    dof = check_count(int(dof) if isinstance(dof, np.integer) else dof, "dof", 1)
    return dof


# --- standard normal -------------------------------------------------------


def normal_density(x):
    """Standard normal density ``exp(-x**2/2) / sqrt(2*pi)``."""
    arr, scalar = _prepare(x, "x")
    return _as_output(np.exp(-0.5 * arr * arr) / SQRT_2PI, scalar)


def normal_survival(x):
    """Upper tail probability ``P[X > x]`` of the standard normal."""
    arr, scalar = _prepare(x, "x")
    return _as_output(0.5 * special.erfc(arr / math.sqrt(2.0)), scalar)


def _log_survival(x):
    return special.log_ndtr(-x)


def _acklam_lower(q):
    """Initial guess for the lower-tail quantile, ``q <= 0.5``."""
    out = np.empty_like(q)
    tail = q < _P_LOW
    if np.any(tail):
        t = np.sqrt(-2.0 * np.log(q[tail]))
        num = ((((_C[0] * t + _C[1]) * t + _C[2]) * t + _C[3]) * t + _C[4]) * t + _C[5]
        den = (((_D[0] * t + _D[1]) * t + _D[2]) * t + _D[3]) * t + 1.0
        out[tail] = num / den
    mid = ~tail
    if np.any(mid):
        u = q[mid] - 0.5
        r = u * u
        num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * u
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        out[mid] = num / den
    return out


def _bisect_upper_tail(log_q, lo=0.0, hi=40.0, iterations=200):
    lo = np.full_like(log_q, lo)
    hi = np.full_like(log_q, hi)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        above = _log_survival(mid) > log_q
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def normal_inv_survival(p):
    """Return ``x`` with ``normal_survival(x) == p`` for ``p`` in (0, 1).

    Acklam's rational approximation seeds Newton iterations on the log
    survival function; any element that fails to converge is re-solved by
    bisection.
    """
    arr, scalar = _check_open_unit(p)
    arr = np.atleast_1d(arr)
    upper = arr > 0.5
    q = np.where(upper, 1.0 - arr, arr)
    log_q = np.log(q)

    x = -_acklam_lower(q)
    for _ in range(4):
        log_sf = _log_survival(x)
        # d/dx log sf = -phi/sf
        hazard = np.exp(-0.5 * x * x - LOG_SQRT_2PI - log_sf)
        x = x + (log_sf - log_q) / hazard

    bad = ~np.isfinite(x) | (np.abs(np.exp(_log_survival(x)) - q) > 1e-13 * np.maximum(q, 1e-3))
    if np.any(bad):
        x[bad] = _bisect_upper_tail(log_q[bad])

    x = np.where(upper, -x, x)
    x[q == 0.5] = 0.0
    return float(x[0]) if scalar else x.reshape(np.shape(p))


# --- Student t ---------------------------------------------------------------


def t_density(x, dof):
    arr, scalar = _prepare(x, "x")
    nu = _check_dof(dof)
    log_norm = special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2) - 0.5 * math.log(nu * math.pi)
    return _as_output(np.exp(log_norm - (nu + 1) / 2 * np.log1p(arr * arr / nu)), scalar)


def t_survival(x, dof):
    """Upper tail probability of Student's t with integer ``dof``.

    Uses the regularized incomplete beta identity
    ``P[T > x] = I_{nu/(nu+x^2)}(nu/2, 1/2) / 2`` for ``x >= 0``.
    """
    arr, scalar = _prepare(x, "x")
    nu = _check_dof(dof)
    half_tail = 0.5 * special.betainc(nu / 2.0, 0.5, nu / (nu + arr * arr))
    return _as_output(np.where(arr >= 0, half_tail, 1.0 - half_tail), scalar)


def t_inv_survival(p, dof):
    """Inverse of :func:`t_survival` in its first argument."""
    arr, scalar = _check_open_unit(p)
    nu = _check_dof(dof)
    arr = np.atleast_1d(arr)
    upper = arr > 0.5
    q = np.where(upper, 1.0 - arr, arr)

    z = special.betaincinv(nu / 2.0, 0.5, 2.0 * q)
    with np.errstate(divide="ignore"):
        x = np.sqrt(nu * (1.0 - z) / z)
    # one guarded Newton polish; keep whichever iterate has the smaller residual
    resid = t_survival(x, nu) - q
    x_new = x + resid / t_density(x, nu)
    better = np.abs(t_survival(x_new, nu) - q) < np.abs(resid)
    x = np.where(better, x_new, x)

    x = np.where(upper, -x, x)
    x[q == 0.5] = 0.0
    return float(x[0]) if scalar else x.reshape(np.shape(p))


# --- Beta facts ----------------------------------------------------------------


def uniform_order_statistic_params(i, n, largest=False):
    """Beta parameters of an order statistic of ``n`` i.i.d. uniforms.

    The ``i``-th smallest is ``Beta(i, n + 1 - i)``; the ``i``-th largest is
    ``Beta(n + 1 - i, i)``.
    """
    n = check_count(n, "n")
    i = check_count(i, "i")
    if i > n:
        raise DomainError("i must not exceed n")
    return (n + 1 - i, i) if largest else (i, n + 1 - i)


def beta_mean(a, b):
    return a / (a + b)


def beta_tail_bound(a, b, t):
    """Sub-Gaussian tail bound ``exp(-2 (a + b + 1) t^2)`` for a Beta(a, b) variable."""
    return np.exp(-2.0 * (a + b + 1.0) * np.square(t))


# --- seeded sampling -------------------------------------------------------------


def substream(seed, *key):
    """Independent generator for ``(seed, *key)``."""
    seed = check_seed(seed)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def uniform_open(rng, size):
    """Uniforms on the open interval (0, 1) with 53-bit resolution."""
    return (rng.integers(0, 2**53, size=size, dtype=np.uint64) + 0.5) / 2.0**53


def standard_normals(rng, size):
    """Standard normals by inverse transform of open-interval uniforms."""
    return normal_inv_survival(uniform_open(rng, size))


def sample_normal(n, mean, sd, seed):
    """``n`` i.i.d. draws from N(mean, sd**2), fully determined by ``seed``."""
    n = check_count(n, "n")
    check_finite(mean, "mean")
    sd = check_positive(sd, "sd")
    return mean + sd * np.atleast_1d(standard_normals(substream(seed), n))


def _block_rows(seed, stream, n_rows, n_cols, draw):
    n_rows = check_count(n_rows, "n_rows")
    n_cols = check_count(n_cols, "n_cols")
    out = np.empty((n_rows, n_cols))
    for block, start in enumerate(range(0, n_rows, BLOCK_SIZE)):
        stop = min(start + BLOCK_SIZE, n_rows)
        # a full block is always drawn so that row i never depends on n_rows
        values = draw(substream(seed, stream, block), (BLOCK_SIZE, n_cols))
        out[start:stop] = values[: stop - start]
    return out


def block_normals(seed, stream, n_rows, n_cols):
    """``(n_rows, n_cols)`` standard normals; row ``i`` depends only on
    ``(seed, stream, i)``."""
    return _block_rows(seed, stream, n_rows, n_cols, standard_normals)


def block_uniforms(seed, stream, n_rows, n_cols):
    return _block_rows(seed, stream, n_rows, n_cols, uniform_open)


def top_k_row_means(values, k):
    """Mean of the ``k`` largest entries of each row."""
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    return np.partition(values, n - k, axis=-1)[..., n - k:].mean(axis=-1)


def sample_top_k_mean(n_total, k, seed):
    """Mean of the ``k`` largest of ``n_total`` standard normal draws."""
    n_total = check_count(n_total, "n_total")
    k = check_count(k, "k")
    if k > n_total:
        raise DomainError("k must not exceed n_total")
    draws = np.atleast_1d(standard_normals(substream(seed), n_total))
    return float(top_k_row_means(draws, k))


def sample_top_k_means(n_total, k, draws, seed, stream=0):
    """``draws`` independent replicates of :func:`sample_top_k_mean`."""
    n_total = check_count(n_total, "n_total")
    k = check_count(k, "k")
    if k > n_total:
        raise DomainError("k must not exceed n_total")
    return top_k_row_means(block_normals(seed, stream, draws, n_total), k)
