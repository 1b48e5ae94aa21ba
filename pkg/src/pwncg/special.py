"""Log-domain special functions underpinning the distribution family.

Every function here returns natural logarithms. The densities built on top
combine gamma, Bessel, and confluent-hypergeometric factors whose linear
values overflow or underflow long before the parameter ranges of interest
are exhausted, so the linear domain is only ever entered at call sites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, ive

__all__ = [
    "SeriesControl",
    "SeriesConvergenceError",
    "DEFAULT_SERIES_CONTROL",
    "I0_SERIES_CUTOFF",
    "log_gamma",
    "log_pochhammer",
    "log_bessel_i0",
    "log_bessel_i_nu",
    "log_laguerre_neg",
    "log_laguerre_pos_arg",
]

# Crossover between the ascending series and the large-argument expansion of
# I0. At this point both branches agree to ~1e-14 relative; the series stays
# below ~6e9 so it cannot overflow, and the expansion has already converged.
I0_SERIES_CUTOFF = 25.0

# Same role for general order: below this the ascending series is cheap and
# exact; above it scipy's exponentially scaled ive is accurate and safe.
_IV_SERIES_CUTOFF = 30.0


class SeriesConvergenceError(ArithmeticError):
    """A truncated series failed to meet its tolerance within max_terms."""


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the hypergeometric-type series.

    rel_tol is the term-to-partial-sum ratio below which summation stops;
    max_terms caps the series length before giving up.
    """

    rel_tol: float = 1e-14
    max_terms: int = 10_000

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError(f"rel_tol must be in (0, 1), got {self.rel_tol}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_SERIES_CONTROL = SeriesControl()


def log_gamma(x: float) -> float:
    """ln Gamma(x) for finite x > 0."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"log_gamma requires finite x > 0, got {x}")
    return float(gammaln(x))


def log_pochhammer(a: float, n: int) -> float:
    """ln of the rising factorial (a)_n = Gamma(a+n)/Gamma(a).

    Exactly 0.0 for n = 0 (empty product).
    """
    a = float(a)
    if not math.isfinite(a) or a <= 0.0:
        raise ValueError(f"log_pochhammer requires finite a > 0, got {a}")
    n = int(n)
    if n < 0:
        raise ValueError(f"log_pochhammer requires n >= 0, got {n}")
    if n == 0:
        return 0.0
    return float(gammaln(a + n) - gammaln(a))


# Term-count table for the ascending series: _SERIES_QSTAR[k-1] is the
# largest q = (x/2)^2 for which k terms push the truncated tail below
# 1e-24 of the leading term (a generous margin that also covers the
# slightly slower decay of low-order I_nu series).
_SERIES_N = np.arange(1.0, 101.0)
_SERIES_QSTAR = np.exp((-24.0 * math.log(10.0) + 2.0 * gammaln(_SERIES_N + 1.0)) / _SERIES_N)


def _series_terms(q: np.ndarray, denom: np.ndarray) -> np.ndarray:
    """Vectorized sum over n of prod_{m<=n} (q / denom_m) for positive q.

    The term count is chosen from the largest element via the
    precomputed threshold table, so the loop over terms happens inside
    numpy (one cumprod) instead of Python.
    """
    qmax = float(q.max())
    k = int(np.searchsorted(_SERIES_QSTAR, qmax, side="left")) + 1
    k = min(k + 2, len(denom))
    ratios = q[None, :] / denom[:k, None]
    return np.cumprod(ratios, axis=0).sum(axis=0)


def _log_i0_series(x: np.ndarray) -> np.ndarray:
    """Ascending series sum_n (x/2)^(2n) / (n!)^2 summed in linear domain.

    Only valid below I0_SERIES_CUTOFF, where the sum stays far from
    overflow and at most ~60 terms are needed.
    """
    if x.size == 0:
        return np.empty_like(x)
    q = 0.25 * x * x
    return np.log1p(_series_terms(q, _SERIES_N * _SERIES_N))


def _log_i0_asymptotic(x: np.ndarray) -> np.ndarray:
    """Large-argument form ln I0(x) = x - ln(2 pi x)/2 + ln(correction).

    The correction series 1 + 1/(8x) + 9/(128 x^2) + ... reaches machine
    precision within ~20 terms for x >= I0_SERIES_CUTOFF; the smallest
    element converges last.
    """
    if x.size == 0:
        return np.empty_like(x)
    inv_min = 1.0 / float(x.min())
    term = np.ones_like(x)
    total = np.ones_like(x)
    tmax = 1.0
    for k in range(1, 40):
        coeff = (2 * k - 1) ** 2 / (8.0 * k)
        term *= coeff
        term /= x
        total += term
        tmax *= coeff * inv_min
        if tmax <= 1e-18:
            break
    return x - 0.5 * np.log(2.0 * np.pi * x) + np.log(total)


def _log_i0_unchecked(arr: np.ndarray) -> np.ndarray:
    """Branch dispatch of log_bessel_i0 without argument validation; for
    internal hot loops whose inputs are nonnegative by construction."""
    if arr.size and float(arr.max()) < I0_SERIES_CUTOFF:
        return _log_i0_series(arr)
    out = np.empty_like(arr)
    small = arr < I0_SERIES_CUTOFF
    if small.any():
        out[small] = _log_i0_series(arr[small])
    if (~small).any():
        out[~small] = _log_i0_asymptotic(arr[~small])
    return out


def log_bessel_i0(x):
    """ln I0(x) for x >= 0, overflow-safe for arbitrarily large arguments.

    Uses the ascending power series below I0_SERIES_CUTOFF and the
    asymptotic expansion above it. Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("log_bessel_i0 requires finite arguments")
    if np.any(arr < 0.0):
        raise ValueError("log_bessel_i0 requires x >= 0")
    scalar = arr.ndim == 0
    out = _log_i0_unchecked(np.atleast_1d(arr))
    return float(out[0]) if scalar else out


def _log_iv_series_linear(nu: float, x: np.ndarray) -> np.ndarray:
    """Series for ln I_nu(x) with the (x/2)^nu / Gamma(nu+1) prefactor in
    logs and the remaining 0F1-type sum in linear domain.

    The sum is bounded by I0(x)-like growth, so this is restricted to
    x < _IV_SERIES_CUTOFF.
    """
    if x.size == 0:
        return np.empty_like(x)
    q = 0.25 * x * x
    terms = _series_terms(q, _SERIES_N * (_SERIES_N + nu))
    return nu * np.log(0.5 * x) - gammaln(nu + 1.0) + np.log1p(terms)


def _log_iv_series_logdomain(nu: float, x: float, max_terms: int = 200_000) -> float:
    """Fallback ascending series accumulated fully in log domain.

    Used where ive under/overflows, which only happens when nu is large
    relative to x; there the series converges in a handful of terms.
    """
    log_half_x = math.log(0.5 * x)
    log_term = nu * log_half_x - float(gammaln(nu + 1.0))
    acc = log_term
    for n in range(1, max_terms):
        log_term += 2.0 * log_half_x - math.log(n) - math.log(n + nu)
        if log_term > acc:
            acc = log_term + math.log1p(math.exp(acc - log_term))
        else:
            acc += math.log1p(math.exp(log_term - acc))
        if log_term - acc < -40.0:
            return acc
    raise SeriesConvergenceError(
        f"I_nu series did not converge for nu={nu}, x={x} within {max_terms} terms"
    )


def log_bessel_i_nu(nu: float, x):
    """ln I_nu(x) for nu > -1 and x >= 0.

    For nu > -1 every series term is positive (Gamma(n+nu+1) > 0 for all
    n >= 0), so the ascending series is used directly for small arguments;
    no reflection through K_nu is needed anywhere on this domain. Large
    arguments go through the exponentially scaled scipy routine with a
    log-domain series fallback where that under- or overflows.
    """
    nu = float(nu)
    if not math.isfinite(nu) or nu <= -1.0:
        raise ValueError(f"log_bessel_i_nu requires nu > -1, got {nu}")
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("log_bessel_i_nu requires finite arguments")
    if np.any(arr < 0.0):
        raise ValueError("log_bessel_i_nu requires x >= 0")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr).astype(float)
    out = np.empty_like(arr)

    zero = arr == 0.0
    if zero.any():
        if nu == 0.0:
            out[zero] = 0.0
        elif nu > 0.0:
            out[zero] = -np.inf
        else:
            out[zero] = np.inf

    small = (~zero) & (arr < _IV_SERIES_CUTOFF)
    if small.any():
        out[small] = _log_iv_series_linear(nu, arr[small])

    big = (~zero) & ~small
    if big.any():
        xb = arr[big]
        scaled = ive(nu, xb)
        vals = np.empty_like(xb)
        ok = np.isfinite(scaled) & (scaled > 0.0)
        vals[ok] = np.log(scaled[ok]) + xb[ok]
        for i in np.flatnonzero(~ok):
            vals[i] = _log_iv_series_logdomain(nu, xb[i])
        out[big] = vals

    return float(out[0]) if scalar else out


def log_laguerre_neg(
    alpha: float, lam: float, control: SeriesControl = DEFAULT_SERIES_CONTROL
) -> float:
    """ln of the confluent sum  S = sum_n (alpha)_n lam^n / (n!)^2.

    This is the normalizer of the power density and of the integer mixing
    law; in the Laguerre-function convention used throughout the package it
    equals ln L_{-alpha}(lam).

    All terms are positive, so the partial sum is accumulated with a
    running log-sum-exp driven by the term recurrence
    t_{n+1} = t_n * lam * (alpha + n) / (n + 1)^2. Summation stops once the
    terms are decreasing and the last term is below rel_tol of the partial
    sum; past the term mode the decay is super-geometric, which bounds the
    discarded tail at the same order.
    """
    alpha = float(alpha)
    lam = float(lam)
    if not math.isfinite(alpha) or alpha <= 0.0:
        raise ValueError(f"log_laguerre_neg requires alpha > 0, got {alpha}")
    if not math.isfinite(lam) or lam < 0.0:
        raise ValueError(f"log_laguerre_neg requires lam >= 0, got {lam}")
    if lam == 0.0:
        return 0.0

    log_lam = math.log(lam)
    log_tol = math.log(control.rel_tol)
    log_term = 0.0
    acc = 0.0
    for n in range(control.max_terms):
        new_log_term = log_term + log_lam + math.log(alpha + n) - 2.0 * math.log1p(n)
        if new_log_term > acc:
            acc = new_log_term + math.log1p(math.exp(acc - new_log_term))
        else:
            acc += math.log1p(math.exp(new_log_term - acc))
        decreasing = new_log_term < log_term
        log_term = new_log_term
        if decreasing and log_term - acc < log_tol:
            return acc
    raise SeriesConvergenceError(
        f"Laguerre series did not converge for alpha={alpha}, lam={lam} "
        f"within {control.max_terms} terms"
    )


def log_laguerre_pos_arg(
    alpha: float, lam: float, control: SeriesControl = DEFAULT_SERIES_CONTROL
) -> float:
    """ln L_{alpha-1}(-lam), evaluated through Kummer's transformation.

    The identity L_{alpha-1}(-lam) = e^{-lam} * L_{-alpha}(lam) turns the
    sign-alternating series into one with positive terms; the alternating
    form cancels catastrophically for lam beyond ~10 and is never used.
    """
    lam = float(lam)
    return -lam + log_laguerre_neg(alpha, lam, control)
