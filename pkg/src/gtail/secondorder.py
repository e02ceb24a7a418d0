"""Data-driven second-order parameter estimation and the adaptive pipeline.

The adaptive route to a tail index estimate runs five steps:

1. estimate the second-order parameter rho from a high-k sweep of three
   log-moment statistics;
2. estimate the Hall-class scale beta at the same k;
3. plug (rho_hat, beta_hat) into the closed-form AMSE-optimal tail size and
   compute the classical estimate (Hill for j = 1, moment ratio for j = 3);
4. compute the optimal scaled tuning R*_j(rho_hat) and divide by the
   classical estimate to get the tuning r;
5. recompute the optimal tail size for the tuned estimator and evaluate it.

The published description of the sweep leaves the choice of k and of the
tuning exponent tau to an external algorithm; here rho_hat(k, tau) is
evaluated for k in the window [n^0.90, n^0.995] for tau in {0, 1}, the tau
whose path has the smaller interquartile range wins, and the path median is
reported.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import estimators
from .asymptotics import r_star
from .errors import DegenerateSampleError, DomainError, PipelineError
from .estimators import Estimate
from .stats import Sample, log_moment_profile, stat_g

#: rho estimates below this are clamped (with a warning): more negative values
#: make the (i/k)^(-rho) power sums in beta_hat explode.
RHO_FLOOR = -25.0
#: rho estimates are kept strictly negative.
RHO_CEILING = -1e-6

_K_WINDOW_LOW = 0.90
_K_WINDOW_HIGH = 0.995


@dataclass(frozen=True)
class RhoEstimate:
    rho_hat: float
    tau: int
    k_used: int
    path: list  # (k, rho_hat(k, tau)) pairs at the chosen tau


@dataclass(frozen=True)
class BetaEstimate:
    beta_hat: float
    k_used: int

    @property
    def near_zero(self) -> bool:
        return abs(self.beta_hat) < 1e-6


def _t_statistic(m1, m2, m3, tau: int):
    """The three-moment contrast whose distance from 3 encodes rho (array-safe)."""
    if tau == 0:
        num = np.log(m1) - 0.5 * np.log(m2)
        den = 0.5 * np.log(m2) - np.log(m3) / 3.0
    elif tau > 0:
        num = m1**tau - m2 ** (tau / 2.0)
        den = m2 ** (tau / 2.0) - m3 ** (tau / 3.0)
    else:
        raise DomainError(f"tau must be 0 or a positive integer, got {tau}")
    return num, den


def rho_hat(s: Sample, k: int, tau: int) -> float:
    """Second-order parameter estimate -|3(T-1)/(T-3)| at a single k."""
    m1 = stat_g(s, k, 0.0, 1.0)
    m2 = stat_g(s, k, 0.0, 2.0) / 2.0
    m3 = stat_g(s, k, 0.0, 3.0) / 6.0
    if m1 <= 0.0 or m2 <= 0.0 or m3 <= 0.0:
        raise DegenerateSampleError(f"non-positive log-moment statistic at k={k}")
    num, den = _t_statistic(m1, m2, m3, tau)
    if den == 0.0:
        raise DegenerateSampleError(f"degenerate moment contrast (zero denominator) at k={k}")
    t = num / den
    if t == 3.0:
        raise DegenerateSampleError(f"degenerate moment contrast (T = 3) at k={k}")
    return -abs(3.0 * (t - 1.0) / (t - 3.0))


def _rho_path(s: Sample, ks: np.ndarray, tau: int) -> np.ndarray:
    """Vectorized rho_hat over many k; invalid entries become NaN."""
    prof = log_moment_profile(s, ks, u_max=3)
    m1, m2, m3 = prof[:, 0], prof[:, 1] / 2.0, prof[:, 2] / 6.0
    ok = (m1 > 0) & (m2 > 0) & (m3 > 0)
    out = np.full(ks.size, np.nan)
    if not np.any(ok):
        return out
    with np.errstate(divide="ignore", invalid="ignore"):
        num, den = _t_statistic(m1[ok], m2[ok], m3[ok], tau)
        t = num / den
        vals = -np.abs(3.0 * (t - 1.0) / (t - 3.0))
    vals[~np.isfinite(vals)] = np.nan
    out[ok] = vals
    return out


def _k_window(n: int) -> np.ndarray:
    lo = max(2, int(n**_K_WINDOW_LOW))
    hi = min(n - 1, int(n**_K_WINDOW_HIGH))
    if hi < lo:
        hi = lo
    return np.arange(lo, hi + 1)


def estimate_rho(s: Sample) -> RhoEstimate:
    """Sweep rho_hat over the high-k window, pick the more stable tau by
    interquartile range, and report the path median (clamped to stay in
    [RHO_FLOOR, RHO_CEILING])."""
    ks = _k_window(s.n)
    best = None
    for tau in (0, 1):
        path = _rho_path(s, ks, tau)
        valid = np.isfinite(path)
        if not np.any(valid):
            continue
        vals = path[valid]
        q1, q3 = np.percentile(vals, [25.0, 75.0])
        iqr = q3 - q1
        if best is None or iqr < best[0]:
            best = (iqr, tau, ks[valid], vals)
    if best is None:
        raise DegenerateSampleError("rho estimation degenerate over the whole k window")
    _, tau, kvals, vals = best
    rho = float(np.median(vals))
    if rho < RHO_FLOOR:
        warnings.warn(f"rho estimate {rho:.2f} clamped to {RHO_FLOOR}", stacklevel=2)
        rho = RHO_FLOOR
    if rho > RHO_CEILING:
        rho = RHO_CEILING
    k_used = min(s.n - 1, int(s.n**_K_WINDOW_HIGH))
    return RhoEstimate(rho, tau, k_used, list(zip(kvals.tolist(), vals.tolist())))


def beta_hat(s: Sample, k: int, rho: float) -> float:
    """Hall-class beta estimate from weighted scaled log-spacings.

    Power weights (i/k)^(-rho) and the prefactor (k/n)^rho are taken through
    exp/log so that strongly negative rho stays finite.
    """
    if not rho < 0:
        raise DomainError(f"rho must be < 0, got {rho}")
    if not (2 <= k <= s.n - 1):
        raise DomainError(f"k={k} outside [2, n-1] for n={s.n}")
    i = np.arange(1, k + 1, dtype=float)
    # i-th scaled log-spacing of consecutive descending order statistics;
    # log of the ratio keeps the estimate exactly scale-free
    w = i * np.log(s.sorted_desc[: k] / s.sorted_desc[1: k + 1])
    x = np.exp(-rho * np.log(i / k))
    a1 = np.mean(x)
    a2 = np.mean(w)
    a3 = np.mean(x * w)
    a4 = np.mean(x * x * w)
    den = a1 * a3 - a4
    if den == 0.0:
        raise DegenerateSampleError("beta estimation degenerate (zero denominator)")
    prefactor = math.exp(rho * math.log(k / s.n))
    return prefactor * (a1 * a2 - a3) / den


def estimate_beta(s: Sample, rho: RhoEstimate) -> BetaEstimate:
    """Beta at the same k the rho sweep used."""
    b = beta_hat(s, rho.k_used, rho.rho_hat)
    return BetaEstimate(b, rho.k_used)


def adaptive_k(n: int, rho: float, beta: float, j: int, generalized: bool) -> int:
    """Plug-in AMSE-optimal tail size, rounded and clamped to [2, n-1].

    These are the printed specializations of the generic optimum for the
    classical (r = 0) and optimally tuned routes of estimators 1 and 3.
    """
    if not rho < 0:
        raise DomainError(f"rho must be < 0, got {rho}")
    if beta == 0.0:
        raise DomainError("beta must be nonzero")
    if j == 1:
        if generalized:
            R = r_star(rho, 1)
            base = (1.0 - rho - R) ** 2 / (-2.0 * rho * beta**2 * (1.0 - 2.0 * R))
        else:
            base = (1.0 - rho) ** 2 / (-2.0 * rho * beta**2)
    elif j == 3:
        if generalized:
            R = r_star(rho, 3)
            base = (1.0 - rho - R) ** 4 / (-rho * beta**2 * (1.0 - 2.0 * R) ** 3)
        else:
            base = (1.0 - rho) ** 4 / (-rho * beta**2)
    else:
        raise DomainError(f"adaptive tail size defined for j in {{1, 3}}, got {j}")
    ln_k = math.log(base) / (1.0 - 2.0 * rho) - 2.0 * rho / (1.0 - 2.0 * rho) * math.log(n)
    k = int(round(math.exp(ln_k)))
    return min(max(k, 2), n - 1)


@dataclass(frozen=True)
class AdaptiveResult:
    classical: Estimate
    generalized: Estimate
    rho: RhoEstimate
    beta: BetaEstimate
    r_generalized: float


def _classical(s: Sample, k: int, j: int) -> Estimate:
    return estimators.g1(s, k, 0.0) if j == 1 else estimators.g3(s, k, 0.0)


def _generalized(s: Sample, k: int, r: float, j: int) -> Estimate:
    return estimators.g1(s, k, r) if j == 1 else estimators.g3(s, k, r)


def adaptive_estimate(s: Sample, j: int) -> AdaptiveResult:
    """Run the five-step adaptive pipeline for estimator j in {1, 3}.

    Any failing step aborts with a PipelineError naming the step.
    """
    if j not in (1, 3):
        raise DomainError(f"adaptive pipeline defined for j in {{1, 3}}, got {j}")
    if s.n < 100:
        raise DomainError(f"adaptive pipeline needs n >= 100, got {s.n}")
    rho, beta = _estimate_second_order(s)
    return _adaptive_from_second_order(s, j, rho, beta)


def adaptive_all(s: Sample) -> dict[int, AdaptiveResult]:
    """Both adaptive pipelines (j = 1 and j = 3) sharing one rho/beta step."""
    if s.n < 100:
        raise DomainError(f"adaptive pipeline needs n >= 100, got {s.n}")
    rho, beta = _estimate_second_order(s)
    return {j: _adaptive_from_second_order(s, j, rho, beta) for j in (1, 3)}


def _estimate_second_order(s: Sample) -> tuple[RhoEstimate, BetaEstimate]:
    try:
        rho = estimate_rho(s)
    except Exception as exc:
        raise PipelineError("rho", str(exc)) from exc
    try:
        beta = estimate_beta(s, rho)
    except Exception as exc:
        raise PipelineError("beta", str(exc)) from exc
    if beta.beta_hat == 0.0:
        raise PipelineError("beta", "beta estimate is exactly zero")
    return rho, beta


def _adaptive_from_second_order(s: Sample, j: int, rho: RhoEstimate,
                                beta: BetaEstimate) -> AdaptiveResult:
    try:
        k_c = adaptive_k(s.n, rho.rho_hat, beta.beta_hat, j, generalized=False)
    except Exception as exc:
        raise PipelineError("k_classical", str(exc)) from exc
    try:
        classical = _classical(s, k_c, j)
    except Exception as exc:
        raise PipelineError("classical", str(exc)) from exc
    try:
        if classical.gamma_hat <= 0.0:
            raise DegenerateSampleError(f"classical estimate {classical.gamma_hat} is not positive")
        r = r_star(rho.rho_hat, j) / classical.gamma_hat
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError("r_star", str(exc)) from exc
    try:
        k_g = adaptive_k(s.n, rho.rho_hat, beta.beta_hat, j, generalized=True)
    except Exception as exc:
        raise PipelineError("k_generalized", str(exc)) from exc
    try:
        generalized = _generalized(s, k_g, r, j)
    except Exception as exc:
        raise PipelineError("generalized", str(exc)) from exc
    return AdaptiveResult(classical, generalized, rho, beta, r)
