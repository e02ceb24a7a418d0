"""Core order-statistic machinery: samples and the power-log statistic family.

A sample of strictly positive observations is wrapped in :class:`Sample`,
which caches the descending order statistics and their logarithms (every
estimator re-reads prefixes of the sorted data for varying tail sizes ``k``).

The statistic computed by :func:`stat_g` is the mean of
``(X_(i) / X_(k+1))^r * ln(X_(i) / X_(k+1))^u`` over the ``k`` largest
observations ``X_(1) >= ... >= X_(k)``, with ``X_(k+1)`` the threshold.
Classical tail-index estimators (Hill, moment, moment ratio) and their
generalizations are all simple functions of these statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSampleError, DomainError, ParseError

# Below this magnitude of r the exact r=0 branch is used: the cancellation in
# (x^r - 1)/r destroys precision long before underflow.
SMALL_R = 1e-8


@dataclass(frozen=True)
class Sample:
    """Immutable positive-valued sample with cached descending order statistics."""

    values: np.ndarray
    sorted_desc: np.ndarray
    log_desc: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.values.size

    @classmethod
    def from_values(cls, values) -> "Sample":
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1:
            arr = arr.ravel()
        if arr.size < 3:
            raise DomainError(f"sample needs at least 3 observations, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample contains non-finite values")
        if np.any(arr <= 0.0):
            bad = float(arr[arr <= 0.0][0])
            raise DomainError(f"sample contains non-positive value {bad}; all observations must be > 0")
        desc = np.sort(arr)[::-1].copy()
        return cls(values=arr, sorted_desc=desc, log_desc=np.log(desc))

    @classmethod
    def from_file(cls, path) -> "Sample":
        """Read one numeric value per line; a non-numeric first line is a header."""
        values = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    values.append(float(line))
                except ValueError:
                    if lineno == 1 and not values:
                        continue  # header
                    raise ParseError(f"line {lineno}: not a number: {line!r}", line_number=lineno) from None
        if not values:
            raise ParseError("no numeric values found", line_number=None)
        return cls.from_values(values)

    def scaled(self, c: float) -> "Sample":
        if c <= 0:
            raise DomainError("scale factor must be > 0")
        return Sample.from_values(self.values * c)


def _check_k(n: int, k: int) -> None:
    if not (2 <= k <= n - 1):
        raise DomainError(f"k={k} outside [2, n-1] for n={n}")


def power_log(r: float, u: float, x: float) -> float:
    """Evaluate x^r * ln(x)^u for x >= 1.

    For u < 0 the point x = 1 is excluded (ln x = 0 raised to a negative power).
    """
    if x < 1.0:
        raise DomainError(f"power_log requires x >= 1, got {x}")
    lx = math.log(x)
    if u == 0:
        return x**r
    if lx == 0.0:
        if u < 0:
            raise DomainError("power_log undefined at x=1 for u < 0")
        return 0.0
    return x**r * lx**u


def _top_logs(s: Sample, k: int) -> np.ndarray:
    """Log-ratios of the k largest observations to the (k+1)-th largest.

    Computed as log of the ratio (not a difference of logs) so the statistic
    depends on the data only through ratios: rescaling the sample by an
    exactly representable factor leaves the result bit-identical.
    """
    return np.log(s.sorted_desc[:k] / s.sorted_desc[k])


def stat_g(s: Sample, k: int, r: float, u: float) -> float:
    """Mean of the power-log kernel over the top-k ratios: G_n(k, r, u).

    Ties with the threshold are legal for u >= 0 (they contribute the limit
    value of the kernel at 1); for u < 0 a tie makes the statistic undefined.
    """
    _check_k(s.n, k)
    if u <= -1:
        raise DomainError(f"u must be > -1, got {u}")
    logs = _top_logs(s, k)
    if u < 0 and np.any(logs == 0.0):
        raise DegenerateSampleError("tie with threshold makes ln^u undefined for u < 0")
    if u == 0:
        terms = np.exp(r * logs)
    else:
        terms = np.exp(r * logs) * logs**u
    return float(np.mean(terms))


def stat_h(s: Sample, k: int, r: float) -> float:
    """The power-kernel statistic centered and scaled: (G_n(k,r,0) - 1)/r.

    For |r| below :data:`SMALL_R` the continuity limit G_n(k,0,1) is returned.
    """
    if abs(r) < SMALL_R:
        return stat_g(s, k, 0.0, 1.0)
    return (stat_g(s, k, r, 0.0) - 1.0) / r


def log_moment_profile(s: Sample, ks: np.ndarray, u_max: int = 3) -> np.ndarray:
    """G_n(k, 0, u) for u = 1..u_max over many k at once.

    Returns an array of shape (len(ks), u_max). Uses prefix sums of the log
    order statistics, so a full k-sweep costs O(n) instead of O(n^2); used by
    the second-order parameter estimation sweep.
    """
    ks = np.asarray(ks, dtype=int)
    if ks.size and (ks.min() < 2 or ks.max() > s.n - 1):
        raise DomainError(f"k values outside [2, n-1] for n={s.n}")
    L = s.log_desc
    p1 = np.cumsum(L)
    p2 = np.cumsum(L**2)
    p3 = np.cumsum(L**3)
    Lk = L[ks]
    out = np.empty((ks.size, u_max))
    s1 = p1[ks - 1] - ks * Lk
    out[:, 0] = s1 / ks
    if u_max >= 2:
        s2 = p2[ks - 1] - 2.0 * Lk * p1[ks - 1] + ks * Lk**2
        out[:, 1] = s2 / ks
    if u_max >= 3:
        s3 = p3[ks - 1] - 3.0 * Lk * p2[ks - 1] + 3.0 * Lk**2 * p1[ks - 1] - ks * Lk**3
        out[:, 2] = s3 / ks
    return out
