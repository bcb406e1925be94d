"""Squared L^2 norms of Laurent monomials, ``c_alpha^2 = int |z^alpha|^2 dV``.

Closed forms cover annulus products and fat Hartogs triangles; log-profile
domains go through region quadrature.  ``math.inf`` marks a monomial that is
not square integrable, which is data rather than an error.
"""
from __future__ import annotations

import csv
import io
import math
import threading
from typing import Iterable

import numpy as np

from .domains import (AnnulusProduct, DomainError, HartogsDomain, LogProfileDomain, MultiIndex,
                      as_multi_index)
from .quadrature import TWO_PI, QuadratureError, integrate_region

LOG_TWO_PI = math.log(TWO_PI)
QUADRATURE_INDEX_LIMIT = 500

CLOSED_FORM = "closed-form"
QUADRATURE = "quadrature"


def norm_sq_annulus_1d(j: int, r: float, R: float) -> float:
    """``2 pi int_r^R rho^(2j+1) d(rho)``; infinite for ``r = 0`` and ``j <= -1``."""
    if not (0.0 <= r < R):
        raise DomainError(f"need 0 <= r < R, got r={r}, R={R}")
    return math.exp(log_norm_sq_annulus_1d(j, r, R))


def log_norm_sq_annulus_1d(j: int, r: float, R: float) -> float:
    """Natural log of `norm_sq_annulus_1d`, stable for large ``|j|``."""
    if not (0.0 <= r < R):
        raise DomainError(f"need 0 <= r < R, got r={r}, R={R}")
    m = 2 * int(j) + 2
    if r == 0.0:
        if m <= 0:
            return math.inf
        return LOG_TWO_PI + m * math.log(R) - math.log(m)
    if m == 0:
        return LOG_TWO_PI + math.log(math.log(R / r))
    if m > 0:
        return LOG_TWO_PI + m * math.log(R) + math.log(-math.expm1(m * math.log(r / R))) - math.log(m)
    return LOG_TWO_PI + m * math.log(r) + math.log(-math.expm1(m * math.log(R / r))) - math.log(-m)


def log_norm_sq_annulus(P: AnnulusProduct, alpha) -> float:
    alpha = as_multi_index(alpha, P.dim)
    return math.fsum(log_norm_sq_annulus_1d(a, r, R) for a, (r, R) in zip(alpha, P.radii))


def hartogs_admissible(gamma: float, alpha: MultiIndex) -> bool:
    j, k = alpha
    return j >= 0 and 2 * k + 2 + (2 * j + 2) / gamma > 0


def norm_sq_hartogs(gamma: float, alpha: MultiIndex) -> float:
    """Iterated radial integral over ``|z|^gamma < |w| < 1``.

    Inner: ``int_0^{s^(1/gamma)} rho^(2j+1) = s^((2j+2)/gamma) / (2j+2)``;
    outer: ``int_0^1 s^(2k+1+(2j+2)/gamma) ds``.
    """
    if not hartogs_admissible(gamma, alpha):
        return math.inf
    j, k = alpha
    return TWO_PI**2 / ((2 * j + 2) * (2 * k + 2 + (2 * j + 2) / gamma))


def norm_sq_log_profile(domain: LogProfileDomain, alpha: MultiIndex, rtol: float = 1e-11) -> float:
    """``(2 pi)^n int exp(sum (2 alpha_k + 2) t_k) dt`` over the log profile."""
    if max(abs(a) for a in alpha) > QUADRATURE_INDEX_LIMIT:
        raise DomainError(f"|alpha_k| > {QUADRATURE_INDEX_LIMIT} refused in quadrature mode")
    a = 2.0 * np.asarray(alpha, float) + 2.0
    lo, hi = domain.bounding_box
    shift = float(np.sum(np.maximum(a * lo, a * hi)))
    res = integrate_region(domain, lambda t: np.exp(t @ a - shift), rtol=rtol)
    value = float(res.value[0])
    if not value > 0:
        raise QuadratureError("non-positive monomial integral", value, res.error)
    log_value = domain.dim * LOG_TWO_PI + math.log(value) + shift
    try:
        return math.exp(log_value)
    except OverflowError:
        raise QuadratureError(f"norm of z^{alpha} overflows double precision (log = {log_value:.1f})") from None


def norm_sq(domain, alpha) -> float:
    alpha = as_multi_index(alpha, domain.dim)
    if isinstance(domain, AnnulusProduct):
        return math.exp(log_norm_sq_annulus(domain, alpha))
    if isinstance(domain, HartogsDomain):
        return norm_sq_hartogs(domain.gamma, alpha)
    if isinstance(domain, LogProfileDomain):
        return norm_sq_log_profile(domain, alpha)
    raise TypeError(f"unsupported domain {type(domain).__name__}")


def admissible(domain, alpha) -> bool:
    alpha = as_multi_index(alpha, domain.dim)
    if isinstance(domain, AnnulusProduct):
        return all(a >= 0 or r > 0 for a, (r, _) in zip(alpha, domain.radii))
    if isinstance(domain, HartogsDomain):
        return hartogs_admissible(domain.gamma, alpha)
    if isinstance(domain, LogProfileDomain):
        # closure is off the axes: every Laurent monomial is bounded there
        return True
    raise TypeError(f"unsupported domain {type(domain).__name__}")


class NormTable:
    """Memoised ``alpha -> c_alpha^2`` for one domain.

    Concurrent fills are harmless: a key always maps to the same value.
    """

    def __init__(self, domain):
        self.domain = domain
        self._values: dict[MultiIndex, float] = {}
        self._methods: dict[MultiIndex, str] = {}
        self._lock = threading.Lock()

    def __getitem__(self, alpha) -> float:
        alpha = as_multi_index(alpha, self.domain.dim)
        value = self._values.get(alpha)
        if value is None:
            value = norm_sq(self.domain, alpha)
            with self._lock:
                self._values.setdefault(alpha, value)
                self._methods.setdefault(alpha, self._method_for())
            value = self._values[alpha]
        return value

    def _method_for(self) -> str:
        return QUADRATURE if isinstance(self.domain, LogProfileDomain) else CLOSED_FORM

    def method(self, alpha) -> str:
        alpha = as_multi_index(alpha, self.domain.dim)
        self[alpha]
        return self._methods[alpha]

    def admissible(self, alpha) -> bool:
        return math.isfinite(self[alpha])

    def fill(self, alphas: Iterable) -> None:
        """Compute many entries; log-profile entries share one quadrature pass."""
        alphas = [as_multi_index(a, self.domain.dim) for a in alphas]
        missing = [a for a in alphas if a not in self._values]
        if not missing:
            return
        if isinstance(self.domain, LogProfileDomain) and len(missing) > 1:
            for a, v in zip(missing, _batch_log_profile(self.domain, missing)):
                with self._lock:
                    self._values.setdefault(a, v)
                    self._methods.setdefault(a, QUADRATURE)
        else:
            for a in missing:
                self[a]

    def items(self):
        return sorted(self._values.items())

    def to_csv(self, alphas: Iterable | None = None) -> str:
        if alphas is not None:
            self.fill(alphas)
            keys = sorted(as_multi_index(a, self.domain.dim) for a in alphas)
        else:
            keys = sorted(self._values)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"alpha_{k + 1}" for k in range(self.domain.dim)] + ["norm_sq", "method"])
        for a in keys:
            v = self[a]
            writer.writerow([*a, "inf" if math.isinf(v) else repr(v), self._methods[a]])
        return buf.getvalue()


def _batch_log_profile(domain: LogProfileDomain, alphas: list[MultiIndex]) -> list[float]:
    if max(max(abs(x) for x in a) for a in alphas) > QUADRATURE_INDEX_LIMIT:
        raise DomainError(f"|alpha_k| > {QUADRATURE_INDEX_LIMIT} refused in quadrature mode")
    a = 2.0 * np.asarray(alphas, float) + 2.0
    lo, hi = domain.bounding_box
    shift = np.sum(np.maximum(a * lo, a * hi), axis=-1)
    res = integrate_region(domain, lambda t: np.exp(t @ a.T - shift))
    logs = domain.dim * LOG_TWO_PI + np.log(res.value) + shift
    return [math.exp(x) for x in logs]
