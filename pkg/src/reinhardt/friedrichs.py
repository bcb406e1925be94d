"""The Friedrichs operator ``f -> B(conj f)`` on Reinhardt domains.

On a Reinhardt domain the Bergman projection is diagonal in the monomial
basis, so projecting a conjugate holomorphic function only reshuffles
Laurent coefficients: the output coefficient at ``alpha`` is
``c_0^2 conj(f_{-alpha}) / c_alpha^2``.  `project_conjugate_by_quadrature`
recomputes the same inner products by brute-force integration and serves as
the independent check.
"""
from __future__ import annotations

import math
import string

import numpy as np

from .domains import (AnnulusProduct, DomainError, HartogsDomain, LogProfileDomain, MultiIndex,
                      as_multi_index, index_window)
from .norms import NormTable, admissible
from .quadrature import TWO_PI, integrate_region, radial_rule
from .series import LaurentSeries


class InadmissibleSupportError(DomainError):
    """The input series uses a monomial that is not square integrable on the domain."""


def _check_support(domain, f: LaurentSeries) -> None:
    if f.dim != domain.dim:
        raise DomainError(f"series has dimension {f.dim}, domain has {domain.dim}")
    bad = [a for a in f.support if not admissible(domain, a)]
    if bad:
        raise InadmissibleSupportError(f"series has inadmissible support {bad[:5]}")


def project_conjugate(domain, f: LaurentSeries, norms: NormTable | None = None) -> LaurentSeries:
    """Bergman projection of ``conj(f)`` as a Laurent series."""
    norms = norms if norms is not None else NormTable(domain)
    zero = (0,) * domain.dim
    needed = [zero, *f.support, *(tuple(-a for a in b) for b in f.support)]
    norms.fill(needed)
    _check_support(domain, f)
    c0 = norms[zero]
    if not math.isfinite(c0):
        raise DomainError("domain has infinite volume")
    out: dict[MultiIndex, complex] = {}
    for beta, value in f.coeffs.items():
        alpha = tuple(-b for b in beta)
        ca = norms[alpha]
        if math.isinf(ca):
            continue
        out[alpha] = value.conjugate() * (c0 / ca)
    return LaurentSeries(domain.dim, out)


def friedrichs_matrix(domain, window, norms: NormTable | None = None) -> np.ndarray:
    """Matrix of the operator on the orthonormal monomials indexed by ``window``.

    Entry ``(alpha, beta)`` is ``<conj(z^beta / c_beta), z^alpha / c_alpha>``,
    nonzero only on ``beta = -alpha``.
    """
    norms = norms if norms is not None else NormTable(domain)
    window = [as_multi_index(a, domain.dim) for a in window]
    zero = (0,) * domain.dim
    norms.fill([zero, *window])
    bad = [a for a in window if not norms.admissible(a)]
    if bad:
        raise InadmissibleSupportError(f"window contains inadmissible indices {bad[:5]}")
    c0 = norms[zero]
    pos = {a: i for i, a in enumerate(window)}
    mat = np.zeros((len(window), len(window)), dtype=complex)
    for i, alpha in enumerate(window):
        j = pos.get(tuple(-a for a in alpha))
        if j is not None:
            mat[i, j] = c0 / math.sqrt(norms[alpha] * norms[window[j]])
    return mat


# ---------------------------------------------------------------------------
# quadrature oracle


def _angular_means(f: LaurentSeries, rho: np.ndarray, M: int) -> np.ndarray:
    """Fourier coefficients over the angle torus of ``f(rho e^{i theta})``.

    Returns ``F[node, m_1, ..., m_n]`` = mean of ``f * exp(-i m . theta)``,
    computed from samples on an ``M^n`` grid with an FFT.
    """
    n = f.dim
    N = len(rho)
    if not f.coeffs:
        return np.zeros((N,) + (M,) * n, dtype=complex)
    support = np.array(f.support)
    lo = support.min(axis=0)
    hi = support.max(axis=0)
    dense = np.zeros(tuple(hi - lo + 1), dtype=complex)
    for alpha, v in f.coeffs.items():
        dense[tuple(np.array(alpha) - lo)] += v
    theta = TWO_PI * np.arange(M) / M
    factors = []
    for k in range(n):
        exps = np.arange(lo[k], hi[k] + 1)
        # (node, angle, exponent)
        radial = rho[:, k:k + 1] ** exps[None, :]
        phase = np.exp(1j * np.outer(theta, exps))
        factors.append(radial[:, None, :] * phase[None, :, :])
    letters = string.ascii_letters
    ang = letters[1:1 + n]
    exp = letters[1 + n:1 + 2 * n]
    spec = ",".join(f"a{ang[k]}{exp[k]}" for k in range(n)) + f",{exp}->a{ang}"
    samples = np.einsum(spec, *factors, dense, optimize=True)
    return np.fft.fftn(samples, axes=tuple(range(1, n + 1))) / M**n


def _oracle_terms(f, alphas, rho, M):
    """Per-node integrands (before radial weights) of numerator and denominator."""
    F = _angular_means(f, rho, M)
    A = np.array(alphas)
    idx = (slice(None),) + tuple((-A[:, k]) % M for k in range(f.dim))
    # F at frequency -alpha: mean of f * z^alpha / rho^alpha
    coef = F[idx]
    powers = np.prod(rho[:, None, :] ** A[None, :, :], axis=-1)
    num = np.conj(powers * coef)
    den = powers * powers
    return num, den


def project_conjugate_by_quadrature(domain, f: LaurentSeries, degree_cap: int,
                                    radial_nodes: int | None = None) -> LaurentSeries:
    """Independent check of `project_conjugate` by numerical integration.

    For every admissible ``alpha`` with ``max|alpha_k| <= degree_cap`` the inner
    product ``<conj f, z^alpha>`` and the norm ``c_alpha^2`` are both computed
    numerically: a trapezoid rule on the angle torus (exact once it resolves
    all frequencies) times a Gauss-Legendre rule in the moduli.
    """
    _check_support(domain, f)
    n = domain.dim
    alphas = [a for a in index_window(n, degree_cap) if admissible(domain, a)]
    M = 2 * (f.max_abs_degree() + degree_cap) + 2
    if isinstance(domain, (AnnulusProduct, HartogsDomain)):
        nodes = radial_nodes or (48 if isinstance(domain, AnnulusProduct) else 40)
        rho, w = radial_rule(domain, nodes)
        out = {}
        for chunk in _chunks(alphas, 64):
            num, den = _oracle_terms(f, chunk, rho, M)
            numer = TWO_PI**n * (w @ num)
            denom = TWO_PI**n * (w @ den)
            out.update({a: numer[i] / denom[i] for i, a in enumerate(chunk)})
        return LaurentSeries(n, out)
    if isinstance(domain, LogProfileDomain):
        K = len(alphas)
        A = np.array(alphas, dtype=float)

        def sizes(t):
            # Parseval: angular mean of |f|^2 is the sum of |Fourier coefficients|^2
            F = _angular_means(f, np.exp(t), M)
            l2 = np.sum(np.abs(F.reshape(len(t), -1)) ** 2, axis=1)[:, None]
            return np.exp(2.0 * t.sum(axis=-1))[:, None] * np.concatenate(
                [np.exp(2.0 * t @ A.T), l2], axis=1)

        rough = integrate_region(domain, sizes, rtol=1e-6).value
        den_scale, f_norm = rough[:K], rough[K]
        scale = np.concatenate([np.sqrt(den_scale * f_norm), den_scale])

        def integrand(t):
            num, den = _oracle_terms(f, alphas, np.exp(t), M)
            jac = np.exp(2.0 * t.sum(axis=-1))[:, None]
            return np.concatenate([num * jac, den * jac], axis=1)

        res = integrate_region(domain, integrand, rtol=1e-12, scale=scale)
        numer, denom = res.value[:K], res.value[K:].real
        return LaurentSeries(n, {a: numer[i] / denom[i] for i, a in enumerate(alphas)})
    raise TypeError(f"unsupported domain {type(domain).__name__}")


def _chunks(seq, size):
    for i in range(0, len(seq), size):
        yield seq[i:i + size]
