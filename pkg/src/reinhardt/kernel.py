"""Truncated Bergman kernel ``sum z^alpha conj(w^alpha) / c_alpha^2``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .domains import DomainError, MultiIndex, _point, index_window
from .norms import NormTable
from .quadrature import moments_by_quadrature
from .series import LaurentSeries


@dataclass(frozen=True)
class QuadratureSpec:
    """Radial Gauss-Legendre nodes per coordinate; angular integrals are exact."""

    nodes: int = 200
    rtol: float = 1e-12


class TruncatedKernel:
    """Partial Bergman kernel over admissible ``alpha`` with ``max|alpha_k| <= N``."""

    def __init__(self, domain, N: int, norms: NormTable | None = None):
        if N < 0:
            raise DomainError("truncation degree must be non-negative")
        self.domain = domain
        self.N = N
        self.norms = norms if norms is not None else NormTable(domain)

    @cached_property
    def _table(self) -> tuple[list[MultiIndex], np.ndarray, np.ndarray]:
        window = index_window(self.domain.dim, self.N)
        self.norms.fill(window)
        keep = [a for a in window if math.isfinite(self.norms[a])]
        exps = np.array(keep, dtype=int).reshape(len(keep), self.domain.dim)
        inv = np.array([1.0 / self.norms[a] for a in keep])
        return keep, exps, inv

    @property
    def indices(self) -> list[MultiIndex]:
        return self._table[0]

    def monomials(self, z) -> np.ndarray:
        z = _point(z, self.domain.dim).astype(complex)
        _, exps, _ = self._table
        if np.any((z == 0) & np.any(exps < 0, axis=0)):
            raise ZeroDivisionError("zero coordinate with a negative exponent in the window")
        return np.prod(z[None, :] ** exps, axis=1)

    def __call__(self, z, w) -> complex:
        return kernel_eval(self, z, w)


def kernel_eval(K: TruncatedKernel, z, w) -> complex:
    """Hermitian: ``kernel_eval(K, w, z) == conj(kernel_eval(K, z, w))`` exactly."""
    p = K.monomials(z)
    q = p if np.array_equal(np.asarray(z), np.asarray(w)) else K.monomials(w)
    inv = K._table[2]
    # p conj(q) spelled out so swapping z and w negates the imaginary part bit for bit
    re = (p.real * q.real + p.imag * q.imag) * inv
    im = (p.imag * q.real - p.real * q.imag) * inv
    return complex(math.fsum(re), math.fsum(im))


def reproducing_check(K: TruncatedKernel, f: LaurentSeries, z,
                      quadrature_spec: QuadratureSpec | None = None) -> float:
    """``|int K(z, w) f(w) dV(w) - f(z)|``.

    Orthogonality of the angular parts leaves, for each window index in
    ``supp f``, ``f_alpha z^alpha m_alpha / c_alpha^2`` with ``m_alpha`` the
    radial moment computed by quadrature.
    """
    spec = quadrature_spec or QuadratureSpec()
    if f.dim != K.domain.dim:
        raise DomainError("series and kernel dimensions differ")
    z = _point(z, K.domain.dim).astype(complex)
    in_window = set(K.indices)
    kept = [a for a in f.support if a in in_window]
    total = 0j
    if kept:
        moments = moments_by_quadrature(K.domain, kept, nodes=spec.nodes, rtol=spec.rtol)
        for a, m in zip(kept, moments):
            zpow = complex(np.prod(z ** np.array(a)))
            total += f[a] * zpow * (m / K.norms[a])
    return abs(total - f.evaluate(z))
