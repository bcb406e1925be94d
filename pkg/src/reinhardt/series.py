"""Sparse Laurent polynomials in n variables."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .domains import AnnulusProduct, DomainError, MultiIndex, as_multi_index

PRUNE = 1e-14


@dataclass(frozen=True)
class LaurentSeries:
    """``sum_alpha c_alpha z^alpha`` over a finite support.

    Coefficients of magnitude below 1e-14 are dropped on construction so
    equal series compare equal.  ``truncation`` records how an infinite
    series was cut (keys ``max_degree`` and ``tail_bound``).
    """

    dim: int
    coeffs: Mapping[MultiIndex, complex] = field(default_factory=dict)
    convergence_hint: AnnulusProduct | None = None
    truncation: Mapping[str, float] | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("series dimension must be >= 1")
        clean = {}
        for k, v in self.coeffs.items():
            k = as_multi_index(k, self.dim)
            v = complex(v)
            if abs(v) >= PRUNE:
                clean[k] = v
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def monomial(cls, alpha, coeff: complex = 1.0) -> "LaurentSeries":
        alpha = as_multi_index(alpha)
        return cls(len(alpha), {alpha: coeff})

    @classmethod
    def constant(cls, dim: int, value: complex) -> "LaurentSeries":
        return cls(dim, {(0,) * dim: value})

    @property
    def support(self) -> list[MultiIndex]:
        return list(self.coeffs)

    def __getitem__(self, alpha) -> complex:
        return self.coeffs.get(as_multi_index(alpha, self.dim), 0j)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self.dim == other.dim and dict(self.coeffs) == dict(other.coeffs)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        if other.dim != self.dim:
            raise DomainError("cannot add series of different dimension")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0j) + v
        return LaurentSeries(self.dim, out)

    def scale(self, factor: complex) -> "LaurentSeries":
        return LaurentSeries(self.dim, {k: factor * v for k, v in self.coeffs.items()},
                             self.convergence_hint, self.truncation)

    __rmul__ = scale
    __mul__ = scale

    def conjugate_coefficients(self) -> "LaurentSeries":
        return LaurentSeries(self.dim, {k: v.conjugate() for k, v in self.coeffs.items()})

    def with_hint(self, hint: AnnulusProduct | None) -> "LaurentSeries":
        return LaurentSeries(self.dim, self.coeffs, hint, self.truncation)

    def max_abs_degree(self) -> int:
        return max((max(abs(a) for a in k) for k in self.coeffs), default=0)

    def evaluate(self, point) -> complex:
        z = [complex(x) for x in np.atleast_1d(np.asarray(point, dtype=complex))]
        if len(z) != self.dim:
            raise DomainError(f"point has dimension {len(z)}, expected {self.dim}")
        total = 0j
        for alpha, c in self.coeffs.items():
            term = c
            for zk, ak in zip(z, alpha):
                if ak < 0 and zk == 0:
                    raise ZeroDivisionError("zero coordinate with a negative exponent")
                term *= zk**ak
            total += term
        return total

    __call__ = evaluate

    # --- text format: "a_1 ... a_n re im" per line, '#' starts a comment

    def to_lines(self) -> list[str]:
        return [" ".join(map(str, k)) + f" {v.real!r} {v.imag!r}" for k, v in self.coeffs.items()]

    @classmethod
    def from_lines(cls, lines: Iterable[str], dim: int | None = None) -> "LaurentSeries":
        coeffs: dict[MultiIndex, complex] = {}
        for lineno, raw in enumerate(lines, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace("−", "-").split()
            if len(parts) < 3:
                raise DomainError(f"line {lineno}: expected 'a_1 ... a_n re im'")
            n = len(parts) - 2
            if dim is None:
                dim = n
            elif n != dim:
                raise DomainError(f"line {lineno}: {n} exponents, expected {dim}")
            try:
                alpha = tuple(int(p) for p in parts[:n])
                value = complex(float(parts[n]), float(parts[n + 1]))
            except ValueError as exc:
                raise DomainError(f"line {lineno}: {exc}") from None
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise DomainError(f"line {lineno}: non-finite coefficient")
            coeffs[alpha] = coeffs.get(alpha, 0j) + value
        if dim is None:
            raise DomainError("empty coefficient data and no dimension given")
        return cls(dim, coeffs)


evaluate = LaurentSeries.evaluate
