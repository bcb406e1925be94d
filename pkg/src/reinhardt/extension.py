"""Extension annuli for projections of conjugate holomorphic functions.

For a single annulus ``A(r, R)`` the projection extends to any
``A(r', R')`` with ``r^2/R < r' < R' < R^2/r``.  The comparison ratio

    e_alpha^2 / (d_alpha^4 d_{-alpha}^2)

(``d`` norms on ``P``, ``e`` norms on ``P'``) must stay bounded in ``alpha``;
per coordinate and for ``|j| >= 2`` it equals exactly

    (j^2 - 1) / pi^2 * q^|j| * K * corr(j),    corr(j) -> 1 geometrically,

which gives both the decay base ``q`` and a rigorous bound on the tail.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .domains import (AnnulusProduct, DomainError, HartogsDomain, MultiIndex,
                      as_multi_index)
from .norms import NormTable, log_norm_sq_annulus_1d
from .series import LaurentSeries

SLOPE_FLOOR = 1e-9


class TouchesAxesError(DomainError):
    """Extension is only guaranteed when the closure stays off the coordinate axes."""


@dataclass(frozen=True)
class ExtensionWindow:
    window: tuple[tuple[float, float], ...]
    chosen: tuple[tuple[float, float], ...]

    def contains(self, radii) -> bool:
        return all(lo < r < R < hi for (lo, hi), (r, R) in zip(self.window, radii))


def extension_window(P: AnnulusProduct) -> tuple[tuple[float, float], ...]:
    if isinstance(P, HartogsDomain) or P.touches_axes:
        raise TouchesAxesError("domain closure meets a coordinate axis; no extension window")
    return tuple((r * r / R, R * R / r) for r, R in P.radii)


def extension_product(P: AnnulusProduct, reach: float = 0.5) -> tuple[AnnulusProduct, ExtensionWindow]:
    """Pick ``P'`` inside the window at log-fraction ``reach`` from ``P`` to the window edge.

    ``reach = 1/2`` is the log-midpoint: ``log r' = (log(r^2/R) + log r) / 2``.
    """
    if not 0.0 < reach < 1.0:
        raise ValueError("reach must lie strictly between 0 and 1")
    window = extension_window(P)
    chosen = []
    for r, R in P.radii:
        gap = math.log(R / r)
        chosen.append((math.exp(math.log(r) - reach * gap), math.exp(math.log(R) + reach * gap)))
    chosen = tuple(chosen)
    return AnnulusProduct(chosen), ExtensionWindow(window, chosen)


# ---------------------------------------------------------------------------
# comparison ratio


def log_ratio_1d(j, r, R, r_ext, R_ext) -> float:
    return (log_norm_sq_annulus_1d(j, r_ext, R_ext)
            - 2.0 * log_norm_sq_annulus_1d(j, r, R)
            - log_norm_sq_annulus_1d(-j, r, R))


def _log_ratio_table(P: AnnulusProduct, P_ext: AnnulusProduct, cap: int) -> np.ndarray:
    """Per-coordinate log ratios for ``j = -cap .. cap``; shape ``(n, 2 cap + 1)``."""
    js = range(-cap, cap + 1)
    return np.array([[log_ratio_1d(j, r, R, re, Re) for j in js]
                     for (r, R), (re, Re) in zip(P.radii, P_ext.radii)])


def comp_estimate_ratio(P: AnnulusProduct, P_ext: AnnulusProduct, alpha,
                        norms: tuple[NormTable, NormTable] | None = None) -> float:
    """``e_alpha^2 / (d_alpha^4 d_{-alpha}^2)``; may be ``inf`` on overflow."""
    alpha = as_multi_index(alpha, P.dim)
    if norms is not None:
        d_tab, e_tab = norms
        neg = tuple(-a for a in alpha)
        return e_tab[alpha] / (d_tab[alpha] ** 2 * d_tab[neg])
    log_r = math.fsum(log_ratio_1d(a, r, R, re, Re)
                      for a, (r, R), (re, Re) in zip(alpha, P.radii, P_ext.radii))
    return math.exp(log_r) if log_r < 709.0 else math.inf


@dataclass(frozen=True)
class DecayBackstop:
    """Closed-form tail model for one coordinate.

    ``base_pos``/``base_neg`` are the geometric bases of the ratio for
    ``j -> +inf`` and ``j -> -inf``; ``tail_bound`` is a rigorous upper bound
    for the ratio over ``|j| > start`` (``inf`` when a base is >= 1).
    """

    base_pos: float
    base_neg: float
    tail_bound: float
    start: int


def _sup_poly_geometric(q: float, j0: int) -> float:
    """``sup_{j >= j0} (j^2 - 1) q^j`` for ``0 < q < 1``; the sequence is log-concave."""
    L = -math.log(q)
    jstar = 1.0 / L + math.sqrt(1.0 / L**2 + 1.0)
    cands = {j0, max(j0, math.floor(jstar)), max(j0, math.ceil(jstar))}
    return max((j * j - 1) * q**j for j in cands)


def decay_backstop(r: float, R: float, r_ext: float, R_ext: float, start: int) -> DecayBackstop:
    if start < 2:
        raise ValueError("the closed-form tail holds for |j| >= 2")
    base_pos = (R_ext * r / (R * R)) ** 2
    base_neg = (r * r / (r_ext * R)) ** 2
    if base_pos >= 1.0 or base_neg >= 1.0 or r_ext >= r or R_ext <= R:
        return DecayBackstop(base_pos, base_neg, math.inf, start)
    x2 = (r / R) ** 2
    corr = 1.0 / ((1.0 - x2**3) ** 2 * (1.0 - x2))
    k_pos = (R_ext / (R * R)) ** 2 / (r * r)
    k_neg = (r_ext / (r * r)) ** 2 / (R * R)
    j0 = start + 1
    bound = corr / math.pi**2 * max(k_pos * _sup_poly_geometric(base_pos, j0),
                                    k_neg * _sup_poly_geometric(base_neg, j0))
    return DecayBackstop(base_pos, base_neg, bound, start)


@dataclass(frozen=True)
class Certificate:
    passed: bool
    sup_ratio: float
    argmax: MultiIndex
    tail_slope: float
    degree_cap: int
    radii: tuple[tuple[float, float], ...]
    extension_radii: tuple[tuple[float, float], ...]
    tail_slopes: tuple[tuple[float, float], ...] = field(default=())
    backstops: tuple[DecayBackstop, ...] = field(default=())
    rigorous_bound: float = math.inf

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "sup_ratio": _json_float(self.sup_ratio),
            "argmax": list(self.argmax),
            "tail_slope": _json_float(self.tail_slope),
            "degree_cap": self.degree_cap,
            "radii": [list(p) for p in self.radii],
            "extension_radii": [list(p) for p in self.extension_radii],
            "tail_slopes": [list(map(_json_float, s)) for s in self.tail_slopes],
            "decay_bases": [[b.base_neg, b.base_pos] for b in self.backstops],
            "rigorous_bound": _json_float(self.rigorous_bound),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _json_float(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")


def tail_slopes(table_row: np.ndarray, cap: int) -> tuple[float, float]:
    """Least-squares slopes of ``log ratio - log(s^2 - 1)`` over the last ten ``|j|``.

    Returned as (negative side, positive side); ``exp(slope)`` estimates the
    geometric decay base.
    """
    s = np.arange(max(2, cap - 10), cap + 1)
    prefactor = np.log(s.astype(float) ** 2 - 1.0)
    pos = table_row[cap + s] - prefactor
    neg = table_row[cap - s] - prefactor
    return float(np.polyfit(s, neg, 1)[0]), float(np.polyfit(s, pos, 1)[0])


def certify_extension(P: AnnulusProduct, P_ext: AnnulusProduct, degree_cap: int = 60) -> Certificate:
    """Sweep the comparison ratio over ``max|alpha_k| <= degree_cap``.

    Passes when the swept supremum is finite and every coordinate's tail
    decays geometrically (slope below ``-SLOPE_FLOOR``, a margin above
    rounding noise).
    """
    if degree_cap < 10:
        raise ValueError("degree_cap must be at least 10")
    if P.dim != P_ext.dim:
        raise DomainError("P and P' differ in dimension")
    if P.touches_axes or P_ext.touches_axes:
        raise TouchesAxesError("annuli must have positive inner radii")
    table = _log_ratio_table(P, P_ext, degree_cap)
    n = P.dim
    total = table[0]
    for k in range(1, n):
        total = np.add.outer(total, table[k])
    flat = int(np.argmax(total))
    pos = np.unravel_index(flat, total.shape) if n > 1 else (flat,)
    argmax = tuple(int(p) - degree_cap for p in pos)
    log_sup = float(total.reshape(-1)[flat])
    sup = math.exp(log_sup) if log_sup < 709.0 else math.inf

    slopes = tuple(tail_slopes(row, degree_cap) for row in table)
    tail_slope = max(max(s) for s in slopes)
    backstops = tuple(decay_backstop(r, R, re, Re, degree_cap)
                      for (r, R), (re, Re) in zip(P.radii, P_ext.radii))
    # sup beyond the window: one coordinate in its tail, the rest anywhere
    row_max = np.exp(np.max(table, axis=1))
    glob = [max(m, b.tail_bound) for m, b in zip(row_max, backstops)]
    rigorous = max(sup, max(b.tail_bound * math.prod(glob[:k] + glob[k + 1:])
                            for k, b in enumerate(backstops)))
    passed = math.isfinite(sup) and tail_slope < -SLOPE_FLOOR
    return Certificate(passed, sup, argmax, tail_slope, degree_cap, P.radii, P_ext.radii,
                       slopes, backstops, rigorous)


# ---------------------------------------------------------------------------
# projection on a larger domain, read on P'


def l2_bound(f: LaurentSeries, norms: NormTable, ext_norms: NormTable) -> float:
    """``c_0^4 sum |f_{-alpha}|^2 e_alpha^2 / c_alpha^4``: the squared L^2(P') norm of B(conj f)."""
    return math.fsum(l2_terms(f, norms, ext_norms).values())


def l2_terms(f: LaurentSeries, norms: NormTable, ext_norms: NormTable) -> dict[MultiIndex, float]:
    zero = (0,) * f.dim
    c0 = norms[zero]
    out = {}
    for beta, v in f.coeffs.items():
        alpha = tuple(-b for b in beta)
        ca = norms[alpha]
        if math.isinf(ca):
            continue
        out[alpha] = c0 * c0 * abs(v) ** 2 * ext_norms[alpha] / (ca * ca)
    return out


@dataclass(frozen=True)
class ExtendedProjection:
    series: LaurentSeries
    certificate: Certificate
    bound_sq: float
    window: ExtensionWindow


def _interior_grid(P: AnnulusProduct, density: int = 4) -> np.ndarray:
    lo, hi = P.log_box()
    axes = [np.linspace(a, b, 2 * density + 3)[1:-1] for a, b in zip(lo, hi)]
    return np.exp(np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, P.dim))


def project_and_extend(domain, P: AnnulusProduct, f: LaurentSeries, degree_cap: int = 60,
                       norms: NormTable | None = None) -> ExtendedProjection:
    """Project ``conj f`` on ``domain`` and certify the result on ``P'`` built from ``P``."""
    from .friedrichs import project_conjugate

    if P.dim != domain.dim:
        raise DomainError("P and the domain differ in dimension")
    if P.touches_axes:
        raise TouchesAxesError("P must stay off the coordinate axes")
    if not np.all(domain.contains_moduli(_interior_grid(P))):
        raise DomainError("P is not inside the domain (membership sampling failed)")
    P_ext, window = extension_product(P)
    norms = norms if norms is not None else NormTable(domain)
    series = project_conjugate(domain, f, norms).with_hint(P_ext)
    cert = certify_extension(P, P_ext, degree_cap)
    bound = l2_bound(f, norms, NormTable(P_ext))
    return ExtendedProjection(series, cert, bound, window)
