"""Named invariant suites run by ``reinhardt verify``.

A suite takes the domain and the config dict and returns ``Check`` rows;
a suite that does not apply to a domain kind reports a single skipped row.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .covering import anchor_gap, finite_subcover, INWARD_DECREASING, INWARD_INCREASING
from .domains import AnnulusProduct, HartogsDomain, LogProfileDomain, index_window
from .extension import certify_extension, extension_product, log_ratio_1d
from .friedrichs import friedrichs_matrix, project_conjugate, project_conjugate_by_quadrature
from .kernel import TruncatedKernel, kernel_eval, reproducing_check
from .norms import NormTable
from .quadrature import moments_by_quadrature
from .series import LaurentSeries


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool | None  # None = skipped
    detail: str = ""

    def to_dict(self) -> dict:
        status = "skip" if self.passed is None else ("pass" if self.passed else "fail")
        return {"invariant": self.name, "status": status, "detail": self.detail}


def _skip(name: str, why: str) -> list[Check]:
    return [Check(name, None, why)]


def random_series(domain, cap: int, terms: int, rng: np.random.Generator,
                  norms: NormTable | None = None) -> LaurentSeries:
    """Seeded random series on admissible indices, coefficients scaled to unit basis norm."""
    norms = norms or NormTable(domain)
    window = index_window(domain.dim, cap)
    norms.fill(window)
    pool = [a for a in window if math.isfinite(norms[a])]
    pick = rng.choice(len(pool), size=min(terms, len(pool)), replace=False)
    coeffs = {}
    for i in sorted(pick):
        a = pool[i]
        coeffs[a] = complex(rng.normal(), rng.normal()) / math.sqrt(norms[a])
    return LaurentSeries(domain.dim, coeffs)


def suite_norms(domain, cfg: dict) -> list[Check]:
    if isinstance(domain, LogProfileDomain):
        return _skip("norms.closed_form_vs_quadrature", "log-profile norms are quadrature already")
    cap = min(int(cfg.get("degree_cap", 6)), 6)
    norms = NormTable(domain)
    window = [a for a in index_window(domain.dim, cap) if norms.admissible(a)]
    quad = moments_by_quadrature(domain, window)
    exact = np.array([norms[a] for a in window])
    err = float(np.max(np.abs(quad - exact) / exact))
    return [Check("norms.closed_form_vs_quadrature", err <= 1e-10, f"max rel err {err:.3g}"),
            Check("norms.positive", bool(np.all(exact > 0)), f"{len(window)} admissible indices")]


def suite_friedrichs(domain, cfg: dict) -> list[Check]:
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    cap = 3 if isinstance(domain, LogProfileDomain) else 5
    norms = NormTable(domain)
    worst = 0.0
    for _ in range(2 if isinstance(domain, LogProfileDomain) else 4):
        f = random_series(domain, cap - 1, 4, rng, norms)
        a = project_conjugate(domain, f, norms)
        b = project_conjugate_by_quadrature(domain, f, cap)
        keys = set(a.support) | set(b.support)
        worst = max([worst] + [abs(a[k] - b[k]) for k in keys])
    checks = [Check("friedrichs.oracle_agreement", worst <= 1e-8, f"max discrepancy {worst:.3g}")]
    if not isinstance(domain, LogProfileDomain):
        window = [a for a in index_window(domain.dim, 3) if norms.admissible(a)]
        M = friedrichs_matrix(domain, window, norms)
        checks.append(Check("friedrichs.matrix_symmetric", bool(np.allclose(M, M.T, rtol=0, atol=1e-15)),
                            f"window of {len(window)}"))
    return checks


def suite_extension(domain, cfg: dict) -> list[Check]:
    if not isinstance(domain, AnnulusProduct) or domain.touches_axes:
        return _skip("extension.certificate", "needs an annulus product off the axes")
    cap = max(10, int(cfg.get("degree_cap", 60)))
    if cfg.get("extension_radii") is not None:
        P_ext = AnnulusProduct(tuple(tuple(p) for p in cfg["extension_radii"]))
    else:
        P_ext, _ = extension_product(domain)
    cert = certify_extension(domain, P_ext, cap)
    checks = [Check("extension.certificate", cert.passed,
                    f"sup {cert.sup_ratio:.4g} at {list(cert.argmax)}, tail slope {cert.tail_slope:.4g}")]
    lam = 2.0
    scaled = AnnulusProduct(tuple((lam * r, lam * R) for r, R in domain.radii))
    scaled_ext = AnnulusProduct(tuple((lam * r, lam * R) for r, R in P_ext.radii))
    worst = 0.0
    for j in range(-cap, cap + 1, max(1, cap // 10)):
        for (r, R), (re, Re), (sr, sR), (sre, sRe) in zip(domain.radii, P_ext.radii,
                                                          scaled.radii, scaled_ext.radii):
            base = log_ratio_1d(j, r, R, re, Re)
            moved = log_ratio_1d(j, sr, sR, sre, sRe)
            worst = max(worst, abs(moved - (base - 4 * math.log(lam))))
    checks.append(Check("extension.scaling_law", worst <= 1e-12, f"max log deviation {worst:.3g}"))
    return checks


def suite_kernel(domain, cfg: dict) -> list[Check]:
    if isinstance(domain, LogProfileDomain):
        return _skip("kernel.reproducing", "kept to closed-form domains for speed")
    N = 10
    K = TruncatedKernel(domain, N)
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    z = _interior_point(domain, rng)
    w = _interior_point(domain, rng)
    herm = kernel_eval(K, z, w) == kernel_eval(K, w, z).conjugate()
    diag = kernel_eval(K, z, z)
    f = random_series(domain, N, 5, rng, K.norms)
    res = reproducing_check(K, f, z)
    return [Check("kernel.hermitian", bool(herm)),
            Check("kernel.diagonal_positive", diag.imag == 0 and diag.real > 0, f"K(z,z) = {diag.real:.6g}"),
            Check("kernel.reproducing", res <= 1e-8, f"residual {res:.3g}")]


def _interior_point(domain, rng) -> np.ndarray:
    if isinstance(domain, AnnulusProduct):
        mod = np.array([math.sqrt(max(r, 1e-3 * R) * R) for r, R in domain.radii])
    else:  # Hartogs: |z|^gamma < |w| < 1
        mod = np.array([0.5 ** (1.0 / domain.gamma) * 0.8, 0.7])
    return mod * np.exp(1j * rng.uniform(0, 2 * np.pi, len(mod)))


def suite_cover(domain, cfg: dict) -> list[Check]:
    if isinstance(domain, HartogsDomain) or domain.touches_axes:
        return _skip("cover.full_coverage", "closure meets the coordinate axes")
    samples = min(int(cfg.get("samples", 100)), 200)
    cert = finite_subcover(domain, samples, int(cfg.get("seed", 0)))
    gaps = [anchor_gap(p.anchor[p.direction], p.epsilon, p.orientation) for p in cert.patches]
    rng = np.random.default_rng(1)
    a = rng.uniform(0.1, 10, 200)
    e = a * rng.uniform(1e-6, 1 / 3 - 1e-6, 200)
    identity = all(anchor_gap(x, y, INWARD_INCREASING) > 0 for x, y in zip(a, e))
    mirrored = all(anchor_gap(x, y, INWARD_DECREASING) > 0 for x, y in zip(a, e))
    return [Check("cover.full_coverage", cert.fully_covered, f"N = {cert.count}"),
            Check("cover.margin_positive", cert.margin > 0, f"margin {cert.margin:.4g}"),
            Check("cover.resample_stable", bool(cert.resample_covered), f"margin {cert.resample_margin:.4g}"),
            Check("cover.anchor_inequality", all(g > 0 for g in gaps) and identity and mirrored),
            Check("cover.strict_enlargement",
                  cert.enlargement_margin is not None and cert.enlargement_margin > 0,
                  f"hull depth {cert.enlargement_margin}")]


SUITES: dict[str, Callable[[object, dict], list[Check]]] = {
    "norms": suite_norms,
    "friedrichs": suite_friedrichs,
    "extension": suite_extension,
    "kernel": suite_kernel,
    "cover": suite_cover,
}

SUITE_DOCS = {
    "norms": "closed-form monomial norms agree with radial quadrature",
    "friedrichs": "projection agrees with the quadrature oracle; matrix symmetry",
    "extension": "extension certificate passes; ratio scaling law",
    "kernel": "Hermitian symmetry, diagonal positivity, reproducing property",
    "cover": "boundary cover, margins, resample stability, hull enlargement",
}


def run_suites(domain, cfg: dict, names: list[str] | None = None) -> list[Check]:
    names = names or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    out: list[Check] = []
    for n in names:
        out.extend(SUITES[n](domain, cfg))
    return out
