"""Finite covers of the boundary by extension patches, and the log-convex hull.

Each boundary point ``A`` gets a small annulus product ``P_A`` inside the
domain, pushed off the boundary along a transversal coordinate, whose
extension ``P'_A`` contains ``A``.  Finitely many ``P'_A`` cover the sampled
boundary; the enlarged domain is the domain plus those boxes, and its
pseudoconvex hull is a convex hull in log coordinates.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .domains import AnnulusProduct, DomainError, HartogsDomain, LogProfileDomain, box_corners
from .extension import TouchesAxesError, extension_product

INWARD_INCREASING = "inward-increasing"
INWARD_DECREASING = "inward-decreasing"

# fraction of the log gap between P and the window edge used for P'
PATCH_REACH = 0.75
GRADIENT_FLOOR = 1e-10
BOUNDARY_TOL = 1e-8
UNDERFLOW = 1e-8


class PatchError(DomainError):
    """No admissible epsilon: near-tangential direction or domain data too coarse."""


def _check_coverable(domain) -> None:
    if isinstance(domain, HartogsDomain) or domain.touches_axes:
        raise TouchesAxesError("covering needs a domain whose closure avoids the coordinate axes")


def boundary_gradient(domain, t) -> np.ndarray:
    """Outward gradient of the defining function in log coordinates at ``t``."""
    t = np.asarray(t, float)
    if isinstance(domain, LogProfileDomain):
        return np.asarray(domain.profile.gradient(t), float)
    if isinstance(domain, AnnulusProduct):
        lo, hi = domain.log_box()
        gaps = np.concatenate([t - lo, hi - t])
        face = int(np.argmin(np.abs(gaps)))
        g = np.zeros(domain.dim)
        g[face % domain.dim] = -1.0 if face < domain.dim else 1.0
        return g
    raise TypeError(f"unsupported domain {type(domain).__name__}")


def boundary_defect(domain, t) -> float:
    t = np.asarray(t, float)
    if isinstance(domain, LogProfileDomain):
        return float(domain.rho(t))
    lo, hi = domain.log_box()
    return float(np.max(np.maximum(lo - t, t - hi)))


def transversal_direction(domain, t, tol: float = BOUNDARY_TOL) -> tuple[int, str]:
    """Axis ``j`` (0-based) with the largest ``|d rho / d t_j|`` and its inward sense.

    Ties go to the lowest index.  ``t`` is the boundary point in log coordinates.
    """
    _check_coverable(domain)
    t = np.asarray(t, float)
    if abs(boundary_defect(domain, t)) > tol:
        raise DomainError(f"point is not on the boundary (|rho| > {tol})")
    g = boundary_gradient(domain, t)
    mags = np.abs(g)
    if mags.max() < GRADIENT_FLOOR:
        raise DomainError("gradient vanishes; no transversal coordinate")
    j = int(np.argmax(mags))
    return j, INWARD_INCREASING if g[j] < 0 else INWARD_DECREASING


def anchor_gap(a: float, eps: float, orientation: str) -> float:
    """Log-distance by which the log-midpoint extension of the transversal factor passes ``a``.

    Positive means covered: ``(a+e)^2/(a+3e) < a`` or ``(a-e)^2/(a-3e) > a``.
    """
    if orientation == INWARD_INCREASING:
        return math.log(a) - math.log((a + eps) ** 2 / (a + 3 * eps))
    return math.log((a - eps) ** 2 / (a - 3 * eps)) - math.log(a)


@dataclass(frozen=True)
class LocalPatch:
    anchor: tuple[float, ...]
    direction: int
    orientation: str
    epsilon: float
    P: AnnulusProduct
    P_ext: AnnulusProduct
    anchor_gap: float

    def log_margin(self, t: np.ndarray) -> np.ndarray:
        """Signed log-distance of points ``t`` into the ``P_ext`` box (positive inside)."""
        lo, hi = self.P_ext.log_box()
        t = np.atleast_2d(t)
        return np.min(np.minimum(t - lo, hi - t), axis=-1)

    def nesting_margin(self) -> float:
        """Log gap between ``closure(P)`` and the boundary of ``P_ext``."""
        lo, hi = self.P.log_box()
        elo, ehi = self.P_ext.log_box()
        return float(min(np.min(lo - elo), np.min(ehi - hi)))

    def to_dict(self) -> dict:
        return {
            "anchor": list(self.anchor),
            "direction": self.direction,
            "orientation": self.orientation,
            "epsilon": self.epsilon,
            "P": [list(p) for p in self.P.radii],
            "P_ext": [list(p) for p in self.P_ext.radii],
            "anchor_gap": self.anchor_gap,
        }


def _patch_radii(domain, a: np.ndarray, j: int, orientation: str, eps: float, slopes: np.ndarray):
    spread = float(np.sum(np.abs(np.delete(slopes, j))))
    half = eps * (1.0 if spread <= 0.5 else 0.5 / spread)
    radii = []
    for k, ak in enumerate(a):
        if k != j and isinstance(domain, AnnulusProduct):
            # a product domain's own factor: the patch then spans the whole face
            radii.append(domain.radii[k])
        elif k != j:
            radii.append((ak - half, ak + half))
        elif orientation == INWARD_INCREASING:
            radii.append((ak + eps, ak + 3 * eps))
        else:
            radii.append((ak - 3 * eps, ak - eps))
    return tuple(radii)


def _patch_inside(domain, P: AnnulusProduct) -> bool:
    if isinstance(domain, AnnulusProduct):
        # open boxes: sharing a face with the domain is allowed
        return bool(np.all(domain.inner <= P.inner) and np.all(P.outer <= domain.outer))
    return domain.contains_box(P.inner, P.outer)


def build_patch(domain, t, j: int | None = None, orientation: str | None = None,
                reach: float = PATCH_REACH) -> LocalPatch:
    """Patch at the boundary point with log coordinates ``t``.

    ``epsilon`` starts at ``min|a_k|/8`` and halves until ``P`` fits in the
    domain and the anchor lies strictly inside ``P_ext``.  Transverse
    half-widths shrink with the boundary's slope in modulus coordinates so
    the box stays clear of a tilted boundary; on an annulus product they are
    the full factors, so one patch serves a whole face.
    """
    _check_coverable(domain)
    t = np.asarray(t, float)
    if j is None or orientation is None:
        j, orientation = transversal_direction(domain, t)
    if orientation not in (INWARD_INCREASING, INWARD_DECREASING):
        raise ValueError(f"unknown orientation {orientation!r}")
    a = np.exp(t)
    g = boundary_gradient(domain, t) / a
    if abs(g[j]) < GRADIENT_FLOOR:
        raise PatchError(f"coordinate {j} is tangential at this point")
    slopes = g / g[j]
    eps = float(np.min(a)) / 8.0
    floor = UNDERFLOW * float(np.min(a))
    while eps >= floor:
        radii = _patch_radii(domain, a, j, orientation, eps, slopes)
        if all(r > 0 for r, _ in radii):
            P = AnnulusProduct(radii)
            if _patch_inside(domain, P):
                P_ext, _ = extension_product(P, reach)
                patch = LocalPatch(tuple(map(float, a)), j, orientation, eps, P, P_ext,
                                   anchor_gap(float(a[j]), eps, orientation))
                if patch.log_margin(t)[0] > 0:
                    return patch
        eps *= 0.5
    raise PatchError(f"epsilon underflow below {UNDERFLOW:g} * min|a_k| at anchor {a.tolist()}")


# ---------------------------------------------------------------------------
# hull


@dataclass(frozen=True)
class LogHull:
    """Convex hull in log-modulus space.

    ``equations`` rows ``(c, b)`` describe ``c . t + b <= 0``, i.e. the
    monomial inequality ``prod |z_k|^(c_k) <= exp(-b)``.  ``degenerate``
    marks inputs spanning a lower-dimensional affine set.
    """

    vertices: np.ndarray
    equations: np.ndarray
    degenerate: bool = False

    def depth(self, t) -> np.ndarray:
        """Distance inside the hull (negative outside); valid for full-dimensional hulls."""
        t = np.atleast_2d(np.asarray(t, float))
        return -np.max(t @ self.equations[:, :-1].T + self.equations[:, -1], axis=-1)

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "equations": self.equations.tolist(),
            "degenerate": self.degenerate,
        }


def convex_hull(points: np.ndarray) -> LogHull:
    points = np.asarray(points, float)
    if points.ndim != 2 or len(points) == 0:
        raise DomainError("hull needs a nonempty point set")
    dim = points.shape[1]
    if dim == 1:
        lo, hi = float(points.min()), float(points.max())
        eqs = np.array([[-1.0, lo], [1.0, -hi]])
        return LogHull(np.array([[lo], [hi]]) if hi > lo else np.array([[lo]]), eqs, hi == lo)
    centered = points - points.mean(axis=0)
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(sv > 1e-12 * max(sv[0], 1.0)))
    if rank == dim:
        try:
            hull = ConvexHull(points)
        except QhullError:
            rank = dim - 1
        else:
            verts = points[np.sort(hull.vertices)]
            eqs = np.unique(np.round(hull.equations, 15), axis=0)
            return LogHull(_sorted_rows(verts), eqs, False)
    # lower-dimensional: hull inside the affine span, lifted back
    basis = vt[:rank]
    origin = points.mean(axis=0)
    if rank == 0:
        return LogHull(origin[None, :], np.zeros((0, dim + 1)), True)
    sub = convex_hull(centered @ basis.T)
    verts = sub.vertices @ basis + origin
    return LogHull(_sorted_rows(verts), np.zeros((0, dim + 1)), True)


def _sorted_rows(a: np.ndarray) -> np.ndarray:
    return a[np.lexsort(a.T[::-1])]


def log_convex_hull(domain, patches: list[LocalPatch], profile_points: np.ndarray | None = None,
                    samples: int = 256, seed: int = 0) -> LogHull:
    """Hull of the domain's log profile together with every ``P_ext`` box corner."""
    pts = []
    if profile_points is None and domain is not None:
        profile_points = _profile_sample(domain, samples, seed)
    if profile_points is not None and len(profile_points):
        pts.append(np.atleast_2d(profile_points))
    for p in patches:
        pts.append(box_corners(*p.P_ext.log_box()))
    if not pts:
        raise DomainError("hull needs a nonempty geometry")
    return convex_hull(np.vstack(pts))


def _profile_sample(domain, count: int, seed: int) -> np.ndarray:
    if isinstance(domain, AnnulusProduct):
        return box_corners(*domain.log_box())
    return np.array([s.log_modulus for s in domain.boundary_samples(count, seed)])


# ---------------------------------------------------------------------------
# cover


@dataclass(frozen=True)
class CoverCertificate:
    patches: list[LocalPatch]
    boundary_samples: np.ndarray
    coverage: list[int]
    hull: LogHull | None
    margin: float
    seed: int
    resample_covered: bool | None = None
    resample_margin: float | None = None
    enlargement_margin: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.patches)

    @property
    def fully_covered(self) -> bool:
        return all(c >= 0 for c in self.coverage)

    @property
    def passed(self) -> bool:
        if len(self.boundary_samples) == 0:
            return True
        ok = self.fully_covered and self.margin > 0
        if self.resample_covered is not None:
            ok = ok and self.resample_covered
        if self.enlargement_margin is not None:
            ok = ok and self.enlargement_margin > 0
        return ok

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "N": self.count,
            "seed": self.seed,
            "margin": _finite(self.margin),
            "resample_covered": self.resample_covered,
            "resample_margin": _finite(self.resample_margin),
            "enlargement_margin": _finite(self.enlargement_margin),
            "clearance": self.extras.get("clearance"),
            "patches": [p.to_dict() for p in self.patches],
            "boundary_samples": np.asarray(self.boundary_samples).tolist(),
            "coverage": self.coverage,
            "hull": self.hull.to_dict() if self.hull is not None else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def patches_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = np.asarray(self.boundary_samples).shape[-1] if self.patches == [] else self.patches[0].P.dim
        w.writerow(["patch", "box"] + [f"log_lo_{k + 1}" for k in range(n)] + [f"log_hi_{k + 1}" for k in range(n)])
        for i, p in enumerate(self.patches):
            for name, box in (("P", p.P), ("P_ext", p.P_ext)):
                lo, hi = box.log_box()
                w.writerow([i, name, *map(repr, lo.tolist()), *map(repr, hi.tolist())])
        return buf.getvalue()

    def hull_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.hull is None:
            return ""
        n = self.hull.vertices.shape[1]
        w.writerow([f"t_{k + 1}" for k in range(n)])
        for v in self.hull.vertices:
            w.writerow([repr(float(x)) for x in v])
        return buf.getvalue()


def _finite(x):
    if x is None:
        return None
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def cover_margins(patches: list[LocalPatch], t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Best margin of each point over the patches, and the index achieving it (-1 if none)."""
    t = np.atleast_2d(t)
    if not patches or len(t) == 0:
        return np.full(len(t), -np.inf), np.full(len(t), -1)
    m = np.stack([p.log_margin(t) for p in patches], axis=1)
    best = np.argmax(m, axis=1)
    val = m[np.arange(len(t)), best]
    return val, np.where(val > 0, best, -1)


def _clearance(t: np.ndarray) -> float:
    """Half the largest nearest-neighbour gap between samples."""
    if len(t) < 2:
        return 0.0
    d, _ = cKDTree(t).query(t, k=2)
    return 0.5 * float(d[:, 1].max())


def finite_subcover(domain, sample_count: int, seed: int = 0, *, resample_factor: int = 4,
                    hull: bool = True) -> CoverCertificate:
    """Greedy cover of seeded boundary samples by patch extensions.

    Samples are visited in order; the first one not yet covered with
    margin above the clearance (half the largest nearest-neighbour gap)
    anchors a new patch.  Log margins are 1-Lipschitz, so this also covers
    the gaps between samples.  The finished patch list is re-checked
    against ``resample_factor`` times as many samples from a different seed.
    """
    _check_coverable(domain)
    if not isinstance(domain, (AnnulusProduct, LogProfileDomain)):
        raise TypeError(f"unsupported domain {type(domain).__name__}")
    if sample_count < 0:
        raise DomainError("sample_count must be non-negative")
    n = domain.dim
    if sample_count == 0:
        return CoverCertificate([], np.zeros((0, n)), [], None, math.inf, seed)
    t = np.array([s.log_modulus for s in domain.boundary_samples(sample_count, seed)])
    clearance = _clearance(t)
    best = np.full(len(t), -np.inf)
    anchored = np.zeros(len(t), dtype=bool)
    patches: list[LocalPatch] = []
    for i in range(len(t)):
        if anchored[i] or best[i] > clearance:
            continue
        patch = build_patch(domain, t[i])
        patches.append(patch)
        anchored[i] = True
        best = np.maximum(best, patch.log_margin(t))
    margin, coverage = cover_margins(patches, t)

    resample_covered = resample_margin = None
    check_points = t
    if resample_factor:
        t2 = np.array([s.log_modulus for s in
                       domain.boundary_samples(resample_factor * sample_count, seed + 1)])
        m2, _ = cover_margins(patches, t2)
        resample_margin = float(m2.min())
        resample_covered = bool(resample_margin > 0)
        check_points = np.vstack([t, t2])

    lh = enlargement = None
    if hull:
        lh = log_convex_hull(domain, patches, profile_points=t)
        if not lh.degenerate:
            enlargement = float(lh.depth(check_points).min())
    return CoverCertificate(patches, t, [int(c) for c in coverage], lh, float(margin.min()), seed,
                            resample_covered, resample_margin, enlargement, {"clearance": clearance})
