"""Numerical integration over Reinhardt domains.

Angular integrals are left to the callers (they are exact by orthogonality or
done with a trapezoid rule); this module handles the radial part.

`integrate_region` is the adaptive scheme for log-profile domains: the
bounding box is subdivided, boxes are classified inside/outside/straddling by
interval evaluation of the defining function, inside boxes get tensor
Gauss-Legendre, and straddling boxes get an iterated rule: along an axis where
the profile is monotone the limit comes from a bracketed root solve, and the remaining
integral is split wherever that limit reaches a box face, recursively, so every
piece has a smooth integrand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .domains import AnnulusProduct, HartogsDomain, LogProfileDomain

TWO_PI = 2.0 * math.pi


class QuadratureError(RuntimeError):
    def __init__(self, message: str, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


@lru_cache(maxsize=None)
def gauss_legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(m)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gl_interval(a, b, m: int):
    """Nodes/weights on [a, b]; ``a`` and ``b`` may be arrays (one interval per row)."""
    x, w = gauss_legendre(m)
    a = np.asarray(a, float)[..., None]
    b = np.asarray(b, float)[..., None]
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def tensor_rule(lo, hi, m: int) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    xs, ws = zip(*(gl_interval(a, b, m) for a, b in zip(lo, hi)))
    pts = np.stack(np.meshgrid(*xs, indexing="ij"), axis=-1).reshape(-1, len(lo))
    wts = ws[0]
    for w in ws[1:]:
        wts = np.multiply.outer(wts, w)
    return pts, wts.reshape(-1)


@dataclass
class RegionResult:
    value: np.ndarray
    error: np.ndarray
    boxes: int


_BREAK_SAMPLES = 17
_ROOT_STEPS = 60


def _bracketed_root(rho, base, axis, a, b, inside_at_a):
    """Vectorised root of rho along ``axis`` in the bracket [a, b].

    Illinois variant of regula falsi: keeps the bracket like bisection but
    converges superlinearly, which matters because every quadrature leaf
    solves thousands of these.
    """
    a = np.asarray(a, float).copy()
    b = np.asarray(b, float).copy()
    pts = base.copy()
    pts[:, axis] = a
    fa = rho(pts)
    pts[:, axis] = b
    fb = rho(pts)
    # a boundary sample may sit exactly on the cut: fall back to the sign label
    fa = np.where(fa == 0, np.where(inside_at_a, -1e-300, 1e-300), fa)
    fb = np.where(fb == 0, np.where(inside_at_a, 1e-300, -1e-300), fb)
    side = np.zeros(len(a), dtype=int)
    root = 0.5 * (a + b)
    active = np.ones(len(a), dtype=bool)
    for _ in range(_ROOT_STEPS):
        if not np.any(active):
            break
        idx = np.nonzero(active)[0]
        ai, bi, fai, fbi = a[idx], b[idx], fa[idx], fb[idx]
        c = (ai * fbi - bi * fai) / (fbi - fai)
        bad = ~((c > np.minimum(ai, bi)) & (c < np.maximum(ai, bi)))
        c = np.where(bad, 0.5 * (ai + bi), c)
        p = base[idx].copy()
        p[:, axis] = c
        fc = rho(p)
        root[idx] = c
        same_b = fc * fbi > 0
        same_a = fc * fai > 0
        b[idx] = np.where(same_b, c, bi)
        fb[idx] = np.where(same_b, fc, fbi)
        a[idx] = np.where(same_a, c, ai)
        fa[idx] = np.where(same_a, fc, fai)
        s_old = side[idx]
        fa[idx] = np.where(same_b & (s_old == -1), 0.5 * fa[idx], fa[idx])
        fb[idx] = np.where(same_a & (s_old == 1), 0.5 * fb[idx], fb[idx])
        side[idx] = np.where(same_b, -1, np.where(same_a, 1, 0))
        width = np.abs(b[idx] - a[idx])
        done = (fc == 0) | (width <= 4e-16 * np.maximum(1.0, np.abs(c)))
        active[idx[done]] = False
    return root


# A cut function is rho with the already-eliminated axes frozen at box faces;
# every cut function of one level freezes the same axes, so it is just the
# tuple of frozen values.


def _embed(n, free, frozen_axes, frozen_vals, x):
    pts = np.empty((len(x), n))
    pts[:, free] = x
    if frozen_axes:
        pts[:, frozen_axes] = frozen_vals
    return pts


def _pick_height(domain, n, free, frozen_axes, cuts, lo, hi):
    """Axis along which every cut function meeting the box is monotone, and those functions.

    A cut is ignored when interval evaluation keeps it away from zero on the
    box, otherwise judged on a 3^k sample grid with a first-order reach test;
    returns None when no axis qualifies, which makes the caller subdivide.
    """
    k = len(free)
    grid = np.stack(np.meshgrid(*[np.linspace(lo[a], hi[a], 3) for a in free], indexing="ij"),
                    axis=-1).reshape(-1, k)
    diam = float(np.linalg.norm(hi[free] - lo[free]))
    interval = domain.profile.interval
    active, grads = [], []
    for vals in cuts:
        if interval is not None:
            flo, fhi = lo.copy(), hi.copy()
            flo[frozen_axes] = vals
            fhi[frozen_axes] = vals
            low, high = interval(flo, fhi)
            if low > 0 or high < 0:
                continue
        pts = _embed(n, free, frozen_axes, vals, grid)
        v = domain.rho(pts)
        g = domain.profile.gradient(pts)[:, free]
        reach = float(np.max(np.linalg.norm(g, axis=1))) * diam
        if (v.min() < 0 < v.max()) or float(np.min(np.abs(v))) <= reach:
            active.append(vals)
            grads.append(g)
    if not active:
        return free[int(np.argmax(hi[free] - lo[free]))], []
    center = np.abs(grads[0][len(grid) // 2])
    for i in np.argsort(-center, kind="stable"):
        # weak monotonicity: max-type profiles have flat partials off their argmax
        if all(np.any(g[:, i] != 0) and (np.all(g[:, i] >= 0) or np.all(g[:, i] <= 0)) for g in grads):
            return free[int(i)], active
    return None


def _roots_1d(domain, n, axis, frozen_axes, cuts, a, b):
    """All sign changes of the cut functions along one interval, by sampling then a bracketed root solve."""
    xs = np.linspace(a, b, _BREAK_SAMPLES)
    found = []
    for vals in cuts:
        pts = _embed(n, [axis], frozen_axes, vals, xs[:, None])
        sign = domain.rho(pts) < 0
        idx = np.nonzero(sign[1:] != sign[:-1])[0]
        if len(idx):
            base = _embed(n, [axis], frozen_axes, vals, np.zeros((len(idx), 1)))
            found.extend(_bracketed_root(domain.rho, base, axis, xs[idx], xs[idx + 1], sign[idx]).tolist())
    return sorted(found)


def _cut_rule(domain, lo, hi, free, frozen_axes, cuts, m, top):
    """Nodes and weights on the free axes of the box, split along every cut.

    At the top level only pieces inside the domain are kept; below it the cut
    functions just mark where the integrand of the level above has kinks.
    """
    n = len(lo)
    if len(free) == 1:
        axis = free[0]
        edges = [lo[axis], *(r for r in _roots_1d(domain, n, axis, frozen_axes, cuts, lo[axis], hi[axis])
                             if lo[axis] < r < hi[axis]), hi[axis]]
        a, b = np.array(edges[:-1]), np.array(edges[1:])
        if top:
            mid = _embed(n, free, frozen_axes, (), (0.5 * (a + b))[:, None])
            keep = domain.rho(mid) < 0
            a, b = a[keep], b[keep]
        xs, ws = gl_interval(a, b, m)
        return xs.reshape(-1, 1), ws.reshape(-1)

    pick = _pick_height(domain, n, free, frozen_axes, cuts, lo, hi)
    if pick is None:
        return None
    h, active = pick
    base_free = [a for a in free if a != h]
    base_axes = list(frozen_axes) + [h]
    base_cuts = [tuple(v) + (face,) for v in active for face in (lo[h], hi[h])]
    sub = _cut_rule(domain, lo, hi, base_free, base_axes, base_cuts, m, False)
    if sub is None:
        return None
    X, W = sub
    N = len(W)
    # one root per active cut along h (monotone), clamped to the face when absent
    breaks = [np.full(N, lo[h]), np.full(N, hi[h])]
    for vals in active:
        pts = _embed(n, base_free, frozen_axes, vals, X)
        at_lo = pts.copy()
        at_lo[:, h] = lo[h]
        at_hi = pts.copy()
        at_hi[:, h] = hi[h]
        s_lo = domain.rho(at_lo) < 0
        s_hi = domain.rho(at_hi) < 0
        root = np.full(N, lo[h])
        cross = s_lo != s_hi
        if np.any(cross):
            root[cross] = _bracketed_root(domain.rho, at_lo[cross], h, np.full(cross.sum(), lo[h]),
                                          np.full(cross.sum(), hi[h]), s_lo[cross])
        breaks.append(root)
    B = np.sort(np.stack(breaks, axis=1), axis=1)
    a, b = B[:, :-1], B[:, 1:]
    ts, wt = gl_interval(a, b, m)  # (N, pieces, m)
    pieces = a.shape[1]
    pts = np.empty((N, pieces, m, len(free)))
    hpos = free.index(h)
    others = [i for i in range(len(free)) if i != hpos]
    pts[..., others] = X[:, None, None, :]
    pts[..., hpos] = ts
    wts = wt * W[:, None, None]
    if top:
        mids = np.empty((N, pieces, len(free)))
        mids[..., others] = X[:, None, :]
        mids[..., hpos] = 0.5 * (a + b)
        inside = domain.rho(_embed(n, free, frozen_axes, (), mids.reshape(-1, len(free))))
        wts = wts * (inside.reshape(N, pieces) < 0)[:, :, None]
    return pts.reshape(-1, len(free)), wts.reshape(-1)


def _leaf(domain, func, lo, hi, m):
    """Cut-aware rule on a straddling box, or None when no monotone axis exists."""
    free = list(range(len(lo)))
    rule = _cut_rule(domain, lo, hi, free, [], [()], m, True)
    if rule is None:
        return None
    pts, wts = rule
    keep = wts != 0
    if not np.any(keep):
        return np.tensordot(wts[:1] * 0, func(lo[None, :]), axes=(0, 0))
    return np.tensordot(wts[keep], func(pts[keep]), axes=(0, 0))


def _adaptive(domain, func, tol, order, max_depth, min_depth, max_boxes):
    lo0, hi0 = domain.bounding_box
    vol0 = float(np.prod(hi0 - lo0))
    stack = [(lo0.copy(), hi0.copy(), 0)]
    total = None
    err = None
    boxes = 0
    while stack:
        lo, hi, depth = stack.pop()
        boxes += 1
        if boxes > max_boxes:
            raise QuadratureError(f"box budget {max_boxes} exhausted", total, err)
        cls = domain.classify_log_box(lo, hi)
        if cls == 1:
            continue
        if cls == 0 and depth < min_depth:
            stack.extend(_children(lo, hi, depth))
            continue
        if cls == -1:
            pts, wts = tensor_rule(lo, hi, order)
            a = np.tensordot(wts, func(pts), axes=(0, 0))
            pts, wts = tensor_rule(lo, hi, 2 * order)
            b = np.tensordot(wts, func(pts), axes=(0, 0))
        else:
            a = _leaf(domain, func, lo, hi, order)
            b = _leaf(domain, func, lo, hi, 2 * order) if a is not None else None
        if a is None or b is None:
            if depth >= max_depth:
                raise QuadratureError("profile cut unresolved at maximum depth", total, err)
            stack.extend(_children(lo, hi, depth))
            continue
        diff = np.abs(np.asarray(b) - np.asarray(a))
        local = tol * (float(np.prod(hi - lo)) / vol0)
        if np.all(diff <= local) or depth >= max_depth:
            total = b if total is None else total + b
            err = diff if err is None else err + diff
        else:
            stack.extend(_children(lo, hi, depth))
    if total is None:
        total = np.zeros_like(tol, dtype=float)
        err = np.zeros_like(tol, dtype=float)
    return np.asarray(total), np.asarray(err), boxes


def _children(lo, hi, depth):
    mid = 0.5 * (lo + hi)
    n = len(lo)
    out = []
    for bits in range(2**n):
        clo, chi = lo.copy(), hi.copy()
        for k in range(n):
            if bits >> k & 1:
                clo[k] = mid[k]
            else:
                chi[k] = mid[k]
        out.append((clo, chi, depth + 1))
    return out


def integrate_region(domain: LogProfileDomain, func, *, rtol: float = 1e-11, atol: float = 0.0,
                     scale=None, order: int = 8, max_depth: int = 24, min_depth: int = 1,
                     max_boxes: int = 200_000) -> RegionResult:
    """Integrate ``func(t) -> (N, K)`` over the log profile of ``domain``.

    Refinement stops once the summed local error estimates fall below
    ``max(atol, rtol * scale)`` componentwise.  Without an explicit ``scale``
    a coarse first pass supplies ``|I|``; components that may vanish need an
    explicit scale, since their relative error is meaningless.
    """
    def f(t):
        v = np.asarray(func(t))
        return v.reshape(len(t), -1)

    if scale is None:
        lo0, hi0 = domain.bounding_box
        pts, wts = tensor_rule(lo0, hi0, order)
        rough = np.tensordot(wts, np.abs(f(pts)), axes=(0, 0))
        first, _, _ = _adaptive(domain, f, np.maximum(1e-6 * rough, 1e-300), order,
                                max_depth, min_depth, max_boxes)
        scale = np.maximum(np.abs(first), 1e-6 * rough)
    scale = np.asarray(scale, dtype=float)
    tol = np.maximum(atol, rtol * scale)
    value, error, boxes = _adaptive(domain, f, tol, order, max_depth, min_depth, max_boxes)
    if np.any(error > tol):
        raise QuadratureError(
            f"region quadrature did not converge: error estimate {np.max(error / np.maximum(scale, 1e-300)):.3g} "
            f"relative after {boxes} boxes", value, error)
    return RegionResult(value, error, boxes)


# ---------------------------------------------------------------------------
# radial rules


def annulus_rule_1d(r: float, R: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Radii and weights with ``sum(w * g(rho)) ~ int_r^R g(rho) rho d(rho)``.

    Gauss-Legendre in ``log(rho)`` when ``r > 0`` (monomials become
    exponentials), in ``rho`` itself for discs.
    """
    if r > 0:
        t, w = gl_interval(math.log(r), math.log(R), nodes)
        rho = np.exp(t)
        return rho, w * rho * rho
    rho, w = gl_interval(0.0, R, nodes)
    return rho, w * rho


def hartogs_rule(gamma: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Points ``(|z|, |w|)`` and weights for ``int g d(|z|) d(|w|) |z| |w|`` over the profile."""
    s, ws = gl_interval(0.0, 1.0, nodes)
    top = s ** (1.0 / gamma)
    rho, wr = gl_interval(np.zeros_like(top), top, nodes)
    pts = np.stack([rho.reshape(-1), np.repeat(s, nodes)], axis=-1)
    wts = (wr * ws[:, None]).reshape(-1) * pts[:, 0] * pts[:, 1]
    return pts, wts


def radial_rule(domain, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Moduli and weights so that ``int_Omega g(|z|) dV ~ (2 pi)^n sum(w g)``."""
    if isinstance(domain, AnnulusProduct):
        rules = [annulus_rule_1d(r, R, nodes) for r, R in domain.radii]
        pts = np.stack(np.meshgrid(*[p for p, _ in rules], indexing="ij"), axis=-1).reshape(-1, domain.dim)
        wts = rules[0][1]
        for _, w in rules[1:]:
            wts = np.multiply.outer(wts, w)
        return pts, wts.reshape(-1)
    if isinstance(domain, HartogsDomain):
        return hartogs_rule(domain.gamma, nodes)
    raise TypeError(f"no fixed radial rule for {type(domain).__name__}")


def moments_by_quadrature(domain, alphas, nodes: int = 200, rtol: float = 1e-12) -> np.ndarray:
    """``int_Omega |z^alpha|^2 dV`` for each alpha, computed numerically."""
    alphas = np.atleast_2d(np.asarray(alphas, dtype=float))
    n = domain.dim
    if isinstance(domain, AnnulusProduct):
        out = np.ones(len(alphas))
        for k, (r, R) in enumerate(domain.radii):
            rho, w = annulus_rule_1d(r, R, nodes)
            out *= TWO_PI * (rho[None, :] ** (2 * alphas[:, k:k + 1]) @ w)
        return out
    if isinstance(domain, HartogsDomain):
        pts, w = hartogs_rule(domain.gamma, nodes)
        with np.errstate(divide="ignore", over="ignore"):
            powers = np.prod(pts[None, :, :] ** (2 * alphas[:, None, :]), axis=-1)
        return TWO_PI**2 * (powers @ w)
    if isinstance(domain, LogProfileDomain):
        a = 2 * alphas + 2
        lo, hi = domain.bounding_box
        shift = np.sum(np.maximum(a * lo, a * hi), axis=-1)
        res = integrate_region(domain, lambda t: np.exp(t @ a.T - shift), rtol=rtol)
        return TWO_PI**n * res.value * np.exp(shift)
    raise TypeError(f"unsupported domain {type(domain).__name__}")
