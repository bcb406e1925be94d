"""Bounded Reinhardt domains described by their modulus profiles.

Three shapes are supported: products of annuli, (fat) Hartogs triangles and
domains cut out by a defining function of the log-moduli ``t_k = log|z_k|``.
Everything geometric downstream happens in log coordinates, where annulus
products are boxes and log-convex hulls are ordinary convex hulls.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.stats import norm as _normal
from scipy.stats import qmc

MultiIndex = tuple[int, ...]

BISECTION_STEPS = 64


class DomainError(ValueError):
    """Raised for malformed domain data or dimension mismatches."""


class BoundaryBracketError(DomainError):
    """A sampling ray never leaves the profile inside the bounding box."""


def as_multi_index(alpha, dim: int | None = None) -> MultiIndex:
    if isinstance(alpha, (int, np.integer)):
        alpha = (int(alpha),)
    idx = tuple(int(a) for a in alpha)
    if dim is not None and len(idx) != dim:
        raise DomainError(f"multi-index {idx} has dimension {len(idx)}, expected {dim}")
    return idx


def index_window(dim: int, cap: int) -> list[MultiIndex]:
    """All multi-indices with sup-norm at most ``cap``, lexicographically sorted."""
    return list(itertools.product(range(-cap, cap + 1), repeat=dim))


def _point(point, dim: int) -> np.ndarray:
    z = np.atleast_1d(np.asarray(point, dtype=complex))
    if z.shape != (dim,):
        raise DomainError(f"point has shape {z.shape}, expected ({dim},)")
    return z


# ---------------------------------------------------------------------------
# log profiles


@dataclass(frozen=True)
class LogProfile:
    """A defining function ``rho`` of log-moduli with its gradient.

    ``interval(lo, hi)`` returns lower/upper bounds of ``rho`` over the box
    ``[lo, hi]``; profiles without one are classified by sampling only.
    All callables act on arrays of shape ``(..., n)``.
    """

    name: str
    dim: int
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    extent: tuple[np.ndarray, np.ndarray]
    anchor: np.ndarray
    interval: Callable[[np.ndarray, np.ndarray], tuple[float, float]] | None = None
    params: tuple[float, ...] = ()


def _abs_range(lo, hi, c):
    """Range of |t - c| over the interval [lo, hi], componentwise."""
    near = np.where((lo <= c) & (c <= hi), 0.0, np.minimum(np.abs(lo - c), np.abs(hi - c)))
    far = np.maximum(np.abs(lo - c), np.abs(hi - c))
    return near, far


def log_ellipsoid(center: Sequence[float], semi_axes: Sequence[float], power: int = 2) -> LogProfile:
    """``sum(|(t - c)/a|^p) - 1`` for even ``p``; ``p = 2`` gives an ellipsoid."""
    c = np.asarray(center, dtype=float)
    a = np.asarray(semi_axes, dtype=float)
    if c.shape != a.shape or np.any(a <= 0):
        raise DomainError("log_ellipsoid needs matching centers and positive semi-axes")
    if power < 2 or power % 2:
        raise DomainError("log_ellipsoid power must be an even integer >= 2")
    p = int(power)

    def value(t):
        return np.sum(((np.asarray(t) - c) / a) ** p, axis=-1) - 1.0

    def gradient(t):
        u = (np.asarray(t) - c) / a
        return p * u ** (p - 1) / a

    def interval(lo, hi):
        near, far = _abs_range(lo, hi, c)
        return float(np.sum((near / a) ** p) - 1.0), float(np.sum((far / a) ** p) - 1.0)

    name = "log_ellipsoid" if p == 2 else "log_superellipse"
    return LogProfile(name, c.size, value, gradient, (c - a, c + a), c.copy(), interval,
                      tuple(c) + tuple(a) + ((p,) if p != 2 else ()))


def log_ball(center: Sequence[float], radius: float) -> LogProfile:
    c = np.asarray(center, dtype=float)
    if radius <= 0:
        raise DomainError("log_ball radius must be positive")
    r2 = float(radius) ** 2

    def value(t):
        return np.sum((np.asarray(t) - c) ** 2, axis=-1) - r2

    def gradient(t):
        return 2.0 * (np.asarray(t) - c)

    def interval(lo, hi):
        near, far = _abs_range(lo, hi, c)
        return float(np.sum(near**2) - r2), float(np.sum(far**2) - r2)

    return LogProfile("log_ball", c.size, value, gradient, (c - radius, c + radius), c.copy(),
                      interval, tuple(c) + (float(radius),))


def log_box(center: Sequence[float], half_widths: Sequence[float]) -> LogProfile:
    """``max_k(|t_k - c_k| - h_k)``: the log profile of an annulus product.

    Not C^1 at edges; it exists so quadrature can be checked against the
    closed-form annulus norms.
    """
    c = np.asarray(center, dtype=float)
    h = np.asarray(half_widths, dtype=float)
    if c.shape != h.shape or np.any(h <= 0):
        raise DomainError("log_box needs matching centers and positive half-widths")

    def value(t):
        return np.max(np.abs(np.asarray(t) - c) - h, axis=-1)

    def gradient(t):
        d = np.asarray(t, dtype=float) - c
        flat = np.atleast_2d(d)
        k = np.argmax(np.abs(flat) - h, axis=-1)
        rows = np.arange(len(flat))
        s = np.sign(flat[rows, k])
        g = np.zeros_like(flat)
        g[rows, k] = np.where(s == 0, 1.0, s)
        return g.reshape(d.shape)

    def interval(lo, hi):
        near, far = _abs_range(lo, hi, c)
        return float(np.max(near - h)), float(np.max(far - h))

    return LogProfile("log_box", c.size, value, gradient, (c - h, c + h), c.copy(), interval,
                      tuple(c) + tuple(h))


PROFILE_CATALOG = ("log_ball", "log_ellipsoid", "log_superellipse", "log_box")


def profile_from_spec(kind: str, params: Sequence[float], dim: int) -> LogProfile:
    p = [float(x) for x in params]
    if kind == "log_ball":
        if len(p) != dim + 1:
            raise DomainError(f"log_ball expects {dim + 1} params (center..., radius)")
        return log_ball(p[:dim], p[dim])
    if kind == "log_ellipsoid":
        if len(p) != 2 * dim:
            raise DomainError(f"log_ellipsoid expects {2 * dim} params (center..., semi_axes...)")
        return log_ellipsoid(p[:dim], p[dim:])
    if kind == "log_superellipse":
        if len(p) != 2 * dim + 1:
            raise DomainError(f"log_superellipse expects {2 * dim + 1} params (center..., semi_axes..., power)")
        return log_ellipsoid(p[:dim], p[dim:2 * dim], power=int(p[-1]))
    if kind == "log_box":
        if len(p) != 2 * dim:
            raise DomainError(f"log_box expects {2 * dim} params (center..., half_widths...)")
        return log_box(p[:dim], p[dim:])
    raise DomainError(f"unknown profile type {kind!r}; known: {', '.join(PROFILE_CATALOG)}")


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class BoundarySample:
    log_modulus: np.ndarray
    normal: np.ndarray

    @property
    def modulus(self) -> np.ndarray:
        return np.exp(self.log_modulus)


@dataclass(frozen=True)
class AnnulusProduct:
    """Product of annuli ``r_k < |z_k| < R_k``.

    ``r_k = 0`` is accepted (punctured discs); such products touch the axes
    and carry no extension guarantee.
    """

    radii: tuple[tuple[float, float], ...]

    def __post_init__(self):
        radii = tuple((float(r), float(R)) for r, R in self.radii)
        if not radii:
            raise DomainError("annulus product needs at least one factor")
        for r, R in radii:
            if not (0.0 <= r < R < math.inf):
                raise DomainError(f"invalid annulus radii ({r}, {R})")
        object.__setattr__(self, "radii", radii)

    @classmethod
    def from_log_box(cls, lo, hi) -> "AnnulusProduct":
        return cls(tuple(zip(np.exp(lo).tolist(), np.exp(hi).tolist())))

    @property
    def dim(self) -> int:
        return len(self.radii)

    @property
    def inner(self) -> np.ndarray:
        return np.array([r for r, _ in self.radii])

    @property
    def outer(self) -> np.ndarray:
        return np.array([R for _, R in self.radii])

    @property
    def touches_axes(self) -> bool:
        return any(r == 0.0 for r, _ in self.radii)

    def log_box(self) -> tuple[np.ndarray, np.ndarray]:
        with np.errstate(divide="ignore"):
            return np.log(self.inner), np.log(self.outer)

    def contains(self, point) -> bool:
        m = np.abs(_point(point, self.dim))
        return bool(np.all((self.inner < m) & (m < self.outer)))

    def contains_moduli(self, moduli: np.ndarray) -> np.ndarray:
        m = np.atleast_2d(moduli)
        return np.all((self.inner < m) & (m < self.outer), axis=-1)

    def contains_box(self, lo, hi) -> bool:
        """Closed modulus box ``[lo, hi]`` lies in the domain."""
        return bool(np.all(self.inner < lo) and np.all(np.asarray(hi) < self.outer))

    def boundary_samples(self, count: int, seed: int = 0) -> list[BoundarySample]:
        if count < 0:
            raise DomainError("count must be non-negative")
        if self.touches_axes:
            raise DomainError("boundary sampling needs all inner radii positive")
        lo, hi = self.log_box()
        n = self.dim
        out = []
        if count == 0:
            return out
        u = qmc.Halton(d=max(n, 1), scramble=True, seed=seed).random(count)
        for i in range(count):
            face = i % (2 * n)
            k, upper = face // 2, face % 2 == 1
            t = lo + u[i] * (hi - lo)
            t[k] = hi[k] if upper else lo[k]
            nrm = np.zeros(n)
            nrm[k] = 1.0 if upper else -1.0
            out.append(BoundarySample(t, nrm))
        return out


@dataclass(frozen=True)
class HartogsDomain:
    """Fat Hartogs triangle ``|z|^gamma < |w| < 1``; ``gamma = 1`` is the classical one."""

    gamma: float = 1.0

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise DomainError("Hartogs exponent must be a positive real")
        object.__setattr__(self, "gamma", float(self.gamma))

    dim = 2
    touches_axes = True

    def contains(self, point) -> bool:
        z, w = np.abs(_point(point, 2))
        return bool(z**self.gamma < w < 1.0)

    def contains_moduli(self, moduli: np.ndarray) -> np.ndarray:
        m = np.atleast_2d(moduli)
        return (m[:, 0] ** self.gamma < m[:, 1]) & (m[:, 1] < 1.0)

    def contains_box(self, lo, hi) -> bool:
        # |z|^gamma < |w| is monotone: worst corner is (hi_z, lo_w)
        return bool(lo[0] >= 0 and hi[0] ** self.gamma < lo[1] and hi[1] < 1.0)


@dataclass(frozen=True)
class LogProfileDomain:
    """Reinhardt domain ``{rho(log|z_1|, ..., log|z_n|) < 0}``."""

    profile: LogProfile
    bounding_box: tuple[np.ndarray, np.ndarray] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.bounding_box is None:
            lo, hi = self.profile.extent
            pad = 0.05 * (hi - lo) + 1e-3
            box = (np.asarray(lo, float) - pad, np.asarray(hi, float) + pad)
        else:
            box = (np.asarray(self.bounding_box[0], float), np.asarray(self.bounding_box[1], float))
        if box[0].shape != (self.profile.dim,) or np.any(box[0] >= box[1]):
            raise DomainError("bounding box must be n intervals with lo < hi")
        if not np.all(np.isfinite(box[0])) or not np.all(np.isfinite(box[1])):
            raise DomainError("bounding box must be finite in log coordinates")
        object.__setattr__(self, "bounding_box", box)

    @property
    def dim(self) -> int:
        return self.profile.dim

    touches_axes = False

    def rho(self, t) -> np.ndarray:
        return self.profile.value(np.asarray(t, dtype=float))

    def contains(self, point) -> bool:
        m = np.abs(_point(point, self.dim))
        if np.any(m == 0):
            return False
        return bool(self.rho(np.log(m)) < 0)

    def contains_moduli(self, moduli: np.ndarray) -> np.ndarray:
        m = np.atleast_2d(np.asarray(moduli, float))
        inside = np.zeros(len(m), dtype=bool)
        pos = np.all(m > 0, axis=-1)
        inside[pos] = self.rho(np.log(m[pos])) < 0
        return inside

    def classify_log_box(self, lo, hi) -> int:
        """-1 inside, +1 outside, 0 straddling (or unknown)."""
        if self.profile.interval is None:
            return 0
        low, high = self.profile.interval(np.asarray(lo), np.asarray(hi))
        if high <= 0:
            return -1
        if low >= 0:
            return 1
        return 0

    def contains_box(self, lo, hi, density: int = 4) -> bool:
        """Closed modulus box lies in the domain: grid membership plus interval check."""
        lo, hi = np.asarray(lo, float), np.asarray(hi, float)
        if np.any(lo <= 0):
            return False
        tlo, thi = np.log(lo), np.log(hi)
        if self.profile.interval is not None:
            if self.profile.interval(tlo, thi)[1] >= 0:
                return False
        axes = [np.linspace(a, b, 2 * density + 1) for a, b in zip(tlo, thi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        return bool(np.all(self.rho(grid) < 0))

    def boundary_samples(self, count: int, seed: int = 0) -> list[BoundarySample]:
        if count < 0:
            raise DomainError("count must be non-negative")
        if count == 0:
            return []
        t = boundary_points(self, ray_directions(self.dim, count, seed))
        g = self.profile.gradient(t)
        gn = np.linalg.norm(g, axis=-1, keepdims=True)
        return [BoundarySample(ti, gi) for ti, gi in zip(t, g / gn)]


ReinhardtDomain = AnnulusProduct | HartogsDomain | LogProfileDomain


def ray_directions(dim: int, count: int, seed: int) -> np.ndarray:
    """Seeded quasi-random unit vectors (Halton, scrambled)."""
    if dim == 1:
        return np.array([[1.0] if i % 2 == 0 else [-1.0] for i in range(count)])
    if dim == 2:
        u = qmc.Halton(d=1, scramble=True, seed=seed).random(count)[:, 0]
        return np.stack([np.cos(2 * np.pi * u), np.sin(2 * np.pi * u)], axis=-1)
    u = qmc.Halton(d=dim, scramble=True, seed=seed).random(count)
    v = _normal.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def boundary_points(domain: LogProfileDomain, directions: np.ndarray) -> np.ndarray:
    """Bisect ``rho`` along rays from the profile anchor to the bounding box."""
    anchor = np.asarray(domain.profile.anchor, float)
    if not domain.rho(anchor) < 0:
        raise BoundaryBracketError("profile anchor is not inside the domain")
    lo, hi = domain.bounding_box
    d = np.asarray(directions, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        to_hi = np.where(d > 0, (hi - anchor) / d, np.inf)
        to_lo = np.where(d < 0, (lo - anchor) / d, np.inf)
    s_out = np.min(np.minimum(to_hi, to_lo), axis=-1)
    far = anchor + s_out[:, None] * d
    if np.any(domain.rho(far) < 0):
        raise BoundaryBracketError("ray reaches the bounding box inside the domain; "
                                   "bounding box is inconsistent with the profile")
    a = np.zeros(len(d))
    b = s_out.copy()
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (a + b)
        inside = domain.rho(anchor + mid[:, None] * d) < 0
        a = np.where(inside, mid, a)
        b = np.where(inside, b, mid)
    return anchor + (0.5 * (a + b))[:, None] * d


def contains(domain: ReinhardtDomain, point) -> bool:
    return domain.contains(point)


def boundary_samples(domain, count: int, seed: int = 0) -> list[BoundarySample]:
    if not isinstance(domain, (AnnulusProduct, LogProfileDomain)):
        raise DomainError(f"boundary sampling is not available for {type(domain).__name__}")
    return domain.boundary_samples(count, seed)


def box_corners(lo, hi) -> np.ndarray:
    return np.array(list(itertools.product(*zip(lo, hi))), dtype=float)


def iter_window(domain, cap: int) -> Iterator[MultiIndex]:
    yield from index_window(domain.dim, cap)


# ---------------------------------------------------------------------------
# config


def domain_from_config(cfg: dict) -> ReinhardtDomain:
    """Build a domain from its JSON description (see README for the schema)."""
    kind = cfg.get("kind")
    dim = cfg.get("dim")
    if kind == "annulus_product":
        radii = cfg.get("radii")
        if not isinstance(radii, list) or (dim is not None and len(radii) != dim):
            raise DomainError("annulus_product needs 'radii' with one [r, R] pair per dimension")
        return AnnulusProduct(tuple(tuple(p) for p in radii))
    if kind == "hartogs":
        if dim not in (None, 2):
            raise DomainError("hartogs domains live in dimension 2")
        return HartogsDomain(float(cfg.get("gamma", 1.0)))
    if kind == "log_profile":
        prof = cfg.get("profile") or {}
        if not isinstance(dim, int) or dim < 1:
            raise DomainError("log_profile needs an integer 'dim' >= 1")
        profile = profile_from_spec(prof.get("type"), prof.get("params", []), dim)
        box = cfg.get("bounding_box")
        if box is not None:
            box = (np.array([b[0] for b in box], float), np.array([b[1] for b in box], float))
        return LogProfileDomain(profile, box)
    raise DomainError(f"unknown domain kind {kind!r}")


def domain_to_config(domain: ReinhardtDomain) -> dict:
    if isinstance(domain, AnnulusProduct):
        return {"kind": "annulus_product", "dim": domain.dim, "radii": [list(p) for p in domain.radii]}
    if isinstance(domain, HartogsDomain):
        return {"kind": "hartogs", "dim": 2, "gamma": domain.gamma}
    lo, hi = domain.bounding_box
    return {"kind": "log_profile", "dim": domain.dim,
            "profile": {"type": domain.profile.name, "params": list(domain.profile.params)},
            "bounding_box": [[float(a), float(b)] for a, b in zip(lo, hi)]}
