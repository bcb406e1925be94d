"""One test per acceptance criterion; each prints a PASS/FAIL line with its runtime."""
import math
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from conftest import ACCEPTANCE_LINES
from reinhardt.cli import load_config, main, strip_timestamp
from reinhardt.covering import INWARD_DECREASING, INWARD_INCREASING, anchor_gap, finite_subcover
from reinhardt.domains import (AnnulusProduct, HartogsDomain, LogProfileDomain, domain_from_config,
                               index_window, log_ball)
from reinhardt.extension import certify_extension, decay_backstop, extension_product, l2_terms
from reinhardt.friedrichs import friedrichs_matrix, project_conjugate, project_conjugate_by_quadrature
from reinhardt.kernel import TruncatedKernel, reproducing_check
from reinhardt.norms import NormTable, admissible, norm_sq_annulus_1d
from reinhardt.series import LaurentSeries
from reinhardt.verify import random_series

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@contextmanager
def criterion(number: int, title: str, limit: float | None):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        took = time.perf_counter() - start
        if ok and limit is not None and took >= limit:
            ok = False
            title += f" (over the {limit:g} s limit)"
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({took:.2f} s)"
        ACCEPTANCE_LINES.append(line)
        print(line)
    if limit is not None:
        assert took < limit, f"criterion {number} took {took:.2f} s"


def test_criterion_1_log_coefficient_on_annuli():
    with criterion(1, "z on A(r,1) maps to (1-r^2)/(-2 ln r) z^-1, oracle agrees to 1e-9", 1.0):
        for r in (0.3, 0.5, 0.8):
            P = AnnulusProduct(((r, 1.0),))
            f = LaurentSeries(1, {(1,): 1})
            out = project_conjugate(P, f)
            exact = (1 - r * r) / (-2 * math.log(r))
            assert out.support == [(-1,)]
            assert abs(out[(-1,)] - exact) <= 1e-14 * exact
            oracle = project_conjugate_by_quadrature(P, f, 2)
            assert oracle.support == [(-1,)]
            assert abs(oracle[(-1,)] - out[(-1,)]) <= 1e-9


def test_criterion_2_punctured_disc_constant():
    rng = np.random.default_rng(2024)
    disc = AnnulusProduct(((0.0, 1.0),))
    polys = []
    for _ in range(5):
        deg = int(rng.integers(0, 12))
        polys.append(LaurentSeries(1, {(k,): complex(*rng.normal(size=2)) for k in range(deg + 1)}))
    with criterion(2, "punctured disc keeps exactly conj(f_0)", 0.1):
        for f in polys:
            assert project_conjugate(disc, f) == LaurentSeries(1, {(0,): f[(0,)].conjugate()})


def test_criterion_3_hartogs_rank_and_support():
    with criterion(3, "Hartogs rank <= 3, support in {(0,-1),(0,0),(0,1)}, fat Hartogs w-exponent >= -m", 5.0):
        H = HartogsDomain(1.0)
        window = [(j, k) for j in range(6) for k in range(-5, 6) if j + k + 1 >= 0]
        s = np.linalg.svd(friedrichs_matrix(H, window), compute_uv=False)
        assert np.all(s[3:] <= 1e-12 * s[0])
        norms = NormTable(H)
        allowed = {(0, -1), (0, 0), (0, 1)}
        for a in window:
            assert set(project_conjugate(H, LaurentSeries(2, {a: 1}), norms).support) <= allowed
        rng = np.random.default_rng(3)
        dense = LaurentSeries(2, {a: complex(*rng.normal(size=2)) for a in window})
        assert set(project_conjugate(H, dense, norms).support) == allowed

        for m in (2, 3):
            for gamma, reached in ((float(m), False), (1.0 / m, True)):
                D = HartogsDomain(gamma)
                pool = [a for a in index_window(2, 8) if admissible(D, a)]
                f = LaurentSeries(2, {a: complex(*rng.normal(size=2)) for a in pool})
                out = project_conjugate(D, f)
                low = min(k for _, k in out.support)
                assert low >= -m
                # the thin domain |z|^(1/m) < |w| reaches the full order -m
                assert (low == -m) == reached


def test_criterion_4_extension_certificates():
    rng = np.random.default_rng(44)
    pairs = []
    for _ in range(20):
        R = float(rng.uniform(0.2, 5.0))
        pairs.append((R * float(rng.uniform(0.1, 0.9)), R))
    with criterion(4, "20 random windows certify at cap 100, endpoint control fails, backstop base to 1e-6", 10.0):
        for r, R in pairs:
            P = AnnulusProduct(((r, R),))
            P_ext, _ = extension_product(P)
            cert = certify_extension(P, P_ext, 100)
            assert cert.passed and math.isfinite(cert.sup_ratio) and cert.tail_slope < 0
            (re, Re), = P_ext.radii
            back = decay_backstop(r, R, re, Re, 100)
            neg, pos = cert.tail_slopes[0]
            assert abs(math.exp(pos) - back.base_pos) <= 1e-6
            assert abs(math.exp(neg) - back.base_neg) <= 1e-6
            assert math.isfinite(back.tail_bound)
            outside = AnnulusProduct(((r * r / R * 0.99, R * R / r * 1.01),))
            assert not certify_extension(P, outside, 100).passed
            edge = AnnulusProduct(((r * r / R, R * R / r),))
            assert not certify_extension(P, edge, 100).passed


def test_criterion_5_domination_and_evaluation():
    omega = AnnulusProduct(((0.3, 1.2),))
    P = AnnulusProduct(((0.5, 1.0),))
    with criterion(5, "Omega-norm bound <= P-norm bound for |alpha| <= 50; evaluation on P' matches sums", 5.0):
        P_ext, _ = extension_product(P)
        c, d, e = NormTable(omega), NormTable(P), NormTable(P_ext)
        js = range(-50, 51)
        for j in js:
            assert d[(j,)] <= c[(j,)]
            # normalised and full forms of each bound term
            assert e[(j,)] / c[(j,)] ** 2 <= e[(j,)] / d[(j,)] ** 2
        f = LaurentSeries(1, {(j,): 1.0 for j in js})
        big = l2_terms(f, c, e)
        small = l2_terms(f, d, e)
        assert all(big[a] <= small[a] * (1 + 1e-12) for a in big)

        rng = np.random.default_rng(5)
        g = random_series(omega, 12, 10, rng, c)
        proj = project_conjugate(omega, g, c)
        (re, Re), = P_ext.radii
        mods = np.concatenate([rng.uniform(re, 0.5, 5), rng.uniform(1.0, Re, 5)])
        pts = mods * np.exp(1j * rng.uniform(0, 2 * np.pi, 10))
        c0 = norm_sq_annulus_1d(0, 0.3, 1.2)
        for z in pts:
            terms = [c0 * v.conjugate() * z ** (-b[0]) / norm_sq_annulus_1d(-b[0], 0.3, 1.2)
                     for b, v in g.coeffs.items()]
            direct = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
            got = proj.evaluate([z])
            assert abs(got - direct) <= 1e-10 * max(1.0, abs(direct))


def test_criterion_6_log_ball_cover():
    dom = LogProfileDomain(log_ball([0.0, 0.0], 0.5))
    with criterion(6, "log-ball cover with 400 samples: coverage, margin, 4x resample, hull margin > 1e-6", 30.0):
        cert = finite_subcover(dom, 400, seed=1)
        assert cert.fully_covered and cert.margin > 0
        assert cert.resample_covered and cert.resample_margin > 0
        assert cert.enlargement_margin > 1e-6
        ring = np.array([s.log_modulus for s in dom.boundary_samples(400, seed=7)])
        assert np.all(cert.hull.depth(ring) > 1e-6)
        assert all(p.anchor_gap > 0 for p in cert.patches)
        assert {p.orientation for p in cert.patches} == {INWARD_INCREASING, INWARD_DECREASING}
        a = np.random.default_rng(6).uniform(0.05, 5.0, 500)
        eps = a * np.random.default_rng(7).uniform(1e-6, 1 / 3 - 1e-6, 500)
        for x, y in zip(a, eps):
            assert anchor_gap(x, y, INWARD_INCREASING) > 0
            assert anchor_gap(x, y, INWARD_DECREASING) > 0


def test_criterion_7_kernel_reproduces():
    with criterion(7, "truncated kernel (N = 20) reproduces 10 random f to 1e-8 on both domains", 10.0):
        for dom in (AnnulusProduct(((0.5, 1.0),)), AnnulusProduct(((0.3, 0.7), (0.5, 1.0)))):
            K = TruncatedKernel(dom, 20)
            rng = np.random.default_rng(77)
            lo, hi = dom.log_box()
            for _ in range(10):
                f = random_series(dom, 20, 10, rng, K.norms)
                z = np.exp(rng.uniform(lo, hi)) * np.exp(1j * rng.uniform(0, 2 * np.pi, dom.dim))
                assert reproducing_check(K, f, z) <= 1e-8


def test_criterion_8_oracle_suite():
    with criterion(8, "closed-form projection vs quadrature oracle <= 1e-8 on every configured domain", 60.0):
        worst = 0.0
        for path in sorted(CONFIGS.glob("*.json")):
            dom = domain_from_config(load_config(str(path)))
            rng = np.random.default_rng(8)
            cap = 3 if isinstance(dom, LogProfileDomain) else 5
            norms = NormTable(dom)
            for _ in range(2 if isinstance(dom, LogProfileDomain) else 4):
                f = random_series(dom, cap - 1, 4, rng, norms)
                a = project_conjugate(dom, f, norms)
                b = project_conjugate_by_quadrature(dom, f, cap)
                worst = max([worst] + [abs(a[k] - b[k]) for k in set(a.support) | set(b.support)])
        print(f"  max discrepancy {worst:.3g}")
        assert worst <= 1e-8


def test_criterion_9_cover_is_deterministic(tmp_path):
    with criterion(9, "cmd_cover twice gives byte-identical JSON apart from the timestamp", None):
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert main(["cover", "--config", str(CONFIGS / "log_ball.json"), "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] != b""
        assert strip_timestamp(outs[0].decode()).encode() == strip_timestamp(outs[1].decode()).encode()
