import math

import numpy as np
import pytest

from reinhardt.domains import AnnulusProduct, HartogsDomain, LogProfileDomain, index_window, log_ball
from reinhardt.friedrichs import (InadmissibleSupportError, friedrichs_matrix, project_conjugate,
                                  project_conjugate_by_quadrature)
from reinhardt.norms import NormTable, admissible
from reinhardt.series import LaurentSeries
from reinhardt.verify import random_series

ANNULUS = AnnulusProduct(((0.5, 1.0),))


@pytest.mark.parametrize("r", [0.3, 0.5, 0.8])
def test_z_on_annulus_gives_log_coefficient(r):
    out = project_conjugate(AnnulusProduct(((r, 1.0),)), LaurentSeries(1, {(1,): 1}))
    assert out.support == [(-1,)]
    assert out[(-1,)] == pytest.approx((1 - r * r) / (-2 * math.log(r)), rel=1e-14)


def test_punctured_disc_keeps_constant_only():
    disc = AnnulusProduct(((0.0, 1.0),))
    f = LaurentSeries(1, {(0,): 2 - 1j, (1,): 3, (4,): 1j})
    assert project_conjugate(disc, f) == LaurentSeries(1, {(0,): 2 + 1j})


def test_hartogs_examples():
    H = HartogsDomain(1.0)
    assert len(project_conjugate(H, LaurentSeries(2, {(1, 1): 1}))) == 0
    assert project_conjugate(H, LaurentSeries.constant(2, 1)) == LaurentSeries.constant(2, 1)


def test_inadmissible_input_rejected():
    with pytest.raises(InadmissibleSupportError):
        project_conjugate(HartogsDomain(1.0), LaurentSeries(2, {(-1, 5): 1}))
    with pytest.raises(InadmissibleSupportError):
        friedrichs_matrix(HartogsDomain(1.0), [(0, 0), (-1, 5)])


def test_conjugate_linear():
    P = AnnulusProduct(((0.3, 0.7), (0.5, 1.0)))
    rng = np.random.default_rng(2)
    f = random_series(P, 4, 6, rng)
    g = random_series(P, 4, 6, rng)
    a, b = 0.7 - 1.3j, -0.2 + 0.4j
    lhs = project_conjugate(P, a * f + b * g)
    rhs = a.conjugate() * project_conjugate(P, f) + b.conjugate() * project_conjugate(P, g)
    for k in set(lhs.support) | set(rhs.support):
        assert abs(lhs[k] - rhs[k]) <= 1e-14 * max(1.0, abs(rhs[k]))


def test_involution_and_cauchy_schwarz():
    # on an annulus every index is admissible, so applying the map twice rescales
    # each coefficient by c0^4/(c_a^2 c_-a^2) <= 1
    norms = NormTable(ANNULUS)
    for j in range(-50, 51):
        f = LaurentSeries(1, {(j,): 1})
        twice = project_conjugate(ANNULUS, project_conjugate(ANNULUS, f, norms), norms)
        factor = norms[(0,)] ** 2 / (norms[(j,)] * norms[(-j,)])
        assert twice[(j,)].real == pytest.approx(factor, rel=1e-13)
        assert factor <= 1 + 1e-14


def test_matrix_symmetric_and_antidiagonal():
    P = AnnulusProduct(((0.3, 0.7), (0.5, 1.0)))
    window = index_window(2, 3)
    M = friedrichs_matrix(P, window)
    assert np.array_equal(M, M.T)
    assert np.count_nonzero(M) == len(window)
    assert np.max(np.abs(M)) <= 1 + 1e-14


def test_hartogs_matrix_rank():
    H = HartogsDomain(1.0)
    window = [(j, k) for j in range(6) for k in range(-5, 6) if j + k + 1 >= 0]
    s = np.linalg.svd(friedrichs_matrix(H, window), compute_uv=False)
    assert np.all(s[3:] <= 1e-12 * s[0])


@pytest.mark.parametrize("domain", [ANNULUS, AnnulusProduct(((0.3, 0.7), (0.5, 1.0))),
                                    HartogsDomain(2.0), AnnulusProduct(((0.0, 1.0),))])
def test_oracle_agrees_on_closed_form_domains(domain):
    rng = np.random.default_rng(5)
    f = random_series(domain, 3, 5, rng)
    a = project_conjugate(domain, f)
    b = project_conjugate_by_quadrature(domain, f, 4)
    assert max(abs(a[k] - b[k]) for k in set(a.support) | set(b.support)) <= 1e-10


def test_oracle_agrees_on_log_ball():
    dom = LogProfileDomain(log_ball([0.0, 0.0], 0.5))
    f = random_series(dom, 2, 4, np.random.default_rng(3))
    a = project_conjugate(dom, f)
    b = project_conjugate_by_quadrature(dom, f, 3)
    assert max(abs(a[k] - b[k]) for k in set(a.support) | set(b.support)) <= 1e-10


def test_oracle_off_support_is_zero():
    f = LaurentSeries(1, {(2,): 1})
    b = project_conjugate_by_quadrature(ANNULUS, f, 4)
    assert b.support == [(-2,)]
    assert admissible(ANNULUS, (-2,))
