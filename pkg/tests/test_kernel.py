import math

import numpy as np
import pytest

from reinhardt.domains import AnnulusProduct, DomainError, HartogsDomain
from reinhardt.kernel import QuadratureSpec, TruncatedKernel, kernel_eval, reproducing_check
from reinhardt.series import LaurentSeries
from reinhardt.verify import random_series

A = AnnulusProduct(((0.5, 1.0),))


def test_truncation_converges():
    z = [0.75]
    assert abs(kernel_eval(TruncatedKernel(A, 50), z, z) - kernel_eval(TruncatedKernel(A, 70), z, z)) <= 1e-10
    assert abs(kernel_eval(TruncatedKernel(A, 40), z, z) - kernel_eval(TruncatedKernel(A, 60), z, z)) <= 1e-8


def test_punctured_disc_gives_disc_kernel():
    K = TruncatedKernel(AnnulusProduct(((0.0, 1.0),)), 400)
    z, w = 0.3 + 0.2j, -0.1 + 0.4j
    exact = 1 / (math.pi * (1 - z * w.conjugate()) ** 2)
    assert kernel_eval(K, [z], [w]) == pytest.approx(exact, rel=1e-13)
    assert min(a[0] for a in K.indices) == 0


def test_hermitian_exact_and_diagonal_positive():
    rng = np.random.default_rng(8)
    for dom, N in ((A, 25), (AnnulusProduct(((0.3, 0.7), (0.5, 1.0))), 12), (HartogsDomain(2.0), 10)):
        K = TruncatedKernel(dom, N)
        for _ in range(5):
            if isinstance(dom, AnnulusProduct):
                mod = np.array([math.sqrt(r * R) for r, R in dom.radii])
            else:
                mod = np.array([0.5, 0.8])
            z = mod * np.exp(1j * rng.uniform(0, 6.3, dom.dim))
            w = mod * np.exp(1j * rng.uniform(0, 6.3, dom.dim))
            assert kernel_eval(K, w, z) == kernel_eval(K, z, w).conjugate()
            d = K(z, z)
            assert d.imag == 0 and d.real > 0


@pytest.mark.parametrize("dom", [A, AnnulusProduct(((0.3, 0.7), (0.5, 1.0)))])
def test_reproducing_random_series(dom):
    rng = np.random.default_rng(12)
    K = TruncatedKernel(dom, 20)
    for _ in range(3):
        f = random_series(dom, 20, 8, rng, K.norms)
        z = np.array([math.sqrt(r * R) for r, R in dom.radii]) * np.exp(1j * rng.uniform(0, 6.3, dom.dim))
        assert reproducing_check(K, f, z) <= 1e-8


def test_reproducing_examples():
    K = TruncatedKernel(A, 20)
    f = LaurentSeries(1, {(1,): 1, (-1,): 1})
    assert reproducing_check(K, f, [0.75]) <= 1e-12
    # a monomial outside the window is not reproduced at all
    far = LaurentSeries(1, {(25,): 1})
    assert reproducing_check(K, far, [0.75]) == pytest.approx(0.75**25, rel=1e-14)


def test_coarse_quadrature_is_visible():
    K = TruncatedKernel(A, 20)
    f = LaurentSeries(1, {(15,): 1})
    assert reproducing_check(K, f, [0.75], QuadratureSpec(nodes=4)) > reproducing_check(K, f, [0.75])


def test_errors():
    with pytest.raises(DomainError):
        TruncatedKernel(A, -1)
    with pytest.raises(ZeroDivisionError):
        kernel_eval(TruncatedKernel(A, 3), [0.0], [0.7])
    with pytest.raises(DomainError):
        reproducing_check(TruncatedKernel(A, 3), LaurentSeries(2, {(0, 0): 1}), [0.7])
