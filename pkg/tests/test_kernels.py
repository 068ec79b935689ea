import math

import numpy as np
import pytest

from orthotrig.exceptions import DomainError
from orthotrig.fourier import QuadratureSpec
from orthotrig.kernels import (THREE_PI, dirichlet_beta, dirichlet_bound_check, kernel_l1_check,
                               vallee_poussin)


def test_dirichlet_examples():
    assert dirichlet_beta(3, 0.0)(0.0) == pytest.approx(3.5)
    assert dirichlet_beta(1, 1.0)(math.pi / 2) == pytest.approx(-1.0)
    d = dirichlet_beta(8, 0.3)
    assert d(0.7) == pytest.approx(d.closed_form(0.7), abs=1e-12)
    assert d.closed_form(0.0) == pytest.approx(d(0.0))
    assert d.poly[0] == pytest.approx(0.5 * math.cos(0.3 * math.pi / 2))


def test_vallee_poussin_examples():
    assert vallee_poussin(1)(0.0) == pytest.approx(1.5)
    assert vallee_poussin(4)(0.0) == pytest.approx(6.0)
    assert vallee_poussin(4).poly[5] == pytest.approx(0.375)
    assert vallee_poussin(4) is vallee_poussin(4)


@pytest.mark.parametrize("m", [1, 2, 7, 64])
def test_vallee_poussin_coefficient_audit(m):
    V = vallee_poussin(m).poly
    for k in range(-2 * m - 2, 2 * m + 3):
        expected = 0.5 if abs(k) <= m else max(0.0, 1 - abs(k) / (2 * m))
        assert V[k] == pytest.approx(expected, abs=0)
    assert V.is_real()


@pytest.mark.parametrize("k", [1, 5, 32, 128])
@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 1.7])
def test_dirichlet_forms_agree(k, beta):
    t = np.linspace(1e-3, math.pi, 2000)
    d = dirichlet_beta(k, beta)
    assert np.allclose(d(t), d.closed_form(t), atol=1e-10, rtol=0)


def test_l1_checks():
    c = kernel_l1_check(1)
    assert c.norm == pytest.approx(math.pi / 3 + 2 * math.sqrt(3), rel=1e-8)
    assert c.holds
    assert kernel_l1_check(16).holds
    assert kernel_l1_check(256, QuadratureSpec(rel_tol=1e-6)).norm <= THREE_PI


def test_bound_check_examples():
    assert dirichlet_bound_check(1, 1.0, [math.pi / 2])
    assert dirichlet_bound_check(50, 0.0, np.linspace(math.pi / 1e4, math.pi, 10_000))
    grid = np.linspace(0.01, math.pi, 500)
    assert dirichlet_bound_check(5, 0.7, grid)
    assert abs(dirichlet_beta(5, 0.7)(math.pi)) <= 1.0
    with pytest.raises(DomainError):
        dirichlet_bound_check(5, 0.0, [0.0, 1.0])
    with pytest.raises(DomainError):
        vallee_poussin(0)
