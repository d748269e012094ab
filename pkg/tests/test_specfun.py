import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from homopolymer.errors import DomainError
from homopolymer.specfun import erfc, erfcx, free_heat_kernel, maxwell_cdf

from oracles import erfc_mp, erfcx_mp

# erfc(1) from a 40-digit evaluation, frozen
ERFC_1 = 0.15729920705028513066


def test_erfc_simple_values():
    assert erfc(0.0) == 1.0
    assert erfc(-1.0) == pytest.approx(2.0 - erfc(1.0), rel=1e-15)
    assert erfc(1.0) == pytest.approx(ERFC_1, rel=1e-15)


@pytest.mark.parametrize("x", np.linspace(-6.0, 6.0, 49))
def test_erfc_matches_high_precision(x):
    assert erfc(x) == pytest.approx(erfc_mp(x), rel=1e-14)


@pytest.mark.parametrize("x", [-30.0, -8.0, 7.0, 10.0, 26.0, 27.5, 30.0, 40.0])
def test_erfc_beyond_six(x):
    ref = erfc_mp(x)
    assert abs(erfc(x) - ref) <= max(1e-14 * ref, 1e-300)


@given(st.floats(-8.0, 8.0))
def test_erfc_reflection(x):
    assert erfc(x) + erfc(-x) == pytest.approx(2.0, abs=1e-14)


def test_erfc_decreasing():
    assert np.all(np.diff(erfc(np.linspace(-5, 5, 2001))) < 0)


def test_erfcx_values():
    assert erfcx(0.0) == 1.0
    assert erfcx(100.0) == pytest.approx(1.0 / (100.0 * np.sqrt(np.pi)), rel=1e-4)
    assert erfcx(2.0) == pytest.approx(np.exp(4.0) * erfc_mp(2.0), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, 1e-3, 0.5, 3.0, 27.0, 1e3, 1e6, 1e8])
def test_erfcx_relative_accuracy(x):
    assert erfcx(x) == pytest.approx(erfcx_mp(x), rel=1e-13)


@given(st.floats(-5.0, 5.0))
def test_erfcx_erfc_consistency(x):
    assert erfcx(x) * np.exp(-x * x) == pytest.approx(erfc(x), rel=1e-12)


def test_erfcx_overflow_signalled():
    with pytest.raises(OverflowError):
        erfcx(-27.0)
    with pytest.raises(OverflowError):
        erfcx(np.array([0.0, -30.0]))
    assert np.isfinite(erfcx(-26.0))


def test_free_kernel_values():
    assert free_heat_kernel(1.0, 0.0) == pytest.approx((2 * np.pi) ** -1.5, rel=1e-15)
    assert free_heat_kernel(4.0, 2.0) / free_heat_kernel(1.0, 1.0) == pytest.approx(4.0 ** -1.5, rel=1e-14)
    assert free_heat_kernel(1.0, 1.0) == pytest.approx((2 * np.pi) ** -1.5 * np.exp(-0.5), rel=1e-15)
    with pytest.raises(DomainError):
        free_heat_kernel(0.0, 1.0)


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_free_kernel_normalized(t):
    val, _ = integrate.quad(lambda r: 4 * np.pi * r * r * free_heat_kernel(t, r), 0, np.inf,
                            epsabs=0, epsrel=1e-13)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_maxwell_cdf_is_chi3():
    from scipy import stats

    x = np.linspace(0, 6, 61)
    assert np.allclose(maxwell_cdf(x), stats.chi(3).cdf(x), atol=1e-15)
