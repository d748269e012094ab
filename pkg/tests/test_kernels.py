import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import integrate

from homopolymer import checks
from homopolymer.errors import CoincidenceError, DomainError, SpectrumError
from homopolymer.kernels import (
    PSI1_L1_NORM,
    SpatialPoint,
    asymptotic_leading,
    eigenfunction_psi,
    heat_kernel,
    heat_kernel_closed,
    origin_bracket_integral,
    origin_ratio,
    pair_geometry,
    partition_function,
    point_bracket,
    resolvent_kernel,
    transition_density,
    zbar_closed,
)
from homopolymer.specfun import free_heat_kernel


def pair(r1, r2, d):
    return checks._pair(r1, r2, d)


# --- geometry ------------------------------------------------------------------


def test_pair_geometry_roundtrip():
    x, y = pair(1.0, 2.0, 1.5)
    assert pair_geometry(x, y) == pytest.approx((1.0, 2.0, 1.5), rel=1e-14)


def test_spatial_point_validation():
    with pytest.raises(DomainError):
        SpatialPoint(-1.0)
    with pytest.raises(DomainError):
        SpatialPoint(1.0, (1.0, 1.0, 0.0))


# --- resolvent -----------------------------------------------------------------


def test_resolvent_symmetric():
    x, y = pair(0.7, 1.9, 1.4)
    for lam in (0.3, 2.0 + 1.0j):
        assert resolvent_kernel(lam, -0.4, x, y) == resolvent_kernel(lam, -0.4, y, x)


def test_resolvent_pole_residue():
    x, y = pair(1.0, 1.0, 1.0)
    deltas = np.array([1e-2, 1e-3, 1e-4])
    vals = np.array([(d * resolvent_kernel(0.5 + d, 1.0, x, y)).real for d in deltas])
    # linear Richardson extrapolation to delta = 0 from the two smallest offsets
    limit = vals[2] + (vals[2] - vals[1]) * deltas[2] / (deltas[1] - deltas[2])
    target = eigenfunction_psi(1.0, 1.0) ** 2
    assert limit == pytest.approx(target, rel=1e-6)
    assert abs(vals[2] - target) < abs(vals[1] - target) < abs(vals[0] - target)


def test_resolvent_is_laplace_transform_of_heat_kernel():
    x, y = pair(1.0, 1.0, 1.0)
    f = lambda t: np.exp(-2.0 * t) * heat_kernel_closed(-1.0, t, 1.0, 1.0, 1.0)
    val = sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
              for a, b in ((0, 1), (1, 10), (10, np.inf)))
    assert val == pytest.approx(resolvent_kernel(2.0, -1.0, x, y).real, rel=1e-6)


def test_resolvent_errors():
    x, y = pair(1.0, 1.0, 1.0)
    with pytest.raises(SpectrumError):
        resolvent_kernel(-1.0, 0.0, x, y)
    with pytest.raises(SpectrumError):
        resolvent_kernel(0.5, 1.0, x, y)
    with pytest.raises(CoincidenceError):
        resolvent_kernel(1.0, 0.0, x, x)
    with pytest.raises(DomainError):
        resolvent_kernel(1.0, 0.0, SpatialPoint(0.0), y)


# --- eigenfunction -------------------------------------------------------------


def test_psi_scaling():
    assert eigenfunction_psi(2.0, 0.7) == pytest.approx(2.0**1.5 * eigenfunction_psi(1.0, 1.4), rel=1e-14)


def test_psi_norms():
    n = checks.psi_norms()
    assert n["psi_l2_err"] <= 1e-12 and n["psi_l1_err"] <= 1e-12


@pytest.mark.parametrize("gamma,r", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)])
def test_psi_domain(gamma, r):
    with pytest.raises(DomainError):
        eigenfunction_psi(gamma, r)


# --- heat kernel -----------------------------------------------------------------


def test_heat_kernel_gamma_zero_example():
    x, y = pair(1.0, 1.0, 1.0)
    expected = free_heat_kernel(1.0, 1.0) + np.exp(-2.0) / (2 * np.pi * np.sqrt(2 * np.pi))
    assert heat_kernel(0.0, 1.0, x, y).value == pytest.approx(expected, rel=1e-14)
    q = heat_kernel(0.0, 1.0, x, y, "quadrature")
    assert abs(q.value - expected) <= q.error_estimate + 1e-15


def test_heat_kernel_symmetry_and_self_similarity():
    x, y = pair(1.0, 2.0, 1.5)
    assert heat_kernel(0.5, 1.0, x, y).value == heat_kernel(0.5, 1.0, y, x).value
    X, Y = SpatialPoint(2.0, x.direction), SpatialPoint(4.0, y.direction)
    lhs = heat_kernel(0.5, 4.0, X, Y).value
    assert lhs == pytest.approx(heat_kernel(1.0, 1.0, x, y).value / 8.0, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(-3.0, 3.0), st.floats(0.05, 20.0), st.floats(0.05, 6.0), st.floats(0.05, 6.0),
    st.floats(0.0, 1.0), st.floats(0.25, 4.0),
)
def test_self_similarity_property(g, t, r1, r2, frac, a):
    d = abs(r1 - r2) + frac * (r1 + r2 - abs(r1 - r2))
    s = np.sqrt(a)
    lhs = heat_kernel_closed(g, a * t, s * r1, s * r2, s * d)
    rhs = heat_kernel_closed(g * s, t, r1, r2, d) / a**1.5
    assert lhs == pytest.approx(rhs, rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.floats(-5.0, 5.0), st.floats(0.01, 50.0), st.floats(0.01, 20.0), st.floats(0.01, 20.0), st.floats(0, 1))
def test_heat_kernel_positive_and_symmetric(g, t, r1, r2, frac):
    d = abs(r1 - r2) + frac * (r1 + r2 - abs(r1 - r2))
    assume(d * d / (2 * t) < 600)  # keep the Gaussian factor representable
    v = heat_kernel_closed(g, t, r1, r2, d)
    assert v > 0
    assert v == heat_kernel_closed(g, t, r2, r1, d)


def test_positive_on_grid_including_strong_repulsion():
    for g, t, r1, r2, d in checks.kernel_grid():
        assert heat_kernel_closed(g, t, r1, r2, d) > 0
        assert heat_kernel_closed(-5.0, t, r1, r2, d) > 0


def test_closed_matches_quadrature_within_estimate():
    out = checks.kernel_master()
    assert out["kernel_max_rel_err"] <= 1e-8
    assert out["kernel_within_estimate"] == 1.0


def test_bracket_no_overflow_for_strong_repulsion():
    v = point_bracket(np.array([0.0, 1.0, 40.0]), 200.0, -30.0)
    assert np.all(np.isfinite(v)) and np.all(v > 0)


def test_heat_kernel_errors():
    x, y = pair(1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        heat_kernel(1.0, 0.0, x, y)
    with pytest.raises(DomainError):
        heat_kernel(1.0, 1.0, SpatialPoint(0.0), y)
    with pytest.raises(CoincidenceError):
        heat_kernel(1.0, 1.0, x, x, "quadrature")
    with pytest.raises(ValueError):
        heat_kernel(1.0, 1.0, x, y, "series")


def test_chapman_kolmogorov():
    assert checks.chapman_kolmogorov()["ck_max_rel_residual"] <= 1e-4


# --- partition function ----------------------------------------------------------


def test_zbar_far_field():
    assert abs(partition_function(1.0, 1.0, 50.0).value - 1.0) < 1e-10


def test_zbar_is_total_mass():
    z = partition_function(-1.0, 1.0, 1.0).value
    assert checks._space_mass(-1.0, 1.0, 1.0) == pytest.approx(z, rel=1e-6)


def test_zbar_self_similarity():
    lhs = partition_function(0.5, 4.0, 2.0).value
    assert lhs == pytest.approx(partition_function(1.0, 1.0, 1.0).value, rel=1e-12)


def test_zbar_three_ways():
    assert checks.zbar_three_way()["zbar_max_rel_err"] <= 1e-6


def test_zbar_gamma_zero_closed_form():
    # int_0^t of the gamma = 0 bracket is sqrt(2t/pi) e^{-r^2/2t} - r erfc(r / sqrt(2t))
    from scipy.special import erfc

    t, r = 2.0, 0.7
    ref = 1 + (np.sqrt(2 * t / np.pi) * np.exp(-r * r / (2 * t)) - r * erfc(r / np.sqrt(2 * t))) / r
    assert partition_function(0.0, t, r).value == pytest.approx(ref, rel=1e-13)
    assert zbar_closed(0.0, t, [r])[0] == pytest.approx(ref, rel=1e-12)


def test_zbar_errors():
    with pytest.raises(DomainError):
        partition_function(1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        partition_function(1.0, 1.0, 0.0)


# --- bulk transition density and asymptotics ---------------------------------------


def test_transition_mass_and_stationarity():
    c = checks.transition_checks()
    assert c["r_mass_err"] <= 1e-6 and c["r_stationarity_err"] <= 1e-5


def test_transition_long_time_limit():
    x, y = pair(1.0, 1.0, 1.0)
    v = transition_density(30.0, x, y).value
    assert v == pytest.approx(eigenfunction_psi(1.0, 1.0) ** 2, rel=1e-6)


def test_transition_far_from_origin_finite():
    x, y = pair(800.0, 1.0, 799.5)
    assert np.isfinite(transition_density(1.0, x, y).value)
    x, y = pair(2.0, 1.5, 1.0)
    direct = heat_kernel(1.0, 0.7, x, y).value * eigenfunction_psi(1.0, 1.5) / eigenfunction_psi(1.0, 2.0)
    assert transition_density(0.7, x, y).value == pytest.approx(direct * np.exp(-0.35), rel=1e-13)


def test_leading_asymptotics():
    x, y = pair(1.0, 1.0, 1.0)
    gaps = [abs(heat_kernel(1.0, t, x, y).value / asymptotic_leading(t, x, y)[0] - 1) for t in (10, 20, 30)]
    assert gaps[0] > gaps[1] > gaps[2]
    z = partition_function(1.0, 30.0, 1.0).value
    assert z / (np.exp(15.0) * PSI1_L1_NORM * eigenfunction_psi(1.0, 1.0)) == pytest.approx(1.0, rel=1e-8)


def test_ratio_form_near_origin():
    x, y = SpatialPoint(0.01), SpatialPoint(1.0, (1.0, 0.0, 0.0))
    ratio = heat_kernel(1.0, 25.0, x, y).value / partition_function(1.0, 25.0, x).value
    assert ratio == pytest.approx(eigenfunction_psi(1.0, 1.0) / PSI1_L1_NORM, rel=1e-4)


def test_forward_equation():
    assert checks.forward_residual()["forward_rel_residual"] <= 1e-3


# --- origin limit ------------------------------------------------------------------


def test_origin_ratio_extrapolation():
    y = SpatialPoint(1.0, (1.0, 0.0, 0.0))
    hs = np.array([1e-2, 1e-3, 1e-4])
    vals = [heat_kernel(0.0, 1.0, SpatialPoint(h), y).value / partition_function(0.0, 1.0, h).value for h in hs]
    limit = vals[2] + (vals[2] - vals[1]) * hs[2] / (hs[1] - hs[2])
    assert limit == pytest.approx(origin_ratio(0.0, 1.0, 1.0, y), rel=1e-6)


def test_origin_ratio_normalized():
    val, _ = integrate.quad(lambda r: 4 * np.pi * r * r * origin_ratio(1.0, 1.0, 1.0, r), 0, np.inf,
                            epsabs=0, epsrel=1e-12, limit=200)
    assert val == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("gamma", [-3.0, -1e-3, 0.0, 1e-3, 0.5, 2.0])
def test_origin_integral_matches_quadrature(gamma):
    T = 1.7
    val, _ = integrate.quad(lambda w: 2 * T * w * point_bracket(0.0, T * w * w, gamma), 0, 1, epsabs=0, epsrel=1e-13)
    assert origin_bracket_integral(gamma, T) == pytest.approx(val, rel=1e-12)


def test_origin_ratio_errors():
    with pytest.raises(DomainError):
        origin_ratio(0.0, 2.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        origin_ratio(0.0, 0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        origin_ratio(0.0, 1.0, 1.0, 0.0)


def test_concurrent_evaluation_is_deterministic():
    from concurrent.futures import ThreadPoolExecutor

    args = list(itertools.islice(checks.kernel_grid(), 40))
    serial = [heat_kernel_closed(*a) for a in args]
    with ThreadPoolExecutor(8) as pool:
        threaded = list(pool.map(lambda a: heat_kernel_closed(*a), args))
    assert serial == threaded
