"""Deterministic numerical checks behind the ``kernel-selftest`` experiment.

Each function returns plain floats so the values can be reported and asserted
against tolerances by the caller.
"""

import itertools
import time

import numpy as np
from scipy import integrate

from . import densities
from .kernels import (
    PSI1_L1_NORM,
    SpatialPoint,
    eigenfunction_psi,
    forward_equation_residual,
    heat_kernel,
    heat_kernel_closed,
    origin_ratio,
    partition_function,
    transition_density_radial,
)
from .quadrature import integrate_space

KERNEL_GAMMAS = (-2.0, -0.5, 0.0, 0.5, 2.0)
KERNEL_TIMES = (0.1, 1.0, 10.0)
KERNEL_RADII = (0.1, 1.0, 5.0)
CK_TRIPLES = ((-1.0, 0.5, 0.5), (0.0, 0.5, 1.0), (1.0, 0.3, 0.7))


def _axis(r):
    return SpatialPoint(r)


def _pair(r1, r2, d):
    """Points with ``|x| = r1``, ``|y| = r2`` and ``|x - y| = d``."""
    c = (r1 * r1 + r2 * r2 - d * d) / (2.0 * r1 * r2)
    c = min(1.0, max(-1.0, c))
    return _axis(r1), SpatialPoint(r2, (np.sqrt(1.0 - c * c), 0.0, c))


def kernel_grid():
    for g, t, r1, r2 in itertools.product(KERNEL_GAMMAS, KERNEL_TIMES, KERNEL_RADII, KERNEL_RADII):
        for d in (abs(r1 - r2) + 0.01, 0.99 * (r1 + r2)):
            yield g, t, r1, r2, d


def kernel_master():
    """Largest relative gap between closed form and contour quadrature of the heat kernel.

    Also reports whether every gap is inside the quadrature error estimate.
    """
    t0 = time.perf_counter()
    worst, inside = 0.0, True
    for g, t, r1, r2, d in kernel_grid():
        x, y = _pair(r1, r2, d)
        c = heat_kernel(g, t, x, y, "closed").value
        q = heat_kernel(g, t, x, y, "quadrature")
        gap = abs(c - q.value)
        worst = max(worst, gap / abs(c))
        inside &= gap <= max(q.error_estimate, 4 * np.finfo(float).eps * abs(c))
    return {"kernel_max_rel_err": worst, "kernel_within_estimate": float(inside),
            "kernel_runtime_s": time.perf_counter() - t0}


def _space_mass(gamma, t, r):
    x = np.array([0.0, 0.0, r])

    def f(pts):
        r2 = np.linalg.norm(pts, axis=-1)
        d = np.linalg.norm(pts - x, axis=-1)
        return heat_kernel_closed(gamma, t, r, r2, d)

    return integrate_space(f, breakpoints=(r,), n_cos=48)[0]


def zbar_three_way():
    t0 = time.perf_counter()
    worst = 0.0
    for g, t, r in itertools.product((-1.0, 0.0, 1.0), (0.5, 2.0), (0.5, 2.0)):
        a = partition_function(g, t, r, "closed").value
        b = partition_function(g, t, r, "quadrature").value
        c = _space_mass(g, t, r)
        worst = max(worst, abs(a - b) / a, abs(a - c) / a, abs(b - c) / a)
    return {"zbar_max_rel_err": worst, "zbar_runtime_s": time.perf_counter() - t0}


def chapman_kolmogorov(x=(0.0, 0.0, 1.0), y=(1.2, 0.0, 0.9)):
    x, y = np.asarray(x, float), np.asarray(y, float)
    rx, ry = np.linalg.norm(x), np.linalg.norm(y)
    worst = 0.0
    for g, s, t in CK_TRIPLES:
        def f(z):
            rz = np.linalg.norm(z, axis=-1)
            a = heat_kernel_closed(g, s, rx, rz, np.linalg.norm(z - x, axis=-1))
            b = heat_kernel_closed(g, t, rz, ry, np.linalg.norm(z - y, axis=-1))
            return a * b

        lhs = integrate_space(f, breakpoints=(rx, ry), n_cos=48, n_phi=48)[0]
        rhs = float(heat_kernel_closed(g, s + t, rx, ry, np.linalg.norm(x - y)))
        worst = max(worst, abs(lhs - rhs) / rhs)
    return {"ck_max_rel_residual": worst}


def psi_norms():
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)
    l2 = integrate.quad(lambda r: 4 * np.pi * r * r * eigenfunction_psi(1.0, r) ** 2, 0, np.inf, **opts)[0]
    l1 = integrate.quad(lambda r: 4 * np.pi * r * r * eigenfunction_psi(1.0, r), 0, np.inf, **opts)[0]
    return {"psi_l2_err": abs(l2 - 1.0), "psi_l1_err": abs(l1 - PSI1_L1_NORM) / PSI1_L1_NORM}


def transition_checks():
    x = np.array([0.0, 0.0, 1.0])

    def mass(pts):
        r2 = np.linalg.norm(pts, axis=-1)
        return transition_density_radial(1.0, 1.0, r2, np.linalg.norm(pts - x, axis=-1))

    m = integrate_space(mass, breakpoints=(1.0,), n_cos=48)[0]

    t = 0.5
    y = x  # |y| = 1 on the axis

    def stat(pts):
        r1 = np.linalg.norm(pts, axis=-1)
        psi2 = eigenfunction_psi(1.0, r1) ** 2
        return psi2 * transition_density_radial(t, r1, 1.0, np.linalg.norm(pts - y, axis=-1))

    s = integrate_space(stat, breakpoints=(1.0,), n_cos=48)[0]
    target = eigenfunction_psi(1.0, 1.0) ** 2
    return {"r_mass_err": abs(m - 1.0), "r_stationarity_err": abs(s - target) / target}


def mixing_checks(kappas=(-5.0, -1.0, 0.0, 1.0, 5.0)):
    taus = np.linspace(0.005, 0.995, 100)
    vmin, norm_err = np.inf, 0.0
    for k in kappas:
        D = densities.normalization_D(k)
        vmin = min(vmin, min(densities.mixing_density_v(k, t, D) for t in taus))
        norm_err = max(norm_err, abs(densities._mixing_tail_u(k, 0.0, D) - 1.0))
    D0 = densities.normalization_D(0.0)
    v0 = max(
        abs(densities.mixing_density_v(0.0, t, D0) * 2.0 * np.sqrt(1.0 - t) - 1.0) for t in taus
    )
    return {"v_min": vmin, "v_norm_max_err": norm_err, "v0_max_rel_err": v0}


def origin_cross_oracle():
    worst = 0.0
    for k in (-1.0, 0.0, 2.0):
        D = densities.normalization_D(k)
        for r in (0.3, 1.0, 2.0):
            q = densities.endpoint_density_q(k, r, D)
            o = origin_ratio(k, 1.0, 1.0, r)
            worst = max(worst, abs(q - o) / o)
    return {"q_origin_max_rel_err": worst}


def forward_residual():
    lhs, rhs = forward_equation_residual(1.0, 1.0, np.linspace(0.2, 4.0, 40), np.linspace(-0.9, 0.9, 7))
    return {"forward_rel_residual": float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))}


def run_all():
    out = {}
    for fn in (kernel_master, zbar_three_way, chapman_kolmogorov, psi_norms, transition_checks,
               mixing_checks, origin_cross_oracle, forward_residual):
        out.update(fn())
    return out
