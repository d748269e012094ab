"""Point-interaction kernels: resolvent, heat kernel, partition function.

Every time-domain kernel has two evaluation routes. The ``"closed"`` route
uses the erfc form of the inverse transform

    L^{-1}[exp(-sqrt(2 lam) u) / (sqrt(2 lam) - gamma)](t)
        = exp(-u^2/2t) / sqrt(2 pi t)
          + (gamma/2) exp(gamma^2 t/2 - gamma u) erfc(u/sqrt(2t) - gamma sqrt(t/2)),

called the *point bracket* below. The ``"quadrature"`` route inverts the
resolvent numerically on the ray contour and never touches erfc. The two are
compared in the tests and in the ``kernel-selftest`` experiment.

Radial arguments are lengths (``r1 = |x|``, ``r2 = |y|``, ``d = |x - y|``);
the public wrappers accept :class:`SpatialPoint` or plain 3-vectors.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import CoincidenceError, DomainError, SpectrumError
from .laplace import ContourSpec, invert_laplace, sqrt2
from .specfun import erfc, erfcx, free_heat_kernel

SQRT_2PI = np.sqrt(2.0 * np.pi)
PSI1_L1_NORM = 2.0 * SQRT_2PI


@dataclass(frozen=True)
class SpatialPoint:
    """A point of R^3 stored as radius and unit direction."""

    radius: float
    direction: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if not self.radius >= 0:
            raise DomainError("radius must be non-negative")
        n = np.linalg.norm(self.direction)
        if abs(n - 1.0) > 1e-12:
            raise DomainError(f"direction must be a unit vector, got norm {n}")

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        r = float(np.linalg.norm(v))
        if r == 0.0:
            return cls(0.0)
        return cls(r, tuple(v / r))

    @property
    def vector(self):
        return self.radius * np.asarray(self.direction)


@dataclass(frozen=True)
class KernelValue:
    value: float
    method: str
    error_estimate: float = 0.0


def as_point(p):
    if isinstance(p, SpatialPoint):
        return p
    if np.ndim(p) == 0:
        return SpatialPoint(float(p))
    return SpatialPoint.from_vector(p)


def pair_geometry(x, y):
    """Return ``(|x|, |y|, |x - y|)``."""
    x, y = as_point(x), as_point(y)
    return x.radius, y.radius, float(np.linalg.norm(x.vector - y.vector))


def _check_method(method):
    if method not in ("closed", "quadrature"):
        raise ValueError(f"method must be 'closed' or 'quadrature', got {method!r}")


# --- closed forms, vectorized -------------------------------------------------


def point_bracket(u, t, gamma):
    """Closed-form inverse transform of ``exp(-sqrt(2 lam) u)/(sqrt(2 lam) - gamma)``.

    Uses ``exp(gamma^2 t/2 - gamma u) erfc(z) = erfcx(z) exp(-u^2/2t)`` for
    ``z >= 0`` so nothing overflows when ``gamma < 0``.
    """
    u, t = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(t, dtype=float))
    gauss = np.exp(-0.5 * u * u / t)
    z = u / np.sqrt(2.0 * t) - gamma * np.sqrt(0.5 * t)
    out = gauss / np.sqrt(2.0 * np.pi * t)
    pos = z >= 0
    if gamma != 0.0:
        if np.any(pos):
            out = np.where(pos, out + 0.5 * gamma * gauss * erfcx(np.where(pos, z, 0.0)), out)
        if np.any(~pos):
            zn = np.where(pos, 0.0, z)
            expo = 0.5 * gamma * gamma * t - gamma * u + np.log(erfc(zn))
            out = np.where(pos, out, out + 0.5 * gamma * np.exp(expo))
    return out if out.ndim else float(out)


def heat_kernel_closed(gamma, t, r1, r2, d):
    """Vectorized closed-form heat kernel on radial geometry arrays."""
    r1, r2 = np.asarray(r1, dtype=float), np.asarray(r2, dtype=float)
    return free_heat_kernel(t, d) + point_bracket(r1 + r2, t, gamma) / (2.0 * np.pi * (r1 * r2))


def bracket_time_integral(gamma, t, r, epsrel=1e-13):
    """``int_0^t point_bracket(r, s) ds`` for an array of radii ``r``.

    Adaptive (vector-valued) Gauss-Kronrod in ``w`` with ``s = t w^2``, which
    removes the ``s^(-1/2)`` behaviour as ``r -> 0``.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))

    # Gauss-Kronrod never evaluates the endpoint w = 0
    def f(w):
        return 2.0 * t * w * point_bracket(r, t * w * w, gamma)

    val, err = integrate.quad_vec(f, 0.0, 1.0, epsabs=0.0, epsrel=epsrel, norm="max", limit=400)
    return val, err


def zbar_closed(gamma, t, r):
    """Vectorized partition function ``1 + (1/r) int_0^t bracket``; ``t = 0`` gives 1."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if t == 0.0:
        return np.ones_like(r)
    val, _ = bracket_time_integral(gamma, t, r)
    return 1.0 + val / r


def origin_bracket_integral(gamma, T):
    """``int_0^T point_bracket(0, s) ds`` in closed form.

    Equals ``(erfcx(-gamma sqrt(T/2)) - 1) / gamma``; the power series
    ``sqrt(T/2) sum_{n>=1} x^(n-1) / Gamma(n/2 + 1)`` with ``x = gamma sqrt(T/2)``
    is used near ``gamma = 0`` where the quotient cancels.
    """
    c = np.sqrt(0.5 * T)
    x = gamma * c
    if abs(x) < 0.5:
        n = np.arange(1, 40)
        return float(c * np.sum(x ** (n - 1) / special.gamma(0.5 * n + 1.0)))
    return float((erfcx(-x) - 1.0) / gamma)


def origin_ratio_radial(gamma, t, T, rho):
    """Vectorized ``lim_{|x| -> 0} p(t, x, y) / Z(T, x)`` as a function of ``|y|``."""
    rho = np.asarray(rho, dtype=float)
    return point_bracket(rho, t, gamma) / (2.0 * np.pi * rho) / origin_bracket_integral(gamma, T)


# --- public operations --------------------------------------------------------


def resolvent_kernel(lam, gamma, x, y):
    """Kernel of ``(lam - L_gamma)^{-1}`` for the point-interaction operator.

    ``exp(-sqrt(2 lam)|x-y|)/(2 pi |x-y|)
    + exp(-sqrt(2 lam)(|x|+|y|)) / ((sqrt(2 lam) - gamma) 2 pi |x||y|)``
    """
    lam = complex(lam)
    if lam.imag == 0.0 and lam.real <= 0.0:
        raise SpectrumError(f"lambda = {lam} lies on the continuous spectrum (-inf, 0]")
    if gamma > 0 and lam == complex(0.5 * gamma * gamma):
        raise SpectrumError(f"lambda = {lam} is the eigenvalue gamma^2/2")
    r1, r2, d = pair_geometry(x, y)
    if r1 == 0.0 or r2 == 0.0:
        raise DomainError("resolvent kernel is undefined at the origin")
    if d == 0.0:
        raise CoincidenceError("resolvent kernel is singular at x = y")
    k = sqrt2(lam)
    free = np.exp(-k * d) / (2.0 * np.pi * d)
    point = np.exp(-k * (r1 + r2)) / ((k - gamma) * 2.0 * np.pi * r1 * r2)
    return complex(free + point)


def eigenfunction_psi(gamma, r):
    """Normalized bound state ``sqrt(gamma/2pi) exp(-gamma r)/r`` (``gamma > 0``)."""
    if not gamma > 0:
        raise DomainError("the bound state exists only for gamma > 0")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("eigenfunction needs r > 0")
    out = np.sqrt(gamma / (2.0 * np.pi)) * np.exp(-gamma * r) / r
    return out if out.ndim else float(out)


def _kernel_abscissa(gamma, t, u):
    # saddle of exp(lam t - sqrt(2 lam) u) keeps the integrand at the scale of the result
    saddle = 0.5 * u * u / (t * t)
    pole = 0.5 * gamma * gamma if gamma > 0 else 0.0
    return max(saddle, pole + 1.0 / t)


def _point_term_quadrature(gamma, t, u, scale):
    contour = ContourSpec(_kernel_abscissa(gamma, t, u))
    sing = [0.0] + ([0.5 * gamma * gamma] if gamma > 0 else [])

    def logF(lam):
        k = sqrt2(lam)
        return -k * u - np.log(k - gamma) - np.log(scale)

    return invert_laplace(logF, t, contour, sing, log_form=True)


def _free_term_quadrature(t, d):
    contour = ContourSpec(_kernel_abscissa(0.0, t, d))

    def logF(lam):
        return -sqrt2(lam) * d - np.log(2.0 * np.pi * d)

    return invert_laplace(logF, t, contour, [0.0], log_form=True)


def heat_kernel(gamma, t, x, y, method="closed"):
    """Kernel ``p_gamma(t, x, y)`` of the semigroup generated by ``L_gamma``."""
    _check_method(method)
    if not t > 0:
        raise DomainError("heat kernel needs t > 0")
    r1, r2, d = pair_geometry(x, y)
    if r1 == 0.0 or r2 == 0.0:
        raise DomainError("heat kernel at the origin is only available through origin_ratio")
    if method == "closed":
        return KernelValue(float(heat_kernel_closed(gamma, t, r1, r2, d)), "closed")
    if d == 0.0:
        raise CoincidenceError("quadrature route needs x != y")
    free = _free_term_quadrature(t, d)
    point = _point_term_quadrature(gamma, t, r1 + r2, 2.0 * np.pi * r1 * r2)
    return KernelValue(
        free.value + point.value, "quadrature", free.error_estimate + point.error_estimate
    )


def partition_function(gamma, t, r, method="closed"):
    """Total mass ``Z_gamma(t, x) = int p_gamma(t, x, y) dy`` at ``|x| = r``."""
    _check_method(method)
    if not t > 0:
        raise DomainError("partition function needs t > 0")
    r = as_point(r).radius
    if not r > 0:
        raise DomainError("partition function needs |x| > 0")
    if method == "closed":
        val, err = integrate.quad(
            lambda w: 2.0 * t * w * point_bracket(r, t * w * w, gamma),
            0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=400,
        )
        return KernelValue(1.0 + val / r, "closed", err / r)

    contour = ContourSpec(_kernel_abscissa(gamma, t, r))
    sing = [0.0] + ([0.5 * gamma * gamma] if gamma > 0 else [])

    def logF(lam):
        k = sqrt2(lam)
        return -k * r - np.log(k - gamma) - np.log(lam * r)

    res = invert_laplace(logF, t, contour, sing, log_form=True)
    return KernelValue(1.0 + res.value, "quadrature", res.error_estimate)


def transition_density(t, x, y):
    """Bulk transition density ``p_1(t,x,y) psi_1(y) / psi_1(x) exp(-t/2)``."""
    r1, r2, _ = pair_geometry(x, y)
    if r1 == 0.0 or r2 == 0.0:
        raise DomainError("transition density needs x, y away from the origin")
    if not t > 0:
        raise DomainError("transition density needs t > 0")
    _, _, d = pair_geometry(x, y)
    return KernelValue(float(transition_density_radial(t, r1, r2, d)), "closed")


def transition_density_radial(t, r1, r2, d):
    """Vectorized :func:`transition_density` on radial geometry arrays."""
    r1, r2, d = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (r1, r2, d)))
    # exponents are combined before exponentiating: exp(r1) alone overflows for large |x|
    shift = r1 - r2 - 0.5 * t
    u = r1 + r2
    free = np.exp(-0.5 * d * d / t + shift) / (2.0 * np.pi * t) ** 1.5
    z = u / np.sqrt(2.0 * t) - np.sqrt(0.5 * t)
    gauss = np.exp(-0.5 * u * u / t + shift)
    zp = np.where(z >= 0, z, 0.0)
    zn = np.where(z >= 0, 0.0, z)
    tail = np.where(z >= 0, gauss * erfcx(zp), np.exp(-2.0 * r2) * erfc(zn))
    point = (gauss / np.sqrt(2.0 * np.pi * t) + 0.5 * tail) / (2.0 * np.pi * r1 * r2)
    out = (free + point) * r1 / r2
    return out if out.ndim else float(out)


def asymptotic_leading(t, x, y):
    """Large-``t`` leading terms of ``p_1(t,x,y)`` and ``Z_1(t,|x|)``.

    Returns ``(exp(t/2) psi_1(x) psi_1(y), exp(t/2) ||psi_1||_1 psi_1(x))``.
    """
    if not t > 0:
        raise DomainError("asymptotics need t > 0")
    r1, r2, _ = pair_geometry(x, y)
    px = eigenfunction_psi(1.0, r1)
    py = eigenfunction_psi(1.0, r2)
    g = np.exp(0.5 * t)
    return g * px * py, g * PSI1_L1_NORM * px


def origin_ratio(gamma, t, T, y):
    """``lim_{|x| -> 0} p_gamma(t, x, y) / Z_gamma(T, x)`` for ``0 < t <= T``."""
    if not t > 0:
        raise DomainError("origin_ratio needs t > 0")
    if T < t:
        raise DomainError("origin_ratio needs t <= T")
    rho = as_point(y).radius
    if not rho > 0:
        raise DomainError("origin_ratio needs y away from the origin")
    return float(origin_ratio_radial(gamma, t, T, rho))


def forward_equation_residual(t, x_radius, rho, cos_theta, h=1e-3):
    """Check ``d/dt r = M* r`` for the bulk transition density.

    ``M* f = (1/rho^2)[ (1/2) g'' + g' ] + (1/(2 rho^2)) Lap_sphere f`` with
    ``g = rho^2 f`` is the Lebesgue adjoint of the generator
    ``M = (1/2) d^2/drho^2 + Lap_sphere/(2 rho^2) - d/drho``. Derivatives are
    centred differences; ``x`` lies on the polar axis. Returns the arrays
    ``(dr/dt, M* r)`` on the ``rho x cos_theta`` grid.
    """
    rho, c = np.meshgrid(np.asarray(rho, float), np.asarray(cos_theta, float), indexing="ij")

    def dens(tt, rr, cc):
        d = np.sqrt(np.maximum(x_radius**2 + rr * rr - 2.0 * x_radius * rr * cc, 0.0))
        return transition_density_radial(tt, x_radius, rr, d)

    dt = h * t
    lhs = (dens(t + dt, rho, c) - dens(t - dt, rho, c)) / (2.0 * dt)

    def g(rr):
        return rr * rr * dens(t, rr, c)

    g0, gp, gm = g(rho), g(rho + h), g(rho - h)
    radial = (0.5 * (gp - 2.0 * g0 + gm) / (h * h) + (gp - gm) / (2.0 * h)) / rho**2

    # Lap_sphere f = d/dc[(1 - c^2) df/dc] for axisymmetric f
    def flux(cc):
        return (1.0 - cc * cc) * (dens(t, rho, cc + 0.5 * h) - dens(t, rho, cc - 0.5 * h)) / h

    angular = (flux(c + 0.5 * h) - flux(c - 0.5 * h)) / h
    rhs = radial + 0.5 * angular / rho**2
    return lhs, rhs
