"""Limit laws of the endpoint: critical compound Gaussian and globular phase.

At ``gamma(T) sqrt(T) -> kappa`` the rescaled endpoint has density

    q_kappa(y) = int_0^1 (2 pi tau)^(-3/2) exp(-|y|^2 / 2 tau) v_kappa(tau) d tau,

with the positive mixing density

    v_kappa(tau) = [ 2 int_0^inf sqrt(2 s) exp(-s (1-tau)) / (2 s + kappa^2) ds
                     + 2 pi kappa exp(kappa^2 (1-tau)/2) 1{kappa > 0} ] / D(kappa).

The complex constant of the contour derivation is carried as the real
normalizer ``D``; no complex arithmetic appears here.
"""

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NonConvergenceError
from .kernels import PSI1_L1_NORM, as_point, eigenfunction_psi
from .specfun import erfcx, maxwell_cdf

_QUAD = dict(epsabs=0.0, epsrel=1e-13, limit=400)


def _quad(f, a, b, **kw):
    opts = dict(_QUAD, **kw)
    val, err = integrate.quad(f, a, b, **opts)
    if not np.isfinite(val) or err > max(1e-8 * abs(val), 10.0 * opts["epsabs"], 1e-300):
        raise NonConvergenceError(f"quadrature did not converge (value {val}, error {err})")
    return val


def _one_minus_erfcx(a):
    """``1 - erfcx(a)`` without cancellation for small ``a``."""
    if abs(a) < 0.5:
        n = np.arange(1, 40)
        return float(-np.sum((-a) ** n / special.gamma(0.5 * n + 1.0)))
    return 1.0 - erfcx(a)


def normalization_D(kappa):
    """Real normalizer ``D(kappa) > 0`` of the mixing density.

    ``D = 2 sqrt2 int_0^inf (e^{k^2/2} - e^{-s^2}) / (s^2 + k^2/2) ds
          + 2 pi (e^{k^2/2} - 1) / k``

    With ``int_0^inf e^{-s^2} / (s^2 + a^2) ds = (pi / 2a) erfcx(a)`` and
    ``a = |k| / sqrt2`` this is ``(2 pi / |k|) (1 - erfcx(a))`` for ``k < 0``
    and ``(2 pi / k) (2 e^{k^2/2} - 1 - erfcx(a))`` for ``k > 0``; both tend
    to ``2 sqrt(2 pi)`` at ``k = 0``.
    """
    kappa = float(kappa)
    if not np.isfinite(kappa):
        raise DomainError("kappa must be finite")
    if kappa == 0.0:
        return 2.0 * np.sqrt(2.0 * np.pi)
    a = abs(kappa) / np.sqrt(2.0)
    base = _one_minus_erfcx(a)
    if kappa < 0:
        return float(2.0 * np.pi / abs(kappa) * base)
    return float(2.0 * np.pi / kappa * (2.0 * np.expm1(0.5 * kappa * kappa) + base))


def _mixing_numerator(kappa, s):
    """``D * v_kappa(1 - s)`` for ``s = 1 - tau`` in ``(0, 1)``.

    The sigma integral is taken in ``sigma = w^2`` so the integrand is smooth.
    """
    k2 = kappa * kappa
    val = _quad(
        lambda w: 4.0 * np.sqrt(2.0) * w * w * np.exp(-s * w * w) / (2.0 * w * w + k2),
        0.0, np.inf,
    )
    if kappa > 0:
        val += 2.0 * np.pi * kappa * np.exp(0.5 * k2 * s)
    return val


def mixing_density_v(kappa, tau, D=None):
    """Mixing density ``v_kappa(tau)`` of the compound-Gaussian endpoint law."""
    tau = float(tau)
    if not 0.0 < tau < 1.0:
        raise DomainError("mixing density is defined for 0 < tau < 1")
    if D is None:
        D = normalization_D(kappa)
    return _mixing_numerator(kappa, 1.0 - tau) / D


def _mixing_tail_u(kappa, tau, D=None):
    """``u_kappa(tau) = int_tau^1 v_kappa``; identically zero for ``tau >= 1``."""
    if tau >= 1.0:
        return 0.0
    if D is None:
        D = normalization_D(kappa)
    # tau = 1 - w^2 removes the (1 - tau)^(-1/2) endpoint singularity
    top = np.sqrt(1.0 - max(tau, 0.0))
    return _quad(lambda w: 2.0 * w * _mixing_numerator(kappa, w * w) / D, 0.0, top, epsrel=1e-11)


def _mixture_integral(kappa, g, D=None, scale=None, epsabs=0.0):
    """``int_0^1 g(tau) v_kappa(tau) d tau`` with ``tau = 1 - w^2``.

    ``scale`` marks a value of ``tau`` where ``g`` changes quickly.
    """
    if D is None:
        D = normalization_D(kappa)

    def f(w):
        s = w * w
        return 2.0 * w * g(1.0 - s) * _mixing_numerator(kappa, s)

    pts = None
    if scale is not None and 0.0 < scale < 1.0:
        pts = [np.sqrt(1.0 - scale)]
    return _quad(f, 0.0, 1.0, epsrel=1e-11, epsabs=epsabs * D, points=pts) / D


def endpoint_density_q(kappa, y, D=None):
    """Compound-Gaussian density ``q_kappa(y)`` of the critical endpoint, ``y != 0``."""
    rho = as_point(y).radius
    if not rho > 0:
        raise DomainError("q_kappa is evaluated away from the origin only")

    def gauss(tau):
        if tau <= 0.0:
            return 0.0
        return np.exp(-0.5 * rho * rho / tau) / (2.0 * np.pi * tau) ** 1.5

    return _mixture_integral(kappa, gauss, D, scale=rho * rho)


def endpoint_radial_cdf(kappa, R, D=None):
    """``P(|Y| <= R)`` under ``q_kappa``: the ``v``-mixture of Maxwell CDFs."""
    R = float(R)
    if R <= 0.0:
        return 0.0

    def g(tau):
        if tau <= 0.0:
            return 1.0
        return maxwell_cdf(R / np.sqrt(tau))

    return _mixture_integral(kappa, g, D, scale=R * R, epsabs=1e-14)


def globular_endpoint_density(y):
    """Limiting endpoint density ``psi_1(y) / ||psi_1||_1`` in the globular phase."""
    rho = as_point(y).radius
    if not rho > 0:
        raise DomainError("globular endpoint density is undefined at the origin")
    return eigenfunction_psi(1.0, rho) / PSI1_L1_NORM


def globular_radial_density(rho):
    """Radial law of the globular endpoint: ``rho exp(-rho)`` (Gamma(2, 1))."""
    rho = np.asarray(rho, dtype=float)
    return np.where(rho > 0, rho * np.exp(-rho), 0.0)


def globular_radial_cdf(rho):
    rho = np.maximum(np.asarray(rho, dtype=float), 0.0)
    return -np.expm1(-rho) - rho * np.exp(-rho)


def bulk_radial_cdf(rho):
    """Radial law ``2 exp(-2 rho)`` of the invariant density ``psi_1^2``."""
    return -np.expm1(-2.0 * np.maximum(np.asarray(rho, dtype=float), 0.0))
