"""Quadrature over R^3 in spherical coordinates about the polar axis.

Used as an independent check on total masses and semigroup identities.
The radial integral is adaptive (:func:`scipy.integrate.quad`); the angular
integral is a tensor Gauss-Legendre rule in ``cos(theta)`` times the
trapezoid rule in the azimuth, which is spectrally accurate for smooth
periodic integrands.
"""

import numpy as np
from scipy import integrate


def _angular_rule(n_cos, n_phi, panels):
    x, w = np.polynomial.legendre.leggauss(n_cos)
    # panels cluster towards cos = 1 where Gaussians centred on the axis peak
    edges = np.concatenate([[-1.0], 1.0 - 2.0 * 0.5 ** np.arange(panels - 1, 0, -1), [1.0]])
    edges = np.unique(edges)
    cs, cw = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        cs.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
        cw.append(0.5 * (hi - lo) * w)
    c = np.concatenate(cs)
    wc = np.concatenate(cw)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    return c, wc, phi, 2.0 * np.pi / n_phi


def integrate_space(f, breakpoints=(), n_cos=48, n_phi=1, panels=6, epsrel=1e-11, limit=400):
    """Integrate ``f(points)`` over R^3.

    ``f`` receives an ``(..., 3)`` array of Cartesian points and returns values
    of shape ``(...)``. Leave ``n_phi=1`` for integrands symmetric about the
    polar axis. ``breakpoints`` are radii where the integrand has structure.
    """
    c, wc, phi, wphi = _angular_rule(n_cos, n_phi, panels)
    s = np.sqrt(np.maximum(1.0 - c * c, 0.0))
    dirs = np.stack(
        [s[:, None] * np.cos(phi)[None, :], s[:, None] * np.sin(phi)[None, :],
         np.broadcast_to(c[:, None], (c.size, phi.size))],
        axis=-1,
    )
    weights = wc[:, None] * wphi

    def shell(rho):
        return rho * rho * np.sum(weights * f(rho * dirs))

    pts = sorted(b for b in breakpoints if b > 0)
    edges = [0.0] + pts
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(shell, lo, hi, epsabs=0.0, epsrel=epsrel, limit=limit)
        total += v
        err += e
    v, e = integrate.quad(shell, edges[-1], np.inf, epsabs=0.0, epsrel=epsrel, limit=limit)
    return total + v, err + e


def integrate_radial(density, lo=0.0, hi=np.inf, breakpoints=(), epsrel=1e-12):
    """``int density(rho) d rho`` with optional interior breakpoints."""
    edges = [lo] + sorted(b for b in breakpoints if lo < b < hi) + [hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(density, a, b, epsabs=0.0, epsrel=epsrel, limit=400)[0]
    return total
