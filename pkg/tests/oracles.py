"""Independent reference computations used only by the tests."""

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal

mpmath.mp.dps = 40


def erfc_mp(x):
    return float(mpmath.erfc(mpmath.mpf(x)))


def erfcx_mp(x):
    x = mpmath.mpf(x)
    return float(mpmath.exp(x * x) * mpmath.erfc(x))


def _radial_mesh(eps, L, n_in, h_out):
    inner = np.linspace(0.0, eps, n_in + 1)
    h, xs = eps / n_in, [eps]
    while xs[-1] < L:
        h = min(h * 1.02, h_out)
        xs.append(xs[-1] + h)
    return np.concatenate([inner, xs[1:]])


def square_well_operator(eps, W, L=25.0, n_in=2000, h_out=0.004):
    """Symmetrized P1 finite elements with lumped mass for ``(1/2) u'' + W 1{r<eps} u``
    on ``(0, L)`` with Dirichlet ends; ``u = r phi`` is the s-wave of the 3-d problem."""
    x = _radial_mesh(eps, L, n_in, h_out)
    h = np.diff(x)
    m = 0.5 * (h[:-1] + h[1:])
    diag = -0.5 * (1 / h[:-1] + 1 / h[1:])
    off = 0.5 / h[1:-1]
    xi = x[1:-1]
    lo, hi = xi - 0.5 * h[:-1], xi + 0.5 * h[1:]
    diag = diag + W * np.clip(np.minimum(hi, eps) - lo, 0.0, None)
    s = 1 / np.sqrt(m)
    return xi, m, diag * s * s, off * s[:-1] * s[1:]


def square_well_top_eigenvalue(eps, W, **kw):
    _, _, d, e = square_well_operator(eps, W, **kw)
    n = len(d)
    return float(eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(n - 1, n - 1))[0])


def square_well_partition(eps, W, T, r1, **kw):
    """``E_x exp(int_0^T W 1{|w_s| <= eps} ds)`` for 3-d Brownian motion from ``|x| = r1``.

    Eigen-expansion of the finite-element operator; the s-wave reduction gives
    ``Z = (1 / r1) int_0^L rho k(T, r1, rho) d rho`` with ``k`` the half-line kernel.
    """
    xi, m, d, e = square_well_operator(eps, W, **kw)
    lam, v = eigh_tridiagonal(d, e, select="v", select_range=(-60.0 / T, 1e6))
    phi = v / np.sqrt(m)[:, None]
    at = np.array([np.interp(r1, xi, phi[:, j]) for j in range(phi.shape[1])])
    moments = (m * xi) @ phi
    return float(np.sum(np.exp(lam * T) * at * moments) / r1)
