"""Scalar special functions: erfc, the scaled erfcx, and the free heat kernel.

``erfc`` and ``erfcx`` are thin wrappers over :mod:`scipy.special` (Faddeeva
package based, accurate to a few ulps), with the overflow contract of this
package added on top. Both accept scalars or numpy arrays.
"""

import numpy as np
from scipy import special

from .errors import DomainError


def erfc(x):
    """Complementary error function ``(2/sqrt(pi)) * int_x^inf exp(-s^2) ds``."""
    return special.erfc(x)


def erfcx(x):
    """Scaled complementary error function ``exp(x^2) * erfc(x)``.

    Never overflows for ``x >= 0``. Raises :class:`OverflowError` when any
    argument is so negative that ``exp(x^2)`` exceeds the double range.
    """
    xa = np.asarray(x, dtype=float)
    out = special.erfcx(xa)
    if np.any(np.isinf(out)):
        raise OverflowError("erfcx overflows: exp(x^2) exceeds the double range")
    return out if isinstance(out, np.ndarray) and out.ndim else float(out)


def free_heat_kernel(t, d):
    """Gaussian kernel ``(2 pi t)^(-3/2) exp(-d^2 / (2t))`` of 3-d Brownian motion."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("free_heat_kernel needs t > 0")
    d = np.asarray(d, dtype=float)
    out = np.exp(-0.5 * d * d / t) / (2.0 * np.pi * t) ** 1.5
    return out if out.ndim else float(out)


def maxwell_cdf(x):
    """CDF of ``|N(0, I_3)|``, the chi distribution with three degrees of freedom."""
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = special.erf(x / np.sqrt(2.0)) - np.sqrt(2.0 / np.pi) * x * np.exp(-0.5 * x * x)
    return out if out.ndim else float(out)
