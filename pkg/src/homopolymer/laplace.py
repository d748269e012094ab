"""Numerical inverse Laplace transform along a deformed Bromwich contour.

The default contour is the pair of rays leaving the abscissa ``a`` at angles
``+-3pi/4``. On it ``exp(lambda t)`` decays exponentially, so the integral
converges absolutely. Each ray is parametrized by ``s = exp(v)``; the trapezoid
rule in ``v`` then sees an integrand analytic in the strip ``|Im v| < pi/4``
and converges geometrically under step halving.

The vertical line ``Re lambda = a`` is kept for cross-checks. Its integrand
only decays as fast as the transform itself, so it needs an explicit
truncation radius and many more nodes.

Square roots of ``2 lambda`` are always taken on the principal branch
(``Re sqrt >= 0``, cut along the negative real axis); the contours never
cross that cut.
"""

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import NonConvergenceError, PoleOnContourError

RAY_ANGLE = 0.75 * np.pi
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ContourSpec:
    """Integration contour for :func:`invert_laplace`.

    ``nodes`` is the number of trapezoid nodes per ray (or on the segment) at
    the coarsest level. ``truncation`` is the largest ray parameter ``|lambda - a|``
    kept; ``None`` picks one from ``t`` so that ``exp(lambda t)`` has decayed
    below double precision.
    """

    abscissa: float
    shape: str = "rays"
    truncation: float | None = None
    nodes: int = 64

    def __post_init__(self):
        if self.shape not in ("rays", "vertical"):
            raise ValueError(f"unknown contour shape {self.shape!r}")
        if self.nodes < 16:
            raise ValueError("contour needs at least 16 nodes")
        if self.truncation is not None and not self.truncation > 0:
            raise ValueError("truncation radius must be positive")
        if not np.isfinite(self.abscissa):
            raise ValueError("abscissa must be finite")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    nodes_used: int


def default_abscissa(gamma=None):
    """``max(1, gamma^2)``: clears the eigenvalue pole at ``gamma^2/2`` with margin."""
    if gamma is None:
        return 1.0
    return max(1.0, gamma * gamma)


def sqrt2(lam):
    """Principal branch of ``sqrt(2 lambda)``."""
    return np.sqrt(2.0 * np.asarray(lam, dtype=complex))


def _check_singularities(contour: ContourSpec, singularities: Iterable[complex]):
    a = contour.abscissa
    for p in singularities:
        p = complex(p)
        tol = 1e-12 * (1.0 + abs(p) + abs(a))
        if contour.shape == "vertical":
            if abs(p.real - a) <= tol:
                raise PoleOnContourError(f"singularity {p} lies on Re(lambda) = {a}")
            if p.real > a:
                raise ValueError(f"singularity {p} lies right of the contour")
        else:
            z = p - a
            if abs(z) <= tol:
                raise PoleOnContourError(f"singularity {p} coincides with the vertex {a}")
            ang = abs(np.angle(z))
            if abs(ang - RAY_ANGLE) * abs(z) <= tol:
                raise PoleOnContourError(f"singularity {p} lies on a ray of the contour")
            if ang < RAY_ANGLE:
                raise ValueError(f"singularity {p} lies inside the contour region")


def invert_laplace(
    F: Callable,
    t: float,
    contour: ContourSpec | None = None,
    singularities: Iterable[complex] = (),
    *,
    log_form: bool = False,
    rtol: float = 1e-13,
    max_levels: int = 10,
) -> QuadratureResult:
    """Compute ``(1/2 pi i) int_Gamma exp(lambda t) F(lambda) d lambda``.

    ``F`` must accept a complex numpy array. With ``log_form=True`` it returns
    ``log F`` instead (any branch), which keeps extreme exponents such as
    ``exp(-sqrt(2 lambda) u)`` from under- or overflowing before they are
    combined with ``lambda t``.

    The returned error estimate is the difference between the two finest
    refinement levels, floored at the rounding level of the node sum.
    """
    if not t > 0:
        raise ValueError("invert_laplace needs t > 0")
    if contour is None:
        contour = ContourSpec(default_abscissa())
    _check_singularities(contour, singularities)

    def weighted(lam):
        if log_form:
            return np.exp(lam * t + F(lam))
        return np.exp(lam * t) * F(lam)

    if contour.shape == "rays":
        integrand, lo, hi = _ray_integrand(weighted, t, contour)
    else:
        integrand, lo, hi = _vertical_integrand(weighted, contour)

    n = contour.nodes
    h = (hi - lo) / n
    nodes = lo + h * np.arange(n + 1)
    vals = integrand(nodes)
    total = h * (vals.sum() - 0.5 * (vals[0] + vals[-1]))
    mag = h * np.abs(vals).sum()
    used = n + 1
    prev = None
    diffs = []
    for _ in range(max_levels):
        mids = lo + h * (np.arange(n) + 0.5)
        mvals = integrand(mids)
        used += n
        total = 0.5 * total + 0.5 * h * mvals.sum()
        mag = 0.5 * mag + 0.5 * h * np.abs(mvals).sum()
        h *= 0.5
        n *= 2
        if prev is not None:
            diffs.append(abs(total - prev))
        prev = total
        # rounding of the node sum, amplified by the exponent lambda t near the vertex
        floor = 16 * _EPS * mag * (1.0 + abs(contour.abscissa) * t)
        if diffs and diffs[-1] <= max(rtol * abs(total), floor):
            break
        # stall detection only once the sequence is past its pre-asymptotic phase
        if (
            len(diffs) >= 3
            and diffs[-3] < 1e-3 * mag
            and diffs[-1] > 0.5 * diffs[-2]
            and diffs[-2] > 0.5 * diffs[-3]
        ):
            raise NonConvergenceError(
                f"trapezoid refinements stopped contracting: {diffs[-3:]}"
            )
    else:
        raise NonConvergenceError(
            f"no convergence after {max_levels} refinements, last differences {diffs[-3:]}"
        )

    err = max(diffs[-1], floor)
    if abs(total.imag) > max(err, 1e-12 * abs(total)):
        raise ValueError(
            f"inverse transform is not real (imag {total.imag:.3e}); F lacks conjugate symmetry"
        )
    return QuadratureResult(float(total.real), float(err), int(used))


def _ray_integrand(weighted, t, contour):
    a = contour.abscissa
    up = np.exp(1j * RAY_ANGLE)
    down = np.conj(up)
    s_min = 1e-17 * min(1.0 / t, max(abs(a), 1e-3), 1.0)
    s_max = contour.truncation
    if s_max is None:
        s_max = _ray_cutoff(weighted, a, up, t)
    lo, hi = np.log(s_min), np.log(s_max)

    def integrand(v):
        s = np.exp(v)
        branch_up = weighted(a + s * up) * up
        branch_down = weighted(a + s * down) * down
        return s * (branch_up - branch_down) / (2j * np.pi)

    return integrand, lo, hi


def _ray_cutoff(weighted, a, up, t):
    """Ray parameter beyond which ``|s * integrand|`` is below 1e-20 of its peak.

    Near a saddle-point abscissa the decay of ``exp(lambda t)`` is cancelled
    to first order by the transform, so the cutoff is found by scanning.
    """
    s = np.sqrt(2.0) * 46.0 / t
    probe = s * np.exp(np.linspace(np.log(1e-6), 0.0, 64))
    peak = np.max(np.abs(probe * weighted(a + probe * up)))
    for _ in range(80):
        m = abs(s * weighted(a + s * up))
        if np.isfinite(m) and m <= 1e-20 * peak:
            return s
        if np.isfinite(m):
            peak = max(peak, m)
        s *= 2.0
    raise NonConvergenceError("integrand does not decay along the contour rays")


def _vertical_integrand(weighted, contour):
    a = contour.abscissa
    radius = contour.truncation if contour.truncation is not None else 1000.0

    def integrand(y):
        return weighted(a + 1j * y) / (2.0 * np.pi)

    return integrand, -radius, radius
