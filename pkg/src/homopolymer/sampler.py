"""Exact sequential sampling of the polymer measure and Feynman-Kac replicas.

Polymer paths are drawn one grid time at a time. Given ``x_{k-1}`` the next
position has density proportional to

    pbar(dt, x_{k-1}, y) * Zbar(T - t_k, |y|),

which depends on ``y`` only through ``|y|`` and the angle to ``x_{k-1}``. The
radius is drawn by inverting its tabulated marginal. The angle is then drawn
exactly: at fixed radius the kernel is a Gaussian factor ``exp(k cos)`` plus a
constant, so the conditional law of the cosine is a two-component mixture
with explicit inverse CDFs.
"""

import threading
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicSpline

from .errors import DomainError, StepSizeError, TableResolutionError
from .kernels import (
    as_point,
    bracket_time_integral,
    heat_kernel_closed,
    origin_bracket_integral,
    origin_ratio_radial,
    point_bracket,
    zbar_closed,
)
from .stats import MergedStats, ReplicaSummary

_TWO_PI = 2.0 * np.pi


def make_rng(seed, stream=0):
    """Counter-based Philox generator; distinct streams are independent."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class SamplerConfig:
    """Resolution of the per-step radial tables.

    ``n_radial`` nodes are split between a uniform grid over the whole support
    and a window of ``window`` standard deviations around the previous radius.
    ``n_zbar`` is the node count of the spline used for ``Zbar(T - t_k, .)``.
    """

    n_radial: int = 1024
    window: float = 12.0
    n_zbar: int = 4097
    norm_tol: float = 1e-3
    chunk: int = 4096

    def __post_init__(self):
        if self.n_radial < 64 or self.n_zbar < 64:
            raise ValueError("table grids need at least 64 nodes")
        if not 0 < self.norm_tol < 1:
            raise ValueError("norm_tol must lie in (0, 1)")


@dataclass(frozen=True)
class PathSample:
    """``positions[i, k]`` is path ``i`` at ``times[k]``; ``times[0] = 0``."""

    times: np.ndarray
    positions: np.ndarray
    seed: int
    stream: int
    gamma: float
    T: float

    @property
    def radii(self):
        return np.linalg.norm(self.positions, axis=-1)

    @property
    def n_paths(self):
        return self.positions.shape[0]


# --- partition-function tables ------------------------------------------------


class _BracketSpline:
    """Spline of ``G(r) = int_0^tau bracket(r, s) ds = r (Zbar(tau, r) - 1)``.

    ``G`` is smooth and finite at ``r = 0``, unlike ``Zbar`` itself.
    """

    def __init__(self, gamma, tau, rmax, n):
        self.tau = tau
        self.rmax = rmax
        if tau == 0.0:
            self._spline = None
            return
        # half the nodes resolve the sqrt(tau) boundary layer at the origin
        layer = min(rmax, 16.0 * np.sqrt(tau))
        r = np.unique(np.concatenate([np.linspace(0.0, rmax, n), np.linspace(0.0, layer, n // 2)]))
        g, _ = bracket_time_integral(gamma, tau, r, epsrel=1e-12)
        self._spline = CubicSpline(r, g)

    def __call__(self, r):
        if self._spline is None:
            return np.zeros_like(r)
        if np.max(r) > self.rmax * (1 + 1e-12):
            raise TableResolutionError("radius beyond the partition-function table")
        return self._spline(r)


class _TableCache:
    """Read-mostly cache of bracket splines; one writer builds a missing entry."""

    def __init__(self):
        self._tables = {}
        self._lock = threading.Lock()

    def get(self, gamma, tau, rmax, n):
        # round the range up to a coarse geometric ladder so tables get reused
        rmax = float(2.0 ** (np.ceil(4.0 * np.log2(max(rmax, 1e-3))) / 4.0))
        key = (float(gamma), float(tau), rmax, int(n))
        table = self._tables.get(key)
        if table is None:
            with self._lock:
                table = self._tables.get(key)
                if table is None:
                    table = _BracketSpline(gamma, tau, rmax, n)
                    self._tables[key] = table
        return table


_CACHE = _TableCache()


def _support_radius(gamma, dt, r1max, window):
    """Radius beyond which the step density is negligible."""
    s = np.sqrt(dt)
    extra = min(40.0 / gamma, gamma * dt + window * s) if gamma > 0 else 0.0
    return r1max + window * s + extra


# --- finite-dimensional densities ----------------------------------------------


def finite_dim_density(gamma, T, times, points, start):
    """Joint density of ``(omega(t_1), ..., omega(t_n))`` under the polymer measure.

    ``start`` is a point of R^3 or ``None`` for the origin start, whose first
    factor is the limit of ``pbar / Zbar`` as the start tends to 0.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d sequence")
    if np.any(np.diff(times) <= 0) or times[0] <= 0 or times[-1] > T:
        raise ValueError("times must be strictly increasing in (0, T]")
    pts = [as_point(p) for p in points]
    if len(pts) != times.size:
        raise ValueError("one point per time is required")
    if any(p.radius == 0 for p in pts):
        raise DomainError("sampled points must avoid the origin")
    vecs = [p.vector for p in pts]

    if start is None:
        dens = float(origin_ratio_radial(gamma, times[0], T, pts[0].radius))
    else:
        x = as_point(start)
        if x.radius == 0:
            raise DomainError("use start=None for the origin start")
        d = np.linalg.norm(x.vector - vecs[0])
        dens = float(heat_kernel_closed(gamma, times[0], x.radius, pts[0].radius, d))
        dens /= float(zbar_closed(gamma, T, x.radius)[0])
    for k in range(1, times.size):
        d = np.linalg.norm(vecs[k - 1] - vecs[k])
        dens *= float(heat_kernel_closed(gamma, times[k] - times[k - 1], pts[k - 1].radius, pts[k].radius, d))
    return dens * float(zbar_closed(gamma, T - times[-1], pts[-1].radius)[0])


# --- one sampling step ------------------------------------------------------------


def _invert_rows(grid, dens, u):
    """Inverse-CDF draw from each row of a tabulated density (cumulative trapezoid)."""
    cum = np.concatenate(
        [np.zeros((grid.shape[0], 1)), np.cumsum(0.5 * (dens[:, 1:] + dens[:, :-1]) * np.diff(grid, axis=1), axis=1)],
        axis=1,
    )
    total = cum[:, -1]
    cdf = cum / total[:, None]
    # offsetting row i by i turns all rows into one increasing array
    rows = np.arange(grid.shape[0])
    flat = (cdf + rows[:, None]).ravel()
    target = u + rows
    j = np.searchsorted(flat, target, side="right") - 1
    j = np.clip(j, rows * grid.shape[1], rows * grid.shape[1] + grid.shape[1] - 2)
    c0, c1 = flat[j], flat[j + 1]
    g = grid.ravel()
    frac = np.where(c1 > c0, (target - c0) / np.where(c1 > c0, c1 - c0, 1.0), 0.0)
    return g[j] + frac * (g[j + 1] - g[j]), total


def _gauss_shell(r1, rho, dt):
    """``int_{-1}^{1} g(dt, |x - y|) dcos`` at ``|x| = r1``, ``|y| = rho``."""
    k = r1 * rho / dt
    ratio = np.where(k > 0, -np.expm1(-2.0 * k) / np.where(k > 0, k, 1.0), 2.0)
    return np.exp(-0.5 * (r1 - rho) ** 2 / dt) / (_TWO_PI * dt) ** 1.5 * ratio


def _core_radius(gamma, dt, tau):
    """Length scale of the structure near the origin (bound state or boundary layer)."""
    if gamma > 0:
        return 12.0 / gamma
    return 6.0 * np.sqrt(min(dt, tau) if tau > 0 else dt)


def _radial_step(gamma, dt, tau, r1, cfg, u):
    """Draw ``|x_k|`` for each previous radius in ``r1``."""
    n_u = cfg.n_radial // 3
    n_c = cfg.n_radial // 3
    n_w = cfg.n_radial - n_u - n_c
    s = np.sqrt(dt)
    rmax = _support_radius(gamma, dt, r1, cfg.window)
    gtab = _CACHE.get(gamma, tau, float(np.max(rmax)), cfg.n_zbar)
    gnext = _CACHE.get(gamma, dt + tau, float(np.max(r1)), cfg.n_zbar)
    core = _core_radius(gamma, dt, tau)
    out = np.empty_like(r1)
    for lo in range(0, r1.size, cfg.chunk):
        sl = slice(lo, lo + cfg.chunk)
        a, top = r1[sl, None], rmax[sl, None]
        base = np.linspace(0.0, 1.0, n_u)[None, :] * top
        near = np.linspace(0.0, 1.0, n_c)[None, :] * np.minimum(top, core)
        win = np.clip(a + cfg.window * s * np.linspace(-1.0, 1.0, n_w)[None, :], 0.0, top)
        grid = np.sort(np.concatenate([base, near, win], axis=1), axis=1)
        zfac = grid + gtab(grid)  # rho * Zbar(tau, rho)
        dens = zfac * (_TWO_PI * grid * _gauss_shell(a, grid, dt) + 2.0 * point_bracket(a + grid, dt, gamma) / a)
        rho, total = _invert_rows(grid, dens, u[sl])
        expected = 1.0 + gnext(r1[sl]) / r1[sl]
        bad = np.abs(total / expected - 1.0)
        if np.max(bad) > cfg.norm_tol:
            raise TableResolutionError(
                f"radial table mass off by {np.max(bad):.2e} (dt={dt}, tau={tau}); refine n_radial"
            )
        out[sl] = rho
    return out


def _origin_radial_step(gamma, t1, tau, n, cfg, u):
    s = np.sqrt(t1)
    rmax = float(_support_radius(gamma, t1, 0.0, cfg.window))
    gtab = _CACHE.get(gamma, tau, rmax, cfg.n_zbar)
    core = min(rmax, _core_radius(gamma, t1, tau), 4.0 * s)
    grid = np.unique(np.concatenate([np.linspace(0.0, rmax, cfg.n_radial), np.linspace(0.0, core, cfg.n_radial // 2)]))
    dens = 2.0 * point_bracket(grid, t1, gamma) * (grid + gtab(grid))
    mass = origin_bracket_integral(gamma, t1 + tau)
    rho, total = _invert_rows(np.broadcast_to(grid, (n, grid.size)), np.broadcast_to(dens, (n, grid.size)), u)
    if abs(total[0] / mass - 1.0) > cfg.norm_tol:
        raise TableResolutionError(f"origin table mass off by {abs(total[0] / mass - 1):.2e}; refine n_radial")
    return rho


def _frame(e):
    """Two unit vectors completing ``e`` (rows) to an orthonormal frame."""
    helper = np.where(np.abs(e[:, 2:3]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    u = np.cross(e, helper)
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u, np.cross(e, u)


def _angular_step(gamma, dt, r1, rho, uc, um, uphi):
    """Cosine of the angle between ``x_{k-1}`` and ``x_k`` given both radii."""
    k = r1 * rho / dt
    gauss = _gauss_shell(r1, rho, dt)
    flat = 2.0 * point_bracket(r1 + rho, dt, gamma) / (_TWO_PI * r1 * rho)
    pick_gauss = um * (gauss + flat) < gauss
    # density proportional to exp(k c) on [-1, 1]
    kk = np.where(k > 0, k, 1.0)
    cg = np.where(k > 1e-12, 1.0 + np.log1p((1.0 - uc) * np.expm1(-2.0 * kk)) / kk, 1.0 - 2.0 * uc)
    c = np.where(pick_gauss, cg, 2.0 * uc - 1.0)
    return np.clip(c, -1.0, 1.0), _TWO_PI * uphi


def _isotropic(n, uc, uphi):
    c = 2.0 * uc - 1.0
    s = np.sqrt(np.maximum(1.0 - c * c, 0.0))
    phi = _TWO_PI * uphi
    return np.stack([s * np.cos(phi), s * np.sin(phi), c], axis=1)


def sample_polymer_path(gamma, T, start, grid, n_paths=1, config=None, seed=0, stream=0):
    """Sample ``n_paths`` paths of the polymer measure at the times in ``grid``.

    ``start`` is a point of R^3, or ``None`` for the origin start. ``grid``
    holds increasing times in ``(0, T]``; a leading 0 is accepted and is the
    identity step. Output is a deterministic function of ``(seed, stream, config)``.
    """
    cfg = config or SamplerConfig()
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d sequence")
    if grid[0] == 0.0:
        grid = grid[1:]
    if grid.size == 0 or np.any(np.diff(grid) <= 0) or grid[0] <= 0 or grid[-1] > T * (1 + 1e-12):
        raise ValueError("grid must be strictly increasing within (0, T]")
    if n_paths < 1:
        raise ValueError("n_paths must be positive")
    rng = make_rng(seed, stream)
    times = np.concatenate([[0.0], grid])
    pos = np.zeros((n_paths, times.size, 3))

    if start is None:
        x0 = np.zeros(3)
    else:
        x0 = as_point(start).vector
    pos[:, 0] = x0

    for k in range(1, times.size):
        dt = times[k] - times[k - 1]
        tau = max(T - times[k], 0.0)
        u = rng.random((n_paths, 4))
        prev = pos[:, k - 1]
        r1 = np.linalg.norm(prev, axis=1)
        if k == 1 and start is None:
            rho = _origin_radial_step(gamma, dt, tau, n_paths, cfg, u[:, 0])
            pos[:, k] = rho[:, None] * _isotropic(n_paths, u[:, 2], u[:, 3])
            continue
        rho = _radial_step(gamma, dt, tau, r1, cfg, u[:, 0])
        rho = np.maximum(rho, 1e-300)
        c, phi = _angular_step(gamma, dt, r1, rho, u[:, 2], u[:, 1], u[:, 3])
        e = prev / r1[:, None]
        a, b = _frame(e)
        sn = np.sqrt(np.maximum(1.0 - c * c, 0.0))
        d = c[:, None] * e + sn[:, None] * (np.cos(phi)[:, None] * a + np.sin(phi)[:, None] * b)
        pos[:, k] = rho[:, None] * d
    return PathSample(times, pos, int(seed), int(stream), float(gamma), float(T))


def step_radial_density(gamma, dt, tau, r1, rho):
    """Marginal density of ``|x_k|`` given ``|x_{k-1}| = r1`` (``r1 = 0``: origin start).

    Vectorized in ``rho``; the partition function is evaluated by direct
    adaptive quadrature, independent of the sampler's spline tables.
    """
    rho = np.asarray(rho, dtype=float)
    g = bracket_time_integral(gamma, tau, rho.ravel())[0].reshape(rho.shape) if tau > 0 else 0.0
    if r1 == 0:
        return 2.0 * point_bracket(rho, dt, gamma) * (rho + g) / origin_bracket_integral(gamma, dt + tau)
    mass = float(zbar_closed(gamma, dt + tau, r1)[0])
    shell = _TWO_PI * rho * _gauss_shell(r1, rho, dt) + 2.0 * point_bracket(r1 + rho, dt, gamma) / r1
    return (rho + g) * shell / mass


def endpoint_radial_cdf(gamma, T, start, t, radii, tau=None, panels=2000, order=16):
    """``P(|omega(t)| <= R)`` after a single step from ``start`` (``None`` = origin).

    ``tau`` defaults to ``T - t``. Composite Gauss-Legendre on panels of
    width ``R_max / panels``; this is the oracle for sampled radii.
    """
    tau = T - t if tau is None else tau
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    r1 = 0.0 if start is None else as_point(start).radius
    edges = np.linspace(0.0, float(np.max(radii)), panels + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)[:, None]
    nodes = edges[:-1, None] + half * (x[None, :] + 1.0)
    vals = step_radial_density(gamma, t, tau, r1, nodes)
    cum = np.concatenate([[0.0], np.cumsum(np.sum(half * w[None, :] * vals, axis=1))])
    # radii between panel edges: integrate the partial panels directly, all at once
    j = np.minimum(np.searchsorted(edges, radii, side="right") - 1, panels - 1)
    lo = edges[j]
    hh = 0.5 * (radii - lo)
    part_nodes = lo[:, None] + hh[:, None] * (x[None, :] + 1.0)
    part = hh * np.sum(w[None, :] * step_radial_density(gamma, t, tau, r1, part_nodes), axis=1)
    return cum[j] + part


# --- smoothed potentials and Feynman-Kac ---------------------------------------------


@dataclass(frozen=True)
class SmoothedPotential:
    """``W * 1{|x| <= epsilon}`` with ``W = pi^2 / (8 eps^2) + gamma / eps``.

    This is the unit-ball profile (``L1`` norm ``4 pi / 3``) rescaled to
    radius ``epsilon``; its first term places a zero-energy resonance exactly
    at the ball. ``amplitude`` overrides ``W`` (0 gives free Brownian motion).
    """

    epsilon: float
    gamma: float
    amplitude_override: float | None = None

    PROFILE_L1 = 4.0 * np.pi / 3.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")

    @property
    def amplitude(self):
        if self.amplitude_override is not None:
            return float(self.amplitude_override)
        return np.pi ** 2 / (8.0 * self.epsilon ** 2) + self.gamma / self.epsilon

    def __call__(self, r):
        return np.where(np.asarray(r) <= self.epsilon, self.amplitude, 0.0)


def radial_ground_state(pot):
    """Largest eigenvalue ``lambda > 0`` of ``(1/2) Delta + pot``, or ``None``.

    Inside the ball the s-wave is ``sin(k r) / r`` with ``k = sqrt(2 (W - lambda))``,
    outside ``exp(-sqrt(2 lambda) r) / r``. Matching logarithmic derivatives at
    ``epsilon`` gives ``k cot(k eps) = -sqrt(2 W - k^2)``. The ground state is
    the smallest such ``k``; it lies in ``(pi / 2 eps, min(k0, pi / eps))`` with
    ``k0 = sqrt(2 W)``, and exists iff ``k0 > pi / (2 eps)``.
    """
    eps, W = pot.epsilon, pot.amplitude
    if W <= 0:
        return None
    k0 = np.sqrt(2.0 * W)
    lo = 0.5 * np.pi / eps
    if k0 <= lo:
        return None
    hi = min(k0, np.pi / eps)

    def h(k):
        return k / np.tan(k * eps) + np.sqrt(max(k0 * k0 - k * k, 0.0))

    # h(lo) > 0 and h -> -inf (or h(k0) < 0) at the top end
    top = np.nextafter(hi, lo)
    if h(top) >= 0:
        return None
    k = optimize.bisect(h, lo, top, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return float(W - 0.5 * k * k)


@dataclass(frozen=True)
class _GroundState:
    lam: float
    k: float
    a: float
    eps: float

    @classmethod
    def of(cls, pot):
        lam = radial_ground_state(pot)
        if lam is None:
            raise DomainError("the potential has no bound state to guide with")
        return cls(lam, float(np.sqrt(2.0 * (pot.amplitude - lam))), float(np.sqrt(2.0 * lam)), pot.epsilon)

    def log_phi(self, r):
        """``log`` of the ground state, normalized by ``phi(0) = k``."""
        r = np.asarray(r, dtype=float)
        kr = self.k * np.minimum(r, self.eps)
        inside = np.log(np.where(kr < 1e-8, self.k, np.sin(kr) / np.maximum(np.minimum(r, self.eps), 1e-300)))
        c = np.log(np.sin(self.k * self.eps)) + self.a * self.eps
        outside = c - self.a * r - np.log(np.maximum(r, 1e-300))
        return np.where(r <= self.eps, inside, outside)

    def radial_drift(self, r):
        """``d/dr log phi``; continuous across ``epsilon`` by construction."""
        r = np.asarray(r, dtype=float)
        kr = self.k * r
        small = kr < 1e-4
        inside = np.where(small, -self.k * kr / 3.0, self.k / np.tan(np.where(small, 1.0, kr)) - 1.0 / np.maximum(r, 1e-300))
        outside = -self.a - 1.0 / np.maximum(r, 1e-300)
        return np.where(r <= self.eps, inside, outside)


_GUIDE_MAX_STEP = 0.05


def _guided_paths(gs, x, T, step, rng):
    """Simulate the ground-state diffusion with a per-path clock.

    Outside the ball the radius is a Brownian motion with constant drift
    ``-sqrt(2 lambda)`` (the ``-1/r`` part of the drift cancels the Bessel
    drift), so it is advanced exactly with steps ``((r - eps)/5)^2`` that make
    a crossing into the ball a five-sigma event; the direction takes the
    matching tangent step with clock ``h / (r r')``. Within ``2 eps`` of the
    origin the 3-d Euler scheme with step ``step`` is used; there the drift
    ``k cot(k r) - 1/r`` is smooth.
    """
    eps = gs.eps
    t = np.zeros(len(x))
    act = np.arange(len(x))
    while act.size:
        xa = x[act]
        r = np.sqrt(np.einsum("ij,ij->i", xa, xa))
        near = r < 2.0 * eps
        h = np.where(near, step, np.clip((0.2 * (r - eps)) ** 2, step, _GUIDE_MAX_STEP))
        h = np.minimum(h, T - t[act])
        z = rng.standard_normal((act.size, 3))
        sq = np.sqrt(h)

        b = gs.radial_drift(r) / np.maximum(r, 1e-300)
        euler = xa + (h * b)[:, None] * xa + sq[:, None] * z

        # exact radial step; z[:, 0] drives the radius, z[:, 1:] the direction
        rn = r - gs.a * h + sq * z[:, 0]
        rn = np.where(rn > 0.0, rn, r)  # only reachable from deep inside the five-sigma margin
        e = xa / np.maximum(r, 1e-300)[:, None]
        u, v = _frame(np.where(near[:, None], [[0.0, 0.0, 1.0]], e))
        ang = np.sqrt(h / np.maximum(r * rn, 1e-300))
        d = e + ang[:, None] * (z[:, 1:2] * u + z[:, 2:3] * v)
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        x[act] = np.where(near[:, None], euler, rn[:, None] * d)
        t[act] += h
        act = act[t[act] < T * (1.0 - 1e-12)]
    return x


@dataclass(frozen=True)
class WeightedEndpoints:
    """Endpoints of Feynman-Kac replicas with their log-weights."""

    endpoints: np.ndarray
    log_weights: np.ndarray
    seed: int
    stream: int
    summary: ReplicaSummary = field(repr=False)

    @property
    def radii(self):
        return np.linalg.norm(self.endpoints, axis=1)

    @property
    def weights(self):
        """Weights rescaled by their maximum (safe against overflow)."""
        return np.exp(self.log_weights - np.max(self.log_weights))

    def partition_estimate(self):
        """Plain weight average and its Monte Carlo standard error."""
        return MergedStats.of(self.summary).mean_weight()


def sample_feynman_kac(pot, T, start, n_paths, step, seed=0, stream=0, scheme="plain", chunk=20000):
    """Weighted Brownian endpoints for the Gibbs measure of ``pot`` over ``[0, T]``.

    ``scheme="plain"`` simulates Brownian increments and accumulates
    ``sum V(omega) * step`` (trapezoid rule) into the log-weight.

    ``scheme="ground-state"`` simulates the ground-state transformed diffusion
    ``d omega = grad log phi(omega) dt + dB`` instead and uses the exact weight
    ``exp(lambda T) phi(x) / phi(omega_T)``. Both have the same expectations;
    the second does not depend on rare visits to the well and is the usable
    one when the well is resonant. ``step`` is the Euler step within
    ``2 epsilon`` of the origin; farther out the radius is advanced exactly
    (see :func:`_guided_paths`). A fixed Euler step of order epsilon^2 over
    the whole path would shift the effective coupling by O(1) as epsilon shrinks.
    """
    eps = pot.epsilon
    if step > 0.25 * eps * eps:
        raise StepSizeError(f"step {step} exceeds epsilon^2/4 = {0.25 * eps * eps}")
    if not step > 0 or not T > 0:
        raise ValueError("T and step must be positive")
    if n_paths < 1:
        raise ValueError("n_paths must be at least 1")
    if scheme not in ("plain", "ground-state"):
        raise ValueError(f"unknown scheme {scheme!r}")
    x0 = np.zeros(3) if start is None else as_point(start).vector
    n_steps = int(np.ceil(T / step - 1e-9))
    h = T / n_steps
    sq = np.sqrt(h)
    gs = _GroundState.of(pot) if scheme == "ground-state" else None
    W = pot.amplitude
    rng = make_rng(seed, stream)

    ends, logw = [], []
    for lo in range(0, n_paths, chunk):
        m = min(chunk, n_paths - lo)
        x = np.tile(x0, (m, 1))
        r = np.full(m, np.linalg.norm(x0))
        if gs is None:
            acc = np.zeros(m)
            v_prev = np.where(r <= eps, W, 0.0)
            for _ in range(n_steps):
                x += sq * rng.standard_normal((m, 3))
                r = np.sqrt(np.einsum("ij,ij->i", x, x))
                v = np.where(r <= eps, W, 0.0)
                acc += 0.5 * h * (v_prev + v)
                v_prev = v
            lw = acc
        else:
            x = _guided_paths(gs, x, T, step, rng)
            r = np.sqrt(np.einsum("ij,ij->i", x, x))
            lw = gs.lam * T + gs.log_phi(np.linalg.norm(x0)) - gs.log_phi(r)
        ends.append(x)
        logw.append(lw)
    ends = np.concatenate(ends)
    logw = np.concatenate(logw)
    return WeightedEndpoints(ends, logw, int(seed), int(stream), ReplicaSummary.from_log_weights(stream, logw))
