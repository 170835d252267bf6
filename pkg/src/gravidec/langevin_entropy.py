"""Langevin dynamics in the graviton bath, work statistics and entropy production.

The particle is prepared at rest under the constant force f(0) and then driven
by a protocol f(t) on [0, tau]. To leading order in the noise,

    xi(t) = xi0(t) + 2 int_0^t (t - t') n(t') xi0(t') dt',
    xi0(t) = (1/m) int_0^t (t - t') f(t') dt',

where n(t) is the Gaussian tidal field with mean +Phi_zz/2 (the sign is
flipped relative to KernelGrid.mean) and covariance noise_scale * N_g. The work
is W = -int_0^tau f'(t) xi(t) dt.

Everything is discretized on a uniform grid with the trapezoid rule, so the
analytic moments in ``work_moments`` are the exact moments of the sampled
ensemble for the same grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import oracle
from .errors import ConditioningError, DomainError, MissingBetaError
from .noise_kernels import GravitonState, KernelGrid, build_kernel_grid
from .special_functions import StateTag
from .units_constants import K_B, PhysicalParams

DEFAULT_GRID_POINTS = 256


@dataclass(frozen=True)
class ForceProtocol:
    """Driving force f(t) [N] on [0, tau] with its time derivative [N/s]."""

    f: Callable
    f_dot: Callable
    tau: float
    f_initial: float
    name: str = "custom"
    parameters: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (self.tau > 0.0 and math.isfinite(self.tau)):
            raise DomainError("protocol duration tau must be finite and > 0")
        f0 = float(self.f(0.0))
        if not math.isclose(f0, self.f_initial, rel_tol=1e-12, abs_tol=1e-300):
            raise DomainError(f"f(0) = {f0} differs from f_initial = {self.f_initial}")
        ts = np.linspace(0.05, 0.95, 20) * self.tau
        h = 1e-5 * self.tau
        fd = np.array([(float(self.f(t + h)) - float(self.f(t - h))) / (2 * h) for t in ts])
        exact = np.array([float(self.f_dot(t)) for t in ts])
        f_max = np.max(np.abs([float(self.f(t)) for t in ts]))
        scale = max(np.max(np.abs(exact)), f_max / self.tau * 1e-9)
        # A difference quotient cannot resolve changes below the float spacing of f.
        rounding = 4.0 * np.spacing(max(f_max, np.finfo(float).tiny)) / (2 * h)
        if np.max(np.abs(fd - exact)) > 1e-6 * scale + rounding:
            raise DomainError("f_dot is inconsistent with the finite-difference derivative of f")

    def grid(self, n_points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
        if n_points < 2:
            raise DomainError("need at least two grid points")
        return np.linspace(0.0, self.tau, n_points)


def constant_force(F0: float, tau: float) -> ForceProtocol:
    """f(t) = F0."""
    return ForceProtocol(lambda t: F0 + 0.0 * np.asarray(t, float), lambda t: 0.0 * np.asarray(t, float),
                         tau, F0, "constant", {"F0": F0, "tau": tau})


def linear_ramp(F0: float, F1: float, tau: float) -> ForceProtocol:
    """f(t) = F0 + (F1 - F0) t / tau."""
    slope = (F1 - F0) / tau
    return ForceProtocol(lambda t: F0 + slope * np.asarray(t, float),
                         lambda t: slope + 0.0 * np.asarray(t, float),
                         tau, F0, "linear_ramp", {"F0": F0, "F1": F1, "tau": tau})


def sinusoid(F0: float, amplitude: float, omega: float, tau: float) -> ForceProtocol:
    """f(t) = F0 + amplitude sin(omega t)."""
    return ForceProtocol(lambda t: F0 + amplitude * np.sin(omega * np.asarray(t, float)),
                         lambda t: amplitude * omega * np.cos(omega * np.asarray(t, float)),
                         tau, F0, "sinusoid", {"F0": F0, "amplitude": amplitude, "omega": omega, "tau": tau})


def smoothstep(F0: float, F1: float, tau: float) -> ForceProtocol:
    """f(t) = F0 + (F1 - F0)(3 s^2 - 2 s^3) with s = t / tau."""
    d = F1 - F0

    def f(t):
        s = np.asarray(t, float) / tau
        return F0 + d * s * s * (3.0 - 2.0 * s)

    def f_dot(t):
        s = np.asarray(t, float) / tau
        return d * 6.0 * s * (1.0 - s) / tau

    return ForceProtocol(f, f_dot, tau, F0, "smoothstep", {"F0": F0, "F1": F1, "tau": tau})


PROTOCOL_FAMILIES = {
    "constant": constant_force,
    "linear_ramp": linear_ramp,
    "sinusoid": sinusoid,
    "smoothstep": smoothstep,
}


def make_protocol(name: str, **parameters) -> ForceProtocol:
    """Build a named protocol family from keyword parameters."""
    try:
        family = PROTOCOL_FAMILIES[name]
    except KeyError as exc:
        raise DomainError(f"unknown protocol {name!r}; choose from {sorted(PROTOCOL_FAMILIES)}") from exc
    try:
        return family(**parameters)
    except TypeError as exc:
        raise DomainError(f"bad parameters for protocol {name!r}: {exc}") from exc


@dataclass(frozen=True)
class WorkStatistics:
    """Work moments and the derived thermodynamic quantities.

    W_diss = beta var_W / 2, entropy = beta W_diss, delta_F = mean_W - W_diss.
    The mc_* fields hold Monte Carlo counterparts when available.
    """

    mean_W: float
    var_W: float
    W_diss: float
    entropy: float
    delta_F: float
    beta: float
    mc_mean_W: Optional[float] = None
    mc_mean_se: Optional[float] = None
    mc_var_W: Optional[float] = None
    mc_var_se: Optional[float] = None
    mc_samples: Optional[int] = None

    @classmethod
    def from_moments(cls, mean_W: float, var_W: float, beta: float, **mc) -> "WorkStatistics":
        if var_W < 0.0:
            raise DomainError("work variance must be >= 0")
        w_diss = 0.5 * beta * var_W
        return cls(mean_W=mean_W, var_W=var_W, W_diss=w_diss, entropy=beta * w_diss,
                   delta_F=mean_W - w_diss, beta=beta, **mc)


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Sampled Langevin trajectories on a kernel grid."""

    grid: KernelGrid
    paths: np.ndarray
    works: np.ndarray
    seed: int
    noise: np.ndarray = field(repr=False, default=None)


def _trapezoid_weights(times: np.ndarray) -> np.ndarray:
    q = np.empty_like(times)
    dt = np.diff(times)
    q[0] = 0.5 * dt[0]
    q[-1] = 0.5 * dt[-1]
    q[1:-1] = 0.5 * (dt[:-1] + dt[1:])
    return q


def _green_matrix(times: np.ndarray) -> np.ndarray:
    # G[i, j] = (trapezoid weight of t_j on [0, t_i]) * (t_i - t_j) for j <= i.
    n = times.size
    dt = np.diff(times)
    out = np.zeros((n, n))
    for i in range(1, n):
        w = np.empty(i + 1)
        w[0] = 0.5 * dt[0]
        w[1:i] = 0.5 * (dt[:i - 1] + dt[1:i])
        w[i] = 0.5 * dt[i - 1]
        out[i, : i + 1] = w * (times[i] - times[: i + 1])
    return out


def free_solution(f: ForceProtocol, m: float, t):
    """Noise-free path xi0(t) = (1/m) int_0^t (t - t') f(t') dt' [m].

    Evaluated as (t C0(t) - C1(t)) / m with C_k(t) = int_0^t t'^k f(t') dt',
    accumulated segment by segment with adaptive quadrature.
    """
    if not m > 0.0:
        raise DomainError("mass must be > 0")
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts < 0.0) or np.any(ts > f.tau * (1 + 1e-12)):
        raise DomainError("free_solution is defined on [0, tau]")
    order = np.argsort(ts)
    knots = np.concatenate([[0.0], ts[order]])
    c0 = np.zeros(knots.size)
    c1 = np.zeros(knots.size)
    fv = lambda s: np.asarray(f.f(s), dtype=float) * np.ones_like(s)  # noqa: E731
    for k in range(1, knots.size):
        a, b = knots[k - 1], knots[k]
        if b > a:
            i0 = oracle.adaptive_quad(fv, a, b, 1e-14, relative=True).value
            i1 = oracle.adaptive_quad(lambda s: s * fv(s), a, b, 1e-14, relative=True).value
        else:
            i0 = i1 = 0.0
        c0[k] = c0[k - 1] + i0
        c1[k] = c1[k - 1] + i1
    out = np.empty(ts.size)
    out[order] = (knots[1:] * c0[1:] - c1[1:]) / m
    return float(out[0]) if np.ndim(t) == 0 else out


def work_of_trajectory(f: ForceProtocol, xi, times=None) -> float:
    """W = -int_0^tau f'(t) xi(t) dt by the trapezoid rule on the path's grid [J]."""
    xi = np.asarray(xi, dtype=float)
    times = f.grid(xi.size) if times is None else np.asarray(times, dtype=float)
    if times.shape != xi.shape:
        raise DomainError("path and time grid have different lengths")
    q = _trapezoid_weights(times)
    return float(-np.sum(q * np.asarray(f.f_dot(times), dtype=float) * xi))


def _check_grid(grid: KernelGrid, f: ForceProtocol) -> None:
    t = grid.times
    if abs(t[0]) > 1e-12 * f.tau or abs(t[-1] - f.tau) > 1e-12 * f.tau:
        raise DomainError("kernel grid must span [0, tau]")
    if np.max(np.abs(np.diff(t) - (t[-1] - t[0]) / (t.size - 1))) > 1e-9 * f.tau:
        raise DomainError("kernel grid must be uniform")


def _philox_stream(seed: int, index: int) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise DomainError("seed must be an integer in [0, 2^64)")
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(index)))


def sample_trajectories(grid: KernelGrid, f: ForceProtocol, m: float, n: int, seed: int,
                        *, internal_dofs: bool = False) -> TrajectoryEnsemble:
    """Draw n noise realizations and the resulting paths and works.

    Trajectory i uses its own counter-based stream Philox(key = seed, i), so
    results do not depend on how the ensemble is split or ordered.
    """
    if internal_dofs:
        raise DomainError("internal-DoF noise is not part of the Langevin pipeline")
    if n < 1:
        raise DomainError("need n >= 1 trajectories")
    _check_grid(grid, f)
    if grid.chol is None:
        raise ConditioningError("kernel grid has no regularized Cholesky factor")
    times = grid.times
    xi0 = free_solution(f, m, times)
    gmat = _green_matrix(times)
    z = np.stack([_philox_stream(seed, i).standard_normal(times.size) for i in range(n)])
    noise = -grid.mean[None, :] + math.sqrt(grid.noise_scale) * z @ grid.chol.T
    paths = xi0[None, :] + 2.0 * (noise * xi0[None, :]) @ gmat.T
    q = _trapezoid_weights(times)
    fdot = np.asarray(f.f_dot(times), dtype=float) * np.ones_like(times)
    works = -(paths * (q * fdot)[None, :]).sum(axis=1)
    return TrajectoryEnsemble(grid=grid, paths=paths, works=works, seed=int(seed), noise=noise)


def _beta(state: GravitonState) -> float:
    if state.tag is not StateTag.thermal:
        raise MissingBetaError("the work statistics need a thermal graviton state (beta = 1/k_B T_g)")
    return 1.0 / (K_B * state.T_g)


def grid_work_moments(grid: KernelGrid, f: ForceProtocol, m: float, phi_zz: float) -> tuple[float, float]:
    """Exact mean and variance of the discretized work on a kernel grid."""
    _check_grid(grid, f)
    times = grid.times
    xi0 = free_solution(f, m, times)
    gmat = _green_matrix(times)
    q = _trapezoid_weights(times)
    qf = q * np.asarray(f.f_dot(times), dtype=float) * np.ones_like(times)
    mean = -float(qf @ xi0) - phi_zz * float(qf @ (gmat @ xi0))
    a = (gmat.T @ qf) * xi0
    var = 4.0 * float(a @ grid.field_cov @ a)
    return mean, max(var, 0.0)


def work_moments(state: GravitonState, params: PhysicalParams, f: ForceProtocol, *,
                 n_times: int = DEFAULT_GRID_POINTS, noise_scale: Optional[float] = None,
                 internal_dofs: bool = False) -> WorkStatistics:
    """Mean and variance of the work and the derived entropy production.

    <W> = -int f' xi0 - Phi_zz int int f'(t) g(t - t') xi0(t')
    var = 4 int int a(t) a(t') noise_scale N_g(t, t'), a(t') = xi0(t') int f'(t) g(t - t') dt
    with g(s) = s theta(s), evaluated by the trapezoid rule on n_times points.
    """
    if internal_dofs:
        raise DomainError("internal-DoF noise is not part of the Langevin pipeline")
    beta = _beta(state)
    grid = build_kernel_grid(state, params, f.grid(n_times))
    if noise_scale is not None:
        grid = grid.with_noise_scale(noise_scale)
    mean, var = grid_work_moments(grid, f, params.m, params.phi_zz)
    return WorkStatistics.from_moments(mean, var, beta)


def ensemble_statistics(ensemble: TrajectoryEnsemble, beta: float) -> WorkStatistics:
    """WorkStatistics built from Monte Carlo work samples."""
    mom = oracle.sample_moments(ensemble.works)
    stats = WorkStatistics.from_moments(mom.mean, mom.var, beta)
    return WorkStatistics(**{**stats.__dict__, "mc_mean_W": mom.mean, "mc_mean_se": mom.sem,
                             "mc_var_W": mom.var, "mc_var_se": mom.var_se, "mc_samples": mom.n})


@dataclass(frozen=True)
class JarzynskiReport:
    """Analytic and Monte Carlo checks of <exp(-beta W)> = exp(-beta delta_F).

    All quantities are kept as logarithms so that large beta W cannot overflow.
    """

    log_lhs_analytic: float
    log_rhs: float
    analytic_residual: float
    log_mc: float
    log_mc_se: float
    mc_z: float
    n: int
    seed: int

    @property
    def analytic_ok(self) -> bool:
        return self.analytic_residual <= 1e-12

    @property
    def mc_ok(self) -> bool:
        return abs(self.mc_z) <= 3.0


def log_mean_exp_neg(beta: float, works) -> tuple[float, float]:
    """log <exp(-beta W)> over samples and its standard error (delta method)."""
    w = np.asarray(works, dtype=float)
    u = -beta * w
    shift = float(np.max(u))
    e = np.exp(u - shift)
    mean = float(np.mean(e))
    se = float(np.std(e, ddof=1) / math.sqrt(w.size)) if w.size > 1 else math.inf
    return shift + math.log(mean), se / mean


def jarzynski_check(stats: WorkStatistics, n: int, seed: int) -> JarzynskiReport:
    """Check the Gaussian Jarzynski identity analytically and by sampling."""
    if n < 2:
        raise DomainError("need n >= 2 draws")
    b = stats.beta
    log_lhs = -b * stats.mean_W + 0.5 * b * b * stats.var_W
    log_rhs = -b * stats.delta_F
    residual = abs(log_lhs - log_rhs) / max(1.0, abs(log_rhs))
    rng = _philox_stream(seed, 0)
    draws = stats.mean_W + math.sqrt(stats.var_W) * rng.standard_normal(n)
    log_mc, se = log_mean_exp_neg(b, draws)
    z = (log_mc - log_rhs) / se if se > 0 else (0.0 if log_mc == log_rhs else math.inf)
    return JarzynskiReport(log_lhs, log_rhs, residual, log_mc, se, z, n, int(seed))


def jarzynski_ensemble(ensemble: TrajectoryEnsemble, stats: WorkStatistics) -> JarzynskiReport:
    """Jarzynski check using the works of a sampled trajectory ensemble."""
    b = stats.beta
    log_lhs = -b * stats.mean_W + 0.5 * b * b * stats.var_W
    log_rhs = -b * stats.delta_F
    residual = abs(log_lhs - log_rhs) / max(1.0, abs(log_rhs))
    log_mc, se = log_mean_exp_neg(b, ensemble.works)
    z = (log_mc - log_rhs) / se if se > 0 else (0.0 if log_mc == log_rhs else math.inf)
    return JarzynskiReport(log_lhs, log_rhs, residual, log_mc, se, z, ensemble.works.size, ensemble.seed)
