"""Time integration of the fractional Fisher equation u_t = D u + u(1 - u)
with skewed fractional diffusion, plus front tracking and front-speed
regression.

The state is the real nodal vector u.  Each right-hand side evaluation
subtracts the fixed auxiliary v(x) = 1/2 - arctan(x)/pi so the mapped
remainder is periodic, applies the operator matrix to its coefficients and
adds the closed-form operator of v back.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .basis import SpectralGrid, analyze, make_grid, synthesize
from .closedform import ARCTAN, OperatorKind
from .errors import BudgetError, DivergenceError, TrackingError
from .operators import AuxDecomposition
from .opmatrix import OperatorMatrix, apply as matrix_apply, build_base_matrix, scale_to_operator
from .specfun import check_skewness

FISHER_AUX = AuxDecomposition(
    aux=ARCTAN,
    scale=-1.0 / math.pi,
    offset=0.5,
    description="1/2 - arctan(x)/pi",
)


@dataclass(frozen=True)
class EvolutionConfig:
    alpha: float
    gamma: float
    n: int
    l_scale: float
    l_lim: int = 100
    dt: float = 0.05
    t_end: float = 22.0
    snapshot_stride: int = 10

    def __post_init__(self):
        check_skewness(self.alpha, self.gamma)
        if self.dt <= 0.0 or self.t_end < 0.0:
            raise ValueError("need dt > 0 and t_end >= 0")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")


@dataclass(frozen=True)
class FrontTrace:
    times: np.ndarray
    x_half: np.ndarray


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    pearson_rho: float


@dataclass(frozen=True)
class EvolutionResult:
    config: EvolutionConfig
    times: np.ndarray
    snapshots: list
    trace: FrontTrace


def initial_condition(x, alpha: float):
    """Slowly decaying front profile (1/2 - x / (2 sqrt(1 + x^2)))^(alpha/2),
    tending to 1 on the left and 0 on the right."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"order must lie in (0, 2), got {alpha}")
    x = np.asarray(x, dtype=np.float64)
    return (0.5 - x / (2.0 * np.sqrt(1.0 + x * x))) ** (alpha / 2.0)


class FisherSystem:
    """Precomputed machinery for one (alpha, gamma, N, L) configuration.

    The auxiliary profile is rescaled every evaluation by the sampled
    far-field jump u(x_last) - u(x_first) of the state, so the subtracted
    function always matches the state's own limits: front states reduce to
    the plain u - v split (their jump is 1 up to the tail decay), while
    states with equal limits, the equilibria in particular, pass through
    with a zero auxiliary and are fixed points of the discrete system
    exactly.
    """

    def __init__(self, matrix: OperatorMatrix, grid: SpectralGrid,
                 decomp: AuxDecomposition = FISHER_AUX):
        if matrix.kind is not OperatorKind.RIESZ_FELLER:
            raise ValueError("evolution expects a Riesz-Feller matrix")
        if matrix.n != grid.n:
            raise ValueError("matrix and grid sizes differ")
        self.matrix = matrix
        self.grid = grid
        self.decomp = decomp
        self.v_nodes = decomp.aux_values(grid.x_nodes)
        # Jump of the auxiliary itself between the extreme nodes, used to
        # normalize the state jump (it tends to 1 as L or N grows).
        self.v_jump = float(self.v_nodes[-1] - self.v_nodes[0])
        if self.v_jump == 0.0:
            raise ValueError("auxiliary profile has no jump between the extreme nodes")
        self.dv_nodes = np.asarray(
            decomp.aux_operator(
                matrix.kind, matrix.alpha, matrix.gamma, grid.x_nodes
            ),
            dtype=np.float64,
        )

    @classmethod
    def from_config(cls, config: EvolutionConfig) -> "FisherSystem":
        base = build_base_matrix(config.alpha, config.n, config.l_lim)
        matrix = scale_to_operator(
            base, OperatorKind.RIESZ_FELLER, config.gamma, config.l_scale
        )
        return cls(matrix, make_grid(config.n, config.l_scale))

    def rhs(self, u: np.ndarray) -> np.ndarray:
        jump = (u[-1] - u[0]) / self.v_jump
        w = u - jump * self.v_nodes
        diffusion = matrix_apply(self.matrix, analyze(w, self.grid)).real
        out = diffusion + jump * self.dv_nodes + u * (1.0 - u)
        if not np.all(np.isfinite(out)):
            bad = int(np.flatnonzero(~np.isfinite(out))[0])
            raise DivergenceError(
                f"non-finite right-hand side at node {bad} "
                f"(x = {self.grid.x_nodes[bad]:.6g})"
            )
        return out


def fisher_rhs(u_nodes, matrix: OperatorMatrix, decomp: AuxDecomposition,
               grid: SpectralGrid) -> np.ndarray:
    """One right-hand side evaluation D[u] + u(1 - u) at the nodes."""
    return FisherSystem(matrix, grid, decomp).rhs(np.asarray(u_nodes, dtype=np.float64))


def rk4_step(system: FisherSystem, u: np.ndarray, dt: float) -> np.ndarray:
    k1 = system.rhs(u)
    k2 = system.rhs(u + 0.5 * dt * k1)
    k3 = system.rhs(u + 0.5 * dt * k2)
    k4 = system.rhs(u + dt * k3)
    return u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def front_position(
    u_nodes,
    grid: SpectralGrid,
    level: float = 0.5,
    decomp: AuxDecomposition | None = FISHER_AUX,
    s_tol: float = 1e-14,
) -> float:
    """x where the interpolated solution crosses `level`, taking the
    rightmost crossing.  The interpolant is the spectral synthesis of
    u - v plus the closed-form v, evaluated through bisection in s."""
    u = np.asarray(u_nodes, dtype=np.float64)
    d = u - level
    exact = np.flatnonzero(d == 0.0)
    crossings = np.flatnonzero(d[:-1] * d[1:] < 0.0)
    if exact.size and (not crossings.size or exact[0] <= crossings[0]):
        return float(grid.x_nodes[exact[0]])
    if not crossings.size:
        raise TrackingError(
            f"no crossing of level {level} inside the node range"
        )
    j = int(crossings[0])  # x decreases with j, so the first bracket is rightmost
    if decomp is not None:
        v_nodes = decomp.aux_values(grid.x_nodes)
        coeffs = analyze(u - v_nodes, grid)

        def interp(s):
            x = grid.l_scale / math.tan(s)
            return synthesize(coeffs, s).real + decomp.aux_values(x) - level
    else:
        coeffs = analyze(u, grid)

        def interp(s):
            return synthesize(coeffs, s).real - level

    lo, hi = grid.s_nodes[j], grid.s_nodes[j + 1]
    f_lo = interp(lo)
    if f_lo == 0.0:
        return float(grid.x_nodes[j])
    while hi - lo > s_tol:
        mid = 0.5 * (lo + hi)
        f_mid = interp(mid)
        if f_mid == 0.0:
            lo = hi = mid
            break
        if (f_lo > 0.0) == (f_mid > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    s_star = 0.5 * (lo + hi)
    return grid.l_scale / math.tan(s_star)


def rk4_evolve(
    config: EvolutionConfig,
    u0=None,
    system: FisherSystem | None = None,
    track_front: bool = True,
    wall_budget: float | None = None,
) -> EvolutionResult:
    """Classical fourth-order Runge-Kutta march of the Fisher problem,
    recording a snapshot (and the front position) every snapshot_stride
    steps.  wall_budget, if set, aborts with BudgetError past that many
    seconds."""
    if system is None:
        system = FisherSystem.from_config(config)
    grid = system.grid
    if u0 is None:
        u = initial_condition(grid.x_nodes, config.alpha)
    else:
        u = np.asarray(u0, dtype=np.float64).copy()
    steps = round(config.t_end / config.dt)
    start = time.monotonic()
    times = [0.0]
    snapshots = [u.copy()]
    fronts = [front_position(u, grid, decomp=system.decomp)] if track_front else []
    for i in range(1, steps + 1):
        u = rk4_step(system, u, config.dt)
        if i % config.snapshot_stride == 0 or i == steps:
            times.append(i * config.dt)
            snapshots.append(u.copy())
            if track_front:
                fronts.append(front_position(u, grid, decomp=system.decomp))
        if wall_budget is not None and time.monotonic() - start > wall_budget:
            raise BudgetError(
                f"evolution exceeded wall budget of {wall_budget} s at t = "
                f"{i * config.dt:.3f}"
            )
    times = np.asarray(times)
    trace = FrontTrace(
        times=times, x_half=np.asarray(fronts if track_front else [])
    )
    return EvolutionResult(
        config=config, times=times, snapshots=snapshots, trace=trace
    )


def fit_exponential(trace: FrontTrace, t_window) -> RegressionResult:
    """Least-squares slope of ln x_half against t inside the window, with the
    Pearson correlation of the fitted pairs."""
    t0, t1 = t_window
    mask = (trace.times >= t0) & (trace.times <= t1)
    if np.count_nonzero(mask) < 3:
        raise ValueError("need at least 3 front samples inside the window")
    x = trace.x_half[mask]
    if np.any(x <= 0.0):
        raise ValueError("front positions must be positive inside the window")
    t = trace.times[mask]
    y = np.log(x)
    slope, intercept = np.polyfit(t, y, 1)
    rho = float(np.corrcoef(t, y)[0, 1])
    return RegressionResult(slope=float(slope), intercept=float(intercept),
                            pearson_rho=rho)
