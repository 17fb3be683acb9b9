"""Time integration of the support function under normal speed -f(K).

Under the outward-normal support parameterization the hypersurface flow
with normal velocity -f(K)*nu collapses to the scalar equation
dh/dt = -f(K(h)) on the fixed grid of normal directions.  For the
expanding negative-power law (a = -1, beta = -b) the speed is K**(-b).

Stepping is classical RK4 with an explicit parabolic step bound: each
right-hand-side evaluation re-derives the curvature from the stage values,
and any stage that loses strict convexity aborts the step.  Round initial
data stays exactly round, so closed-form radius ODEs provide oracles for
the integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import stencils
from .errors import InvalidConfig, NonConvex
from .geometry import (
    RADIUS_FLOOR,
    SupportGrid,
    fourier_grid,
    round_grid,
)
from .speedlaw import SpeedLaw

DT_FLOOR = 1e-12
DEFAULT_SAFETY = 0.3


@dataclass(frozen=True)
class InitialShape:
    """Round shape of radius R0, optionally Fourier-perturbed.

    kind is "round" or "fourier"; modes holds (wavenumber, relative
    amplitude) pairs applied as h = R0*(1 + sum amp*cos(k*angle)).
    """

    kind: str = "round"
    R0: float = 1.0
    modes: tuple = ()

    def build(self, n: int, size: int) -> SupportGrid:
        if self.kind == "round":
            return round_grid(n, self.R0, size)
        if self.kind == "fourier":
            return fourier_grid(n, self.R0, self.modes, size)
        raise InvalidConfig(f"unknown initial shape kind {self.kind!r}")


@dataclass(frozen=True)
class FlowConfig:
    """Validated description of one flow run."""

    n: int
    size: int
    law: SpeedLaw
    shape: InitialShape
    t_end: float
    t0: float = 0.0
    safety: float = DEFAULT_SAFETY
    stride: int = 1
    fixed_dt: float | None = None

    def __post_init__(self):
        if self.n not in (1, 2):
            raise InvalidConfig(f"n must be 1 or 2, got {self.n}")
        if not (self.t_end > self.t0 >= 0.0):
            raise InvalidConfig(f"need t_end > t0 >= 0, got t0={self.t0}, t_end={self.t_end}")
        if not (0.0 < self.safety <= 1.0):
            raise InvalidConfig(f"safety must lie in (0, 1], got {self.safety}")
        if self.stride < 1:
            raise InvalidConfig(f"stride must be >= 1, got {self.stride}")
        if self.fixed_dt is not None and self.fixed_dt <= 0.0:
            raise InvalidConfig(f"fixed_dt must be positive, got {self.fixed_dt}")
        if self.law.is_power and self.law.a < 0.0 and not (-1.0 / self.n < self.law.beta < 0.0):
            raise InvalidConfig(
                f"expanding power law needs b < 1/n (and b > 0): "
                f"got b = {-self.law.beta} with n = {self.n}"
            )
        try:
            grid = self.shape.build(self.n, self.size)
            _radii_and_K(self.n, grid.values, grid.spacing, _angle_cache(self.n, self.size))
        except InvalidConfig:
            raise
        except Exception as exc:
            raise InvalidConfig(f"initial shape is not admissible: {exc}") from exc

    def build_grid(self) -> SupportGrid:
        return self.shape.build(self.n, self.size)


@dataclass
class FlowTrace:
    """Stored states plus per-step diagnostics of one run."""

    n: int
    law: SpeedLaw
    times: list = field(default_factory=list)
    grids: list = field(default_factory=list)
    dt_history: list = field(default_factory=list)
    min_radius: list = field(default_factory=list)
    max_speed: list = field(default_factory=list)
    reason: str = "completed"

    def __len__(self) -> int:
        return len(self.times)

    @property
    def stored_spacing(self) -> float | None:
        """Common spacing of stored times, or None if not uniform."""
        t = np.asarray(self.times)
        if t.size < 2:
            return None
        d = np.diff(t)
        if np.max(np.abs(d - d[0])) > 1e-9 * max(abs(d[0]), 1e-30):
            return None
        return float(d[0])


def _angle_cache(n: int, size: int):
    if n == 1:
        return None
    phi = (np.arange(size) + 0.5) * np.pi / size
    return np.cos(phi) / np.sin(phi)


def _radii_and_K(n: int, h: np.ndarray, dx: float, cot) -> tuple:
    """Radii and Gaussian curvature; cheap path used inside RK stages."""
    if n == 1:
        r1 = stencils.d2_periodic(h, dx) + h
        if np.any(r1 <= RADIUS_FLOOR) or not np.all(np.isfinite(r1)):
            raise NonConvex("stage lost convexity")
        return (r1,), 1.0 / r1
    r1 = stencils.d2_reflect(h, dx, "even") + h
    r2 = stencils.d1_reflect(h, dx, "even") * cot + h
    bad = (
        np.any(r1 <= RADIUS_FLOOR)
        or np.any(r2 <= RADIUS_FLOOR)
        or not (np.all(np.isfinite(r1)) and np.all(np.isfinite(r2)))
    )
    if bad:
        raise NonConvex("stage lost convexity")
    return (r1, r2), 1.0 / (r1 * r2)


def _speed(law: SpeedLaw, n: int, h: np.ndarray, dx: float, cot) -> np.ndarray:
    _, K = _radii_and_K(n, h, dx, cot)
    return -law.f(K)


def step(grid: SupportGrid, law: SpeedLaw, dt: float) -> SupportGrid:
    """One classical RK4 update of the support values.

    Every stage re-derives the curvature from the stage grid; a stage that
    loses convexity raises NonConvex and the step is rejected.  dt = 0
    returns the input values unchanged.
    """
    if dt < 0.0:
        raise ValueError("dt must be non-negative")
    n, h, dx = grid.n, grid.values, grid.spacing
    cot = _angle_cache(n, h.size)
    k1 = _speed(law, n, h, dx, cot)
    k2 = _speed(law, n, h + 0.5 * dt * k1, dx, cot)
    k3 = _speed(law, n, h + 0.5 * dt * k2, dx, cot)
    k4 = _speed(law, n, h + dt * k3, dx, cot)
    return SupportGrid(n, h + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def stable_dt(grid: SupportGrid, law: SpeedLaw, safety: float = DEFAULT_SAFETY) -> float:
    """Explicit parabolic step bound safety * dx**2 / lambda.

    lambda bounds the linearized speed sensitivity to the curvature radii:
    |d(-f)/dr| = f'(K) * K**2 times the complementary radius for n=2.
    """
    n, h, dx = grid.n, grid.values, grid.spacing
    cot = _angle_cache(n, h.size)
    radii, K = _radii_and_K(n, h, dx, cot)
    lam = law.f1(K) * K**2
    if n == 2:
        lam = lam * np.maximum(radii[0], radii[1])
    return safety * dx * dx / float(np.max(lam))


def run(config: FlowConfig) -> FlowTrace:
    """Integrate the flow from the initial shape at t0 to t_end.

    Steps adaptively with stable_dt unless fixed_dt is set.  Stores the
    initial state, every stride-th state, and the final state.  Loss of
    convexity or a dt underflow terminates early; the partial trace is
    returned with the reason recorded.
    """
    law = config.law
    grid = config.build_grid()
    trace = FlowTrace(n=config.n, law=law)
    t = config.t0
    trace.times.append(t)
    trace.grids.append(grid)

    if config.fixed_dt is not None:
        total = config.t_end - config.t0
        n_steps = max(1, round(total / config.fixed_dt))
        if not math.isclose(n_steps * config.fixed_dt, total, rel_tol=1e-9):
            raise InvalidConfig(
                f"fixed_dt = {config.fixed_dt} does not divide the time span {total}"
            )
        for i in range(1, n_steps + 1):
            dt = config.fixed_dt
            try:
                grid = step(grid, law, dt)
            except NonConvex:
                trace.reason = "nonconvex"
                _store_last(trace, grid, t)
                return trace
            t = config.t0 + i * dt
            _record(trace, grid, dt)
            if i % config.stride == 0 or i == n_steps:
                trace.times.append(t)
                trace.grids.append(grid)
        return trace

    i = 0
    while t < config.t_end - 1e-14 * max(1.0, config.t_end):
        try:
            dt_bound = stable_dt(grid, law, config.safety)
            if dt_bound < DT_FLOOR:
                trace.reason = "dt_underflow"
                _store_last(trace, grid, t)
                return trace
            dt = min(dt_bound, config.t_end - t)
            grid = step(grid, law, dt)
        except NonConvex:
            trace.reason = "nonconvex"
            _store_last(trace, grid, t)
            return trace
        t += dt
        i += 1
        _record(trace, grid, dt)
        if i % config.stride == 0 or t >= config.t_end - 1e-14 * max(1.0, config.t_end):
            trace.times.append(t)
            trace.grids.append(grid)
    return trace


def _store_last(trace: FlowTrace, grid: SupportGrid, t: float) -> None:
    if trace.times and trace.times[-1] < t:
        trace.times.append(t)
        trace.grids.append(grid)


def _record(trace: FlowTrace, grid: SupportGrid, dt: float) -> None:
    cot = _angle_cache(grid.n, grid.size)
    radii, K = _radii_and_K(grid.n, grid.values, grid.spacing, cot)
    trace.dt_history.append(dt)
    trace.min_radius.append(float(min(np.min(r) for r in radii)))
    trace.max_speed.append(float(np.max(np.abs(trace.law.f(K)))))
