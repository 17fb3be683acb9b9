"""Support-function geometry of convex hypersurfaces.

A convex body is stored as its support function h sampled over normal
directions: equally spaced angles on the circle of normals for curves
(n=1), and cell-centered polar angles for axisymmetric surfaces (n=2).
Everything else (principal curvature radii, Gaussian curvature K, mean
curvature H, metric and second fundamental form in the normal-angle
parameterization, embedded positions and outward normals) derives from h.

For n=1 the curvature radius is r = h'' + h, the metric is g = r**2, the
second fundamental form is r, and K = H = 1/r.  For n=2 the radii are
r1 = h_pp + h (meridian) and r2 = h_p*cot(phi) + h (azimuthal), with
metric diag(r1**2, (r2 sin(phi))**2), second fundamental form
diag(r1, r2 sin(phi)**2), K = 1/(r1 r2) and H = 1/r1 + 1/r2.

Differentiation policy: the support function and the radii fields are
differentiated with 4th-order stencils (periodic for n=1, parity
reflection across the poles for n=2), while fields derived from the radii
(K, H, speed functions of K) carry exact chain-rule derivatives on top of
those stencil values.  Purely algebraic relations between derived
quantities then cancel to rounding error instead of truncation error,
which the verification suites rely on.  For n=2 the azimuthal radius
derivative uses its closed form r2' = (r1 - r2) cot(phi), so no stencil is
ever applied to a pole-singular expression.  The second-derivative bundle
(r2'', and through it the curvature second derivatives) divides the
meridian truncation error by sin(phi)**2, which costs two orders in the
two cells nearest each pole; those fields stay second-order accurate
there and fourth-order elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import stencils
from .errors import NonConvex, OriginOutside

RADIUS_FLOOR = 1e-12


@dataclass(frozen=True)
class SupportGrid:
    """Discretized support function over normal directions.

    n = 1: values[i] = h(theta_i), theta_i = 2*pi*i/N on the normal circle.
    n = 2: values[j] = h(phi_j), phi_j = (j + 1/2)*pi/M, axisymmetric.
    """

    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"hypersurface dimension must be 1 or 2, got {self.n}")
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 1:
            raise ValueError("support values must be a 1-D array")
        m = v.size
        if m < 16:
            raise ValueError(f"grid needs at least 16 nodes, got {m}")
        if self.n == 1 and m % 2 != 0:
            raise ValueError(f"n=1 grid size must be even, got {m}")
        if not np.all(np.isfinite(v)):
            raise OriginOutside("support values must be finite")
        if np.any(v <= 0.0):
            raise OriginOutside("support values must be strictly positive")

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def angles(self) -> np.ndarray:
        m = self.size
        if self.n == 1:
            return 2.0 * np.pi * np.arange(m) / m
        return (np.arange(m) + 0.5) * np.pi / m

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.size if self.n == 1 else np.pi / self.size


def round_grid(n: int, radius: float, size: int) -> SupportGrid:
    """Circle (n=1) or sphere (n=2) of the given radius."""
    return SupportGrid(n, np.full(size, float(radius)))


def fourier_grid(n: int, base_radius: float, modes, size: int) -> SupportGrid:
    """Round shape of radius R0 perturbed by cosine modes.

    h = R0 * (1 + sum_k amp_k * cos(k * angle)); modes is an iterable of
    (wavenumber, relative amplitude) pairs.  Cosines of the polar angle are
    polynomials in cos(phi), so the n=2 variants stay smooth at the poles.
    """
    g = SupportGrid(n, np.full(size, float(base_radius)))
    ang = g.angles
    h = np.full(size, float(base_radius))
    for k, amp in modes:
        h = h + base_radius * amp * np.cos(int(k) * ang)
    return SupportGrid(n, h)


def _d1(n, u, dx, parity="even"):
    if n == 1:
        return stencils.d1_periodic(u, dx)
    return stencils.d1_reflect(u, dx, parity)


def _d2(n, u, dx, parity="even"):
    if n == 1:
        return stencils.d2_periodic(u, dx)
    return stencils.d2_reflect(u, dx, parity)


@dataclass(frozen=True)
class GeometryState:
    """All pointwise geometry derived from one support grid.

    Radii, curvatures, metric and second-fundamental-form components, the
    embedding, and the chain-rule derivative bundle (first and second
    angular derivatives of the radii, K and H) used by downstream fields.
    For n=1, r2 and the azimuthal entries are None.
    """

    grid: SupportGrid
    n: int
    angles: np.ndarray
    dx: float
    h: np.ndarray
    hp: np.ndarray
    r1: np.ndarray
    r2: np.ndarray | None
    r1p: np.ndarray
    r2p: np.ndarray | None
    r1pp: np.ndarray
    r2pp: np.ndarray | None
    K: np.ndarray
    Kp: np.ndarray
    Kpp: np.ndarray
    H: np.ndarray
    Hp: np.ndarray
    Gamma: np.ndarray  # Christoffel of the meridian/angular coordinate
    positions: np.ndarray
    normals: np.ndarray
    sinphi: np.ndarray | None
    cosphi: np.ndarray | None
    cot: np.ndarray | None

    @property
    def radii(self) -> tuple:
        return (self.r1,) if self.n == 1 else (self.r1, self.r2)

    @property
    def metric(self) -> tuple:
        """Diagonal metric components in the normal-angle parameterization."""
        if self.n == 1:
            return (self.r1**2,)
        rho = self.r2 * self.sinphi
        return (self.r1**2, rho**2)

    @property
    def sff(self) -> tuple:
        """Diagonal second-fundamental-form components."""
        if self.n == 1:
            return (self.r1,)
        return (self.r1, self.r2 * self.sinphi**2)

    def d1(self, u, parity="even"):
        return _d1(self.n, u, self.dx, parity)

    def d2(self, u, parity="even"):
        return _d2(self.n, u, self.dx, parity)


def derive_state(grid: SupportGrid) -> GeometryState:
    """Differentiate a support grid into its full geometry.

    Raises NonConvex if any curvature radius falls below the strict
    positivity floor, OriginOutside if any support value is non-positive
    (already enforced by the grid itself).
    """
    n, h, dx = grid.n, grid.values, grid.spacing
    ang = grid.angles

    if n == 1:
        hp = stencils.d1_periodic(h, dx)
        r1 = stencils.d2_periodic(h, dx) + h
        _require_convex(r1)
        r1p = stencils.d1_periodic(r1, dx)
        r1pp = stencils.d2_periodic(r1, dx)
        K = 1.0 / r1
        Kp = -r1p / r1**2
        Kpp = -r1pp / r1**2 + 2.0 * r1p**2 / r1**3
        H, Hp = K, Kp
        cos_t, sin_t = np.cos(ang), np.sin(ang)
        normals = np.stack([cos_t, sin_t], axis=1)
        tangents = np.stack([-sin_t, cos_t], axis=1)
        positions = h[:, None] * normals + hp[:, None] * tangents
        return GeometryState(
            grid=grid, n=1, angles=ang, dx=dx, h=h, hp=hp,
            r1=r1, r2=None, r1p=r1p, r2p=None, r1pp=r1pp, r2pp=None,
            K=K, Kp=Kp, Kpp=Kpp, H=H, Hp=Hp, Gamma=r1p / r1,
            positions=positions, normals=normals,
            sinphi=None, cosphi=None, cot=None,
        )

    sin_p, cos_p = np.sin(ang), np.cos(ang)
    cot = cos_p / sin_p
    hp = stencils.d1_reflect(h, dx, "even")
    r1 = stencils.d2_reflect(h, dx, "even") + h
    r2 = hp * cot + h
    _require_convex(r1)
    _require_convex(r2)
    r1p = stencils.d1_reflect(r1, dx, "even")
    # Closed forms below keep every pole-singular factor analytic.
    r2p = (r1 - r2) * cot
    r1pp = stencils.d2_reflect(r1, dx, "even")
    r2pp = (r1p - r2p) * cot - (r1 - r2) / sin_p**2
    K = 1.0 / (r1 * r2)
    L1 = r1p / r1 + r2p / r2
    Kp = -K * L1
    Kpp = -Kp * L1 - K * (r1pp / r1 - (r1p / r1) ** 2 + r2pp / r2 - (r2p / r2) ** 2)
    H = 1.0 / r1 + 1.0 / r2
    Hp = -r1p / r1**2 - r2p / r2**2
    # Meridian-plane embedding: distance from axis and height.
    rho = h * sin_p + hp * cos_p
    z = h * cos_p - hp * sin_p
    positions = np.stack([rho, z], axis=1)
    normals = np.stack([sin_p, cos_p], axis=1)
    return GeometryState(
        grid=grid, n=2, angles=ang, dx=dx, h=h, hp=hp,
        r1=r1, r2=r2, r1p=r1p, r2p=r2p, r1pp=r1pp, r2pp=r2pp,
        K=K, Kp=Kp, Kpp=Kpp, H=H, Hp=Hp, Gamma=r1p / r1,
        positions=positions, normals=normals,
        sinphi=sin_p, cosphi=cos_p, cot=cot,
    )


def _require_convex(radii: np.ndarray) -> None:
    if not np.all(np.isfinite(radii)) or np.any(radii <= RADIUS_FLOOR):
        raise NonConvex(
            f"curvature radius dropped to {float(np.min(radii)):.3e} (floor {RADIUS_FLOOR:g})"
        )


def embed(grid: SupportGrid):
    """Embedded positions and outward unit normals.

    n=1: points of the plane curve, F = h*nu + h'*tau.
    n=2: meridian-plane points (distance from axis, height) and the
    meridian components of the normal, (sin(phi), cos(phi)).
    """
    state = derive_state(grid)
    return state.positions, state.normals


def grad_norm_sq_h(state: GeometryState, u: np.ndarray) -> np.ndarray:
    """Squared gradient in the inverse-second-fundamental-form norm.

    n=1: (u_theta)**2 / r; n=2 axisymmetric: (u_phi)**2 / r1.
    """
    du = state.d1(u)
    return du * du / state.r1


def grad_norm_sq_g(state: GeometryState, u: np.ndarray) -> np.ndarray:
    """Squared gradient in the induced metric."""
    du = state.d1(u)
    return du * du / state.r1**2


def box_op(state: GeometryState, u: np.ndarray) -> np.ndarray:
    """Covariant Hessian of u contracted with the inverse second fundamental form.

    Diagonal in the principal frame: sum_i (Hess u)(e_i, e_i) * r_i.
    """
    du = state.d1(u)
    ddu = state.d2(u)
    hess_mer = ddu - state.Gamma * du
    if state.n == 1:
        return hess_mer / state.r1
    return hess_mer / state.r1 + state.cot * du / state.r1


def laplace_beltrami(state: GeometryState, u: np.ndarray) -> np.ndarray:
    """Laplace-Beltrami operator of the induced metric on a scalar field."""
    du = state.d1(u)
    ddu = state.d2(u)
    hess_mer = ddu - state.Gamma * du
    if state.n == 1:
        return hess_mer / state.r1**2
    return (hess_mer + (state.r1 / state.r2) * state.cot * du) / state.r1**2


def hessian_principal(state: GeometryState, u: np.ndarray) -> np.ndarray:
    """Covariant Hessian components in the orthonormal principal frame.

    Returns shape (N,) for n=1 (the arc-length second derivative) and
    (M, 2) for n=2 (meridian, azimuthal).
    """
    du = state.d1(u)
    ddu = state.d2(u)
    mer = (ddu - state.Gamma * du) / state.r1**2
    if state.n == 1:
        return mer
    azi = state.cot * du / (state.r1 * state.r2)
    return np.stack([mer, azi], axis=1)
