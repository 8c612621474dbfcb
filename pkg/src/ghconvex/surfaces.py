"""Barrier surface families and the lift of their Euclidean data.

Each family provides a chart, a Euclidean orthonormal frame {u, v, nu} with
nu = u x v the inward unit normal, the Euclidean second fundamental form of
the surface in the (u, v) basis with respect to nu, and its trace.

``lifted_sff`` turns that Euclidean data plus the jet of phi into the second
fundamental form of the circle-invariant hypersurface upstairs, expressed in
the g-orthonormal basis (phi^-1/2 u, phi^-1/2 v, phi^1/2 xi) with respect to
the g-unit normal nu~ = phi^-1/2 nu:

    S_uu = phi^-1/2 ( Gem(u,u) - (2 phi)^-1 <grad phi, nu> )
    S_vv = phi^-1/2 ( Gem(v,v) - (2 phi)^-1 <grad phi, nu> )
    S_uv = phi^-1/2   Gem(u,v)
    S_xx = phi^-1/2 (2 phi)^-1 <grad phi, nu>
    S_ux = -phi^-1/2 (2 phi)^-1 <u x grad phi, nu>
    S_vx = -phi^-1/2 (2 phi)^-1 <v x grad phi, nu>

and the trace of S is the lifted mean curvature coefficient
h = phi^-1/2 (mean_r3 - (2 phi)^-1 <grad phi, nu>).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ChartDomainError, InvalidParams, SolverFailure
from .potential import PointConfiguration, PotentialJet, phi_jet, phi_jet_batch

__all__ = [
    "Sphere",
    "Cylinder",
    "Plane",
    "TwoFociEllipsoid",
    "MultiFociEllipsoid",
    "BarrierSurface",
    "SurfacePointData",
    "AdaptedSFF",
    "surface_point",
    "surface_data_batch",
    "chart",
    "lifted_sff",
    "lifted_sff_batch",
    "lifted_mean_curvature",
    "parse_surface",
    "chart_domain",
]

TWO_PI = 2.0 * math.pi


def _unit(w: Sequence[float], what: str) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (3,) or not np.all(np.isfinite(w)):
        raise InvalidParams(f"{what} must be a finite 3-vector")
    n = float(np.linalg.norm(w))
    if n < 1e-12:
        raise InvalidParams(f"{what} must be nonzero")
    return w / n


def _orthobasis(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal (t1, t2) with t1 x t2 = n for a unit vector n."""
    h = np.zeros(3)
    h[int(np.argmin(np.abs(n)))] = 1.0
    t1 = np.cross(h, n)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(n, t1)
    return t1, t2


@dataclass(frozen=True)
class Sphere:
    """Euclidean sphere |x - centre| = radius; inward normal -(x-centre)/r.

    Chart params (azimuth in [0, 2pi], polar in (0, pi))."""

    radius: float
    centre: Sequence[float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise InvalidParams(f"sphere radius must be > 0, got {self.radius}")
        c = np.array(self.centre, dtype=float)
        if c.shape != (3,) or not np.all(np.isfinite(c)):
            raise InvalidParams("sphere centre must be a finite 3-vector")
        c.setflags(write=False)
        object.__setattr__(self, "centre", c)


@dataclass(frozen=True)
class Cylinder:
    """Infinite cylinder of given radius about a general axis.

    Chart params (axial t in [-span, span], angle in [0, 2pi]); the span
    bound exists only to give scans a compact parameter box."""

    radius: float
    axis_point: Sequence[float] = (0.0, 0.0, 0.0)
    axis_direction: Sequence[float] = (0.0, 0.0, 1.0)
    span: float = 10.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise InvalidParams(f"cylinder radius must be > 0, got {self.radius}")
        if not (np.isfinite(self.span) and self.span > 0):
            raise InvalidParams("cylinder span must be > 0")
        p = np.array(self.axis_point, dtype=float)
        if p.shape != (3,) or not np.all(np.isfinite(p)):
            raise InvalidParams("axis point must be a finite 3-vector")
        w = _unit(self.axis_direction, "axis direction")
        b1, b2 = _orthobasis(w)
        for name, val in (("axis_point", p), ("axis_direction", w), ("_b1", b1), ("_b2", b2)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)


@dataclass(frozen=True)
class Plane:
    """Plane <x, normal> = offset; nu = normal (callers orient it away from
    the centres).  Chart params in [-span, span]^2."""

    normal: Sequence[float]
    offset: float
    span: float = 10.0

    def __post_init__(self) -> None:
        if not np.isfinite(self.offset):
            raise InvalidParams("plane offset must be finite")
        if not (np.isfinite(self.span) and self.span > 0):
            raise InvalidParams("plane span must be > 0")
        n = _unit(self.normal, "plane normal")
        t1, t2 = _orthobasis(n)
        for name, val in (("normal", n), ("_t1", t1), ("_t2", t2)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)


@dataclass(frozen=True)
class TwoFociEllipsoid:
    """Confocal ellipsoid |x - p+| + |x - p-| = 2a cosh(r), foci (0,0,+-a).

    Chart (alpha in [0, 2pi], beta in (0, pi)):
        x = (a sinh r sin b cos al, a sinh r sin b sin al, a cosh r cos b).
    """

    a: float
    r: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.a) and self.a > 0):
            raise InvalidParams(f"focus half-distance a must be > 0, got {self.a}")
        if not (np.isfinite(self.r) and self.r > 0):
            raise InvalidParams(f"ellipsoid parameter r must be > 0, got {self.r}")


@dataclass(frozen=True)
class MultiFociEllipsoid:
    """Level set sum_i |x - p_i| = L around n >= 2 foci.

    No closed chart exists for >= 3 foci; points are found by shooting rays
    from the foci centroid and solving F(centroid + t d) = L (bisection then
    Newton).  Chart params are the direction angles (azimuth in [0, 2pi],
    polar in (0, pi)).
    """

    foci: Sequence[Sequence[float]]
    level: float

    def __post_init__(self) -> None:
        pts = np.atleast_2d(np.asarray(self.foci, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
            raise InvalidParams("foci must be an (n >= 2, 3) array")
        if not np.all(np.isfinite(pts)):
            raise InvalidParams("foci must be finite")
        if not np.isfinite(self.level):
            raise InvalidParams("level must be finite")
        diffs = pts[:, None, :] - pts[None, :, :]
        maxpair = float(np.sqrt((diffs ** 2).sum(axis=2)).max())
        # necessary for a nonempty smooth level set: F >= max pairwise
        # distance everywhere, with equality only on focal segments
        if self.level <= maxpair:
            raise InvalidParams(
                f"level {self.level} <= largest pairwise focus distance {maxpair}: empty or degenerate"
            )
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "foci", pts)

    @property
    def centroid(self) -> np.ndarray:
        return self.foci.mean(axis=0)


BarrierSurface = Union[Sphere, Cylinder, Plane, TwoFociEllipsoid, MultiFociEllipsoid]


@dataclass(frozen=True)
class SurfacePointData:
    """Euclidean differential data of one surface point.

    x on the surface; {u, v, nu} orthonormal with nu = u x v the inward
    normal; sff_r3 the 2x2 second fundamental form in the (u, v) basis with
    respect to nu; mean_r3 its trace.
    """

    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    nu: np.ndarray
    sff_r3: np.ndarray
    mean_r3: float


@dataclass(frozen=True)
class AdaptedSFF:
    """Lifted second fundamental form in the basis (phi^-1/2 u, phi^-1/2 v,
    phi^1/2 xi), with respect to the g-unit inward normal phi^-1/2 nu."""

    matrix: np.ndarray


def chart_domain(surface: BarrierSurface) -> tuple[tuple[float, float], tuple[float, float]]:
    """((lo0, hi0), (lo1, hi1)) parameter box of the family's chart.

    Open at polar-angle endpoints (coordinate degeneracy, not a surface
    feature); scans sample strictly inside.
    """
    if isinstance(surface, Sphere):
        return ((0.0, TWO_PI), (0.0, math.pi))
    if isinstance(surface, Cylinder):
        return ((-surface.span, surface.span), (0.0, TWO_PI))
    if isinstance(surface, Plane):
        return ((-surface.span, surface.span), (-surface.span, surface.span))
    if isinstance(surface, TwoFociEllipsoid):
        return ((0.0, TWO_PI), (0.0, math.pi))
    if isinstance(surface, MultiFociEllipsoid):
        return ((0.0, TWO_PI), (0.0, math.pi))
    raise InvalidParams(f"unknown surface family {type(surface).__name__}")


def _check_params(surface: BarrierSurface, P: np.ndarray) -> None:
    (lo0, hi0), (lo1, hi1) = chart_domain(surface)
    p0, p1 = P[:, 0], P[:, 1]
    if not np.all(np.isfinite(P)):
        raise ChartDomainError("chart parameters must be finite")
    if np.any(p0 < lo0) or np.any(p0 > hi0) or np.any(p1 < lo1) or np.any(p1 > hi1):
        raise ChartDomainError("chart parameters outside domain box")
    open_polar = isinstance(surface, (Sphere, TwoFociEllipsoid, MultiFociEllipsoid))
    if open_polar and (np.any(p1 <= 0.0) or np.any(p1 >= math.pi)):
        raise ChartDomainError("polar angle must lie strictly inside (0, pi)")


def _multifoci_solve(surface: MultiFociEllipsoid, D: np.ndarray) -> np.ndarray:
    """Distances t with F(centroid + t * D_row) = level, one per direction row."""
    base = surface.centroid
    pts = surface.foci
    L = surface.level

    def F(ts: np.ndarray) -> np.ndarray:
        X = base[None, :] + ts[:, None] * D
        return np.linalg.norm(X[:, None, :] - pts[None, :, :], axis=2).sum(axis=1)

    f0 = float(F(np.zeros(1))[0])
    if f0 >= L:
        raise SolverFailure(
            f"F(centroid) = {f0:.6g} >= level {L:.6g}: centroid shooting cannot reach the level set"
        )
    n = D.shape[0]
    lo = np.zeros(n)
    # triangle inequality: F(base + t d) >= n_foci * t - F(base), so this
    # upper end is guaranteed to bracket
    hi = np.full(n, (L + 2.0 * f0) / pts.shape[0] + 1.0)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        high = F(mid) > L
        hi = np.where(high, mid, hi)
        lo = np.where(high, lo, mid)
    t = 0.5 * (lo + hi)
    # Newton polish: dF/dt = <grad F, d> > 0 away from the foci
    for _ in range(4):
        X = base[None, :] + t[:, None] * D
        diff = X[:, None, :] - pts[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        grad = (diff / dist[:, :, None]).sum(axis=1)
        deriv = np.einsum("nj,nj->n", grad, D)
        t = t - (dist.sum(axis=1) - L) / deriv
    if not np.all(np.isfinite(t)):
        raise SolverFailure("multi-foci shooting produced non-finite distances")
    return t


def _multifoci_data(surface: MultiFociEllipsoid, P: np.ndarray):
    th, pol = P[:, 0], P[:, 1]
    sp = np.sin(pol)
    D = np.stack([sp * np.cos(th), sp * np.sin(th), np.cos(pol)], axis=1)
    t = _multifoci_solve(surface, D)
    X = surface.centroid[None, :] + t[:, None] * D
    pts = surface.foci
    diff = X[:, None, :] - pts[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    unit = diff / dist[:, :, None]
    gradF = unit.sum(axis=1)
    gn = np.linalg.norm(gradF, axis=1)
    if np.any(gn < 1e-12):
        raise SolverFailure("level set is singular (grad F = 0) at a solved point")
    nu = -gradF / gn[:, None]              # inward: toward decreasing F
    # Hess F = sum_i (I - d_i d_i^T)/|x - p_i|
    eye = np.eye(3)[None, :, :]
    hess = ((eye - np.einsum("nki,nkj->nkij", unit, unit)) / dist[:, :, None, None]).sum(axis=1)
    # tangent frame: u from the coordinate axis least aligned with nu, v = nu x u
    h = np.zeros_like(nu)
    h[np.arange(nu.shape[0]), np.argmin(np.abs(nu), axis=1)] = 1.0
    u = h - np.einsum("nj,nj->n", h, nu)[:, None] * nu
    u /= np.linalg.norm(u, axis=1)[:, None]
    v = np.cross(nu, u)                    # then u x v = nu
    # shape operator w.r.t. inward nu: Hess F / |grad F| on the tangent plane
    B = hess / gn[:, None, None]
    suu = np.einsum("ni,nij,nj->n", u, B, u)
    suv = np.einsum("ni,nij,nj->n", u, B, v)
    svv = np.einsum("ni,nij,nj->n", v, B, v)
    sff = np.empty((P.shape[0], 2, 2))
    sff[:, 0, 0] = suu
    sff[:, 0, 1] = sff[:, 1, 0] = suv
    sff[:, 1, 1] = svv
    return X, u, v, nu, sff, suu + svv


def surface_data_batch(surface: BarrierSurface, params: np.ndarray):
    """Vectorized surface_point: returns (X, U, V, NU, SFF, MEAN) arrays
    of shapes (N,3)x4, (N,2,2), (N,)."""
    P = np.atleast_2d(np.asarray(params, dtype=float))
    if P.ndim != 2 or P.shape[1] != 2:
        raise InvalidParams(f"params must have shape (N, 2), got {P.shape}")
    _check_params(surface, P)
    n = P.shape[0]

    if isinstance(surface, Sphere):
        az, pol = P[:, 0], P[:, 1]
        sa, ca = np.sin(az), np.cos(az)
        sp, cp = np.sin(pol), np.cos(pol)
        er = np.stack([sp * ca, sp * sa, cp], axis=1)
        X = surface.centre[None, :] + surface.radius * er
        u = np.stack([-sa, ca, np.zeros(n)], axis=1)          # azimuthal
        v = np.stack([cp * ca, cp * sa, -sp], axis=1)          # polar
        nu = -er
        sff = np.broadcast_to(np.eye(2) / surface.radius, (n, 2, 2)).copy()
        mean = np.full(n, 2.0 / surface.radius)
        return X, u, v, nu, sff, mean

    if isinstance(surface, Cylinder):
        t, ang = P[:, 0], P[:, 1]
        b1, b2, w = surface._b1, surface._b2, surface.axis_direction
        ca, sa = np.cos(ang), np.sin(ang)
        rho = ca[:, None] * b1 + sa[:, None] * b2              # outward radial
        X = surface.axis_point[None, :] + surface.radius * rho + t[:, None] * w
        u = np.broadcast_to(w, (n, 3)).copy()                   # axial
        v = -sa[:, None] * b1 + ca[:, None] * b2                # azimuthal
        nu = -rho
        sff = np.zeros((n, 2, 2))
        sff[:, 1, 1] = 1.0 / surface.radius
        mean = np.full(n, 1.0 / surface.radius)
        return X, u, v, nu, sff, mean

    if isinstance(surface, Plane):
        s, t = P[:, 0], P[:, 1]
        X = surface.offset * surface.normal[None, :] + s[:, None] * surface._t1 + t[:, None] * surface._t2
        u = np.broadcast_to(surface._t1, (n, 3)).copy()
        v = np.broadcast_to(surface._t2, (n, 3)).copy()
        nu = np.broadcast_to(surface.normal, (n, 3)).copy()
        sff = np.zeros((n, 2, 2))
        mean = np.zeros(n)
        return X, u, v, nu, sff, mean

    if isinstance(surface, TwoFociEllipsoid):
        a, r = surface.a, surface.r
        al, be = P[:, 0], P[:, 1]
        sal, cal = np.sin(al), np.cos(al)
        sb, cb = np.sin(be), np.cos(be)
        sh, ch = math.sinh(r), math.cosh(r)
        X = np.stack([a * sh * sb * cal, a * sh * sb * sal, a * ch * cb], axis=1)
        A = np.sqrt(ch * ch - cb * cb)
        u = np.stack([-sal, cal, np.zeros(n)], axis=1)
        v = np.stack([sh * cb * cal, sh * cb * sal, -ch * sb], axis=1) / A[:, None]
        nu = -np.stack([ch * sb * cal, ch * sb * sal, sh * cb], axis=1) / A[:, None]
        sff = np.zeros((n, 2, 2))
        sff[:, 0, 0] = ch / (a * A * sh)
        sff[:, 1, 1] = sh * ch / (a * A ** 3)
        mean = sff[:, 0, 0] + sff[:, 1, 1]
        return X, u, v, nu, sff, mean

    return _multifoci_data(surface, P)


def chart(surface: BarrierSurface, params: np.ndarray) -> np.ndarray:
    """Chart map alone: (N, 2) parameters -> (N, 3) surface points."""
    return surface_data_batch(surface, params)[0]


def surface_point(surface: BarrierSurface, params: Sequence[float]) -> SurfacePointData:
    """Point data at one chart parameter pair.

    Raises
    ------
    ChartDomainError
        Parameters outside the family's chart box (or at a polar-angle
        degeneracy).
    SolverFailure
        Multi-foci level equation not solvable from the centroid.
    """
    p = np.asarray(params, dtype=float)
    if p.shape != (2,):
        raise InvalidParams(f"params must be a 2-vector, got shape {p.shape}")
    X, U, V, NU, SFF, MEAN = surface_data_batch(surface, p[None, :])
    return SurfacePointData(X[0], U[0], V[0], NU[0], SFF[0], float(MEAN[0]))


def lifted_sff(config: PointConfiguration, data: SurfacePointData) -> AdaptedSFF:
    """Second fundamental form of the circle-invariant hypersurface.

    Literal transcription of the six entry formulas; the batch variant uses
    the equivalent in-frame components and is cross-checked in tests.
    """
    jet = phi_jet(config, data.x)
    phi = jet.value
    grad = jet.gradient
    f = phi ** -0.5
    q = 0.5 / phi
    gn = float(grad @ data.nu)
    S = np.empty((3, 3))
    S[0, 0] = f * (data.sff_r3[0, 0] - q * gn)
    S[1, 1] = f * (data.sff_r3[1, 1] - q * gn)
    S[0, 1] = S[1, 0] = f * data.sff_r3[0, 1]
    S[2, 2] = f * q * gn
    S[0, 2] = S[2, 0] = -f * q * float(np.cross(data.u, grad) @ data.nu)
    S[1, 2] = S[2, 1] = -f * q * float(np.cross(data.v, grad) @ data.nu)
    return AdaptedSFF(S)


def lifted_sff_batch(
    config: PointConfiguration,
    X: np.ndarray,
    U: np.ndarray,
    V: np.ndarray,
    NU: np.ndarray,
    SFF: np.ndarray,
) -> np.ndarray:
    """(N, 3, 3) lifted forms; uses <u x grad, nu> = <grad, v> and
    <v x grad, nu> = -<grad, u> for the right-handed frame."""
    vals, grads, _ = phi_jet_batch(config, X)
    f = vals ** -0.5
    q = 0.5 / vals
    gu = np.einsum("nj,nj->n", grads, U)
    gv = np.einsum("nj,nj->n", grads, V)
    gn = np.einsum("nj,nj->n", grads, NU)
    S = np.empty((X.shape[0], 3, 3))
    S[:, 0, 0] = f * (SFF[:, 0, 0] - q * gn)
    S[:, 1, 1] = f * (SFF[:, 1, 1] - q * gn)
    S[:, 0, 1] = S[:, 1, 0] = f * SFF[:, 0, 1]
    S[:, 2, 2] = f * q * gn
    S[:, 0, 2] = S[:, 2, 0] = -f * q * gv
    S[:, 1, 2] = S[:, 2, 1] = f * q * gu
    return S


def lifted_mean_curvature(config: PointConfiguration, data: SurfacePointData) -> float:
    """Coefficient h with mean curvature vector H = h * (phi^-1/2 nu)."""
    jet = phi_jet(config, data.x)
    gn = float(jet.gradient @ data.nu)
    return jet.value ** -0.5 * (data.mean_r3 - 0.5 * gn / jet.value)


# --- JSON surface specifications ------------------------------------------

def parse_surface(data: dict) -> BarrierSurface:
    """Build a surface from {"family": ..., family-specific fields}.

    Families: "sphere" (r, centre), "cylinder" (r, point, axis, span),
    "plane" (normal, offset, span), "ellipsoid2" (a, r),
    "ellipsoidN" (foci, level).
    """
    if not isinstance(data, dict) or "family" not in data:
        raise InvalidParams('surface spec must be an object with a "family" key')
    fam = data["family"]
    rest = {k: v for k, v in data.items() if k != "family"}

    def take(key, default=None, required=False):
        if required and key not in rest:
            raise InvalidParams(f'surface family "{fam}" requires "{key}"')
        return rest.pop(key, default)

    if fam == "sphere":
        r = take("r", required=True)
        centre = take("centre", (0.0, 0.0, 0.0))
        out: BarrierSurface = Sphere(float(r), centre)
    elif fam == "cylinder":
        r = take("r", required=True)
        point = take("point", (0.0, 0.0, 0.0))
        axis = take("axis", (0.0, 0.0, 1.0))
        span = float(take("span", 10.0))
        out = Cylinder(float(r), point, axis, span)
    elif fam == "plane":
        normal = take("normal", required=True)
        offset = take("offset", required=True)
        span = float(take("span", 10.0))
        out = Plane(normal, float(offset), span)
    elif fam == "ellipsoid2":
        a = take("a", required=True)
        r = take("r", required=True)
        out = TwoFociEllipsoid(float(a), float(r))
    elif fam == "ellipsoidN":
        foci = take("foci", required=True)
        level = take("level", required=True)
        out = MultiFociEllipsoid(foci, float(level))
    else:
        raise InvalidParams(f'unknown surface family "{fam}"')
    if rest:
        raise InvalidParams(f'unknown keys for family "{fam}": {sorted(rest)}')
    return out
