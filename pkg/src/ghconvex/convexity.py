"""k-convexity engine: eigenvalue sums, Sylvester tests, Grassmannian
oracle and surface-wide scans.

A hypersurface is k-convex at a point when the sum of the k smallest
eigenvalues of its (lifted) second fundamental form is nonnegative; that sum
equals the infimum of Tr_W S over k-planes W, which the brute-force oracle
approximates by sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidK, InvalidParams, NotSymmetric, TooFewSamples
from .potential import PointConfiguration
from .surfaces import (
    BarrierSurface,
    MultiFociEllipsoid,
    Plane,
    chart_domain,
    lifted_sff_batch,
    surface_data_batch,
)

__all__ = [
    "ConvexityReport",
    "ScanSampling",
    "k_smallest_eigensum",
    "eigvals3",
    "eigvals3_batch",
    "brute_force_grassmannian_min",
    "sylvester_positive",
    "convexity_scan",
]

MARGIN_TOL = 1e-9  # relative to ||S||: below this a verdict is Inconclusive


def _check_symmetric(S: np.ndarray, what: str = "matrix") -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.shape != (3, 3):
        raise InvalidParams(f"{what} must be 3x3, got {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InvalidParams(f"{what} must be finite")
    scale = max(1.0, float(np.abs(S).max()))
    if float(np.abs(S - S.T).max()) > 1e-12 * scale:
        raise NotSymmetric(f"{what} is not symmetric within 1e-12")
    return S


def _jacobi_eigvals3(S: np.ndarray) -> np.ndarray:
    """Cyclic Jacobi rotations; exact for the near-degenerate spectra where
    the trigonometric form loses digits."""
    A = np.array(S, dtype=float)
    for _ in range(30):
        off = abs(A[0, 1]) + abs(A[0, 2]) + abs(A[1, 2])
        if off < 1e-15 * (1.0 + abs(A[0, 0]) + abs(A[1, 1]) + abs(A[2, 2])):
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = A[p, q]
            if apq == 0.0:
                continue
            theta = 0.5 * (A[q, q] - A[p, p]) / apq
            t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
            c = 1.0 / math.hypot(1.0, t)
            s = t * c
            R = np.eye(3)
            R[p, p] = R[q, q] = c
            R[p, q] = s
            R[q, p] = -s
            A = R.T @ A @ R
    return np.sort(np.diag(A))


def eigvals3_batch(S: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of symmetric (N, 3, 3) input, shape (N, 3).

    Trigonometric closed form; rows whose characteristic discriminant is
    near zero (clustered eigenvalues, |r| -> 1) fall back to Jacobi.
    """
    S = np.asarray(S, dtype=float)
    single = S.ndim == 2
    if single:
        S = S[None, :, :]
    a00, a11, a22 = S[:, 0, 0], S[:, 1, 1], S[:, 2, 2]
    a01, a02, a12 = S[:, 0, 1], S[:, 0, 2], S[:, 1, 2]
    q = (a00 + a11 + a22) / 3.0
    p1 = a01 ** 2 + a02 ** 2 + a12 ** 2
    p2 = (a00 - q) ** 2 + (a11 - q) ** 2 + (a22 - q) ** 2 + 2.0 * p1
    p = np.sqrt(p2 / 6.0)
    out = np.empty((S.shape[0], 3))
    scale = np.abs(S).max(axis=(1, 2))
    diag_like = p <= 1e-14 * np.maximum(1e-300, scale)
    safe_p = np.where(p > 0.0, p, 1.0)
    b00, b11, b22 = (a00 - q) / safe_p, (a11 - q) / safe_p, (a22 - q) / safe_p
    b01, b02, b12 = a01 / safe_p, a02 / safe_p, a12 / safe_p
    detb = (
        b00 * (b11 * b22 - b12 ** 2)
        - b01 * (b01 * b22 - b12 * b02)
        + b02 * (b01 * b12 - b11 * b02)
    )
    r = np.clip(detb / 2.0, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    hi = q + 2.0 * p * np.cos(phi)
    lo = q + 2.0 * p * np.cos(phi + 2.0 * math.pi / 3.0)
    mid = 3.0 * q - hi - lo
    out[:, 0] = lo
    out[:, 1] = mid
    out[:, 2] = hi
    out[diag_like] = q[diag_like, None]
    # In exact arithmetic |detb/2| <= 1; rows clamped at the boundary have a
    # (near-)repeated eigenvalue and get the Jacobi treatment instead.
    clustered = (~diag_like) & (1.0 - np.abs(r) < 1e-9)
    for i in np.nonzero(clustered)[0]:
        out[i] = _jacobi_eigvals3(S[i])
    return out[0] if single else out


def eigvals3(S: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of one symmetric 3x3 matrix."""
    return eigvals3_batch(_check_symmetric(S))


def k_smallest_eigensum(S: np.ndarray, k: int) -> float:
    """Sum of the k smallest eigenvalues of a symmetric 3x3 matrix.

    k = 3 returns the trace directly (exact identity), so comparisons with
    trace-based oracles carry no eigenvalue round-off.
    """
    S = _check_symmetric(S)
    if k not in (1, 2, 3):
        raise InvalidK(f"k must be 1, 2 or 3, got {k}")
    if k == 3:
        return float(S[0, 0] + S[1, 1] + S[2, 2])
    lam = eigvals3_batch(S)
    return float(lam[:k].sum())


def _eigensum_batch(S: np.ndarray, k: int) -> np.ndarray:
    if k == 3:
        return S[:, 0, 0] + S[:, 1, 1] + S[:, 2, 2]
    lam = eigvals3_batch(S)
    if k == 1:
        return lam[:, 0]
    return lam[:, 0] + lam[:, 1]


def brute_force_grassmannian_min(S: np.ndarray, k: int, n: int, seed: int = 0) -> float:
    """Monte Carlo upper bound: min of Tr_W S over n uniform k-planes.

    Gaussian frames orthonormalized by Gram-Schmidt give Haar-uniform
    subspaces; with a fixed seed the sample set is nested in n, so the
    result is monotone nonincreasing as n grows.  k = 3 is the single
    subspace G(3, R^3) = {R^3}: the trace is returned exactly.
    """
    S = _check_symmetric(S)
    if k not in (1, 2, 3):
        raise InvalidK(f"k must be 1, 2 or 3, got {k}")
    if n < 10 ** 3:
        raise InvalidParams(f"need n >= 1000 samples, got {n}")
    if k == 3:
        return float(S[0, 0] + S[1, 1] + S[2, 2])
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, 3, k))
    q0 = G[:, :, 0]
    n0 = np.linalg.norm(q0, axis=1)
    keep = n0 > 1e-12
    q0 = q0[keep] / n0[keep, None]
    vals = np.einsum("ni,ij,nj->n", q0, S, q0)
    if k == 2:
        g1 = G[keep, :, 1]
        w = g1 - np.einsum("ni,ni->n", q0, g1)[:, None] * q0
        n1 = np.linalg.norm(w, axis=1)
        keep1 = n1 > 1e-12
        q1 = w[keep1] / n1[keep1, None]
        vals = vals[keep1] + np.einsum("ni,ij,nj->n", q1, S, q1)
    return float(vals.min())


def sylvester_positive(S: np.ndarray) -> bool:
    """True iff all three leading principal minors are strictly positive."""
    S = _check_symmetric(S)
    m1 = S[0, 0]
    m2 = S[0, 0] * S[1, 1] - S[0, 1] ** 2
    m3 = (
        S[0, 0] * (S[1, 1] * S[2, 2] - S[1, 2] ** 2)
        - S[0, 1] * (S[0, 1] * S[2, 2] - S[1, 2] * S[0, 2])
        + S[0, 2] * (S[0, 1] * S[1, 2] - S[1, 1] * S[0, 2])
    )
    return bool(m1 > 0.0 and m2 > 0.0 and m3 > 0.0)


@dataclass(frozen=True)
class ScanSampling:
    """Sampling plan for convexity_scan: grid dims, extra random count, seed."""

    grid: tuple[int, int] = (128, 128)
    random: int = 10 ** 4
    seed: int = 0


@dataclass(frozen=True)
class ConvexityReport:
    k: int
    min_eigensum: float
    argmin_params: np.ndarray
    argmin_x: np.ndarray
    samples: int
    skipped: int
    verdict: str
    samples_table: Optional[np.ndarray] = None  # (N, 7): p0 p1 x y z eigensum scale

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "min_eigensum": self.min_eigensum,
            "argmin": {
                "params": [float(v) for v in self.argmin_params],
                "x": [float(v) for v in self.argmin_x],
            },
            "samples": self.samples,
            "skipped": self.skipped,
            "verdict": self.verdict,
        }


def _scan_params(surface: BarrierSurface, sampling: ScanSampling) -> np.ndarray:
    (lo0, hi0), (lo1, hi1) = chart_domain(surface)
    g0, g1 = sampling.grid
    if g0 < 1 or g1 < 1:
        raise InvalidParams("grid dims must be >= 1")
    # cell midpoints: stays strictly inside open chart boxes
    p0 = lo0 + (hi0 - lo0) * (np.arange(g0) + 0.5) / g0
    p1 = lo1 + (hi1 - lo1) * (np.arange(g1) + 0.5) / g1
    P = np.stack(np.meshgrid(p0, p1, indexing="ij"), axis=-1).reshape(-1, 2)
    if sampling.random > 0:
        rng = np.random.default_rng(sampling.seed)
        R = rng.random((sampling.random, 2))
        R[:, 0] = lo0 + (hi0 - lo0) * R[:, 0]
        R[:, 1] = lo1 + (hi1 - lo1) * R[:, 1]
        # keep polar angles off the chart poles
        eps1 = 1e-9 * (hi1 - lo1)
        R[:, 1] = np.clip(R[:, 1], lo1 + eps1, hi1 - eps1)
        P = np.vstack([P, R])
    return P


def convexity_scan(
    config: PointConfiguration,
    surface: BarrierSurface,
    k: int,
    sampling: ScanSampling = ScanSampling(),
    keep_samples: bool = False,
) -> ConvexityReport:
    """Minimum k-eigensum of the lifted second fundamental form over a
    chart-wide sample set.

    Samples within the exclusion radius of a centre are skipped and counted;
    more than 50% skipped raises TooFewSamples.  The verdict applies
    MARGIN_TOL relative to each sample's Frobenius norm: StrictlyConvex when
    every margin clears +tol*scale, Violated when any falls below
    -tol*scale, Inconclusive otherwise.
    """
    if k not in (1, 2, 3):
        raise InvalidK(f"k must be 1, 2 or 3, got {k}")
    if isinstance(surface, Plane):
        side = config.points @ surface.normal if config.k else np.zeros(0)
        if side.size and side.max() >= surface.offset - config.exclusion_radius:
            raise InvalidParams(
                "plane must strictly separate the centres from its normal side"
            )
    P = _scan_params(surface, sampling)
    X, U, V, NU, SFF, _ = surface_data_batch(surface, P)
    ok = config.min_centre_distance(X) > config.exclusion_radius
    skipped = int((~ok).sum())
    requested = P.shape[0]
    if requested - skipped < 0.5 * requested:
        raise TooFewSamples(
            f"{skipped} of {requested} samples fell inside exclusion radii"
        )
    P, X, U, V, NU, SFF = P[ok], X[ok], U[ok], V[ok], NU[ok], SFF[ok]
    S = lifted_sff_batch(config, X, U, V, NU, SFF)
    margins = _eigensum_batch(S, k)
    scales = np.sqrt((S ** 2).sum(axis=(1, 2)))
    i = int(np.argmin(margins))
    tol = MARGIN_TOL * scales
    if np.any(margins < -tol):
        verdict = "Violated"
    elif np.all(margins > tol):
        verdict = "StrictlyConvex"
    else:
        verdict = "Inconclusive"
    table = None
    if keep_samples:
        table = np.column_stack([P, X, margins, scales])
    return ConvexityReport(
        k=k,
        min_eigensum=float(margins[i]),
        argmin_params=P[i].copy(),
        argmin_x=X[i].copy(),
        samples=int(margins.size),
        skipped=skipped,
        verdict=verdict,
        samples_table=table,
    )
