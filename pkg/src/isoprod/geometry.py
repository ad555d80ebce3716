"""Cylinder candidates ``D(r0) x N`` in ``S^m x N`` and their stability.

Also the Jacobian bounds for the two maps used to compare regions,
``T_lam(p, q) = (lam^n p, lam^-m q)`` and the radial dilation ``F_beta``, and a
small numerical oracle for the first positive Laplace eigenvalue of ``N``.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass
from typing import Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .profiles import SphereCaps

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CylinderSpec:
    """``D(r0) x N`` inside ``(S^m x N^n, lam^{2n} g0 + lam^{-2m} h)``.

    ``r0`` is the cap radius on the unit sphere, before rescaling.
    """

    m: int
    n: int
    r0: float
    V_N: float
    lam: float

    def __post_init__(self):
        if self.m < 2 or self.n < 2:
            raise ValueError("dimensions m, n must be >= 2")
        if not 0.0 < self.r0 < math.pi:
            raise ValueError(f"r0={self.r0!r} outside (0, pi)")
        if not (self.V_N > 0.0 and self.lam > 0.0):
            raise ValueError("V_N and lam must be positive")


def cylinder_volume(spec: CylinderSpec) -> float:
    # T_lam has unit Jacobian, so the volume does not depend on lam
    return spec.V_N * float(SphereCaps(spec.m).volume(spec.r0))


def cylinder_boundary_area(spec: CylinderSpec) -> float:
    return spec.lam ** (-spec.n) * spec.V_N * float(SphereCaps(spec.m).area(spec.r0))


def tlambda_jacobian(lam: float, m: int, n: int, a: float) -> float:
    """Area Jacobian of ``T_lam`` at a point whose unit normal has ``M``-component ``a``."""
    return math.sqrt(lam ** (2 * m) * a * a + lam ** (-2 * n) * (1.0 - a * a))


def tlambda_area_bounds(lam: float, m: int, n: int, area: float,
                        lateral: bool = False) -> Tuple[float, float]:
    """Bounds on the area of ``T_lam(Sigma)`` given the area of ``Sigma``.

    Returns ``(low, high)``: ``(lam^-n A, lam^m A)`` for ``lam >= 1`` and the
    reverse order for ``lam < 1``.  With ``lateral=True`` (normal tangent to
    ``N``) the image area is exactly ``lam^-n A`` and both entries carry it.
    """
    if not lam > 0.0:
        raise ValueError("lam must be positive")
    shrink = lam ** (-n) * area
    if lateral:
        return shrink, shrink
    grow = lam ** m * area
    return (shrink, grow) if lam >= 1.0 else (grow, shrink)


def fbeta_jacobian(beta: float, m: int, a: float) -> float:
    """Area Jacobian ``beta^(m-1) sqrt(beta^2 a^2 + b^2)`` of the dilation ``F_beta``."""
    return beta ** (m - 1) * math.sqrt(beta * beta * a * a + (1.0 - a * a))


def fbeta_bounds(beta: float, m: int, quantity: str, value: float) -> Tuple[float, float]:
    """Bounds for volume or area after the dilation ``F_beta``.

    Volumes scale exactly by ``beta^m``.  Areas lie between ``beta^(m-1)`` and
    ``beta^m`` times the original, ordered low-high.  For ``beta >= 1`` the
    caller must keep the set inside the ball of radius ``pi/beta``.
    """
    if not beta > 0.0:
        raise ValueError("beta must be positive")
    if quantity == "volume":
        v = beta ** m * value
        return v, v
    if quantity == "area":
        a, b = beta ** (m - 1) * value, beta ** m * value
        return (a, b) if a <= b else (b, a)
    raise ValueError(f"quantity must be 'volume' or 'area', got {quantity!r}")


@dataclass(frozen=True)
class StabilityReport:
    mu1: float
    margin: float
    threshold_lambda: float
    strictly_stable: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def stability_report(spec: CylinderSpec, mu1: float) -> StabilityReport:
    """Rotation-invariant stability of the cylinder boundary.

    For rotation-invariant, mean-zero ``u`` the second variation is bounded
    below by ``(mu1 lam^{2m} - (m-1) csc^2(r0) / lam^{2n}) * int u^2``; the
    boundary is strictly stable exactly when that factor is positive.
    """
    if not mu1 > 0.0:
        raise ValueError(f"mu1 must be positive, got {mu1!r}")
    m, n, lam = spec.m, spec.n, spec.lam
    curv = (m - 1) / math.sin(spec.r0) ** 2
    margin = mu1 * lam ** (2 * m) - curv / lam ** (2 * n)
    threshold = (curv / mu1) ** (1.0 / (2 * (m + n)))
    return StabilityReport(mu1=mu1, margin=margin, threshold_lambda=threshold,
                           strictly_stable=lam > threshold)


# --------------------------------------------------------------------------
# first positive Laplace eigenvalue


class EigenSolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class FlatTorus:
    dim: int
    side: float


@dataclass(frozen=True)
class RoundSphere:
    dim: int
    radius: float = 1.0


Manifold = Union[FlatTorus, RoundSphere]


@dataclass(frozen=True)
class EigenEstimate:
    value: float
    error_estimate: float
    resolution: int


def _periodic_laplacian_1d(k: int, h: float) -> sp.csr_matrix:
    main = np.full(k, 2.0)
    off = np.full(k - 1, -1.0)
    L = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    L[0, k - 1] = L[k - 1, 0] = -1.0
    return (L / (h * h)).tocsr()


def _torus_mu1(t: FlatTorus, k: int) -> float:
    # The grid Laplacian is a Kronecker sum of identical periodic 1-D operators,
    # so its spectrum is every sum of ``dim`` one-dimensional eigenvalues and
    # the smallest positive one is the 1-D gap (the other axes contribute 0).
    L1 = _periodic_laplacian_1d(k, t.side / k).toarray()
    vals = np.sort(scipy.linalg.eigvalsh(L1))
    if abs(vals[0]) > 1e-8 * max(vals[-1], 1.0):
        raise EigenSolverError("periodic operator lost its constant null vector")
    return float(vals[1])


def icosphere(frequency: int) -> Tuple[np.ndarray, np.ndarray]:
    """Unit-sphere triangulation: each icosahedron face split into ``frequency^2``."""
    g = (1.0 + math.sqrt(5.0)) / 2.0
    base = np.array([[-1, g, 0], [1, g, 0], [-1, -g, 0], [1, -g, 0],
                     [0, -1, g], [0, 1, g], [0, -1, -g], [0, 1, -g],
                     [g, 0, -1], [g, 0, 1], [-g, 0, -1], [-g, 0, 1]], dtype=float)
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    f = frequency
    index = {}
    verts = []
    tris = []

    def vid(p):
        q = p / np.linalg.norm(p)
        key = tuple(np.round(q, 10))
        if key not in index:
            index[key] = len(verts)
            verts.append(q)
        return index[key]

    for a, b, c in faces:
        A, B, C = base[a], base[b], base[c]
        ids = {}
        for i in range(f + 1):
            for j in range(f + 1 - i):
                ids[i, j] = vid(A + (B - A) * i / f + (C - A) * j / f)
        for i in range(f):
            for j in range(f - i):
                tris.append((ids[i, j], ids[i + 1, j], ids[i, j + 1]))
                if i + j < f - 1:
                    tris.append((ids[i + 1, j], ids[i + 1, j + 1], ids[i, j + 1]))
    return np.asarray(verts), np.asarray(tris)


def _cotan_matrices(verts: np.ndarray, tris: np.ndarray):
    """Linear FEM stiffness and lumped mass for a triangle mesh."""
    nv = len(verts)
    rows, cols, vals = [], [], []
    mass = np.zeros(nv)
    for k in range(3):
        i, j, o = tris[:, k], tris[:, (k + 1) % 3], tris[:, (k + 2) % 3]
        e1 = verts[i] - verts[o]
        e2 = verts[j] - verts[o]
        cross = np.linalg.norm(np.cross(e1, e2), axis=1)
        cot = np.einsum("ij,ij->i", e1, e2) / cross
        w = 0.5 * cot
        rows += [i, j, i, j]
        cols += [j, i, i, j]
        vals += [-w, -w, w, w]
    area = 0.5 * np.linalg.norm(np.cross(verts[tris[:, 1]] - verts[tris[:, 0]],
                                         verts[tris[:, 2]] - verts[tris[:, 0]]), axis=1)
    for k in range(3):
        np.add.at(mass, tris[:, k], area / 3.0)
    K = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(nv, nv))
    return K, sp.diags(mass).tocsr()


def _sphere2_mu1(frequency: int) -> float:
    verts, tris = icosphere(frequency)
    K, M = _cotan_matrices(verts, tris)
    try:
        vals = spla.eigsh(K.tocsc(), k=2, M=M.tocsc(), sigma=-0.5, which="LM",
                          return_eigenvectors=False)
    except spla.ArpackNoConvergence as exc:
        raise EigenSolverError("sphere eigensolve did not converge") from exc
    return float(np.sort(vals)[1])


def _zonal_mu1(dim: int, cells: int) -> float:
    """Finite volumes for ``-(w u')'/w`` with ``w = sin^(dim-1)`` on ``(0, pi)``.

    The first nonconstant eigenfunctions of a round sphere are restrictions
    of linear functions, hence zonal, so the zonal spectrum carries ``mu1``.
    """
    h = math.pi / cells
    centers = (np.arange(cells) + 0.5) * h
    faces = np.arange(1, cells) * h
    wf = np.sin(faces) ** (dim - 1) / h
    K = np.zeros((cells, cells))
    idx = np.arange(cells - 1)
    K[idx, idx] += wf
    K[idx + 1, idx + 1] += wf
    K[idx, idx + 1] -= wf
    K[idx + 1, idx] -= wf
    M = np.sin(centers) ** (dim - 1) * h
    vals = scipy.linalg.eigh(K, np.diag(M), eigvals_only=True, subset_by_index=[0, 1])
    return float(vals[1])


def _mu1_at(manifold: Manifold, resolution: int) -> float:
    if isinstance(manifold, FlatTorus):
        return _torus_mu1(manifold, resolution)
    if isinstance(manifold, RoundSphere):
        base = _sphere2_mu1(resolution) if manifold.dim == 2 else _zonal_mu1(manifold.dim, resolution)
        return base / manifold.radius ** 2
    raise TypeError(f"unsupported manifold {manifold!r}")


def mu1_oracle(manifold: Manifold, resolution: int) -> EigenEstimate:
    """Numerical first positive Laplace eigenvalue.

    ``resolution`` is grid points per axis for tori, icosahedral frequency
    for ``S^2`` and radial cells for higher spheres.  The error estimate is
    the change against the solve at half resolution.
    """
    if resolution < 8:
        raise ValueError(f"resolution must be >= 8, got {resolution}")
    if manifold.dim < 1:
        raise ValueError("dimension must be positive")
    value = _mu1_at(manifold, resolution)
    coarse = _mu1_at(manifold, max(resolution // 2, 4))
    log.debug("mu1 %s at %d: %.12g (coarse %.12g)", manifold, resolution, value, coarse)
    return EigenEstimate(value=value, error_estimate=abs(value - coarse), resolution=resolution)


__all__ = [
    "CylinderSpec", "cylinder_volume", "cylinder_boundary_area", "tlambda_jacobian",
    "tlambda_area_bounds", "fbeta_jacobian", "fbeta_bounds", "StabilityReport",
    "stability_report", "FlatTorus", "RoundSphere", "EigenEstimate", "EigenSolverError",
    "mu1_oracle", "icosphere",
]
