"""Weighted isoperimetric problem on the rescaled model strip.

Everything is computed on the fixed rectangle ``(0, V_M) x (0, V_N)``.  A
region is the lower-left hypograph of a monotone boundary curve (``x``
nondecreasing, ``y`` nonincreasing) and its perimeter is

    P = int sqrt( (lam^m psi(y) dx)^2 + (lam^-n phi(x) dy)^2 ),

with Lebesgue area.  ``phi``/``psi`` are the profiles of the two factors.

Solvers
-------
``exact``
    Area-quantized dynamic programme over unit-step lattice paths.  Exact
    on the lattice; the state space grows like ``Nx * Ny * (Nx * Ny)`` so it
    is meant for small grids.
``lagrangian``
    Minimises ``P - mu * area`` over lattice paths and bisects ``mu``.
    Because the profiles are concave the lattice minimum is (close to) a
    concave function of area, so the relaxation usually only ever returns
    the empty or the full region; the solver then raises
    :class:`StripConvergenceError` carrying the bracketing pairs.
``staircase``
    Exact minimisation over two-drop staircases: a vertical drop at ``x_a``
    to a free height ``c``, a horizontal run to ``x_b`` and a drop to 0 (and
    the transposed family).  With heights free, the lattice objective is a
    concave function of the drop measure on the ``x`` grid, whose extreme
    points have at most two atoms, so this value is at most the lattice
    minimum at the same area.  Every candidate is a genuine path with the
    exact target area.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .profiles import Profile, check_symmetry

Grid = Tuple[int, int]

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(4)
EXACT_STATE_LIMIT = 8_000_000
_EPS = float(np.finfo(float).eps)
_TINY = 1e-290


class StripConvergenceError(RuntimeError):
    """The area multiplier bisection could not match the target area."""

    def __init__(self, message: str, bracket=None):
        super().__init__(message)
        self.bracket = bracket


@dataclass(frozen=True, eq=False)
class StripConfig:
    """Product data ``(M^m, g) x (N^n, h)`` with warping parameter ``lam``."""

    m: int
    n: int
    phi: Profile
    psi: Profile
    lam: float

    def __post_init__(self):
        if self.m < 2 or self.n < 2:
            raise ValueError("dimensions m, n must be >= 2")
        if self.phi.dim != self.m or self.psi.dim != self.n:
            raise ValueError("profile dimensions do not match (m, n)")
        if not self.lam > 0.0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        for name, p in (("phi", self.phi), ("psi", self.psi)):
            p.validate()
            if not check_symmetry(p, 1e-9 * max(1.0, float(p.areas.max()))):
                raise ValueError(f"{name} is not symmetric")

    @property
    def V_M(self) -> float:
        return self.phi.total_volume

    @property
    def V_N(self) -> float:
        return self.psi.total_volume

    @property
    def total_area(self) -> float:
        return self.V_M * self.V_N

    def with_lam(self, lam: float) -> "StripConfig":
        return StripConfig(self.m, self.n, self.phi, self.psi, lam)

    def vertical_density(self, x):
        """Weight of ``|dy|`` at abscissa ``x``: ``lam^-n phi(x)``."""
        return self.lam ** (-self.n) * np.asarray(self.phi(x))

    def horizontal_density(self, y):
        """Weight of ``|dx|`` at height ``y``: ``lam^m psi(y)``."""
        return self.lam ** self.m * np.asarray(self.psi(y))


@dataclass(frozen=True, eq=False)
class MonotonePath:
    """Polygonal boundary curve; the region is its lower-left hypograph."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 1:
            raise ValueError("vertices must be an (k, 2) array")
        d = np.diff(v, axis=0)
        if np.any(d[:, 0] < 0.0) or np.any(d[:, 1] > 0.0):
            raise ValueError("path is not monotone (x nondecreasing, y nonincreasing)")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_points(cls, pts: Sequence[Sequence[float]]) -> "MonotonePath":
        """Build a path, dropping repeated consecutive vertices."""
        pts = np.asarray(pts, dtype=float)
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = np.any(np.diff(pts, axis=0) != 0.0, axis=1)
        return cls(pts[keep])

    def to_json(self) -> str:
        return json.dumps({"vertices": self.vertices.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "MonotonePath":
        return cls(json.loads(text)["vertices"])


def validate_path(cfg: StripConfig, path: MonotonePath, tol: float = 1e-12) -> None:
    """Check that ``path`` lies in the strip with endpoints on its boundary."""
    v = path.vertices
    xs, ys = v[:, 0], v[:, 1]
    ex, ey = tol * cfg.V_M, tol * cfg.V_N
    if xs.min() < -ex or xs.max() > cfg.V_M + ex or ys.min() < -ey or ys.max() > cfg.V_N + ey:
        raise ValueError("path leaves the strip")
    if len(v) == 1:
        return
    (x0, y0), (x1, y1) = v[0], v[-1]
    if not (abs(x0) <= ex or abs(y0 - cfg.V_N) <= ey):
        raise ValueError("path must start on the left or top side")
    if not (abs(y1) <= ey or abs(x1 - cfg.V_M) <= ex):
        raise ValueError("path must end on the bottom or right side")


def enclosed_area(path: MonotonePath) -> float:
    """Area of the lower-left hypograph bounded by ``path``.

    A path that starts at ``(x0, y0)`` with ``x0 > 0`` starts on the top side,
    so the rectangle ``[0, x0] x [0, y0]`` belongs to the region.
    """
    v = path.vertices
    x0, y0 = v[0]
    dx = np.diff(v[:, 0])
    trap = 0.5 * (v[:-1, 1] + v[1:, 1])
    return float(x0 * y0 + np.dot(dx, trap))


def _integrand(cfg: StripConfig, a: np.ndarray, b: np.ndarray, t: np.ndarray, terms: str):
    """Density of the weighted length at parameters ``t`` along ``a -> b``."""
    x = a[0] + t * (b[0] - a[0])
    y = a[1] + t * (b[1] - a[1])
    hx = cfg.horizontal_density(y) * abs(b[0] - a[0])
    vy = cfg.vertical_density(x) * abs(b[1] - a[1])
    if terms == "phi":
        return vy
    if terms == "psi":
        return hx
    return np.hypot(hx, vy)


def _oblique_cost(cfg: StripConfig, a: np.ndarray, b: np.ndarray, terms: str,
                  rtol: float = 1e-11, max_depth: int = 40) -> float:
    """Adaptive composite 4-point Gauss-Legendre along one oblique segment.

    The profiles behave like square roots at the ends of their range, where a
    single Gauss panel loses about three digits; panels are bisected until the
    halves agree with the whole.  All panels of one level are evaluated in a
    single vectorised call.
    """

    def panels(lo, hi):
        t = lo[:, None] + 0.5 * (hi - lo)[:, None] * (_GAUSS_X + 1.0)
        vals = _integrand(cfg, a, b, t.ravel(), terms).reshape(t.shape)
        return 0.5 * (hi - lo) * (vals @ _GAUSS_W)

    lo, hi = np.array([0.0]), np.array([1.0])
    est = panels(lo, hi)
    scale = abs(float(est[0]))
    total = 0.0
    for depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        both = panels(np.concatenate([lo, mid]), np.concatenate([mid, hi]))
        left, right = both[:len(lo)], both[len(lo):]
        diff = np.abs(left + right - est)
        done = ((diff <= rtol * scale * (hi - lo))
                # roundoff floor: the estimates cannot agree any better
                | (diff <= 64.0 * _EPS * (np.abs(left) + np.abs(right)) + _TINY))
        if depth == max_depth:
            done[:] = True
        total += float(np.sum(left[done] + right[done]))
        keep = ~done
        if not keep.any():
            break
        lo, hi = np.concatenate([lo[keep], mid[keep]]), np.concatenate([mid[keep], hi[keep]])
        est = np.concatenate([left[keep], right[keep]])
    return total


def segment_costs(cfg: StripConfig, p0: np.ndarray, p1: np.ndarray,
                  terms: str = "both") -> np.ndarray:
    """Weighted length of straight segments ``p0[k] -> p1[k]``.

    Axis-parallel segments have a constant density and are integrated
    exactly; oblique ones with adaptive composite Gauss-Legendre.  ``terms``
    selects the full integrand or only the ``phi`` (``|dy|``) or ``psi``
    (``|dx|``) part.
    """
    if terms not in ("both", "phi", "psi"):
        raise ValueError(f"unknown terms={terms!r}")
    p0 = np.atleast_2d(np.asarray(p0, dtype=float))
    p1 = np.atleast_2d(np.asarray(p1, dtype=float))
    dx = np.abs(p1[:, 0] - p0[:, 0])
    dy = np.abs(p1[:, 1] - p0[:, 1])
    out = np.zeros(len(p0))
    vert = (dx == 0.0) & (dy > 0.0)
    horiz = (dy == 0.0) & (dx > 0.0)
    if terms != "psi" and vert.any():
        out[vert] = cfg.vertical_density(p0[vert, 0]) * dy[vert]
    if terms != "phi" and horiz.any():
        out[horiz] = cfg.horizontal_density(p0[horiz, 1]) * dx[horiz]
    for k in np.nonzero((dx > 0.0) & (dy > 0.0))[0]:
        out[k] = _oblique_cost(cfg, p0[k], p1[k], terms)
    return out


def rescaled_perimeter(cfg: StripConfig, path: MonotonePath, terms: str = "both") -> float:
    """Model perimeter of the region bounded by ``path``.

    ``terms="phi"`` gives ``lam^-n int phi(x) |dy|`` and ``terms="psi"`` gives
    ``lam^m int psi(y) |dx|``; each is a lower bound for the full value.
    """
    v = path.vertices
    if len(v) < 2:
        return 0.0
    total = 0.0
    for c in segment_costs(cfg, v[:-1], v[1:], terms):
        total += c
    return total


# --------------------------------------------------------------------------
# lattice machinery


@dataclass(frozen=True)
class Lattice:
    """Unit-step lattice on the strip with per-edge weights.

    ``vertical[i]`` is the cost of a unit down-step at ``x_i``; ``horizontal[j]``
    the cost of a unit right-step at ``y_j``.  Both arrays are symmetrised
    (``w[k] == w[-1-k]``) so mirror-image paths cost exactly the same.
    """

    nx: int
    ny: int
    dx: float
    dy: float
    vertical: np.ndarray
    horizontal: np.ndarray

    @property
    def xs(self) -> np.ndarray:
        return self.dx * np.arange(self.nx + 1)

    @property
    def ys(self) -> np.ndarray:
        return self.dy * np.arange(self.ny + 1)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy


def _check_grid(grid: Grid, minimum: int = 1) -> Grid:
    nx, ny = (int(g) for g in grid)
    if nx < minimum or ny < minimum:
        raise ValueError(f"grid {grid} must be at least {minimum}x{minimum}")
    return nx, ny


def lattice(cfg: StripConfig, grid: Grid) -> Lattice:
    nx, ny = _check_grid(grid)
    dx, dy = cfg.V_M / nx, cfg.V_N / ny
    xs = dx * np.arange(nx + 1)
    ys = dy * np.arange(ny + 1)
    # cost of unit edges via the same integrator used for whole paths
    wv = segment_costs(cfg, np.column_stack([xs, np.full_like(xs, dy)]),
                       np.column_stack([xs, np.zeros_like(xs)]))
    wh = segment_costs(cfg, np.column_stack([np.zeros_like(ys), ys]),
                       np.column_stack([np.full_like(ys, dx), ys]))
    wv = 0.5 * (wv + wv[::-1])
    wh = 0.5 * (wh + wh[::-1])
    wv[0] = wv[-1] = 0.0
    wh[0] = wh[-1] = 0.0
    return Lattice(nx, ny, dx, dy, wv, wh)


def steps_to_path(lat: Lattice, steps: Sequence[str]) -> MonotonePath:
    """Vertices of the lattice path from ``(0, V_N)`` given ``'R'``/``'D'`` steps."""
    i, j = 0, lat.ny
    pts = [(0.0, lat.ny * lat.dy)]
    for s in steps:
        if s == "R":
            i += 1
        else:
            j -= 1
        pts.append((i * lat.dx, j * lat.dy))
    pts = np.asarray(pts)
    # keep only corners
    keep = np.ones(len(pts), dtype=bool)
    if len(pts) > 2:
        d = np.diff(pts, axis=0)
        turn = np.any(d[1:] != d[:-1], axis=1)
        keep[1:-1] = turn
    return MonotonePath(pts[keep])


def target_cells(lat: Lattice, v: float) -> int:
    """Representable area (in cells) nearest ``v``; ties go to the smaller one."""
    q = v / lat.cell_area
    k = math.floor(q)
    if q - k > 0.5:
        k += 1
    return int(min(max(k, 0), lat.nx * lat.ny))


@dataclass
class StripMinimum:
    path: MonotonePath
    value: float
    area: float
    method: str
    bracket: Optional[tuple] = field(default=None)


def exact_lattice_min(cfg: StripConfig, v: float, grid: Grid) -> StripMinimum:
    """Area-quantized dynamic programme over all unit-step lattice paths.

    State is ``(column i, height j, cells enclosed so far)``.  Costs are
    accumulated edge by edge from the start vertex, so the value is the same
    floating-point sum as walking the optimal path.
    """
    lat = lattice(cfg, grid)
    nx, ny = lat.nx, lat.ny
    A = nx * ny
    if (nx + 1) * (ny + 1) * (A + 1) > EXACT_STATE_LIMIT:
        raise ValueError(f"grid {grid} too large for the area-quantized solver")
    target = target_cells(lat, v)
    inf = np.inf
    # came_down[i, j, a]: optimal arrival at (i, j, a) was a down-step
    came_down = np.zeros((nx + 1, ny + 1, A + 1), dtype=bool)
    D = np.full((ny + 1, A + 1), inf)
    D[ny, 0] = 0.0
    for j in range(ny - 1, -1, -1):
        D[j] = D[j + 1] + lat.vertical[0]
        came_down[0, j] = True
    for i in range(1, nx + 1):
        E = np.full_like(D, inf)
        for j in range(ny + 1):
            if j == 0:
                E[0] = D[0] + lat.horizontal[0]
            else:
                E[j, j:] = D[j, :A + 1 - j] + lat.horizontal[j]
        new = E
        for j in range(ny - 1, -1, -1):
            down = new[j + 1] + lat.vertical[i]
            better = down < new[j]
            new[j] = np.where(better, down, new[j])
            came_down[i, j] = better
        D = new
    value = float(D[0, target])
    if not np.isfinite(value):
        raise ValueError("target area not representable")
    steps = []
    i, j, a = nx, 0, target
    while (i, j) != (0, ny):
        if came_down[i, j, a]:
            steps.append("D")
            j += 1
        else:
            steps.append("R")
            i -= 1
            a -= j
    steps.reverse()
    path = steps_to_path(lat, steps)
    return StripMinimum(path, value, target * lat.cell_area, "exact")


def _lagrangian_pass(lat: Lattice, mu: float):
    """Minimise ``P - mu * area`` over lattice paths; ties to the smaller area."""
    nx, ny = lat.nx, lat.ny
    cell = lat.cell_area
    h = lat.horizontal - mu * cell * np.arange(ny + 1)
    cost = np.full(ny + 1, np.inf)
    area = np.zeros(ny + 1, dtype=np.int64)
    perim = np.zeros(ny + 1)
    came_down = np.zeros((nx + 1, ny + 1), dtype=bool)
    cost[ny] = 0.0
    for j in range(ny - 1, -1, -1):
        cost[j] = cost[j + 1] + lat.vertical[0]
        perim[j] = perim[j + 1] + lat.vertical[0]
        came_down[0, j] = True
    for i in range(1, nx + 1):
        cost = cost + h
        perim = perim + lat.horizontal
        area = area + np.arange(ny + 1)
        for j in range(ny - 1, -1, -1):
            c = cost[j + 1] + lat.vertical[i]
            if c < cost[j] or (c == cost[j] and area[j + 1] < area[j]):
                cost[j] = c
                area[j] = area[j + 1]
                perim[j] = perim[j + 1] + lat.vertical[i]
                came_down[i, j] = True
    steps = []
    i, j = nx, 0
    while (i, j) != (0, ny):
        if came_down[i, j]:
            steps.append("D")
            j += 1
        else:
            steps.append("R")
            i -= 1
    steps.reverse()
    return float(perim[0]), int(area[0]), steps


def lagrangian_lattice_min(cfg: StripConfig, v: float, grid: Grid,
                           max_iter: int = 200) -> StripMinimum:
    """Lagrangian relaxation of the area constraint with bisection on ``mu``.

    Returns as soon as a relaxed minimiser has area within one cell of ``v``.
    Raises :class:`StripConvergenceError` with the bracketing
    ``(area, perimeter)`` pairs when the duality gap skips over ``v``.
    """
    lat = lattice(cfg, grid)
    cell = lat.cell_area
    big = (lat.vertical.sum() * lat.ny + lat.horizontal.sum() * lat.nx) / cell + 1.0
    lo, hi = -big, big
    best_lo = best_hi = None
    for _ in range(max_iter):
        mu = 0.5 * (lo + hi)
        p, a_cells, steps = _lagrangian_pass(lat, mu)
        a = a_cells * cell
        if abs(a - v) <= cell:
            return StripMinimum(steps_to_path(lat, steps), p, a, "lagrangian")
        if a < v:
            lo, best_lo = mu, (a, p)
        else:
            hi, best_hi = mu, (a, p)
        if hi - lo <= 1e-13 * max(1.0, abs(mu)):
            break
    raise StripConvergenceError(
        f"area multiplier bisection stalled; target {v:.6g} falls in a duality gap",
        bracket=(best_lo, best_hi))


def _two_drop_candidates(t0, H, pts_a, pts_b, lin_w, int_w):
    """Costs of two-drop staircases along one axis.

    Drops at ``s_a <= t0 <= s_b`` of sizes ``H - c`` and ``c`` with
    ``c = (v - s_a H)/(s_b - s_a)``; linear part ``lin_w(s_a)(H-c) + lin_w(s_b)c``,
    run part ``int_w(c) (s_b - s_a)``.
    """
    sa, sb = np.meshgrid(pts_a, pts_b, indexing="ij")
    width = sb - sa
    ok = width > 0.0
    c = np.zeros_like(sa)
    c[ok] = H * (t0 - sa[ok]) / width[ok]
    c = np.clip(c, 0.0, H)
    la, lb = lin_w(pts_a), lin_w(pts_b)
    cost = la[:, None] * (H - c) + lb[None, :] * c + int_w(c) * width
    cost[~ok] = np.inf
    return sa, sb, c, cost


def staircase_min(cfg: StripConfig, v: float, grid: Grid) -> StripMinimum:
    """Minimum over two-drop staircases with corners on the grid lines.

    Includes the single vertical cut at ``x = v/V_N`` and the single
    horizontal cut at ``y = v/V_M``, so the value never exceeds the product
    candidate ``lam^-n V_N phi(v/V_N)``.
    """
    nx, ny = _check_grid(grid)
    VM, VN = cfg.V_M, cfg.V_N
    t0, s0 = v / VN, v / VM
    xs = VM * np.arange(nx + 1) / nx
    ys = VN * np.arange(ny + 1) / ny

    cands = []
    # single cuts
    cands.append((float(cfg.vertical_density(t0)) * VN, [(t0, VN), (t0, 0.0)]))
    cands.append((float(cfg.horizontal_density(s0)) * VM, [(0.0, s0), (VM, s0)]))

    xa, xb = xs[xs < t0], xs[xs > t0]
    if xa.size and xb.size:
        sa, sb, c, cost = _two_drop_candidates(t0, VN, xa, xb, cfg.vertical_density,
                                               cfg.horizontal_density)
        k = np.unravel_index(np.argmin(cost), cost.shape)
        a_, b_, c_ = sa[k], sb[k], c[k]
        cands.append((float(cost[k]), [(a_, VN), (a_, c_), (b_, c_), (b_, 0.0)]))
    ya, yb = ys[ys < s0], ys[ys > s0]
    if ya.size and yb.size:
        sa, sb, c, cost = _two_drop_candidates(s0, VM, ya, yb, cfg.horizontal_density,
                                               cfg.vertical_density)
        k = np.unravel_index(np.argmin(cost), cost.shape)
        a_, b_, c_ = sa[k], sb[k], c[k]
        cands.append((float(cost[k]), [(0.0, b_), (c_, b_), (c_, a_), (VM, a_)]))

    value, pts = min(cands, key=lambda t: t[0])
    path = MonotonePath.from_points(pts)
    return StripMinimum(path, value, enclosed_area(path), "staircase")


def minimize_perimeter(cfg: StripConfig, v: float, grid: Grid,
                       method: str = "auto") -> StripMinimum:
    """Minimise the model perimeter at area ``v`` over monotone paths on ``grid``.

    ``method="auto"`` uses the exact lattice solver when its state space is
    small and the staircase solver otherwise.
    """
    if not 0.0 < v < cfg.total_area:
        raise ValueError(f"area {v!r} outside (0, {cfg.total_area!r})")
    nx, ny = _check_grid(grid)
    if method == "auto":
        small = (nx + 1) * (ny + 1) * (nx * ny + 1) <= EXACT_STATE_LIMIT // 8
        method = "exact" if small else "staircase"
    if method == "exact":
        return exact_lattice_min(cfg, v, grid)
    if method == "staircase":
        return staircase_min(cfg, v, grid)
    if method == "lagrangian":
        return lagrangian_lattice_min(cfg, v, grid)
    raise ValueError(f"unknown method {method!r}")


# --------------------------------------------------------------------------
# certified lower bound


def _box_lower_bounds(t0, H, pts_a, pts_b, lin_w, int_w):
    """Lower bounds of both cost parts over boxes of drop positions.

    ``pts_a`` partitions ``[0, t0]`` and ``pts_b`` partitions ``[t0, L]``.
    On a box the free height ``c`` is decreasing in both drop positions, and
    the concave weights attain their minima at interval ends.
    """
    a_lo, a_hi = pts_a[:-1], pts_a[1:]
    b_lo, b_hi = pts_b[:-1], pts_b[1:]
    la = np.minimum(lin_w(a_lo), lin_w(a_hi))
    lb = np.minimum(lin_w(b_lo), lin_w(b_hi))
    A_lo, B_lo = np.meshgrid(a_lo, b_lo, indexing="ij")
    A_hi, B_hi = np.meshgrid(a_hi, b_hi, indexing="ij")
    c_hi = np.clip(H * (t0 - A_lo) / (B_lo - A_lo), 0.0, H)
    c_lo = np.clip(H * (t0 - A_hi) / (B_hi - A_hi), 0.0, H)
    LA, LB = la[:, None], lb[None, :]
    lin = np.minimum(LA * (H - c_lo) + LB * c_lo, LA * (H - c_hi) + LB * c_hi)
    run = np.minimum(int_w(c_lo), int_w(c_hi)) * np.maximum(B_lo - A_hi, 0.0)
    return lin.ravel(), run.ravel()


def _partition(lo: float, hi: float, pts: np.ndarray) -> np.ndarray:
    inner = pts[(pts > lo) & (pts < hi)]
    return np.concatenate([[lo], inner, [hi]])


def certified_lower_bound(cfg: StripConfig, v: float, grid: Grid,
                          angles: int = 257) -> float:
    """Lower bound on the model infimum over all monotone curves of area ``v``.

    For any ``theta`` in ``[0, pi/2]`` the integrand dominates
    ``cos(theta) lam^m psi |dx| + sin(theta) lam^-n phi |dy|``; the minimum of
    that split functional is concave in the drop measure, hence attained on
    two-drop staircases, which are bounded box by box on the grid.  The best
    ``theta`` is searched; any ``theta`` gives a valid bound.
    """
    if not 0.0 < v < cfg.total_area:
        raise ValueError(f"area {v!r} outside (0, {cfg.total_area!r})")
    nx, ny = _check_grid(grid)
    VM, VN = cfg.V_M, cfg.V_N
    t0, s0 = v / VN, v / VM
    xs = VM * np.arange(nx + 1) / nx
    ys = VN * np.arange(ny + 1) / ny
    # columns: phi part is linear in drops, psi part is the run
    phi_c, psi_c = _box_lower_bounds(t0, VN, _partition(0.0, t0, xs),
                                     _partition(t0, VM, xs),
                                     cfg.vertical_density, cfg.horizontal_density)
    # rows: roles swap
    psi_r, phi_r = _box_lower_bounds(s0, VM, _partition(0.0, s0, ys),
                                     _partition(s0, VN, ys),
                                     cfg.horizontal_density, cfg.vertical_density)

    def bound(theta: float) -> float:
        ct, st = math.cos(theta), math.sin(theta)
        col = float(np.min(ct * psi_c + st * phi_c))
        row = float(np.min(ct * psi_r + st * phi_r))
        return max(col, row)

    thetas = np.linspace(0.0, 0.5 * math.pi, angles)
    vals = np.array([bound(t) for t in thetas])
    k = int(np.argmax(vals))
    best = float(vals[k])
    lo, hi = thetas[max(k - 1, 0)], thetas[min(k + 1, angles - 1)]
    if hi > lo:
        res = minimize_scalar(lambda t: -bound(t), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        best = max(best, bound(float(res.x)))
    return max(best, 0.0)


# --------------------------------------------------------------------------
# discrete Steiner symmetrization


def cells_to_mask(cells, grid: Grid) -> np.ndarray:
    nx, ny = _check_grid(grid)
    mask = np.zeros((nx, ny), dtype=bool)
    for i, j in cells:
        if not (0 <= i < nx and 0 <= j < ny):
            raise ValueError(f"cell {(i, j)} outside grid {grid}")
        mask[i, j] = True
    return mask


def mask_to_cells(mask: np.ndarray) -> set:
    return {(int(i), int(j)) for i, j in zip(*np.nonzero(mask))}


def symmetrize_columns(mask: np.ndarray) -> np.ndarray:
    """Push the cells of every column down to the bottom edge."""
    counts = mask.sum(axis=1)
    return np.arange(mask.shape[1])[None, :] < counts[:, None]


def symmetrize_rows(mask: np.ndarray) -> np.ndarray:
    """Push the cells of every row left to the ``x = 0`` edge."""
    counts = mask.sum(axis=0)
    return np.arange(mask.shape[0])[:, None] < counts[None, :]


def steiner_symmetrize(cells: np.ndarray) -> np.ndarray:
    """Symmetrize a cell mask (indexed ``[i, j]``) toward the lower-left corner.

    Column counts are preserved by the vertical pass and row counts by the
    horizontal pass; the result is a staircase.
    """
    return symmetrize_rows(symmetrize_columns(np.asarray(cells, dtype=bool)))


def cell_perimeter(cfg: StripConfig, mask: np.ndarray) -> float:
    """Weighted perimeter of a union of grid cells.

    Each boundary edge is weighted by the model density at its midpoint; the
    density is constant along axis-parallel edges.
    """
    mask = np.asarray(mask, dtype=bool)
    lat = lattice(cfg, mask.shape)
    padded = np.pad(mask, 1)
    # vertical edges at x_i: compare column i-1 with column i
    v_edges = padded[1:, 1:-1] != padded[:-1, 1:-1]
    h_edges = padded[1:-1, 1:] != padded[1:-1, :-1]
    return float(v_edges.sum(axis=1) @ lat.vertical + h_edges.sum(axis=0) @ lat.horizontal)


def enumerate_lattice_paths(nx: int, ny: int):
    """All ``C(nx+ny, nx)`` step sequences from ``(0, V_N)`` to ``(V_M, 0)``."""
    for rights in itertools.combinations(range(nx + ny), nx):
        steps = ["D"] * (nx + ny)
        for r in rights:
            steps[r] = "R"
        yield steps
