"""One-dimensional isoperimetric profiles.

A :class:`Profile` is a sampled concave function ``v -> I(v)`` on
``[0, total_volume]`` that vanishes at both ends.  Evaluation between samples
is piecewise linear, which under-estimates a concave profile, so anything
built from the interpolant on the lower-bound side stays a lower bound.

Round unit spheres are built from geodesic caps: a cap of radius ``r`` in
``S^m`` has volume ``omega_{m-1} * int_0^r sin^{m-1} t dt`` and boundary area
``omega_{m-1} * sin^{m-1} r``.  Sphere profiles also carry an exact evaluator
that inverts the cap-volume map by safeguarded Newton iteration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

ArrayLike = Union[float, Sequence[float], np.ndarray]

SPHERE_TAG = "unit_sphere"
_CONCAVITY_RTOL = 1e-12
_SIMPSON_RTOL = 1e-12
_MIN_CAP_FRACTION = 1e-9


def sphere_area(dim: int) -> float:
    """Volume of the unit round ``dim``-sphere embedded in R^{dim+1}."""
    k = dim + 1
    return 2.0 * math.pi ** (k / 2.0) / math.gamma(k / 2.0)


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     rtol: float = _SIMPSON_RTOL, max_depth: int = 60) -> float:
    """Adaptive composite Simpson rule with a relative stopping tolerance.

    The error budget is ``rtol`` times the coarse estimate over ``[a, b]``,
    shared among subintervals in proportion to their width.
    """
    if b == a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    budget = 15.0 * rtol * abs(whole) / (b - a)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        if depth >= max_depth or abs(delta) <= budget * (hi - lo):
            total += left + right + delta / 15.0
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, depth + 1))
    return total


class SphereCaps:
    """Geodesic caps of the unit round ``m``-sphere.

    ``volume`` uses a fixed high-order Gauss-Legendre rule on ``[0, r]``,
    vectorised over ``r``; it is independent of the adaptive Simpson rule
    used to build sample tables.
    """

    _GL_NODES = 48

    def __init__(self, m: int):
        if m < 2:
            raise ValueError(f"sphere dimension must be >= 2, got {m}")
        self.m = m
        self.omega = sphere_area(m - 1)
        self.total = sphere_area(m)
        self._nodes, self._weights = np.polynomial.legendre.leggauss(self._GL_NODES)
        # lookup table for Newton starting points; cap radius ~ v^(1/m) near 0,
        # so the table is indexed by v^(1/m)
        self._table_r = np.linspace(0.0, 0.5 * math.pi, 2049)
        self._table_s = self._half_volume(self._table_r) ** (1.0 / m)

    def area(self, r: ArrayLike) -> np.ndarray:
        return self.omega * np.sin(np.asarray(r, dtype=float)) ** (self.m - 1)

    def _half_volume(self, r: np.ndarray) -> np.ndarray:
        # r in [0, pi/2]
        t = 0.5 * r[..., None] * (self._nodes + 1.0)
        vals = np.sin(t) ** (self.m - 1) @ self._weights
        return self.omega * 0.5 * r * vals

    def volume(self, r: ArrayLike) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        upper = r > 0.5 * math.pi
        half = np.where(upper, math.pi - r, r)
        v = self._half_volume(half)
        return np.where(upper, self.total - v, v)

    def radius(self, v: ArrayLike, max_iter: int = 40) -> np.ndarray:
        """Cap radius enclosing volume ``v`` (inverse of :meth:`volume`)."""
        v = np.asarray(v, dtype=float)
        w = np.clip(np.minimum(v, self.total - v), 0.0, 0.5 * self.total)
        lo = np.zeros_like(w)
        hi = np.full_like(w, 0.5 * math.pi)
        r = np.interp(w ** (1.0 / self.m), self._table_s, self._table_r)
        for _ in range(max_iter):
            g = self._half_volume(r) - w
            lo = np.where(g <= 0.0, r, lo)
            hi = np.where(g >= 0.0, r, hi)
            a = self.area(r)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(a > 0.0, g / a, np.inf)
            r_new = r - step
            outside = ~((r_new >= lo) & (r_new <= hi))
            r_new = np.where(outside, 0.5 * (lo + hi), r_new)
            done = np.all((np.abs(r_new - r) <= 1e-15 * r) | (g == 0.0))
            r = r_new
            if done:
                break
        r = np.where(w <= 0.0, 0.0, r)
        return np.where(v > 0.5 * self.total, math.pi - r, r)

    def profile_value(self, v: ArrayLike) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        w = np.minimum(v, self.total - v)
        r = self.radius(w)
        out = self.area(r)
        return np.where(w <= 0.0, 0.0, out)


@dataclass(frozen=True, eq=False)
class Profile:
    """Sampled isoperimetric profile of a closed ``dim``-manifold.

    Parameters
    ----------
    dim : int
        Manifold dimension (>= 2).
    total_volume : float
        Volume of the manifold; the profile lives on ``[0, total_volume]``.
    volumes, areas : ndarray
        Sample table.  Volumes increase strictly from 0 to ``total_volume``.
    closed_form_tag : str, optional
        Label of an exact generator, if the profile came from one.
    """

    dim: int
    total_volume: float
    volumes: np.ndarray
    areas: np.ndarray
    closed_form_tag: Optional[str] = None
    exact: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        vols = np.asarray(self.volumes, dtype=float)
        areas = np.asarray(self.areas, dtype=float)
        if vols.ndim != 1 or vols.shape != areas.shape or vols.size < 3:
            raise ValueError("profile needs matching 1-D sample arrays of length >= 3")
        vols.setflags(write=False)
        areas.setflags(write=False)
        object.__setattr__(self, "volumes", vols)
        object.__setattr__(self, "areas", areas)
        object.__setattr__(self, "total_volume", float(self.total_volume))

    # evaluation -------------------------------------------------------
    def interpolate(self, v: ArrayLike) -> np.ndarray:
        """Piecewise-linear interpolant of the sample table."""
        return np.interp(v, self.volumes, self.areas, left=0.0, right=0.0)

    def __call__(self, v: ArrayLike):
        """Profile value; exact generator when present, interpolant otherwise."""
        scalar = np.ndim(v) == 0
        arr = np.asarray(v, dtype=float)
        out = self.exact(arr) if self.exact is not None else self.interpolate(arr)
        out = np.where((arr <= 0.0) | (arr >= self.total_volume), 0.0, out)
        return float(out) if scalar else out

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.volumes, self.areas])

    # validation -------------------------------------------------------
    def validate(self) -> None:
        """Raise ``ValueError`` unless the table is a concave profile."""
        if self.dim < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dim}")
        v, a = self.volumes, self.areas
        if v[0] != 0.0 or not math.isclose(v[-1], self.total_volume, rel_tol=1e-14):
            raise ValueError("sample volumes must run from 0 to total_volume")
        if np.any(np.diff(v) <= 0.0):
            raise ValueError("sample volumes must be strictly increasing")
        if a[0] != 0.0 or a[-1] != 0.0:
            raise ValueError("profile must vanish at volume 0 and total_volume")
        if np.any(a[1:-1] <= 0.0):
            raise ValueError("profile must be positive in the interior")
        if not is_concave(self):
            raise ValueError("profile samples are not concave")

    def to_json(self) -> dict:
        d = {"dim": self.dim, "total_volume": self.total_volume,
             "samples": self.samples.tolist()}
        if self.closed_form_tag is not None:
            d["closed_form_tag"] = self.closed_form_tag
        return d

    def dump(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_json()))


def chord_slopes(p: Profile) -> np.ndarray:
    return np.diff(p.areas) / np.diff(p.volumes)


def is_concave(p: Profile, rtol: float = _CONCAVITY_RTOL) -> bool:
    s = chord_slopes(p)
    scale = np.maximum(np.abs(s[:-1]), np.abs(s[1:]))
    return bool(np.all(s[1:] - s[:-1] <= rtol * scale))


def from_samples(dim: int, total_volume: float, samples, tag: Optional[str] = None) -> Profile:
    """Build and validate a user-supplied profile table.

    Non-concave tables are rejected, not repaired.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be a list of [volume, area] pairs")
    p = Profile(int(dim), float(total_volume), arr[:, 0], arr[:, 1], closed_form_tag=tag)
    p.validate()
    if tag == SPHERE_TAG:
        caps = SphereCaps(p.dim)
        if math.isclose(caps.total, p.total_volume, rel_tol=1e-12):
            object.__setattr__(p, "exact", caps.profile_value)
    return p


def from_json(data: Union[dict, str, Path]) -> Profile:
    if isinstance(data, (str, Path)):
        data = json.loads(Path(data).read_text())
    return from_samples(data["dim"], data["total_volume"], data["samples"],
                        tag=data.get("closed_form_tag"))


def sphere_profile(m: int, sample_count: int = 2049) -> Profile:
    """Isoperimetric profile of the unit round ``m``-sphere.

    Radii are equally spaced on ``[0, pi]``.  Cap volumes are accumulated
    interval by interval with adaptive Simpson on the lower half and mirrored
    (``V - v``) on the upper half, so the table is symmetric by construction.
    """
    if m < 2:
        raise ValueError(f"sphere dimension must be >= 2, got {m}")
    if sample_count < 3:
        raise ValueError(f"need at least 3 samples, got {sample_count}")
    caps = SphereCaps(m)
    k = sample_count - 1
    radii = np.linspace(0.0, math.pi, sample_count)
    half = k // 2  # indices 0..half lie in [0, pi/2]
    integrand = lambda t: math.sin(t) ** (m - 1)  # noqa: E731
    vols = np.zeros(sample_count)
    acc = 0.0
    for i in range(1, half + 1):
        acc += adaptive_simpson(integrand, radii[i - 1], radii[i])
        vols[i] = caps.omega * acc
    total = caps.total
    if k % 2 == 0:
        vols[half] = 0.5 * total
    else:
        # one interval straddles pi/2; its lower end is already in the table
        pass
    for i in range(half + 1, sample_count):
        vols[i] = total - vols[k - i]
    vols[-1] = total
    areas = caps.area(radii)
    areas[half + 1:] = areas[k - np.arange(half + 1, sample_count)]
    areas[0] = areas[-1] = 0.0
    # mirrored volumes carry an absolute error ~eps*V; drop caps so small that
    # this error would swamp their spacing (only matters for large m)
    tiny = np.zeros(sample_count, dtype=bool)
    tiny[1:-1] = np.minimum(vols, total - vols)[1:-1] < _MIN_CAP_FRACTION * total
    tiny |= tiny[::-1]
    vols, areas = vols[~tiny], areas[~tiny]
    p = Profile(m, total, vols, areas, closed_form_tag=SPHERE_TAG, exact=caps.profile_value)
    p.validate()
    return p


def scale_profile(p: Profile, lam: float) -> Profile:
    """Profile of ``(M, lam^2 g)`` from that of ``(M, g)``.

    ``I_new(v) = lam^(m-1) * I(v / lam^m)``, applied to the sample table and
    to the exact generator if there is one.
    """
    if not lam > 0.0:
        raise ValueError(f"scale factor must be positive, got {lam}")
    m = p.dim
    vs, as_ = lam ** m, lam ** (m - 1)
    exact = None
    if p.exact is not None:
        inner = p.exact
        exact = lambda v: as_ * inner(np.asarray(v) / vs)  # noqa: E731
    tag = p.closed_form_tag if lam == 1.0 or p.closed_form_tag is None \
        else f"{p.closed_form_tag}*{lam!r}"
    return Profile(m, vs * p.total_volume, vs * p.volumes, as_ * p.areas,
                   closed_form_tag=tag, exact=exact)


def symmetry_defect(p: Profile) -> float:
    """``max |I(v) - I(V - v)|`` over the sample volumes.

    Tables whose volumes are mirrored about ``V/2`` (up to rounding) are
    compared pair by pair; other tables through the interpolant.
    """
    v, a = p.volumes, p.areas
    if np.all(np.abs(v + v[::-1] - p.total_volume) <= 8.0 * np.finfo(float).eps * p.total_volume):
        return float(np.max(np.abs(a - a[::-1])))
    mirrored = p.interpolate(p.total_volume - v)
    return float(np.max(np.abs(a - mirrored)))


def check_symmetry(p: Profile, tol: float) -> bool:
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return symmetry_defect(p) <= tol


def _check_open(name: str, x: float, hi: float) -> None:
    if not 0.0 < x < hi:
        raise ValueError(f"{name}={x!r} outside (0, {hi!r})")


def kappa0(p: Profile, v0: float, refine: int = 64) -> float:
    """Sampled ``inf I(v) / v^((m-1)/m)`` over ``(0, v0]``.

    The infimum runs over the sample volumes below ``v0``, ``v0`` itself, and
    ``refine`` points filling the last sample interval below ``v0``.
    """
    _check_open("v0", v0, p.total_volume)
    below = p.volumes[(p.volumes > 0.0) & (p.volumes < v0)]
    start = below[-1] if below.size else 0.0
    fill = np.linspace(start, v0, refine + 2)[1:]
    v = np.concatenate([below, fill])
    ratio = np.asarray(p(v)) / v ** ((p.dim - 1) / p.dim)
    return float(np.min(ratio))


def cheeger_a0(p: Profile, w0: float) -> float:
    """``I(w0)/w0``, the infimum of ``I(v)/v`` on ``(0, w0]`` for concave ``I``."""
    _check_open("w0", w0, p.total_volume)
    return float(p(w0)) / w0


def chord_slope(p: Profile, y: float) -> float:
    """Slope ``I(y)/y`` of the chord from the origin; ``I(t) >= slope*t`` on ``[0, y]``."""
    _check_open("y", y, p.total_volume)
    return float(p(y)) / y
