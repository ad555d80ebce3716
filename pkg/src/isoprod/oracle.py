"""Brute-force verifiers for the strip solvers and the cap quadrature."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import mpmath
import numpy as np

from .model_strip import (
    Grid,
    StripConfig,
    cell_perimeter,
    enumerate_lattice_paths,
    lattice,
    minimize_perimeter,
    steiner_symmetrize,
    target_cells,
)
from .profiles import SphereCaps, adaptive_simpson, sphere_area

MAX_ENUM_SIDE = 7
DENSITIES = (0.2, 0.5, 0.8)


@dataclass
class OracleReport:
    case_count: int
    max_abs_deviation: float
    worst_case_input: Optional[Any] = None
    violations: int = 0
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def brute_force_min(cfg: StripConfig, v: float, grid: Grid) -> float:
    """Minimum perimeter over every unit-step lattice path at the nearest area.

    Walks all ``C(Nx+Ny, Nx)`` paths; edge costs are summed from the start
    vertex in path order.
    """
    nx, ny = (int(g) for g in grid)
    if nx > MAX_ENUM_SIDE or ny > MAX_ENUM_SIDE:
        raise ValueError(f"grid {grid} above the enumeration cap {MAX_ENUM_SIDE}x{MAX_ENUM_SIDE}")
    lat = lattice(cfg, grid)
    target = target_cells(lat, v)
    best = math.inf
    for steps in enumerate_lattice_paths(nx, ny):
        total, cells, i, j = 0.0, 0, 0, ny
        for s in steps:
            if s == "R":
                total += lat.horizontal[j]
                cells += j
                i += 1
            else:
                total += lat.vertical[i]
                j -= 1
        if cells == target and total < best:
            best = total
    return best


def solver_agreement(cfg: StripConfig, cases: int, seed: int, max_side: int = 6,
                     method: str = "exact") -> OracleReport:
    """Compare :func:`minimize_perimeter` with :func:`brute_force_min` on random small grids.

    Each case draws a grid up to ``max_side`` per axis and a target that is an
    exact interior multiple of the cell area, so no rounding decides the
    admissible area.  Deviations are absolute differences of the two values.
    """
    if cases < 1:
        raise ValueError("cases must be >= 1")
    if max_side > MAX_ENUM_SIDE:
        raise ValueError(f"max_side above the enumeration cap {MAX_ENUM_SIDE}")
    rng = np.random.default_rng(seed)
    worst, worst_input, mismatches = 0.0, None, 0
    for _ in range(cases):
        nx, ny = (int(s) for s in rng.integers(2, max_side + 1, size=2))
        cells = int(rng.integers(1, nx * ny))
        lat = lattice(cfg, (nx, ny))
        v = cells * lat.cell_area
        dev = abs(minimize_perimeter(cfg, v, (nx, ny), method=method).value
                  - brute_force_min(cfg, v, (nx, ny)))
        if dev != 0.0:
            mismatches += 1
        if worst_input is None or dev > worst:
            worst = dev
            worst_input = {"grid": [nx, ny], "v": v, "lam": cfg.lam}
    return OracleReport(case_count=cases, max_abs_deviation=worst,
                        worst_case_input=worst_input, violations=mismatches)


def random_mask(rng: np.random.Generator, shape) -> np.ndarray:
    density = DENSITIES[rng.integers(len(DENSITIES))]
    return rng.random(shape) < density


def fuzz_symmetrization(cfg: StripConfig, trials: int, seed: int,
                        max_side: int = 12, rtol: float = 1e-12) -> OracleReport:
    """Random cell sets: symmetrization must keep area and not raise perimeter.

    ``max_abs_deviation`` collects perimeter increases beyond ``rtol`` and
    any area change; ``extra["worst_margin"]`` is the largest
    ``after - before`` seen (nonpositive when everything holds).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    worst_dev, worst_margin, worst_input = 0.0, -math.inf, None
    violations = 0
    strict = 0
    for _ in range(trials):
        shape = tuple(int(s) for s in rng.integers(1, max_side + 1, size=2))
        mask = random_mask(rng, shape)
        sym = steiner_symmetrize(mask)
        before = cell_perimeter(cfg, mask)
        after = cell_perimeter(cfg, sym)
        area_dev = abs(int(mask.sum()) - int(sym.sum()))
        margin = after - before
        increase = max(margin - rtol * max(before, 1.0), 0.0)
        dev = max(increase, float(area_dev))
        if dev > 0.0:
            violations += 1
        if margin < -rtol * max(before, 1.0):
            strict += 1
        if margin > worst_margin:
            worst_margin = margin
        if dev > worst_dev or worst_input is None:
            worst_dev = max(worst_dev, dev)
            worst_input = {"shape": list(shape), "cells": np.argwhere(mask).tolist()}
    return OracleReport(case_count=trials, max_abs_deviation=worst_dev,
                        worst_case_input=worst_input, violations=violations,
                        extra={"worst_margin": worst_margin, "strict_decreases": strict})


def cap_integral_closed_form(m: int, r, dps: int = 40):
    """``int_0^r sin^(m-1) t dt`` via the reduction formula, in extended precision.

    ``J_k = -sin^(k-1) r cos r / k + (k-1)/k J_(k-2)``, ``J_0 = r``,
    ``J_1 = 1 - cos r``.  The recursion cancels badly at small ``r``, hence
    mpmath.
    """
    k = m - 1
    out = []
    with mpmath.workdps(dps):
        for x in np.atleast_1d(np.asarray(r, dtype=float)):
            x = mpmath.mpf(float(x))
            s, c = mpmath.sin(x), mpmath.cos(x)
            j = x if k % 2 == 0 else 1 - c
            for p in range(2 if k % 2 == 0 else 3, k + 1, 2):
                j = -s ** (p - 1) * c / p + mpmath.mpf(p - 1) / p * j
            out.append(float(j))
    return np.asarray(out) if np.ndim(r) else out[0]


def gauss_legendre_cap(m: int, r: float, panels: int, order: int = 20) -> float:
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, r, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        t = 0.5 * (b - a) * (x + 1.0) + a
        total += 0.5 * (b - a) * float(np.sin(t) ** (m - 1) @ w)
    return total


def quadrature_crosscheck(m: int, samples: int) -> OracleReport:
    """Adaptive Simpson cap volumes against two independent references.

    References: the reduction-formula antiderivative and composite
    Gauss-Legendre with twice as many panels as sample intervals.  The
    reported deviation is relative to the cap volume.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    omega = sphere_area(m - 1)
    radii = np.linspace(0.0, math.pi, samples)
    f = lambda t: math.sin(t) ** (m - 1)  # noqa: E731
    simpson = np.array([adaptive_simpson(f, 0.0, r) for r in radii])
    exact = cap_integral_closed_form(m, radii)
    gl = np.array([gauss_legendre_cap(m, r, 2 * max(samples - 1, 1)) for r in radii])
    scale = np.maximum(np.abs(exact), 1e-300)
    dev_exact = np.abs(simpson - exact) / scale
    dev_gl = np.abs(simpson - gl) / scale
    dev_exact[radii == 0.0] = np.abs(simpson[radii == 0.0])
    dev_gl[radii == 0.0] = np.abs(simpson[radii == 0.0])
    k = int(np.argmax(np.maximum(dev_exact, dev_gl)))
    caps = SphereCaps(m)
    dev_caps = float(np.max(np.abs(caps.volume(radii) - omega * exact)
                            / np.maximum(omega * exact, 1e-300)))
    return OracleReport(case_count=samples,
                        max_abs_deviation=float(max(dev_exact.max(), dev_gl.max())),
                        worst_case_input={"m": m, "r": float(radii[k])},
                        extra={"vs_closed_form": float(dev_exact.max()),
                               "vs_gauss_legendre": float(dev_gl.max()),
                               "caps_vs_closed_form": dev_caps})
