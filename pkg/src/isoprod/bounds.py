"""Two-sided bounds for the warped product profile at large ``lam``.

For ``alpha`` in ``(3/4, 1)`` and ``lam`` past a threshold, the profile of
``(M x N, lam^{2n} g + lam^{-2m} h)`` at ``v0`` lies between
``alpha^4 f`` and ``f``, where ``f = lam^-n V_N phi(v0 / V_N)`` is the area of
the product candidate ``K x N``.

The threshold returned by :func:`lambda0_threshold` is a sufficient one: it
is the value past which both excluded configurations of the lower-bound
argument become impossible, not the optimal ``lam_0``.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import asdict, dataclass
from typing import Dict, Iterable

from .model_strip import Grid, StripConfig, certified_lower_bound, minimize_perimeter
from .profiles import chord_slope


class Verdict(str, enum.Enum):
    HOLDS = "HOLDS"
    # the computed bracket disagrees with the bounds: a solver bug, not a counterexample
    VIOLATED_NUMERICALLY = "VIOLATED_NUMERICALLY"
    LAMBDA_BELOW_THRESHOLD = "LAMBDA_BELOW_THRESHOLD"


@dataclass(frozen=True)
class SandwichResult:
    v0: float
    alpha: float
    lam: float
    lambda0: float
    f_upper: float
    lower_floor: float
    model_value: float
    certified_lower: float
    slack: float
    verdict: Verdict

    @property
    def ratio(self) -> float:
        return self.model_value / self.f_upper

    def as_row(self) -> Dict[str, object]:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        return d


def _check_volume(cfg: StripConfig, v: float) -> None:
    if not 0.0 < v < cfg.total_area:
        raise ValueError(f"volume {v!r} outside (0, {cfg.total_area!r})")


def _check_alpha(alpha: float) -> None:
    if not 0.75 < alpha < 1.0:
        raise ValueError(f"alpha={alpha!r} outside (3/4, 1)")


def f_upper(cfg: StripConfig, v: float) -> float:
    """Boundary area ``lam^-n V_N phi(v / V_N)`` of the product candidate."""
    _check_volume(cfg, v)
    return cfg.lam ** (-cfg.n) * cfg.V_N * float(cfg.phi(v / cfg.V_N))


def reduce_volume(cfg: StripConfig, v0: float) -> float:
    """Replace ``v0`` by ``V_M V_N - v0`` above half volume (profiles are symmetric)."""
    _check_volume(cfg, v0)
    return min(v0, cfg.total_area - v0)


def case_thresholds(cfg: StripConfig, v0: float, alpha: float) -> Dict[str, float]:
    """Thresholds on ``lam`` from the two excluded configurations.

    Both take the form ``(phi(t0) / (t0 kappa (1-alpha)^2))^(1/(m+n))`` with
    ``t0 = v0/V_N``.  The first uses the chord slope of ``psi`` at
    ``alpha V_N``; the second the chord slope at ``(1-alpha) V_N``.
    """
    _check_alpha(alpha)
    v0 = reduce_volume(cfg, v0)
    t0 = v0 / cfg.V_N
    phi_t0 = float(cfg.phi(t0))
    out = {}
    for name, y in (("case1", alpha * cfg.V_N), ("case2b", (1.0 - alpha) * cfg.V_N)):
        kappa = chord_slope(cfg.psi, y)
        out[name] = (phi_t0 / (t0 * kappa * (1.0 - alpha) ** 2)) ** (1.0 / (cfg.m + cfg.n))
    return out


def lambda0_threshold(cfg: StripConfig, v0: float, alpha: float) -> float:
    """Sufficient ``lam_0``: beyond it ``alpha^4 f <= I <= f`` at ``v0``."""
    return max(case_thresholds(cfg, v0, alpha).values())


def sandwich_check(cfg: StripConfig, v0: float, alpha: float, grid: Grid,
                   refine: bool = True, method: str = "auto") -> SandwichResult:
    """Compare the numerical model bracket against ``[alpha^4 f, f]``.

    The slack is the gap between the model value and the certified lower
    bound, plus the change of the model value under one grid doubling when
    ``refine`` is set.
    """
    _check_alpha(alpha)
    v = reduce_volume(cfg, v0)
    lam0 = lambda0_threshold(cfg, v, alpha)
    f = f_upper(cfg, v)
    floor = alpha ** 4 * f
    best = minimize_perimeter(cfg, v, grid, method=method)
    lower = certified_lower_bound(cfg, v, grid)
    slack = max(best.value - lower, 0.0)
    if refine:
        fine = minimize_perimeter(cfg, v, (2 * grid[0], 2 * grid[1]), method=method)
        slack += abs(best.value - fine.value)
    if cfg.lam <= lam0:
        verdict = Verdict.LAMBDA_BELOW_THRESHOLD
    elif lower >= floor - slack and best.value <= f + slack:
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.VIOLATED_NUMERICALLY
    return SandwichResult(v0=v0, alpha=alpha, lam=cfg.lam, lambda0=lam0, f_upper=f,
                          lower_floor=floor, model_value=best.value,
                          certified_lower=lower, slack=slack, verdict=verdict)


SANDWICH_COLUMNS = ("m", "n", "v0", "alpha", "lambda0", "lambda", "f_upper", "floor",
                    "model_value", "certified_lower", "verdict")


def fmt(x) -> str:
    """Locale-free 12-significant-digit float formatting."""
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def sandwich_csv(rows: Iterable[SandwichResult], m: int, n: int,
                 header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(SANDWICH_COLUMNS)
    for r in rows:
        w.writerow([m, n, fmt(r.v0), fmt(r.alpha), fmt(r.lambda0), fmt(r.lam),
                    fmt(r.f_upper), fmt(r.lower_floor), fmt(r.model_value),
                    fmt(r.certified_lower), r.verdict.value])
    return buf.getvalue()


def model_row(cfg: StripConfig, v: float, grid: Grid,
              method: str = "auto") -> Dict[str, float]:
    """One ``(lambda, v, model_value, certified_lower, f_upper, ratio)`` record."""
    best = minimize_perimeter(cfg, v, grid, method=method)
    lower = certified_lower_bound(cfg, v, grid)
    f = f_upper(cfg, v)
    return {"lambda": cfg.lam, "v": v, "model_value": best.value,
            "certified_lower": lower, "f_upper": f, "ratio": best.value / f}


def optimal_case2a_factor(alpha: float) -> float:
    """Lower-bound factor ``alpha (2 alpha - 1)`` of the unconstrained case."""
    _check_alpha(alpha)
    return alpha * (2.0 * alpha - 1.0)


__all__ = [
    "Verdict", "SandwichResult", "f_upper", "reduce_volume", "case_thresholds",
    "lambda0_threshold", "sandwich_check", "sandwich_csv", "model_row", "fmt",
    "optimal_case2a_factor", "SANDWICH_COLUMNS",
]
