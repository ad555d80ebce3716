import json
import math

import numpy as np
import pytest

from isoprod import model_strip as ms
from isoprod import oracle as orc
from isoprod.profiles import SphereCaps, adaptive_simpson

from conftest import FOUR_PI, s2_config, sphere


def s2s3(lam=1.0):
    return ms.StripConfig(2, 3, sphere(2), sphere(3), lam)


# ---------------------------------------------------------------- brute force

@pytest.mark.parametrize("lam", [1.0, 2.0, 0.5])
def test_two_by_two_hand_count(lam):
    # Of the six paths on a 2x2 lattice exactly two enclose two cells:
    # R D D R (vertical cut through x = V_M/2) and D R R D (horizontal cut at
    # y = V_N/2).  Edges on the strip sides carry zero weight.
    cfg = s2_config(lam)
    vertical = lam ** -2 * 2 * math.pi * FOUR_PI
    horizontal = lam ** 2 * 2 * math.pi * FOUR_PI
    best = orc.brute_force_min(cfg, 0.5 * cfg.total_area, (2, 2))
    assert best == pytest.approx(min(vertical, horizontal), rel=1e-14)
    counted = [s for s in ms.enumerate_lattice_paths(2, 2)]
    assert len(counted) == 6


def test_empty_region_costs_nothing():
    cfg = s2s3(1.3)
    assert orc.brute_force_min(cfg, 1e-9, (4, 5)) == 0.0


def test_five_by_five_matches_exact_solver():
    cfg = s2s3(1.7)
    lat = ms.lattice(cfg, (5, 5))
    for cells in (1, 7, 12, 13, 20, 24):
        v = cells * lat.cell_area
        assert orc.brute_force_min(cfg, v, (5, 5)) == ms.minimize_perimeter(cfg, v, (5, 5)).value


def test_enumeration_cap():
    with pytest.raises(ValueError, match="cap"):
        orc.brute_force_min(s2_config(), 1.0, (8, 2))


def test_solver_agreement_report():
    rep = orc.solver_agreement(s2s3(0.8), 30, seed=11)
    assert rep.case_count == 30
    assert rep.violations == 0 and rep.max_abs_deviation == 0.0
    again = orc.solver_agreement(s2s3(0.8), 30, seed=11)
    assert again.to_json() == rep.to_json()


def test_solver_agreement_arguments():
    with pytest.raises(ValueError):
        orc.solver_agreement(s2s3(), 0, seed=1)
    with pytest.raises(ValueError):
        orc.solver_agreement(s2s3(), 3, seed=1, max_side=9)


# ---------------------------------------------------------------- fuzz

def test_fuzz_zero_violations_and_deterministic():
    cfg = s2s3(1.4)
    rep = orc.fuzz_symmetrization(cfg, 1000, seed=5)
    assert rep.case_count == 1000
    assert rep.violations == 0 and rep.max_abs_deviation == 0.0
    assert rep.extra["worst_margin"] <= 0.0
    assert rep.extra["strict_decreases"] > 0
    assert orc.fuzz_symmetrization(cfg, 1000, seed=5).to_json() == rep.to_json()
    assert orc.fuzz_symmetrization(cfg, 1000, seed=6).to_json() != rep.to_json()


def test_single_cell_unchanged():
    cfg = s2_config(2.0)
    mask = ms.cells_to_mask({(0, 0)}, (3, 3))
    sym = ms.steiner_symmetrize(mask)
    assert np.array_equal(sym, mask)
    assert ms.cell_perimeter(cfg, sym) - ms.cell_perimeter(cfg, mask) == 0.0


def test_adversarial_column_strictly_decreases():
    cfg = s2s3(1.0)
    mask = ms.cells_to_mask({(2, 0), (2, 4), (2, 5)}, (6, 6))
    assert ms.cell_perimeter(cfg, ms.steiner_symmetrize(mask)) < ms.cell_perimeter(cfg, mask)


def test_fuzz_rejects_zero_trials():
    with pytest.raises(ValueError):
        orc.fuzz_symmetrization(s2_config(), 0, seed=0)


def test_random_mask_densities():
    rng = np.random.default_rng(0)
    fills = {round(orc.random_mask(rng, (60, 60)).mean(), 1) for _ in range(40)}
    assert fills <= {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}
    assert len(fills) >= 3


# ---------------------------------------------------------------- quadrature

def test_m2_against_elementary_primitive():
    r = np.linspace(0, math.pi, 129)
    simpson = np.array([adaptive_simpson(math.sin, 0.0, x) for x in r])
    assert np.max(np.abs(simpson - (1 - np.cos(r)))) < 1e-10
    rep = orc.quadrature_crosscheck(2, 129)
    assert rep.max_abs_deviation < 1e-10


def test_m3_against_elementary_primitive():
    r = np.linspace(0, math.pi, 129)
    ref = 0.5 * (r - np.sin(r) * np.cos(r))
    assert np.allclose(orc.cap_integral_closed_form(3, r), ref, rtol=1e-14, atol=1e-16)
    assert orc.quadrature_crosscheck(3, 129).max_abs_deviation < 1e-10


def test_m4_closed_form():
    r = 1.1
    ref = 2.0 / 3.0 - math.cos(r) + math.cos(r) ** 3 / 3.0
    assert orc.cap_integral_closed_form(4, r) == pytest.approx(ref, rel=1e-14)


@pytest.mark.parametrize("m", [5, 8, 11])
def test_higher_dimensions(m):
    rep = orc.quadrature_crosscheck(m, 33)
    assert rep.max_abs_deviation < 1e-10
    assert rep.extra["caps_vs_closed_form"] < 1e-12


def test_zero_radius():
    assert adaptive_simpson(math.sin, 0.0, 0.0) == 0.0
    assert float(SphereCaps(4).volume(0.0)) == 0.0
    assert orc.cap_integral_closed_form(4, 0.0) == 0.0


def test_report_json():
    rep = orc.quadrature_crosscheck(2, 9)
    data = json.loads(rep.to_json())
    assert {"case_count", "max_abs_deviation", "worst_case_input"} <= set(data)
    assert data["max_abs_deviation"] >= 0.0
