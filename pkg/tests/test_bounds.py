import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoprod import bounds as bd
from isoprod.model_strip import StripConfig

from conftest import FOUR_PI, s2_config, sphere

V_HALF = 2 * math.pi * FOUR_PI


def test_f_upper_example():
    assert bd.f_upper(s2_config(10.0), V_HALF) == pytest.approx(0.08 * math.pi ** 2, rel=1e-14)


def test_f_upper_peak_and_unscaled():
    cfg = s2_config(1.0)
    assert bd.f_upper(cfg, 0.5 * cfg.total_area) == pytest.approx(FOUR_PI * 2 * math.pi, rel=1e-14)
    v = 0.3 * cfg.total_area
    assert bd.f_upper(cfg, v) == pytest.approx(FOUR_PI * float(cfg.phi(v / FOUR_PI)), rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(0.1, 50.0), lam2=st.floats(0.1, 50.0), u=st.floats(0.01, 0.99))
def test_f_upper_scaling(lam, lam2, u):
    cfg = StripConfig(2, 3, sphere(2), sphere(3), lam)
    v = u * cfg.total_area
    assert bd.f_upper(cfg, v) == pytest.approx(
        (lam2 / lam) ** 3 * bd.f_upper(cfg.with_lam(lam2), v), rel=1e-12)


def test_f_upper_rejects_range():
    cfg = s2_config()
    for v in (0.0, cfg.total_area):
        with pytest.raises(ValueError):
            bd.f_upper(cfg, v)


def test_lambda0_example():
    cases = bd.case_thresholds(s2_config(), V_HALF, 0.8)
    assert cases["case1"] ** 4 == pytest.approx(50.0, rel=1e-12)
    # 2 pi / (2 pi * 2 * 0.04)
    assert cases["case2b"] ** 4 == pytest.approx(12.5, rel=1e-12)
    assert bd.lambda0_threshold(s2_config(), V_HALF, 0.8) == pytest.approx(50 ** 0.25, rel=1e-12)
    assert 50 ** 0.25 == pytest.approx(2.6591, abs=5e-5)


def test_lambda0_independent_of_lambda():
    assert bd.lambda0_threshold(s2_config(7.0), V_HALF, 0.8) == \
        bd.lambda0_threshold(s2_config(1.0), V_HALF, 0.8)


def test_lambda0_diverges_as_alpha_tends_to_one():
    vals = [bd.lambda0_threshold(s2_config(), V_HALF, a) for a in (0.9, 0.99, 0.999, 0.99999)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 100


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.7501, 0.9999), b=st.floats(0.7501, 0.9999), u=st.floats(0.02, 0.5))
def test_lambda0_nondecreasing_in_alpha(a, b, u):
    cfg = StripConfig(3, 2, sphere(3), sphere(2), 1.0)
    v = u * cfg.total_area
    lo, hi = sorted((a, b))
    assert bd.lambda0_threshold(cfg, v, lo) <= bd.lambda0_threshold(cfg, v, hi) * (1 + 1e-12)


def test_symmetry_reduction():
    cfg = StripConfig(2, 3, sphere(2), sphere(3), 1.0)
    v = 0.2 * cfg.total_area
    assert bd.lambda0_threshold(cfg, v, 0.85) == bd.lambda0_threshold(cfg, cfg.total_area - v, 0.85)


@pytest.mark.parametrize("alpha", [0.75, 1.0, 0.5])
def test_alpha_range(alpha):
    with pytest.raises(ValueError):
        bd.lambda0_threshold(s2_config(), V_HALF, alpha)


def test_floor_strictly_below_upper():
    for a in (0.76, 0.8, 0.99):
        assert a ** 4 < 1.0
        assert bd.optimal_case2a_factor(a) > a ** 4


def test_sandwich_holds_at_lambda_10():
    r = bd.sandwich_check(s2_config(10.0), V_HALF, 0.8, (400, 400))
    assert r.verdict is bd.Verdict.HOLDS
    assert r.lower_floor == 0.8 ** 4 * r.f_upper
    assert r.lambda0 == pytest.approx(2.6591, abs=1e-4)
    assert 0.8 ** 4 - 1e-12 <= r.ratio <= 1 + 1e-12
    assert r.certified_lower <= r.model_value


def test_sandwich_below_threshold():
    r = bd.sandwich_check(s2_config(1.0), V_HALF, 0.8, (100, 100), refine=False)
    assert r.verdict is bd.Verdict.LAMBDA_BELOW_THRESHOLD


def test_sandwich_alpha_076():
    r76 = bd.sandwich_check(s2_config(10.0), V_HALF, 0.76, (200, 200))
    r80 = bd.sandwich_check(s2_config(10.0), V_HALF, 0.8, (200, 200))
    assert r76.verdict is bd.Verdict.HOLDS
    # the threshold grows with alpha, so the smaller alpha gets the smaller one
    assert r76.lambda0 < r80.lambda0
    assert r76.lower_floor < r80.lower_floor


def test_sandwich_flags_inconsistent_bracket(monkeypatch):
    # a bracket far below the floor must not be reported as HOLDS
    real_min, real_low = bd.minimize_perimeter, bd.certified_lower_bound

    def deflated(cfg, v, grid, method="auto"):
        res = real_min(cfg, v, grid, method)
        res.value *= 0.1
        return res

    monkeypatch.setattr(bd, "minimize_perimeter", deflated)
    monkeypatch.setattr(bd, "certified_lower_bound",
                        lambda cfg, v, grid: 0.1 * real_low(cfg, v, grid))
    r = bd.sandwich_check(s2_config(10.0), V_HALF, 0.8, (50, 50), refine=False)
    assert r.verdict is bd.Verdict.VIOLATED_NUMERICALLY


def test_sandwich_csv_format():
    r = bd.sandwich_check(s2_config(10.0), V_HALF, 0.8, (40, 40), refine=False)
    text = bd.sandwich_csv([r], 2, 2)
    header, row = text.strip().split("\n")
    assert header.split(",") == list(bd.SANDWICH_COLUMNS)
    fields = row.split(",")
    assert fields[-1] == "HOLDS"
    assert fields[5] == "10.0" or fields[5] == "10"
    assert float(fields[2]) == pytest.approx(V_HALF, rel=1e-11)


def test_fmt():
    assert bd.fmt(math.pi) == "3.14159265359"
    assert bd.fmt(2) == "2"
    assert bd.fmt(1e-20) == "1e-20"


def test_model_row():
    row = bd.model_row(s2_config(5.0), V_HALF, (100, 100))
    assert set(row) == {"lambda", "v", "model_value", "certified_lower", "f_upper", "ratio"}
    assert row["ratio"] == pytest.approx(row["model_value"] / row["f_upper"])
