import pytest

from hardcore_ratios.errors import DegenerateMap
from hardcore_ratios.exact_arith import GaussianRational
from hardcore_ratios.regions import RegionManager
from hardcore_ratios.report import ORBIT_TAIL, parameter_report


@pytest.fixture
def regions():
    return RegionManager({})


def test_report_at_lambda0(regions):
    report = parameter_report(GaussianRational(-1, 1), 3, regions)
    assert report.kind == "loxodromic"
    assert report.tr_squared == "1/2+1/2i"
    assert report.fixed_points == ["i", "-1-i"]
    assert report.attracting is None
    assert len(report.orbit_tail) == ORBIT_TAIL

    data = report.to_json()
    assert data["lambda"] == "-1+i"
    assert {v["region"]: v["status"] for v in data["verdicts"]} == {
        "cardioid": "outside",
        "shearer": "outside",
        "exceptional": "outside",
    }
    assert data["facts"]["fixed points"] == "i, -1-i"


def test_report_inside_cardioid(regions):
    report = parameter_report(1, 3, regions, depth=80)
    a = report.attracting
    assert a is not None
    assert abs(a * (1 + a) ** 2 - 1) < 1e-12
    assert report.orbit_tail[-1].startswith(f"{a.real:+.6g}")
    assert report.to_json()["facts"]["attracting point of f_(lambda,2)"].startswith(f"{a.real:+.6g}")


def test_report_rejects_zero(regions):
    with pytest.raises(DegenerateMap):
        parameter_report(0, 3, regions)
