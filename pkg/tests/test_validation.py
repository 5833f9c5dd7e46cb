import pytest

from app.exceptions import DomainError
from app.validation import ValidationMode, fitted_slope, synthetic_profile, validate


def test_synthetic_profile_shape():
    assert synthetic_profile(0) == 0
    assert abs(synthetic_profile(1.0, phase=0.0) - 0.2) < 1e-15
    assert abs(synthetic_profile(1e3)) < 1e-5


def test_fitted_slope():
    times = [1.0, 10.0, 100.0]
    assert abs(fitted_slope(times, [t ** -0.75 for t in times]) + 0.75) < 1e-12


def test_unknown_mode():
    with pytest.raises(DomainError):
        validate("bogus")


def test_residual_mode(small_config):
    report = validate(ValidationMode.RESIDUAL, small_config)
    assert report["mode"] == "residual"
    assert report["passed"], report["checks"]
    assert [row["h"] for row in report["table"]] == [1e-2, 5e-3, 2.5e-3]


def test_jump_mode(small_config):
    report = validate("jumps", small_config)
    assert report["passed"], report["checks"]
    assert {c["name"] for c in report["checks"]} == {"delta_jump", "T_jump"}


def test_decay_mode(small_config):
    report = validate("decay", small_config)
    assert report["passed"], report["checks"]
    names = [c["name"] for c in report["checks"]]
    assert names[:3] == ["oracle_tracking", "region_III_decay_slope", "region_III_envelope"]
    assert len(names) == 7
    assert [row["t"] for row in report["table"]] == [5.0, 10.0, 20.0, 40.0]
    # the oracle still carries the exponentially small soliton tail at x = 50
    assert report["table"][0]["error"] > 1e-8
