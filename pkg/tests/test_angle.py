import math

import numpy as np
import pytest

from flatspin.angle import AngleFunction, FourierSeries
from flatspin.errors import SchemaError

TWO_PI = 2.0 * math.pi


def test_constant_series():
    f = FourierSeries(TWO_PI, 1.5)
    assert f(0.3) == 1.5
    assert f.derivative(0.3) == 0.0
    assert f.lipschitz_bound() == 0.0


def test_evaluation_and_derivative():
    f = FourierSeries(TWO_PI, 1.0, ((0.5, -0.25), (0.0, 0.125)))
    x = np.linspace(-5, 5, 11)
    want = 1.0 + 0.5 * np.cos(x) - 0.25 * np.sin(x) + 0.125 * np.sin(2 * x)
    assert np.allclose(f(x), want, atol=1e-14)
    dwant = -0.5 * np.sin(x) - 0.25 * np.cos(x) + 0.25 * np.cos(2 * x)
    assert np.allclose(f.derivative(x), dwant, atol=1e-14)


def test_derivative_matches_finite_difference():
    f = FourierSeries(3.0, 0.2, ((0.3, 0.1), (-0.05, 0.2)))
    x = np.linspace(0, 3, 7)
    eps = 1e-6
    fd = (f(x + eps) - f(x - eps)) / (2 * eps)
    assert np.allclose(f.derivative(x), fd, atol=1e-7)


def test_periodicity():
    f = FourierSeries(1.7, 0.0, ((1.0, 2.0),))
    x = np.linspace(0, 1.7, 5)
    assert np.allclose(f(x), f(x + 1.7), atol=1e-12)


def test_range_bounds_certified():
    f = FourierSeries(TWO_PI, 3.0, ((0.0, 0.3),))
    lo, hi = f.range_bounds(512)
    assert lo <= 2.7 and hi >= 3.3
    assert lo > 2.7 - 1e-2 and hi < 3.3 + 1e-2


def test_theta_split():
    psi = AngleFunction(
        FourierSeries(TWO_PI, 4.0, ((0.0, 0.3),)),
        FourierSeries(TWO_PI, 1.0, ((0.2, 0.0),)),
    )
    s, t = 0.7, -0.3
    p1, p2 = psi.psi1(s), psi.psi2(t)
    assert math.isclose(psi.theta1(s, t), (p1 + p2) / 2)
    assert math.isclose(psi.theta2(s, t), (p1 - p2) / 2)


def test_json_roundtrip():
    psi = AngleFunction(
        FourierSeries(TWO_PI, 4.0, ((0.0, 0.3),)),
        FourierSeries(3.0, 1.0),
    )
    d = psi.to_dict()
    back = AngleFunction.from_dict(d)
    assert back == psi


def test_schema_errors_have_paths():
    with pytest.raises(SchemaError) as e:
        AngleFunction.from_dict({"psi1": {"period": 1.0, "mean": 0.0}})
    assert e.value.path == "$.psi2"
    with pytest.raises(SchemaError) as e:
        AngleFunction.from_dict(
            {"psi1": {"mean": 0.0}, "psi2": {"period": 1.0, "mean": 0.0}}
        )
    assert e.value.path == "$.psi1.period"
    with pytest.raises(SchemaError) as e:
        AngleFunction.from_dict(
            {
                "psi1": {"period": 1.0, "mean": 0.0, "harmonics": [[1.0]]},
                "psi2": {"period": 1.0, "mean": 0.0},
            }
        )
    assert "harmonics[0]" in e.value.path
