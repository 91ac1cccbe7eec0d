import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import hyperplane
from rnflow import convex_atoms as ca
from rnflow.schedules import Constant, PowerLaw, Zero, default_grid, from_json, h1_model_check


def test_value_and_deriv_examples():
    s = PowerLaw(1.0, 1.0)
    assert s.value(0.0) == 1.0
    assert s.deriv(0.0) == -1.0
    assert PowerLaw(2.0, 0.75).value(3.0) == pytest.approx(0.70710678118654757)
    assert Zero().value(5.0) == 0.0 and Zero().deriv(5.0) == 0.0
    assert Constant(0.3).value(7.0) == 0.3


def test_negative_time_rejected():
    for s in (PowerLaw(1, 1), Constant(1.0), Zero()):
        with pytest.raises(ValueError):
            s.value(-1.0)
        with pytest.raises(ValueError):
            s.deriv(-0.5)


def test_integral_examples():
    assert PowerLaw(1, 1).integral(math.e - 1) == pytest.approx(1.0)
    assert PowerLaw(1, 2).integral(math.inf) == pytest.approx(1.0)
    assert PowerLaw(1, 0.75).integral(math.inf) == math.inf
    assert Zero().integral(100.0) == 0.0
    assert Constant(2.0).integral(3.0) == 6.0


def test_classify_examples():
    assert tuple(PowerLaw(1, 0.75).classify()) == (True, True)
    assert tuple(PowerLaw(1, 2).classify()) == (False, True)
    assert tuple(PowerLaw(1, 0.5).classify()) == (True, False)
    assert tuple(Constant(1.0).classify()) == (True, False)


def test_h2_examples():
    assert PowerLaw(1, 1).h2_constant() == 1.0
    assert PowerLaw(2, 0.75).h2_constant() == 0.375
    assert PowerLaw(1, 2).h2_constant() is None
    assert PowerLaw(3, 0.5).lipschitz == 1.5


def test_constructor_errors():
    with pytest.raises(ValueError, match="'c'"):
        PowerLaw(0.0, 1.0)
    with pytest.raises(ValueError, match="'p'"):
        PowerLaw(1.0, -1.0)
    with pytest.raises(ValueError):
        Constant(-1.0)


@pytest.mark.parametrize("c,p", [(1, 0.5), (1, 0.75), (1, 1), (2, 0.75), (0.5, 0.3), (3, 0.0)])
def test_h2_constant_holds_on_grid(c, p):
    s = PowerLaw(c, p)
    k = s.h2_constant()
    t = np.linspace(0, 1e6, 10_000)
    assert np.max(-k * s.value(t) ** 2 - s.deriv(t)) <= 1e-12
    # and it is the smallest such constant: tight at t = 0
    assert -0.999 * k * s.value(0.0) ** 2 - s.deriv(0.0) > 0 or k == 0


@pytest.mark.parametrize("p", [0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0])
def test_classify_agrees_with_integral_growth(p):
    s = PowerLaw(1.0, p)
    vals = [s.integral(T) for T in (1e2, 1e4, 1e6)]
    growing = vals[2] - vals[1] > 0.5 * (vals[1] - vals[0]) and vals[2] > 2 * vals[0]
    assert growing == s.classify().slow


@given(st.floats(0.1, 5), st.floats(0, 3), st.floats(0, 1e4), st.floats(0, 1e4))
def test_value_nonincreasing(c, p, t1, t2):
    s = PowerLaw(c, p)
    lo, hi = sorted((t1, t2))
    assert s.value(lo) >= s.value(hi)
    assert s.deriv(lo) <= 0


@given(st.floats(0.1, 5), st.floats(0, 3), st.floats(0, 100))
def test_integral_matches_quadrature(c, p, T):
    s = PowerLaw(c, p)
    t = np.linspace(0, T, 20001)
    assert s.integral(T) == pytest.approx(np.trapezoid(s.value(t), t), rel=1e-5, abs=1e-9)


def test_json_round_trip():
    for s in (PowerLaw(1.5, 0.75), Constant(0.2), Zero()):
        assert from_json(s.to_json()) == s


@pytest.mark.parametrize("obj,msg", [
    ({"family": "expo", "c": 1}, "unknown schedule family"),
    ({"family": "power", "c": 1}, "missing field"),
    ({"family": "power", "c": 1, "p": 1, "q": 2}, "unknown field"),
    ({"family": "power", "c": "a", "p": 1}, "schedule.c"),
    ({"family": "power", "c": -1, "p": 1}, "'c'"),
    ([1, 2], "family"),
])
def test_json_errors(obj, msg):
    with pytest.raises(ValueError, match=msg):
        from_json(obj)


def test_h1_examples():
    f = hyperplane()
    rep = h1_model_check(f, PowerLaw(1, 0.75), f.project_argmin, default_grid([1.0, 1.0]))
    assert rep.holds and rep.r >= 1.0
    assert rep.r == pytest.approx(2.0)

    g = ca.HalfSqDistToBox([1.0], [2.0])
    rep = h1_model_check(g, PowerLaw(1, 0.75), g.project_argmin, default_grid([1.5]))
    assert rep.holds and rep.r == pytest.approx(1.0)

    q = ca.Quadratic([[1.0]])
    rep = h1_model_check(q, PowerLaw(1, 0.4), q.project_argmin, default_grid([0.0]))
    assert not rep.holds and "square integrable" in rep.message


def test_h1_indicator_gives_infinite_r():
    box = ca.IndicatorBox([1.0], [2.0])
    rep = h1_model_check(box, PowerLaw(1, 0.75), box.project_argmin, default_grid([1.5]))
    assert rep.r == math.inf and rep.holds


def test_h1_no_growth_is_reported():
    f = ca.shift_to_zero_min(ca.AbsValue())
    rep = h1_model_check(f, PowerLaw(1, 0.75), f.project_argmin, default_grid([0.0], radius=1e3))
    assert rep.r < 1e-2  # |x| has only linear growth; r shrinks with the grid radius


def test_h1_grid_inside_argmin():
    box = ca.IndicatorBox([-5.0], [5.0])
    rep = h1_model_check(box, PowerLaw(1, 0.75), box.project_argmin, default_grid([0.0], radius=1.0))
    assert rep.r is None and not rep.holds
