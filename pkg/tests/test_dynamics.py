import math

import numpy as np
import pytest

from conftest import CATALOG, abs_pair
from rnflow import convex_atoms as ca
from rnflow.dynamics import (DynamicSpec, NumericalAbort, Trajectory, integrate, residual_original, rhs_rn,
                             rhs_sdc)
from rnflow.moreau import EnvelopeContext, theta
from rnflow.schedules import Constant, PowerLaw, Zero

HALF_SQ = ca.Quadratic([[1.0]])


def linear_spec(schedule, T=2.0, h=1e-3, stride=10):
    return DynamicSpec("rn_tikhonov", HALF_SQ, 1.0, schedule, [2.0], [2.0], T, h, stride)


# ---------------------------------------------------------------- right-hand sides

def test_rhs_rn_examples():
    assert rhs_rn(HALF_SQ, 1.0, Constant(1.0), 0.0, [2.0])[0] == pytest.approx(-2.0)
    assert rhs_rn(CATALOG["abs"], 1.0, Zero(), 3.0, [0.0])[0] == 0.0
    assert rhs_rn(CATALOG["abs"], 1.0, PowerLaw(1, 1), 0.0, [2.0])[0] == pytest.approx(-2.0)


def test_rhs_sdc_examples():
    assert rhs_sdc(ca.IndicatorBox([1.0], [2.0]), 1.0, Constant(1.0), 0.0, [0.0])[0] == pytest.approx(1.0)
    assert rhs_sdc(HALF_SQ, 1.0, Zero(), 0.0, [2.0])[0] == pytest.approx(-1.0)
    assert rhs_sdc(HALF_SQ, 1.0, Constant(2.0), 0.0, [0.0])[0] == 0.0


@pytest.mark.parametrize("rhs", [rhs_rn, rhs_sdc])
def test_rhs_lipschitz_bound(atom, rhs, rng):
    s = PowerLaw(1.0, 0.75)
    for _ in range(50):
        mu = rng.uniform(0.2, 2.0)
        t = rng.uniform(0, 10)
        y1, y2 = 3 * rng.normal(size=(2, atom.dim))
        gap = np.linalg.norm(rhs(atom, mu, s, t, y2) - rhs(atom, mu, s, t, y1))
        eps = float(s.value(t))
        bound = (1 + mu * eps) if rhs is rhs_rn else (1 + eps)
        assert gap <= bound * np.linalg.norm(y2 - y1) + 1e-12


# ---------------------------------------------------------------- spec validation

def test_spec_rejects_bad_cauchy_data():
    with pytest.raises(ValueError, match="v0 not a subgradient at x0"):
        DynamicSpec("rn_tikhonov", HALF_SQ, 1.0, Zero(), [2.0], [1.0], 1.0)
    with pytest.raises(ValueError, match="minimum value 0"):
        DynamicSpec("rn_tikhonov", ca.ShiftValue(HALF_SQ, 1.0), 1.0, Zero(), [0.0], [0.0], 1.0)
    with pytest.raises(ValueError, match="integer multiple"):
        DynamicSpec("rn_tikhonov", HALF_SQ, 1.0, Zero(), [0.0], [0.0], 1.0005, h=1e-2)
    with pytest.raises(ValueError, match="'mu'"):
        DynamicSpec("rn_tikhonov", HALF_SQ, 0.0, Zero(), [0.0], [0.0], 1.0)
    with pytest.raises(ValueError, match="flow"):
        DynamicSpec("heavy_ball", HALF_SQ, 1.0, Zero(), [0.0], [0.0], 1.0)
    with pytest.raises(ValueError, match="'h'"):
        DynamicSpec("rn_tikhonov", HALF_SQ, 1.0, Zero(), [0.0], [0.0], 1.0, h=-1.0)


def test_spec_is_immutable():
    spec = linear_spec(Zero())
    with pytest.raises(ValueError):
        spec.x0[0] = 1.0
    np.testing.assert_array_equal(spec.y0, [4.0])
    assert spec.nsteps == 2000 and spec.lam == 1.0


# ---------------------------------------------------------------- integration

def test_integrate_closed_forms():
    traj = integrate(linear_spec(Zero()))
    assert traj.y[-1, 0] == pytest.approx(4 * math.exp(-1.0), abs=1e-6)
    traj = integrate(linear_spec(Constant(1.0)))
    assert traj.y[-1, 0] == pytest.approx(4 * math.exp(-2.0), abs=1e-6)
    assert traj.t[0] == 0.0 and traj.t[-1] == pytest.approx(2.0)
    assert np.all(np.diff(traj.t) > 0)


def test_integrate_zero_horizon():
    traj = integrate(linear_spec(Zero(), T=0.0))
    assert len(traj) == 1
    assert traj.t[0] == 0.0
    np.testing.assert_array_equal(traj.y[0], [4.0])
    np.testing.assert_allclose(traj.x[0], [2.0])
    np.testing.assert_allclose(traj.v[0], [2.0])


def test_final_step_recorded_off_stride():
    traj = integrate(linear_spec(Zero(), T=0.025, stride=10))
    np.testing.assert_allclose(traj.t, [0.0, 0.01, 0.02, 0.025])


@pytest.mark.parametrize("flow", ["rn_tikhonov", "sdc"])
def test_consistency_triple(atom, flow, rng):
    f = ca.shift_to_zero_min(atom)
    x0 = f.project_argmin(3 * rng.normal(size=f.dim)) + 0.5
    x0 = f.prox(1.0, x0)  # lands in dom f with a known subgradient
    y0 = x0 + 0.5
    x0 = f.prox(1.0, y0)
    v0 = y0 - x0
    spec = DynamicSpec(flow, f, 1.0, PowerLaw(1, 0.75), x0, v0, 3.0, 1e-2, 5)
    traj = integrate(spec)
    np.testing.assert_allclose(traj.y[0], y0)
    assert np.max(np.abs(traj.y - traj.x - traj.mu * traj.v)) <= 1e-12
    for x, v in zip(traj.x, traj.v):
        assert ca.subgradient_check(f, x, v, 1e-6)


def test_theta_nonincreasing_without_control(atom, rng):
    f = ca.shift_to_zero_min(atom)
    y0 = 3 * rng.normal(size=f.dim)
    x0 = f.prox(0.7, y0)
    spec = DynamicSpec("rn_tikhonov", f, 0.7, Zero(), x0, (y0 - x0) / 0.7, 5.0, 1e-2, 1)
    traj = integrate(spec)
    th = theta(EnvelopeContext(f, 0.7), traj.y)
    assert np.all(np.diff(th) <= 1e-12)


@pytest.mark.parametrize("flow", ["rn_tikhonov", "sdc"])
def test_compiled_matches_python_backend(atom, flow, rng):
    f = ca.shift_to_zero_min(atom)
    y0 = 2 * rng.normal(size=f.dim)
    x0 = f.prox(0.9, y0)
    spec = DynamicSpec(flow, f, 0.9, PowerLaw(2.0, 0.5), x0, (y0 - x0) / 0.9, 1.0, 1e-2, 7)
    a, b = integrate(spec), integrate(spec, backend="python")
    np.testing.assert_array_equal(a.t, b.t)
    np.testing.assert_allclose(a.y, b.y, atol=1e-12)
    np.testing.assert_allclose(a.ydot_norm, b.ydot_norm, atol=1e-12)


def test_unknown_backend():
    with pytest.raises(ValueError):
        integrate(linear_spec(Zero()), backend="gpu")


def test_integration_is_deterministic():
    f = abs_pair()
    spec = DynamicSpec("rn_tikhonov", f, 1.0, PowerLaw(1, 0.75), [5.0], [2.0], 20.0)
    a, b = integrate(spec), integrate(spec)
    assert a.to_array().tobytes() == b.to_array().tobytes()


def test_step_halving_order():
    ends = [integrate(linear_spec(Constant(1.0), T=2.0, h=h, stride=1)).y[-1, 0] for h in (0.2, 0.1, 0.05)]
    ratio = abs(ends[0] - ends[1]) / abs(ends[1] - ends[2])
    assert 16 * 0.7 <= ratio <= 16 * 1.3


def test_numerical_abort_is_raised(monkeypatch):
    from rnflow import _kernels
    monkeypatch.setattr(_kernels, "rk4_run", lambda *args: -17)
    with pytest.raises(NumericalAbort, match="t=0.017"):
        integrate(linear_spec(Zero()))


# ---------------------------------------------------------------- residual

def test_residual_smooth_run():
    traj = integrate(linear_spec(PowerLaw(1, 0.75), T=5.0))
    assert residual_original(traj, 1.0, PowerLaw(1, 0.75)) <= 1e-3


def test_residual_equilibrium_is_zero():
    spec = DynamicSpec("rn_tikhonov", HALF_SQ, 1.0, Zero(), [0.0], [0.0], 1.0)
    assert residual_original(integrate(spec), 1.0, Zero()) <= 1e-12


def test_residual_nonsmooth_run():
    s = PowerLaw(1, 0.75)
    spec = DynamicSpec("rn_tikhonov", CATALOG["abs"], 1.0, s, [2.0], [1.0], 10.0)
    assert residual_original(integrate(spec), 1.0, s) <= 5e-2


def test_residual_errors():
    with pytest.raises(ValueError, match="3 samples"):
        residual_original(integrate(linear_spec(Zero(), T=0.01)), 1.0, Zero())
    with pytest.raises(ValueError, match="uniformly"):
        residual_original(integrate(linear_spec(Zero(), T=0.025)), 1.0, Zero())


# ---------------------------------------------------------------- serialization

def test_csv_format_and_round_trip(tmp_path):
    traj = integrate(DynamicSpec("rn_tikhonov", ca.shift_to_zero_min(CATALOG["separable"]), 1.0, PowerLaw(1, 0.75),
                                 [0.0, -0.5], [0.0, 0.0], 0.1))
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,y_0,y_1,x_0,x_1,v_0,v_1,phi_x,norm_x,ydot_norm"
    assert len(lines) == len(traj) + 1
    back = Trajectory.from_csv(path, mu=1.0)
    np.testing.assert_array_equal(back.to_array(), traj.to_array())


def test_until_truncates():
    traj = integrate(linear_spec(Zero()))
    half = traj.until(1.0)
    assert half.t[-1] == pytest.approx(1.0) and len(half) == 101
