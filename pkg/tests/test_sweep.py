import math

import numpy as np
import pytest

from pipeclimb import sweep as sweep_mod
from pipeclimb.model import DEFAULT_PRELOADS, PipeSpec, RobotParams
from pipeclimb.sweep import SweepFailure, mu_vs_mu_lim, run_sweep

ROBOT = RobotParams()
BEND = PipeSpec(diameter=0.075, bend_radius=0.1125)


@pytest.fixture(scope="module")
def sweep36():
    return run_sweep(ROBOT, BEND, 0.7, 36)


def test_two_stations():
    res = run_sweep(ROBOT, BEND, 0.7, 2, window=(0.0, math.pi))
    assert res.stations == [0.0, math.pi]
    assert res.stiffness_curves.shape == (2, 4) and res.torque_curves.shape == (2, 4)


def test_zero_gravity_sweep():
    res = run_sweep(RobotParams(gravity=0.0), BEND, 0.7, 8)
    assert not res.torque_curves.any()
    assert not res.stiffness_curves.any()
    assert res.selected_stiffness.stiffness == (0.0, 0.0, 0.0, 0.0)


def test_window_max_rule(sweep36):
    k = sweep36.stiffness_curves
    inside = sweep36.in_window()
    assert inside.sum() == 16      # 0, 10, ..., 150 deg
    sel = np.array(sweep36.selected_stiffness.stiffness)
    assert np.all(sel >= k[inside])
    assert np.all(np.any(k[inside] == sel, axis=0))
    assert sweep36.selected_stiffness.preload_angles == DEFAULT_PRELOADS
    assert not sweep36.partial and sweep36.infeasible_stations == []


def test_stations_sorted_and_aligned(sweep36):
    s = sweep36.stations
    assert s == sorted(s) and len(s) == len(sweep36.stiffness_curves) == 36
    assert sweep36.feasible.all()


def test_station_order_independence(sweep36):
    order = np.random.default_rng(3).permutation(36)
    tau = np.empty((36, 4))
    k = np.empty((36, 4))
    for i in order:
        t, s, err = sweep_mod._station(ROBOT, BEND, 0.7, sweep36.stations[i], DEFAULT_PRELOADS)
        assert err is None
        tau[i], k[i] = t, s
    assert tau.tobytes() == sweep36.torque_curves.tobytes()
    assert k.tobytes() == sweep36.stiffness_curves.tobytes()


def test_infeasible_station_marks_partial(monkeypatch):
    real = sweep_mod._station

    def flaky(robot, pipe, mu, phi, preloads):
        if abs(phi - math.radians(90)) < 1e-9:
            return None, None, "forced failure"
        return real(robot, pipe, mu, phi, preloads)

    monkeypatch.setattr(sweep_mod, "_station", flaky)
    res = run_sweep(ROBOT, BEND, 0.7, 8)
    assert res.partial
    assert res.infeasible_stations == [(math.radians(90), "forced failure")]
    assert np.isnan(res.stiffness_curves[2]).all()
    assert np.isfinite(res.selected_stiffness.stiffness).all()


def test_all_infeasible_raises(monkeypatch):
    # even a very heavy robot rests on the wall at the horizontal stations,
    # so every station is failed by hand
    monkeypatch.setattr(sweep_mod, "_station", lambda *a: (None, None, "no equilibrium"))
    with pytest.raises(SweepFailure) as exc:
        run_sweep(ROBOT, BEND, 0.7, 4)
    assert len(exc.value.infeasible) == 4


def test_nothing_feasible_in_window_raises(monkeypatch):
    real = sweep_mod._station

    def outside_only(robot, pipe, mu, phi, preloads):
        if phi <= math.radians(150) + 1e-9:
            return None, None, "no equilibrium"
        return real(robot, pipe, mu, phi, preloads)

    monkeypatch.setattr(sweep_mod, "_station", outside_only)
    with pytest.raises(SweepFailure):
        run_sweep(ROBOT, BEND, 0.7, 8)


def test_sweep_preconditions():
    with pytest.raises(ValueError):
        run_sweep(ROBOT, PipeSpec(diameter=0.075), 0.7, 4)
    with pytest.raises(ValueError):
        run_sweep(ROBOT, BEND, 0.7, 1)
    with pytest.raises(ValueError):
        run_sweep(ROBOT, BEND, 0.7, 4, window=(1.0, 0.5))


def test_mu_curve_rows():
    grid = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
    rows = mu_vs_mu_lim(ROBOT, PipeSpec(diameter=0.075), grid)
    assert [r.mu for r in rows] == grid
    for r in rows:
        assert r.error is None
        assert 0 < r.mu_lim <= r.mu + 1e-9
        assert all(k > 0 for k in r.stiffness)
    # softer springs suffice when the wall grips better
    k1 = [r.stiffness[0] for r in rows]
    assert k1 == sorted(k1, reverse=True)


def test_mu_curve_records_infeasible_rows():
    rows = mu_vs_mu_lim(RobotParams(module_mass=20.0), PipeSpec(diameter=0.075), [0.5, 1.0])
    assert all(r.mu_lim is None and r.error for r in rows)


def test_mu_curve_rejects_bad_mu():
    with pytest.raises(ValueError):
        mu_vs_mu_lim(ROBOT, PipeSpec(diameter=0.075), [0.0])
