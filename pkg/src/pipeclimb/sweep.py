"""Station-by-station spring design along a bend, and the mu / mu_lim table."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GeometryError, bend_pose, straight_pose, sweep_stations
from .model import DEFAULT_PRELOADS, PipeSpec, RobotParams, SpringSet
from .optimize import InfeasibleDesign, solve_friction_limit, solve_spring_lp
from .statics import assemble_bend, assemble_straight

DEFAULT_WINDOW = (0.0, math.radians(150.0))


class SweepFailure(RuntimeError):
    """Every station of a sweep was infeasible."""

    def __init__(self, message: str, infeasible: list[tuple[float, str]]):
        super().__init__(message)
        self.infeasible = infeasible


@dataclass(frozen=True)
class SweepResult:
    stations: list[float]
    stiffness_curves: np.ndarray        # (n, 4) [N*m/rad]; NaN rows where infeasible
    torque_curves: np.ndarray           # (n, 4) [N*m]
    infeasible_stations: list[tuple[float, str]]
    selected_stiffness: SpringSet
    selection_window: tuple[float, float]
    partial: bool = False

    @property
    def feasible(self) -> np.ndarray:
        return np.all(np.isfinite(self.torque_curves), axis=1)

    def in_window(self) -> np.ndarray:
        lo, hi = self.selection_window
        s = np.asarray(self.stations)
        return (s >= lo - 1e-12) & (s <= hi + 1e-12)


def _station(robot: RobotParams, pipe: PipeSpec, mu: float, phi: float, preloads):
    """One station of the sweep: (torques, stiffness) or an error string."""
    try:
        pose = bend_pose(pipe, robot, phi)
        system = assemble_bend(pose, robot, pipe)
        design = solve_spring_lp(system, mu, pose.joint_angles, preloads)
    except (GeometryError, InfeasibleDesign) as exc:
        return None, None, str(exc)
    return design.joint_torques, design.stiffness, None


def run_sweep(robot: RobotParams, pipe: PipeSpec, mu: float, n: int,
              window: tuple[float, float] = DEFAULT_WINDOW,
              preloads=DEFAULT_PRELOADS) -> SweepResult:
    """Design springs at ``n`` stations around the bend and pick, per joint,
    the largest stiffness found inside ``window`` (radians).

    Infeasible stations are recorded and skipped; when one of them falls in
    the window the selection is flagged ``partial``.
    """
    if not pipe.is_bend:
        raise ValueError("run_sweep needs a pipe with a bend radius")
    lo, hi = window
    if not (0.0 <= lo <= hi < 2 * math.pi):
        raise ValueError(f"window must satisfy 0 <= lo <= hi < 2*pi, got {window}")
    stations = [float(p) for p in sweep_stations(pipe, n)]

    tau = np.full((n, 4), np.nan)
    k = np.full((n, 4), np.nan)
    infeasible = []
    for i, phi in enumerate(stations):
        t, s, err = _station(robot, pipe, mu, phi, preloads)
        if err is not None:
            infeasible.append((phi, err))
            continue
        tau[i], k[i] = t, s

    feasible = np.all(np.isfinite(tau), axis=1)
    if not feasible.any():
        raise SweepFailure(f"all {n} stations are infeasible", infeasible)
    s = np.asarray(stations)
    inside = (s >= lo - 1e-12) & (s <= hi + 1e-12)
    pick = inside & feasible
    if not pick.any():
        raise SweepFailure("no feasible station inside the selection window", infeasible)
    selected = SpringSet(stiffness=tuple(float(v) for v in k[pick].max(axis=0)),
                         preload_angles=tuple(preloads))
    return SweepResult(
        stations=stations,
        stiffness_curves=k,
        torque_curves=tau,
        infeasible_stations=infeasible,
        selected_stiffness=selected,
        selection_window=(float(lo), float(hi)),
        partial=bool((inside & ~feasible).any()),
    )


@dataclass(frozen=True)
class MuRow:
    mu: float
    mu_lim: float | None
    stiffness: tuple[float, float, float, float] | None   # [N*m/rad]
    error: str | None = None


def mu_vs_mu_lim(robot: RobotParams, pipe: PipeSpec, mu_grid,
                 preloads=DEFAULT_PRELOADS) -> list[MuRow]:
    """For each design friction coefficient, size the springs on the straight
    vertical pose and then find the friction those springs actually need."""
    pose = straight_pose(pipe, robot)
    system = assemble_straight(pose, robot, pipe)
    rows = []
    for mu in mu_grid:
        mu = float(mu)
        if not 0 < mu <= 1:
            raise ValueError(f"mu must lie in (0, 1], got {mu}")
        try:
            design = solve_spring_lp(system, mu, pose.joint_angles, preloads)
            springs = SpringSet(stiffness=design.stiffness, preload_angles=tuple(preloads))
            lim = solve_friction_limit(system, springs, pose.joint_angles)
        except InfeasibleDesign as exc:
            rows.append(MuRow(mu, None, None, str(exc)))
            continue
        rows.append(MuRow(mu, lim.mu_lim, design.stiffness))
    return rows
