"""Robot poses in a straight vertical pipe and along a circular bend.

Frame conventions (planar, gravity along -y):

* The robot travels clockwise around the bend centre, which sits at the
  origin.  Station ``phi = 0`` puts the robot on the left of the loop heading
  straight up, so the bend degenerates to the straight vertical pose as the
  bend radius grows.  The middle submodule of module 2 sits at polar angle
  ``pi - phi``.
* Body angles are measured from the global x axis.  A submodule at polar
  angle ``psi`` has angle ``psi - pi/2``, which is also its travel direction.
* Modules 1 and 3 press the inner wall, module 2 the outer wall.  In the
  straight pose the inner wall is the right-hand wall (``x = +D/2``).
* Module 1 leads.  Bodies are ordered front to back: module 1, link 1,
  module 2, link 2, module 3.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model import PipeSpec, RobotParams, straight_joint_angles


class GeometryError(ValueError):
    """The robot cannot be placed in the pipe."""


def _unit(angle: float) -> np.ndarray:
    return np.array([math.cos(angle), math.sin(angle)])


def _angle(v) -> float:
    return math.atan2(v[1], v[0])


def _wrap(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.remainder(a, 2 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class StraightPose:
    theta1: float
    theta2: float
    contact_sides: tuple[int, int, int]
    # derived layout used by the statics assembly
    module_axes_x: tuple[float, float, float]
    joints: tuple[tuple[float, float], ...]
    joint_angles: tuple[float, float, float, float]

    @property
    def link_angles(self) -> tuple[float, float]:
        return (self.theta1, self.theta2)


def straight_pose(pipe: PipeSpec, robot: RobotParams) -> StraightPose:
    """In-line pose of the three modules clamped in a straight vertical pipe.

    ``theta1 = pi - acos((D - d)/L1)`` and ``theta2 = acos((D - d)/L2)``.
    ``contact_sides`` is +1 for the inner (right) wall and -1 for the outer
    (left) wall.
    """
    D, d = pipe.diameter, robot.module_diameter
    if D <= d:
        raise GeometryError(f"pipe diameter {D} must exceed module diameter {d}")
    gap = D - d
    L1, L2 = robot.link_lengths
    for k, L in enumerate((L1, L2), start=1):
        if gap > L:
            raise GeometryError(f"link {k} (L={L}) is too short to span the bore gap {gap}")
    theta1 = math.pi - math.acos(gap / L1)
    theta2 = math.acos(gap / L2)

    l1, l2, l3 = robot.module_lengths
    x_in, x_out = D / 2 - d / 2, -D / 2 + d / 2
    # module 2 spans y in [-l2/2, l2/2]
    j2 = (x_out, l2 / 2)
    j1 = (x_in, j2[1] + math.sqrt(L1 ** 2 - gap ** 2))
    j3 = (x_out, -l2 / 2)
    j4 = (x_in, j3[1] - math.sqrt(L2 ** 2 - gap ** 2))
    return StraightPose(
        theta1=theta1,
        theta2=theta2,
        contact_sides=(1, -1, 1),
        module_axes_x=(x_in, x_out, x_in),
        joints=(j1, j2, j3, j4),
        joint_angles=straight_joint_angles(D, d, robot.link_lengths),
    )


@dataclass(frozen=True)
class BendPose:
    phi: float
    submodule_angles: np.ndarray      # (3, n_sub) [rad]
    link_angles: tuple[float, float]  # from link centres, tangent convention
    submodule_centers: np.ndarray     # (3, n_sub, 2) [m]
    link_centers: np.ndarray          # (2, 2) [m]
    bend_center: tuple[float, float]
    inner_radius: float
    outer_radius: float
    # chain points used by the statics assembly
    passive_joints: np.ndarray        # (4, 2): J1..J4
    hinges: np.ndarray                # (3, n_sub - 1, 2): intra-module hinge points
    module_ends: np.ndarray           # (3, 2, 2): front and rear end of each module
    link_directions: tuple[float, float]  # physical link direction, pointing forward
    joint_angles: tuple[float, float, float, float]

    def radial_errors(self) -> np.ndarray:
        c = np.asarray(self.bend_center)
        r = np.linalg.norm(self.submodule_centers - c, axis=-1)
        target = np.array([self.inner_radius, self.outer_radius, self.inner_radius])[:, None]
        return r - target


def bend_radii(pipe: PipeSpec, robot: RobotParams) -> tuple[float, float]:
    if pipe.bend_radius is None:
        raise GeometryError("pipe has no bend radius")
    d = robot.module_diameter
    return pipe.bend_radius + d / 2, pipe.bend_radius + pipe.diameter - d / 2


def _circle_intersections(r0: float, p1: np.ndarray, r1: float):
    """Intersections of the circle |x| = r0 with |x - p1| = r1."""
    dist = float(np.hypot(*p1))
    if dist == 0 or dist > r0 + r1 or dist < abs(r0 - r1):
        return []
    a = (r0 ** 2 - r1 ** 2 + dist ** 2) / (2 * dist)
    h2 = r0 ** 2 - a ** 2
    h = math.sqrt(max(h2, 0.0))
    u = p1 / dist
    base = a * u
    perp = np.array([-u[1], u[0]])
    return [base + h * perp, base - h * perp]


def _submodule_step(R: float, chord: float) -> float:
    if chord > 2 * R:
        raise GeometryError(f"submodule chord {chord:.4g} m exceeds circle diameter {2 * R:.4g} m")
    return 2 * math.asin(chord / (2 * R))


def _solve_link(anchor: np.ndarray, rho: float, L: float, ahead: bool, phi: float) -> np.ndarray:
    sols = _circle_intersections(rho, anchor, L)
    if not sols:
        raise GeometryError(
            f"link of length {L} cannot reach the inner-wall circle at phi={math.degrees(phi):.3f} deg")
    # signed sweep from anchor: negative = clockwise = ahead
    sweeps = [_wrap(_angle(s) - _angle(anchor)) for s in sols]
    if abs(sweeps[0] - sweeps[1]) < 1e-12:
        raise ValueError("tangent link")
    idx = int(np.argmin(sweeps)) if ahead else int(np.argmax(sweeps))
    return sols[idx]


def bend_pose(pipe: PipeSpec, robot: RobotParams, phi: float) -> BendPose:
    """Pose of the robot at station ``phi`` along the bend.

    Submodule centres sit on the inner circle (modules 1, 3) or the outer
    circle (module 2), consecutive centres one submodule length apart.  The
    links close the chain: each passive joint on module 1 or 3 is found by
    intersecting a circle of the link length about the module 2 end point
    with the circle that the module end traces.
    """
    try:
        return _bend_pose(pipe, robot, phi)
    except ValueError as exc:
        if isinstance(exc, GeometryError):
            raise
        warnings.warn(f"degenerate bend pose at phi={phi!r}; perturbing by 1e-9 rad",
                      RuntimeWarning, stacklevel=2)
        return _bend_pose(pipe, robot, phi + 1e-9)


def _bend_pose(pipe: PipeSpec, robot: RobotParams, phi: float) -> BendPose:
    r_in, r_out = bend_radii(pipe, robot)
    n = robot.submodules_per_module
    seg = [l / n for l in robot.module_lengths]
    radii = (r_in, r_out, r_in)
    steps = [_submodule_step(R, s) for R, s in zip(radii, seg)]

    psi = np.zeros((3, n))
    # module 2: middle of the module at pi - phi; front (j = 0) is clockwise
    mid = (n - 1) / 2
    psi[1] = math.pi - phi + (np.arange(n) - mid) * steps[1]

    def center(i, p):
        return radii[i] * np.array([math.cos(p), math.sin(p)])

    def tangent(p):
        return _unit(p - math.pi / 2)

    j2 = center(1, psi[1, 0]) + seg[1] / 2 * tangent(psi[1, 0])
    j3 = center(1, psi[1, -1]) - seg[1] / 2 * tangent(psi[1, -1])

    # module 1 rear end and module 3 front end trace a circle of radius rho
    rho1 = math.hypot(r_in, seg[0] / 2)
    off1 = math.atan2(seg[0] / 2, r_in)
    rho3 = math.hypot(r_in, seg[2] / 2)
    off3 = math.atan2(seg[2] / 2, r_in)
    L1, L2 = robot.link_lengths
    j1 = _solve_link(j2, rho1, L1, ahead=True, phi=phi)
    j4 = _solve_link(j3, rho3, L2, ahead=False, phi=phi)

    psi[0, -1] = _angle(j1) - off1
    psi[0] = psi[0, -1] - (n - 1 - np.arange(n)) * steps[0]
    psi[2, 0] = _angle(j4) + off3
    psi[2] = psi[2, 0] + np.arange(n) * steps[2]

    centers = np.empty((3, n, 2))
    for i in range(3):
        centers[i] = radii[i] * np.stack([np.cos(psi[i]), np.sin(psi[i])], axis=-1)
    angles = np.arctan2(centers[..., 1], centers[..., 0]) - math.pi / 2

    hinges = 0.5 * (centers[:, 1:] + centers[:, :-1])
    ends = np.empty((3, 2, 2))
    for i in range(3):
        ends[i, 0] = centers[i, 0] + seg[i] / 2 * tangent(psi[i, 0])
        ends[i, 1] = centers[i, -1] - seg[i] / 2 * tangent(psi[i, -1])

    link_centers = np.array([(j1 + j2) / 2, (j3 + j4) / 2])
    link_angles = tuple(_angle(c) - math.pi / 2 for c in link_centers)
    dir1 = _angle(j1 - j2)
    dir2 = _angle(j3 - j4)
    joint_angles = (
        _wrap(angles[0, -1] - dir1),
        _wrap(dir1 - angles[1, 0]),
        _wrap(angles[1, -1] - dir2),
        _wrap(dir2 - angles[2, 0]),
    )
    return BendPose(
        phi=phi,
        submodule_angles=angles,
        link_angles=link_angles,
        submodule_centers=centers,
        link_centers=link_centers,
        bend_center=(0.0, 0.0),
        inner_radius=r_in,
        outer_radius=r_out,
        passive_joints=np.array([j1, j2, j3, j4]),
        hinges=hinges,
        module_ends=ends,
        link_directions=(dir1, dir2),
        joint_angles=joint_angles,
    )


def sweep_stations(pipe: PipeSpec, n: int) -> np.ndarray:
    """``n`` evenly spaced station angles covering ``[0, bend_extent)``."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"need at least 2 stations, got {n!r}")
    extent = pipe.bend_extent if pipe.bend_extent is not None else 2 * math.pi
    return np.arange(n) * (extent / n)
