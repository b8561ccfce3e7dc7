"""Quasi-static equilibrium of the module-link chain as a linear system.

Unknowns are wall friction ``F`` (along the travel direction), wall normal
force ``N`` (pushing the robot off the wall) and joint torques ``tau``.  The
torque ``tau_J`` is the clockwise torque that the body behind joint ``J``
applies to the body in front of it.

Rows, all at zero acceleration:

* ``f_x``: minus the sum of x forces;
* ``f_y``: sum of y forces, weights moved to the right-hand side;
* ``M_<joint>``: moments about the joint of every load on the bodies ahead
  of it, for every passive and intra-module joint;
* ``M_J4_rear``: moments about J4 of the loads on module 3, the remaining
  independent balance of the chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BendPose, StraightPose
from .model import PipeSpec, RobotParams

PASSIVE_JOINTS = ("J1", "J2", "J3", "J4")


def _cross(r, v) -> float:
    return float(r[0] * v[1] - r[1] * v[0])


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class StaticSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    var_index: dict[str, int]
    row_labels: tuple[str, ...]
    bounds: tuple[tuple[float, float], ...]
    friction_pairs: tuple[tuple[int, int], ...]
    traction_groups: tuple[tuple[int, ...], ...]
    traction_limit: float
    passive_torques: tuple[int, int, int, int]
    contact_labels: tuple[str, ...] = field(default=())

    @property
    def n_vars(self) -> int:
        return self.matrix.shape[1]

    @property
    def var_names(self) -> list[str]:
        names = [""] * self.n_vars
        for name, col in self.var_index.items():
            names[col] = name
        return names

    def row(self, label: str) -> np.ndarray:
        return self.matrix[self.row_labels.index(label)]

    def rhs_of(self, label: str) -> float:
        return float(self.rhs[self.row_labels.index(label)])

    def coefficient(self, row: str, var: str) -> float:
        return float(self.row(row)[self.var_index[var]])


@dataclass(frozen=True)
class EquilibriumSolution:
    values: np.ndarray
    residual_norm: float

    @classmethod
    def from_values(cls, system: StaticSystem, values) -> "EquilibriumSolution":
        values = _frozen(values)
        return cls(values, float(np.max(np.abs(residual(system, values)), initial=0.0)))

    def get(self, system: StaticSystem, name: str) -> float:
        return float(self.values[system.var_index[name]])


def residual(system: StaticSystem, x) -> np.ndarray:
    """``A @ x - b``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (system.n_vars,):
        raise ValueError(f"expected a vector of length {system.n_vars}, got shape {x.shape}")
    return system.matrix @ x - system.rhs


@dataclass
class _Contact:
    point: np.ndarray
    normal: np.ndarray
    tangent: np.ndarray
    label: str


@dataclass
class _Body:
    contacts: list = field(default_factory=list)
    weights: list = field(default_factory=list)  # (w, point)
    module: int | None = None


def _assemble(bodies: list[_Body], joints: list[tuple[str, np.ndarray]],
              robot: RobotParams) -> StaticSystem:
    contacts = [c for b in bodies for c in b.contacts]
    nc = len(contacts)
    slot = {id(c): k for k, c in enumerate(contacts)}
    names = [f"F{c.label}" for c in contacts] + [f"N{c.label}" for c in contacts]
    joint_names = [name for name, _ in joints]
    passive = [j for j in joint_names if j in PASSIVE_JOINTS]
    intra = [j for j in joint_names if j not in PASSIVE_JOINTS]
    names += [f"tau_{j}" for j in passive + intra]
    var_index = {name: i for i, name in enumerate(names)}
    nv = len(names)

    rows, rhs, labels = [], [], []

    def force_row(axis: int, sign: float):
        row = np.zeros(nv)
        for k, c in enumerate(contacts):
            row[k] = sign * c.tangent[axis]
            row[nc + k] = sign * c.normal[axis]
        b = 0.0
        if axis == 1:
            b = sign * sum(w for body in bodies for w, _ in body.weights)
        return row, b

    for axis, sign, label in ((0, -1.0, "f_x"), (1, 1.0, "f_y")):
        r, b = force_row(axis, sign)
        rows.append(r), rhs.append(b), labels.append(label)

    def moment_row(pivot, subset: list[_Body], joint: str, sign: float):
        row = np.zeros(nv)
        b = 0.0
        for body in subset:
            for c in body.contacts:
                r = c.point - pivot
                k = slot[id(c)]
                row[k] = sign * _cross(r, c.tangent)
                row[nc + k] = sign * _cross(r, c.normal)
            for w, p in body.weights:
                b += sign * w * (p[0] - pivot[0])
        row[var_index[f"tau_{joint}"]] = -1.0
        return row, b

    for k, (name, point) in enumerate(joints):
        r, b = moment_row(point, bodies[: k + 1], name, 1.0)
        rows.append(r), rhs.append(b), labels.append(f"M_{name}")

    k4 = joint_names.index("J4")
    r, b = moment_row(joints[k4][1], bodies[k4 + 1:], "J4", -1.0)
    rows.append(r), rhs.append(b), labels.append("M_J4_rear")

    bounds = [(-math.inf, math.inf)] * nc + [(0.0, math.inf)] * nc + \
        [(-math.inf, math.inf)] * (nv - 2 * nc)
    groups: dict[int, list[int]] = {}
    for body in bodies:
        for c in body.contacts:
            groups.setdefault(body.module, []).append(var_index[f"F{c.label}"])
    return StaticSystem(
        matrix=_frozen(rows),
        rhs=_frozen(rhs),
        var_index=var_index,
        row_labels=tuple(labels),
        bounds=tuple(bounds),
        friction_pairs=tuple((k, nc + k) for k in range(nc)),
        traction_groups=tuple(tuple(groups[m]) for m in sorted(groups)),
        traction_limit=robot.traction_limit,
        passive_torques=tuple(var_index[f"tau_{j}"] for j in PASSIVE_JOINTS),
        contact_labels=tuple(c.label for c in contacts),
    )


def assemble_straight(pose: StraightPose, robot: RobotParams, pipe: PipeSpec) -> StaticSystem:
    """Equilibrium of the straight vertical pose with one contact per module.

    Columns: F1..F3, N1..N3, tau_J1..tau_J4.
    """
    d = robot.module_diameter
    D = pipe.diameter
    up = np.array([0.0, 1.0])
    j1, j2, j3, j4 = (np.array(j, dtype=float) for j in pose.joints)
    l1, l2, l3 = robot.module_lengths
    mids = (j1[1] + l1 / 2, 0.5 * (j2[1] + j3[1]), j4[1] - l3 / 2)

    bodies: list[_Body] = []
    for i in range(3):
        side = pose.contact_sides[i]
        axis = np.array([pose.module_axes_x[i], mids[i]])
        contact = _Contact(point=np.array([side * D / 2, mids[i]]),
                           normal=np.array([-float(side), 0.0]), tangent=up, label=str(i + 1))
        bodies.append(_Body(contacts=[contact], weights=[(robot.module_weight, axis)], module=i))
        if i < 2:
            a, b = (j1, j2) if i == 0 else (j3, j4)
            bodies.append(_Body(weights=[(robot.link_weight, 0.5 * (a + b))]))
    joints = [("J1", j1), ("J2", j2), ("J3", j3), ("J4", j4)]
    return _assemble(bodies, joints, robot)


def assemble_bend(pose: BendPose, robot: RobotParams, pipe: PipeSpec) -> StaticSystem:
    """Equilibrium of a bend pose with one contact per submodule.

    Columns: F11..F3n, N11..N3n, tau_J1..tau_J4, then the intra-module hinge
    torques tau_J11, tau_J12, ... (hinge ``Jij`` joins submodules j and j+1
    of module i).
    """
    d = robot.module_diameter
    n = pose.submodule_centers.shape[1]
    center = np.asarray(pose.bend_center, dtype=float)
    w_sub = robot.module_weight / n
    bodies: list[_Body] = []
    joints: list[tuple[str, np.ndarray]] = []
    for i in range(3):
        inner = i != 1
        for j in range(n):
            c = pose.submodule_centers[i, j]
            radial = (c - center) / np.linalg.norm(c - center)
            theta = pose.submodule_angles[i, j]
            if inner:
                point, normal = c - d / 2 * radial, radial
            else:
                point, normal = c + d / 2 * radial, -radial
            contact = _Contact(point=point, normal=normal,
                               tangent=np.array([math.cos(theta), math.sin(theta)]),
                               label=f"{i + 1}{j + 1}")
            bodies.append(_Body(contacts=[contact], weights=[(w_sub, c)], module=i))
            if j < n - 1:
                joints.append((f"J{i + 1}{j + 1}", pose.hinges[i, j]))
        if i < 2:
            a, b = pose.passive_joints[2 * i], pose.passive_joints[2 * i + 1]
            joints.append((f"J{2 * i + 1}", a))
            bodies.append(_Body(weights=[(robot.link_weight, pose.link_centers[i])]))
            joints.append((f"J{2 * i + 2}", b))
    return _assemble(bodies, joints, robot)


def dump_matrix(system: StaticSystem) -> str:
    """Plain-text audit listing: one ``row<TAB>column<TAB>coefficient`` line per
    nonzero entry, followed by the right-hand side."""
    names = system.var_names
    out = [
        "# row\tcolumn\tcoefficient",
        "# tau_J is the clockwise torque applied by the body behind joint J on the body ahead.",
        "# M_J4 balances everything ahead of J4; M_J4_rear balances module 3 alone about J4.",
        "# Both rows are independent; together they close the chain.",
    ]
    for r, label in enumerate(system.row_labels):
        for c, name in enumerate(names):
            v = system.matrix[r, c]
            if v != 0.0:
                out.append(f"{label}\t{name}\t{v:.12g}")
        out.append(f"{label}\trhs\t{system.rhs[r]:.12g}")
    return "\n".join(out) + "\n"
