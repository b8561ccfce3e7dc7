"""Physical parameters, shared domain types and configuration loading.

Internal units are SI with angles in radians.  Configuration documents use
degrees for angles and N*m/deg for spring stiffness; conversion happens only
in :func:`load_config` and :func:`dump_config`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

DEG = math.pi / 180.0

# Reported vertical-climb joint torques [N*m] and stiffnesses [N*m/deg] for the
# default robot in a 75 mm pipe.  Only used to seed default spring preloads.
REFERENCE_TORQUES = (0.2359, 0.3683, 0.2760, 0.1310)
REFERENCE_STIFFNESS_DEG = (0.0096, 0.0056, 0.0042, 0.0053)
REFERENCE_BEND_STIFFNESS_DEG = (0.0262, 0.0170, 0.0163, 0.0232)


class ConfigError(ValueError):
    """Configuration document could not be parsed or validated.

    ``key`` names the offending field, ``line`` the 1-based line number when
    the failure comes from the parser.
    """

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        super().__init__(message)
        self.key = key
        self.line = line


def _positive(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ConfigError(f"{name} must be a finite positive number, got {value!r}", key=name)


@dataclass(frozen=True)
class RobotParams:
    module_mass: float = 0.150
    link_mass: float = 0.020
    module_lengths: tuple[float, float, float] = (0.14, 0.14, 0.14)
    module_diameter: float = 0.050
    link_lengths: tuple[float, float] = (0.060, 0.060)
    motor_torque_max: float = 1.0
    gravity: float = 9.81
    submodules_per_module: int = 3

    def __post_init__(self):
        object.__setattr__(self, "module_lengths", tuple(float(v) for v in self.module_lengths))
        object.__setattr__(self, "link_lengths", tuple(float(v) for v in self.link_lengths))
        if len(self.module_lengths) != 3:
            raise ConfigError("module_lengths needs exactly 3 entries", key="module_lengths")
        if len(self.link_lengths) != 2:
            raise ConfigError("link_lengths needs exactly 2 entries", key="link_lengths")
        _positive("module_mass", self.module_mass)
        _positive("link_mass", self.link_mass)
        _positive("module_diameter", self.module_diameter)
        _positive("motor_torque_max", self.motor_torque_max)
        if not (isinstance(self.gravity, (int, float)) and math.isfinite(self.gravity)
                and self.gravity >= 0):
            raise ConfigError(f"gravity must be finite and >= 0, got {self.gravity!r}", key="gravity")
        for v in self.module_lengths:
            _positive("module_lengths", v)
        for v in self.link_lengths:
            _positive("link_lengths", v)
        if not isinstance(self.submodules_per_module, int) or self.submodules_per_module < 1:
            raise ConfigError("submodules_per_module must be an integer >= 1",
                              key="submodules_per_module")

    @property
    def module_weight(self) -> float:
        return self.module_mass * self.gravity

    @property
    def link_weight(self) -> float:
        return self.link_mass * self.gravity

    @property
    def traction_limit(self) -> float:
        """Largest traction force one module's drive can deliver [N]."""
        return 2.0 * self.motor_torque_max / (self.module_diameter / 2.0)

    def scaled_masses(self, factor: float) -> "RobotParams":
        return replace(self, module_mass=self.module_mass * factor,
                       link_mass=self.link_mass * factor)


@dataclass(frozen=True)
class PipeSpec:
    diameter: float = 0.075
    bend_radius: float | None = None
    bend_extent: float | None = None
    friction_mu: float = 0.7

    def __post_init__(self):
        _positive("diameter", self.diameter)
        mu = self.friction_mu
        if not (isinstance(mu, (int, float)) and 0 < mu <= 1):
            raise ConfigError(f"friction_mu must lie in (0, 1], got {mu!r}", key="friction_mu")
        if self.bend_radius is not None:
            _positive("bend_radius", self.bend_radius)
        if self.bend_extent is not None:
            if not (0 < self.bend_extent <= 2 * math.pi + 1e-12):
                raise ConfigError("bend_extent must lie in (0, 360] degrees", key="bend_extent")

    @property
    def is_bend(self) -> bool:
        return self.bend_radius is not None

    def check_fits(self, robot: RobotParams) -> None:
        if robot.module_diameter >= self.diameter:
            raise ConfigError(
                f"module_diameter {robot.module_diameter} must be smaller than pipe diameter "
                f"{self.diameter}", key="module_diameter")


def straight_joint_angles(diameter: float, module_diameter: float,
                          link_lengths: tuple[float, float]) -> tuple[float, float, float, float]:
    """Passive joint angles of the straight in-line pose [rad].

    Each joint angle is the orientation of the body ahead of the joint minus
    the orientation of the body behind it.
    """
    a1 = math.asin((diameter - module_diameter) / link_lengths[0])
    a2 = math.asin((diameter - module_diameter) / link_lengths[1])
    return (a1, -a1, -a2, a2)


def _default_preloads() -> tuple[float, ...]:
    robot, pipe = RobotParams(), PipeSpec()
    angles = straight_joint_angles(pipe.diameter, robot.module_diameter, robot.link_lengths)
    return tuple(a - (tau / k) * DEG
                 for a, tau, k in zip(angles, REFERENCE_TORQUES, REFERENCE_STIFFNESS_DEG))


DEFAULT_PRELOADS = _default_preloads()


@dataclass(frozen=True)
class SpringSet:
    stiffness: tuple[float, float, float, float] = tuple(
        k / DEG for k in REFERENCE_STIFFNESS_DEG)
    preload_angles: tuple[float, float, float, float] = field(
        default_factory=lambda: DEFAULT_PRELOADS)

    def __post_init__(self):
        object.__setattr__(self, "stiffness", tuple(float(k) for k in self.stiffness))
        object.__setattr__(self, "preload_angles", tuple(float(a) for a in self.preload_angles))
        if len(self.stiffness) != 4:
            raise ConfigError("stiffness needs exactly 4 entries", key="stiffness")
        if len(self.preload_angles) != 4:
            raise ConfigError("preload_angles needs exactly 4 entries", key="preload_angles")
        for k in self.stiffness:
            if not (math.isfinite(k) and k >= 0):
                raise ConfigError(f"stiffness entries must be >= 0, got {k!r}", key="stiffness")

    @property
    def stiffness_per_deg(self) -> tuple[float, ...]:
        return tuple(k * DEG for k in self.stiffness)

    def torques(self, joint_angles) -> tuple[float, ...]:
        return tuple(spring_torque(k, th, th0)
                     for k, th, th0 in zip(self.stiffness, joint_angles, self.preload_angles))


def spring_torque(k: float, theta: float, theta_initial: float) -> float:
    """Linear torsion spring torque ``k * (theta - theta_initial)``."""
    if k < 0:
        raise ValueError(f"spring stiffness must be >= 0, got {k}")
    return k * (theta - theta_initial)


# key -> (owner, unit scale applied on load, shape) ; shape 0 means scalar
_ROBOT_KEYS = {
    "module_mass": 0, "link_mass": 0, "module_lengths": 3, "module_diameter": 0,
    "link_lengths": 2, "motor_torque_max": 0, "gravity": 0, "submodules_per_module": 0,
}
_PIPE_KEYS = {"diameter": 0, "bend_radius": 0, "bend_extent": 0, "friction_mu": 0}
_SPRING_KEYS = {"stiffness": 4, "preload_angles": 4}
_ANGLE_KEYS = {"bend_extent", "preload_angles"}
KNOWN_KEYS = frozenset(_ROBOT_KEYS) | frozenset(_PIPE_KEYS) | frozenset(_SPRING_KEYS)


def _coerce(key: str, value: Any, shape: int):
    if shape == 0:
        if key == "submodules_per_module":
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{key} must be an integer", key=key)
            return value
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}", key=key)
        return float(value)
    if not isinstance(value, list) or len(value) != shape:
        raise ConfigError(f"{key} must be a list of {shape} numbers", key=key)
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{key} entries must be numbers, got {v!r}", key=key)
        out.append(float(v))
    return tuple(out)


def load_config(text: str) -> tuple[RobotParams, PipeSpec, SpringSet | None]:
    """Parse a flat TOML document into robot, pipe and optional spring data.

    Missing keys fall back to the default robot and a 75 mm pipe.  A
    :class:`SpringSet` is returned only when ``stiffness`` or
    ``preload_angles`` is present.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        if line is None:
            import re
            m = re.search(r"line (\d+)", str(exc))
            line = int(m.group(1)) if m else None
        raise ConfigError(f"config parse error: {exc}", line=line) from exc

    unknown = sorted(set(doc) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key {unknown[0]!r}", key=unknown[0])

    def section(keys):
        out = {}
        for key, shape in keys.items():
            if key in doc:
                val = _coerce(key, doc[key], shape)
                if key in _ANGLE_KEYS:
                    val = tuple(v * DEG for v in val) if shape else val * DEG
                elif key == "stiffness":
                    val = tuple(v / DEG for v in val)
                out[key] = val
        return out

    robot = RobotParams(**section(_ROBOT_KEYS))
    pipe = PipeSpec(**section(_PIPE_KEYS))
    pipe.check_fits(robot)
    spring_kw = section(_SPRING_KEYS)
    springs = SpringSet(**spring_kw) if spring_kw else None
    return robot, pipe, springs


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def dump_config(robot: RobotParams, pipe: PipeSpec, springs: SpringSet | None = None) -> str:
    """Serialize back to the document format read by :func:`load_config`."""
    lines = []
    for f in fields(RobotParams):
        lines.append(f"{f.name} = {_fmt(getattr(robot, f.name))}")
    for f in fields(PipeSpec):
        val = getattr(pipe, f.name)
        if val is None:
            continue
        if f.name in _ANGLE_KEYS:
            val = val / DEG
        lines.append(f"{f.name} = {_fmt(val)}")
    if springs is not None:
        lines.append(f"stiffness = {_fmt(tuple(k * DEG for k in springs.stiffness))}")
        lines.append(f"preload_angles = {_fmt(tuple(a / DEG for a in springs.preload_angles))}")
    return "\n".join(lines) + "\n"
