"""Command-line entry point.

Exit codes: 0 success, 2 usage or configuration error, 3 infeasible analysis,
4 file I/O failure.  Failures print one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import GeometryError, bend_pose, straight_pose
from .model import DEG, ConfigError, PipeSpec, RobotParams, SpringSet, load_config
from .optimize import InfeasibleDesign, solve_friction_limit, solve_spring_lp
from .report import emit_csv, emit_svg, fmt, table_text
from .statics import assemble_bend, assemble_straight, dump_matrix
from .sweep import SweepFailure, mu_vs_mu_lim, run_sweep

COMMANDS = ("solve-straight", "solve-bend", "sweep", "friction-limit", "mu-curve")
EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 2, 3, 4
DEFAULT_BEND_RATIO = 1.5   # bend radius / pipe diameter when the config has none


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pipeclimb", description="Spring and friction design for a "
                "three-module in-pipe climbing robot.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="flat TOML document with robot/pipe/spring keys")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--format", choices=("csv", "svg", "both"), default="csv")
    p.add_argument("--mu", type=float, help="friction coefficient (default: config friction_mu)")
    p.add_argument("--steps", type=int, default=360, help="sweep stations around the bend")
    p.add_argument("--window", default="0,150", help="selection window lo,hi in degrees")
    p.add_argument("--phi", type=float, default=0.0, help="bend station for solve-bend [deg]")
    p.add_argument("--springs", choices=("config", "lp"), default="config",
                   help="friction-limit springs: from the config (or defaults), or LP-designed")
    p.add_argument("--mu-grid", default="0.5,0.6,0.7,0.8,0.9,1.0",
                   help="comma-separated friction coefficients for mu-curve")
    p.add_argument("--dump-matrix", action="store_true",
                   help="also write the equilibrium matrix as matrix.tsv")
    p.add_argument("--seed", type=int, default=0, help="recorded in the report; sampling only")
    return p


def _floats(text: str, name: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--{name} expects comma-separated numbers, got {text!r}") from None


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "exit": code, "message": message}, sort_keys=True),
          file=sys.stderr)
    return code


def _bend_pipe(pipe: PipeSpec) -> tuple[PipeSpec, list[str]]:
    if pipe.is_bend:
        return pipe, []
    radius = DEFAULT_BEND_RATIO * pipe.diameter
    pipe = PipeSpec(diameter=pipe.diameter, bend_radius=radius,
                    bend_extent=pipe.bend_extent, friction_mu=pipe.friction_mu)
    return pipe, [f"bend_radius not configured; using {fmt(radius)} m"]


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def _header(args, robot: RobotParams, pipe: PipeSpec, mu: float) -> list[str]:
    return [
        f"pipeclimb {__version__} {args.command}",
        f"pipe diameter D = {fmt(pipe.diameter)} m, module diameter d = "
        f"{fmt(robot.module_diameter)} m, mu = {fmt(mu)}",
        f"seed = {args.seed}",
    ]


def _joint_table(torques, angles, stiffness) -> str:
    rows = []
    for j, (t, a, k) in enumerate(zip(torques, angles, stiffness), start=1):
        rows.append([f"J{j}", fmt(a / DEG), fmt(t), fmt(k * DEG)])
    return table_text(("joint", "theta_deg", "tau_Nm", "k_Nm_per_deg"), rows)


def _solve_straight(args, robot, pipe, springs, mu, out, lines):
    pose = straight_pose(pipe, robot)
    system = assemble_straight(pose, robot, pipe)
    if args.dump_matrix:
        _write(out / "matrix.tsv", dump_matrix(system))
    preloads = (springs or SpringSet()).preload_angles
    design = solve_spring_lp(system, mu, pose.joint_angles, preloads)
    lines += [f"theta1 = {fmt(pose.theta1 / DEG)} deg", f"theta2 = {fmt(pose.theta2 / DEG)} deg"]
    for j, (t, k) in enumerate(zip(design.joint_torques, design.stiffness), start=1):
        lines.append(f"tau{j} = {fmt(t)} N*m   k{j} = {fmt(k * DEG)} N*m/deg")
    lines.append(f"sum |tau| = {fmt(design.objective)} N*m")
    lines.append(f"equilibrium residual = {design.solution.residual_norm:.3g}")
    if args.format in ("csv", "both"):
        _write(out / "straight.csv",
               _joint_table(design.joint_torques, pose.joint_angles, design.stiffness))


def _solve_bend(args, robot, pipe, springs, mu, out, lines):
    pipe, notes = _bend_pipe(pipe)
    lines += notes
    pose = bend_pose(pipe, robot, args.phi * DEG)
    system = assemble_bend(pose, robot, pipe)
    if args.dump_matrix:
        _write(out / "matrix.tsv", dump_matrix(system))
    preloads = (springs or SpringSet()).preload_angles
    design = solve_spring_lp(system, mu, pose.joint_angles, preloads)
    lines.append(f"bend radius = {fmt(pipe.bend_radius)} m, phi = {fmt(args.phi)} deg")
    for j, (t, a, k) in enumerate(zip(design.joint_torques, pose.joint_angles,
                                      design.stiffness), start=1):
        lines.append(f"J{j}: angle = {fmt(a / DEG)} deg  tau = {fmt(t)} N*m  "
                     f"k = {fmt(k * DEG)} N*m/deg")
    lines.append(f"equilibrium residual = {design.solution.residual_norm:.3g}")
    if args.format in ("csv", "both"):
        _write(out / "bend.csv",
               _joint_table(design.joint_torques, pose.joint_angles, design.stiffness))


def _sweep(args, robot, pipe, springs, mu, out, lines):
    if args.steps < 2:
        raise UsageError(f"--steps must be at least 2, got {args.steps}")
    window = _floats(args.window, "window")
    if len(window) != 2 or not 0 <= window[0] <= window[1] < 360:
        raise UsageError(f"--window expects lo,hi with 0 <= lo <= hi < 360, got {args.window!r}")
    pipe, notes = _bend_pipe(pipe)
    lines += notes
    preloads = (springs or SpringSet()).preload_angles
    result = run_sweep(robot, pipe, mu, args.steps, (window[0] * DEG, window[1] * DEG), preloads)
    lines.append(f"bend radius = {fmt(pipe.bend_radius)} m, stations = {args.steps}, "
                 f"window = [{fmt(window[0])}, {fmt(window[1])}] deg")
    lines.append("selected stiffness [N*m/deg]: "
                 + ", ".join(f"k{j} = {fmt(k)}" for j, k in
                             enumerate(result.selected_stiffness.stiffness_per_deg, start=1)))
    lines.append(f"infeasible stations: {len(result.infeasible_stations)}"
                 + (" (selection is partial)" if result.partial else ""))
    for phi, reason in result.infeasible_stations:
        lines.append(f"  phi = {fmt(phi / DEG)} deg: {reason}")
    if args.format in ("csv", "both"):
        emit_csv(result, out / "sweep.csv")
    if args.format in ("svg", "both"):
        emit_svg(result, out / "sweep.svg")


def _friction_limit(args, robot, pipe, springs, mu, out, lines):
    pose = straight_pose(pipe, robot)
    system = assemble_straight(pose, robot, pipe)
    if args.dump_matrix:
        _write(out / "matrix.tsv", dump_matrix(system))
    if args.springs == "lp":
        preloads = (springs or SpringSet()).preload_angles
        design = solve_spring_lp(system, mu, pose.joint_angles, preloads)
        springs = SpringSet(stiffness=design.stiffness, preload_angles=preloads)
        lines.append(f"springs designed by the LP at mu = {fmt(mu)}")
    elif springs is None:
        springs = SpringSet()
        lines.append("springs: built-in reference set")
    lines.append("stiffness [N*m/deg]: " + ", ".join(fmt(k) for k in springs.stiffness_per_deg))
    res = solve_friction_limit(system, springs, pose.joint_angles)
    sol = res.solution
    rows = []
    for (f, n), lab, ratio in zip(system.friction_pairs, res.labels, res.ratios):
        rows.append([lab, fmt(sol.values[f]), fmt(sol.values[n]), fmt(ratio)])
        lines.append(f"contact {lab}: F = {fmt(sol.values[f])} N  N = {fmt(sol.values[n])} N  "
                     f"F/N = {fmt(ratio)}")
    lines.append(f"mu_lim = {fmt(res.mu_lim)}")
    if args.format in ("csv", "both"):
        _write(out / "friction.csv", table_text(("contact", "F_N", "N_N", "ratio"), rows))


def _mu_curve(args, robot, pipe, springs, mu, out, lines):
    grid = _floats(args.mu_grid, "mu-grid")
    if not grid or not all(0 < m <= 1 for m in grid):
        raise UsageError(f"--mu-grid entries must lie in (0, 1], got {args.mu_grid!r}")
    preloads = (springs or SpringSet()).preload_angles
    rows = mu_vs_mu_lim(robot, pipe, grid, preloads)
    for r in rows:
        if r.error:
            lines.append(f"mu = {fmt(r.mu)}: infeasible ({r.error})")
        else:
            lines.append(f"mu = {fmt(r.mu)}: mu_lim = {fmt(r.mu_lim)}")
    if args.format in ("csv", "both"):
        emit_csv(rows, out / "mu_curve.csv")
    if args.format in ("svg", "both"):
        emit_svg(rows, out / "mu_curve.svg")


HANDLERS = {
    "solve-straight": _solve_straight,
    "solve-bend": _solve_bend,
    "sweep": _sweep,
    "friction-limit": _friction_limit,
    "mu-curve": _mu_curve,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.config is not None:
            try:
                text = args.config.read_text(encoding="utf-8")
            except OSError as exc:
                return _fail("io", f"cannot read config: {exc}", EXIT_IO)
            robot, pipe, springs = load_config(text)
        else:
            robot, pipe, springs = RobotParams(), PipeSpec(), None
        mu = pipe.friction_mu if args.mu is None else args.mu
        if not (math.isfinite(mu) and 0 < mu <= 1):
            raise UsageError(f"--mu must lie in (0, 1], got {mu}")
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except ConfigError as exc:
        where = {k: v for k, v in (("key", exc.key), ("line", exc.line)) if v is not None}
        msg = str(exc) + ("" if not where else " " + json.dumps(where, sort_keys=True))
        return _fail("config", msg, EXIT_USAGE)

    out = args.out
    lines = _header(args, robot, pipe, mu)
    try:
        out.mkdir(parents=True, exist_ok=True)
        try:
            HANDLERS[args.command](args, robot, pipe, springs, mu, out, lines)
        except UsageError as exc:
            return _fail("usage", str(exc), EXIT_USAGE)
        except (InfeasibleDesign, SweepFailure, GeometryError) as exc:
            lines.append(f"INFEASIBLE: {exc}")
            cert = getattr(exc, "certificate", None)
            if cert is not None and np.size(cert):
                lines.append("Farkas certificate: " + " ".join(fmt(v) for v in cert))
            _write(out / "report.txt", "\n".join(lines) + "\n")
            return _fail("infeasible", str(exc), EXIT_INFEASIBLE)
        _write(out / "report.txt", "\n".join(lines) + "\n")
    except OSError as exc:
        return _fail("io", str(exc), EXIT_IO)
    print("\n".join(lines))
    return 0


if __name__ == "__main__":
    sys.exit(main())
