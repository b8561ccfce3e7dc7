"""Spring and friction design for a three-module compliant in-pipe climbing robot."""

from .geometry import BendPose, GeometryError, StraightPose, bend_pose, straight_pose, sweep_stations
from .model import (ConfigError, PipeSpec, RobotParams, SpringSet, dump_config, load_config,
                    spring_torque)
from .optimize import (FrictionResult, InfeasibleDesign, SpringDesign, solve_friction_limit,
                       solve_spring_lp)
from .simplex import LPInfeasible, LPUnbounded, lp_solve
from .statics import EquilibriumSolution, StaticSystem, assemble_bend, assemble_straight, residual
from .sweep import MuRow, SweepFailure, SweepResult, mu_vs_mu_lim, run_sweep

__version__ = "0.1.0"
