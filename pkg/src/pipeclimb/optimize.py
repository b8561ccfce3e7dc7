"""Spring-torque minimization and limiting-friction estimation."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import SpringSet
from .simplex import FEAS_TOL, LPInfeasible, LPUnbounded, lp_solve
from .statics import EquilibriumSolution, StaticSystem


class InfeasibleDesign(RuntimeError):
    """No equilibrium satisfies the contact constraints.

    ``certificate`` carries the Farkas vector from the LP when available.
    """

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


@dataclass(frozen=True)
class SpringDesign:
    joint_torques: tuple[float, float, float, float]
    objective: float
    solution: EquilibriumSolution
    stiffness: tuple[float, float, float, float] | None = None

    @property
    def stiffness_per_deg(self):
        if self.stiffness is None:
            return None
        return tuple(k * math.pi / 180 for k in self.stiffness)


@dataclass(frozen=True)
class FrictionResult:
    ratios: tuple[float, ...]
    labels: tuple[str, ...]
    mu_lim: float
    solution: EquilibriumSolution
    objective: float


def stiffness_from_torques(torques, joint_angles, preloads) -> tuple[float, ...]:
    """``|tau| / |theta - theta_initial|`` per joint [N*m/rad]."""
    out = []
    for tau, th, th0 in zip(torques, joint_angles, preloads):
        defl = abs(th - th0)
        if defl == 0.0:
            out.append(0.0 if tau == 0.0 else math.inf)
        else:
            out.append(abs(tau) / defl)
    return tuple(out)


def _contact_inequalities(system: StaticSystem, mu: float, n_cols: int,
                          cols: np.ndarray | None = None):
    """Rows of ``G x <= h`` for ``|F| <= mu N`` and the traction limit.

    ``cols`` maps system columns to LP columns (-1 for dropped columns).
    """
    if cols is None:
        cols = np.arange(system.n_vars)
    rows, rhs = [], []
    for f, nrm in system.friction_pairs:
        for s in (1.0, -1.0):
            r = np.zeros(n_cols)
            r[cols[f]] = s
            r[cols[nrm]] = -mu
            rows.append(r), rhs.append(0.0)
    for group in system.traction_groups:
        for s in (1.0, -1.0):
            r = np.zeros(n_cols)
            r[cols[list(group)]] = s
            rows.append(r), rhs.append(system.traction_limit)
    return np.array(rows).reshape(-1, n_cols), np.array(rhs, dtype=float)


def solve_spring_lp(system: StaticSystem, mu: float, joint_angles=None,
                    preloads=None) -> SpringDesign:
    """Minimize the summed absolute passive-joint torque over all equilibria
    with ``|F| <= mu N``, ``N >= 0`` and the per-module traction limit.

    Each passive torque is split into nonnegative parts so the problem is a
    plain LP.  Stiffness is filled in when ``joint_angles`` and ``preloads``
    are given.
    """
    if not 0 < mu <= 1:
        raise ValueError(f"mu must lie in (0, 1], got {mu}")
    A, b = system.matrix, system.rhs
    n = system.n_vars
    P = list(system.passive_torques)
    # columns: original x (passive tau reinterpreted as tau+), then tau- parts
    A_lp = np.hstack([A, -A[:, P]])
    bounds = list(system.bounds) + [(0.0, math.inf)] * len(P)
    for p in P:
        bounds[p] = (0.0, math.inf)
    cost = np.zeros(n + len(P))
    cost[P] = 1.0
    cost[n:] = 1.0
    G, h = _contact_inequalities(system, mu, n + len(P))
    try:
        res = lp_solve(A_lp, b, cost, bounds, G, h)
    except LPInfeasible as exc:
        raise InfeasibleDesign(
            f"no equilibrium with friction coefficient {mu:g}", exc.certificate) from exc
    except LPUnbounded as exc:  # objective is bounded below by zero
        raise AssertionError("spring LP reported unbounded") from exc
    x = res.x[:n].copy()
    x[P] = res.x[P] - res.x[n:]
    tau = tuple(float(x[p]) for p in P)
    stiffness = None
    if joint_angles is not None and preloads is not None:
        stiffness = stiffness_from_torques(tau, joint_angles, preloads)
    return SpringDesign(
        joint_torques=tau,
        objective=float(sum(abs(t) for t in tau)),
        solution=EquilibriumSolution.from_values(system, x),
        stiffness=stiffness,
    )


def _null_space(A: np.ndarray, tol: float = 1e-10):
    if A.shape[0] == 0:
        return np.eye(A.shape[1])
    u, s, vt = np.linalg.svd(A)
    rank = int((s > tol * max(1.0, s.max(initial=0.0))).sum())
    return vt[rank:].T


MAX_VERTEX_CANDIDATES = 5_000_000


def solve_friction_limit(system: StaticSystem, springs: SpringSet, pose_angles,
                         fixed_torques: dict[str, float] | None = None) -> FrictionResult:
    """Maximize the sum of squared normal forces with the passive joints held
    by ``springs`` at ``pose_angles``; report the F/N ratio of every contact.

    The friction cone is ``|F| <= N`` and the traction limit still applies.
    Any other torque columns are pinned through ``fixed_torques`` (by
    variable name) or left free.  The optimum of this convex maximization
    lies at a vertex, so every vertex of the feasible polytope is visited.
    """
    pinned = {}
    for col, tau in zip(system.passive_torques, springs.torques(pose_angles)):
        pinned[col] = tau
    for name, val in (fixed_torques or {}).items():
        pinned[system.var_index[name]] = float(val)
    free = [j for j in range(system.n_vars) if j not in pinned]
    cols = -np.ones(system.n_vars, dtype=int)
    cols[free] = np.arange(len(free))

    A = system.matrix[:, free]
    pin_idx = list(pinned)
    b = system.rhs - system.matrix[:, pin_idx] @ np.array([pinned[j] for j in pin_idx])
    nf = len(free)

    G, h = _contact_inequalities(system, 1.0, nf, cols)
    extra_rows, extra_rhs = [], []
    for j, (lo, hi) in enumerate(system.bounds):
        if cols[j] < 0:
            continue
        for sign, lim in ((-1.0, lo), (1.0, hi)):
            if math.isfinite(lim):
                r = np.zeros(nf)
                r[cols[j]] = sign
                extra_rows.append(r), extra_rhs.append(sign * lim)
    if extra_rows:
        G = np.vstack([G, extra_rows])
        h = np.concatenate([h, extra_rhs])

    x0, *_ = np.linalg.lstsq(A, b, rcond=None)
    scale = 1.0 + float(np.abs(b).max(initial=0.0))
    if np.abs(A @ x0 - b).max(initial=0.0) > 1e-9 * scale:
        raise InfeasibleDesign("pinned spring torques admit no equilibrium")
    Z = _null_space(A)
    k = Z.shape[1]
    Gy, hy = G @ Z, h - G @ x0
    tol = 1e-9 * (1.0 + np.abs(hy))

    n_mask = np.zeros(nf)
    for _, nrm in system.friction_pairs:
        n_mask[cols[nrm]] = 1.0

    def objective(xs):
        return ((xs * n_mask) ** 2).sum(axis=-1)

    if k == 0:
        if np.any(hy < -tol):
            raise InfeasibleDesign("pinned spring torques violate the friction cone")
        best = x0
    else:
        _check_bounded(Gy, hy)
        m = Gy.shape[0]
        if math.comb(m, k) > MAX_VERTEX_CANDIDATES:
            raise ValueError(f"{math.comb(m, k)} vertex candidates; pin more torques")
        best, best_val = None, -math.inf
        combos = itertools.combinations(range(m), k)
        while True:
            chunk = np.array(list(itertools.islice(combos, 20000)), dtype=int)
            if chunk.size == 0:
                break
            M = Gy[chunk]
            det = np.linalg.det(M)
            ok = np.abs(det) > 1e-12 * np.abs(M).max(axis=(1, 2)) ** k
            if not ok.any():
                continue
            ys = np.linalg.solve(M[ok], hy[chunk[ok]][..., None])[..., 0]
            feas = np.all(ys @ Gy.T <= hy + tol, axis=1)
            if not feas.any():
                continue
            xs = x0 + ys[feas] @ Z.T
            vals = objective(xs)
            i = int(np.argmax(vals))
            if vals[i] > best_val * (1 + 1e-12) + 1e-15:
                best, best_val = xs[i], float(vals[i])
        if best is None:
            raise InfeasibleDesign("pinned spring torques admit no equilibrium inside the cone")

    x = np.empty(system.n_vars)
    x[free] = best
    for j, v in pinned.items():
        x[j] = v
    ratios, labels = [], []
    tiny = 1e-12 * scale
    for (f, nrm), lab in zip(system.friction_pairs, system.contact_labels):
        F, N = x[f], x[nrm]
        # |F| <= N holds, so a contact without load carries no friction either
        ratios.append(float(abs(F) / N) if N > tiny else 0.0)
        labels.append(lab)
    return FrictionResult(
        ratios=tuple(ratios),
        labels=tuple(labels),
        mu_lim=max(ratios, default=0.0),
        solution=EquilibriumSolution.from_values(system, x),
        objective=float(objective(best)),
    )


def _check_bounded(G: np.ndarray, h: np.ndarray) -> None:
    k = G.shape[1]
    for i in range(k):
        for s in (1.0, -1.0):
            c = np.zeros(k)
            c[i] = -s
            try:
                lp_solve(None, None, c, [(None, None)] * k, G, h)
            except LPUnbounded as exc:
                raise InfeasibleDesign(
                    "friction-limit polytope is unbounded; pin the free torques") from exc
            except LPInfeasible as exc:
                raise InfeasibleDesign("friction-limit polytope is empty") from exc
