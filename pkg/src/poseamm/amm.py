"""Alternating minimization engine: an outer loop over two block solvers.

The rotation block is minimized by steepest descent on the SO(3) manifold.
Each step rotates the iterate by an angle mu about the axis of the
Riemannian gradient Z = grad X' - X grad'; mu is grown by doubling while
the doubled step keeps paying off and shrunk by halving until the accepted
step decreases the objective by at least 0.5 * mu * (0.5 tr ZZ'). Steps
are exact rotations, so iterates cannot drift off the manifold; a
re-projection every 50 steps absorbs accumulated rounding anyway.

The translation block is plain gradient descent with Barzilai-Borwein
step lengths, stopping when the objective stalls or would increase.

Both solvers only ever accept steps that decrease the objective, so the
outer objective trace is nonincreasing by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NonFiniteObjective
from .geometry import Pose, project_to_so3, rodrigues_step, unskew
from .objectives import PoseObjective

_MU_MAX = 1e6            # cap for the doubling schedule on pathological objectives
_MU_MIN = 1e-16          # below this the step has collapsed; keep the current iterate
_RATE_FLOOR = 1e-30      # squared-gradient scale treated as a stationary rotation
_GRAD_DELTA_FLOOR = 1e-16  # gradient changes below this mean the descent is done
_REPROJECT_EVERY = 50
_INNER_CAP = 100_000     # safety net; unreachable on objectives bounded below


@dataclass(frozen=True)
class AmmConfig:
    """Tolerances and step seeds for the alternating solver.

    tol_outer stops the outer loop on the absolute objective change;
    tol_rotation is a Frobenius threshold on the rotation step;
    tol_translation an absolute threshold on the translation objective
    change. use_closed_form_translation swaps the translation descent for
    the exact quadratic minimizer on objectives that provide one.
    """

    tol_outer: float = 1e-9
    max_outer_iters: int = 100
    tol_rotation: float = 1e-8
    tol_translation: float = 1e-10
    initial_mu: float = 1.0
    initial_alpha: float = 1e-3
    use_closed_form_translation: bool = False

    def __post_init__(self):
        for name in ("tol_outer", "tol_rotation", "tol_translation",
                     "initial_mu", "initial_alpha"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be at least 1")


@dataclass(frozen=True)
class AmmResult:
    pose: Pose
    final_objective: float
    outer_iterations: int
    converged: bool
    objective_trace: tuple


def rotation_subsolve(objective: PoseObjective, rotation_init, translation_fixed,
                      config: AmmConfig = AmmConfig()) -> np.ndarray:
    """Minimize over rotations at a fixed translation.

    Returns a rotation with objective value no larger than at
    ``rotation_init``. Stops when the Frobenius step norm drops below
    ``config.tol_rotation``, when the tangent gradient vanishes, or when
    the step length underflows on a flat objective (the best iterate so
    far is returned in that case).
    """
    t = np.asarray(translation_fixed, dtype=float)
    x = np.asarray(rotation_init, dtype=float)
    mu = config.initial_mu
    gx = float(objective.value(x, t))
    for inner in range(1, _INNER_CAP + 1):
        grad = np.asarray(objective.rotation_gradient(x, t), dtype=float)
        z = grad @ x.T - x @ grad.T           # Riemannian gradient (skew-symmetric)
        rate = 0.5 * float(np.sum(z * z))     # decrease rate 0.5 tr(ZZ')
        if rate < _RATE_FLOOR:
            break
        axis = unskew(z.T)
        p = rodrigues_step(axis, mu)
        gp = float(objective.value(p @ x, t))
        q = p @ p
        gq = float(objective.value(q @ x, t))
        while gx - gq >= mu * rate and mu < _MU_MAX:   # doubled step still pays off
            p, gp = q, gq
            mu *= 2.0
            q = p @ p
            gq = float(objective.value(q @ x, t))
        collapsed = False
        while gx - gp < 0.5 * mu * rate:               # shrink to sufficient decrease
            mu *= 0.5
            if mu < _MU_MIN:
                collapsed = True
                break
            p = rodrigues_step(axis, mu)
            gp = float(objective.value(p @ x, t))
        if collapsed:
            break
        x_new = p @ x
        step = float(np.linalg.norm(x_new - x))
        x, gx = x_new, gp
        if inner % _REPROJECT_EVERY == 0:
            x = project_to_so3(x)
            gx = float(objective.value(x, t))
        if step < config.tol_rotation:
            break
    return x


def translation_subsolve(objective: PoseObjective, translation_init, rotation_fixed,
                         config: AmmConfig = AmmConfig()) -> np.ndarray:
    """Minimize over the translation at a fixed rotation.

    Barzilai-Borwein gradient descent seeded with ``config.initial_alpha``.
    Returns the last iterate that decreased the objective; a step that
    would increase it ends the descent, and a vanishing gradient change is
    treated as convergence.
    """
    r = np.asarray(rotation_fixed, dtype=float)
    x = np.asarray(translation_init, dtype=float)
    alpha = config.initial_alpha
    h = float(objective.value(r, x))
    g = np.asarray(objective.translation_gradient(r, x), dtype=float)
    for _ in range(_INNER_CAP):
        x_new = x - alpha * g
        h_new = float(objective.value(r, x_new))
        g_new = np.asarray(objective.translation_gradient(r, x_new), dtype=float)
        dg = g_new - g
        dg_norm = float(np.linalg.norm(dg))
        if dg_norm < _GRAD_DELTA_FLOOR:
            # gradient unchanged to machine precision: nothing left to exploit
            if h_new <= h:
                x = x_new
            return x
        alpha = float((x_new - x) @ dg) / (dg_norm * dg_norm)
        if h_new > h:
            return x
        delta = abs(h_new - h)
        x, h, g = x_new, h_new, g_new
        if delta < config.tol_translation:
            return x
    return x


def solve_amm(objective: PoseObjective, translation_init,
              config: AmmConfig = AmmConfig(), rotation_init=None) -> AmmResult:
    """Alternate the two block solvers until the objective stalls.

    The rotation is solved first at the initial translation, warm-started
    from ``rotation_init`` (identity when omitted) and thereafter from the
    previous outer iterate. Stops when the objective changes by less than
    ``config.tol_outer`` between outer iterations (converged) or at the
    iteration cap (not converged). Raises NonFiniteObjective if any
    evaluation returns NaN or infinity.
    """
    t = np.asarray(translation_init, dtype=float)
    r = np.eye(3) if rotation_init is None else np.asarray(rotation_init, dtype=float)
    f_prev = float(objective.value(r, t))
    if not np.isfinite(f_prev):
        raise NonFiniteObjective("objective is not finite at the initial guess")
    use_closed = config.use_closed_form_translation and hasattr(
        objective, "closed_form_translation")
    trace = []
    converged = False
    outer = 0
    f = f_prev
    for outer in range(1, config.max_outer_iters + 1):
        r = rotation_subsolve(objective, r, t, config)
        if use_closed:
            t_exact = objective.closed_form_translation(r)
            if objective.value(r, t_exact) <= objective.value(r, t):
                t = t_exact
        else:
            t = translation_subsolve(objective, t, r, config)
        f = float(objective.value(r, t))
        if not np.isfinite(f):
            raise NonFiniteObjective("objective became non-finite during the solve")
        trace.append(f)
        if abs(f - f_prev) < config.tol_outer:
            converged = True
            break
        f_prev = f
    return AmmResult(pose=Pose(project_to_so3(r), t),
                     final_objective=f,
                     outer_iterations=outer,
                     converged=converged,
                     objective_trace=tuple(trace))
