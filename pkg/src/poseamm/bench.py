"""Synthetic benchmark: scene generation, pixel-noise model, error metrics
and the noise-sweep driver.

Scene scale matters when reading absolute error magnitudes: bearing noise
is Gaussian in pixels at the configured focal length (default 800 px),
world points sit 4-8 scene units out, non-central camera offsets span
+-0.5 units, translations +-2 units and rotation angles up to pi/2. All
randomness flows from the configured seed; every trial draws from its own
generator seeded by (seed, noise level index, trial index), so sweeps are
reproducible regardless of execution order or worker count.
"""

from __future__ import annotations

import dataclasses
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .absolute import PointRayCorrespondence, build_gpnp_form, build_upnp_form
from .amm import AmmConfig, AmmResult, solve_amm
from .exceptions import PoseSolverError
from .geometry import ObservedRay, PlueckerLine, Pose, rodrigues_step
from .initializers import init_absolute_linear, init_identity, init_relative_17pt
from .relative import RayCorrespondence, build_gec_form

RIG_CENTRAL = "central"
RIG_NON_CENTRAL = "non_central"

PROBLEM_ABSOLUTE = "absolute"
PROBLEM_RELATIVE = "relative"

SOLVER_GEC = "amm-gec"
SOLVER_GPNP = "amm-gpnp"
SOLVER_UPNP = "amm-upnp"
RELATIVE_SOLVERS = (SOLVER_GEC,)
ABSOLUTE_SOLVERS = (SOLVER_GPNP, SOLVER_UPNP)

INIT_LINEAR = "linear"
INIT_IDENTITY = "identity"

THREADS_ENV = "POSEAMM_THREADS"

# Relative scenes reject points closer than this to the second camera
# center; a point on top of a camera makes its observed direction
# meaningless.
_MIN_CAMERA_DISTANCE = 1.0

_TRACE_SLACK = 1e-12


@dataclass(frozen=True)
class SceneConfig:
    """Knobs of the synthetic scene generator."""

    num_correspondences: int = 20
    noise_sigma_px: float = 0.0
    focal_px: float = 800.0
    rig: str = RIG_NON_CENTRAL
    rig_extent: float = 0.5
    point_depth_range: tuple = (4.0, 8.0)
    rotation_max_angle: float = math.pi / 2
    translation_extent: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.num_correspondences < 1:
            raise ValueError("num_correspondences must be at least 1")
        if self.noise_sigma_px < 0 or self.focal_px <= 0:
            raise ValueError("noise sigma must be >= 0 and focal length > 0")
        if self.rig not in (RIG_CENTRAL, RIG_NON_CENTRAL):
            raise ValueError(f"unknown rig kind {self.rig!r}")
        lo, hi = self.point_depth_range
        if not (0 < lo <= hi):
            raise ValueError("point_depth_range must be positive and ordered")
        if self.rig_extent < 0 or self.translation_extent < 0:
            raise ValueError("extents must be nonnegative")
        if not 0 <= self.rotation_max_angle <= math.pi:
            raise ValueError("rotation_max_angle must lie in [0, pi]")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class TrialRecord:
    """One solver run on one generated scene."""

    noise_sigma: float
    trial_index: int
    solver_name: str
    rot_err_frobenius: float
    trans_err_norm: float
    wall_time_ns: int
    outer_iterations: int
    final_objective: float
    converged: bool


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _random_unit(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.normal(size=3)
        n = float(np.linalg.norm(v))
        if n > 1e-12:
            return v / n


def random_pose(rng: np.random.Generator, config: SceneConfig) -> Pose:
    """Rotation axis uniform on the sphere, angle and translation uniform."""
    axis = _random_unit(rng)
    angle = rng.uniform(0.0, config.rotation_max_angle)
    ext = config.translation_extent
    return Pose(rodrigues_step(axis, angle), rng.uniform(-ext, ext, size=3))


def apply_pixel_noise(bearing, sigma_px: float, focal_px: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Perturb a unit bearing by Gaussian pixel noise in its tangent plane.

    Independent offsets with standard deviation ``sigma_px`` are applied
    to the two tangent coordinates scaled at distance ``focal_px``, then
    the result is renormalized; per-axis angular deviation is therefore
    sigma_px / focal_px radians. Zero sigma returns the input unchanged.
    """
    b = np.asarray(bearing, dtype=float)
    if sigma_px == 0.0:
        return b
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(b)))] = 1.0
    e1 = _unit(np.cross(b, helper))
    e2 = np.cross(b, e1)
    dx, dy = rng.normal(0.0, sigma_px, size=2)
    return _unit(b + (dx * e1 + dy * e2) / focal_px)


def _camera_offset(rng: np.random.Generator, config: SceneConfig) -> np.ndarray:
    if config.rig == RIG_CENTRAL:
        return np.zeros(3)
    return rng.uniform(-config.rig_extent, config.rig_extent, size=3)


def generate_absolute_scene(config: SceneConfig,
                            rng: Optional[np.random.Generator] = None):
    """-> (ground truth pose, point-ray correspondences).

    World points are placed on exact camera rays at uniform depths, then
    observed bearings are perturbed by the pixel-noise model, so at zero
    noise every residual vanishes at the ground truth.
    """
    rng = np.random.default_rng(config.seed) if rng is None else rng
    truth = random_pose(rng, config)
    corrs = []
    for _ in range(config.num_correspondences):
        offset = _camera_offset(rng, config)
        bearing = _random_unit(rng)
        depth = rng.uniform(*config.point_depth_range)
        cam_point = offset + depth * bearing
        world_point = truth.rotation.T @ (cam_point - truth.translation)
        noisy = apply_pixel_noise(bearing, config.noise_sigma_px,
                                  config.focal_px, rng)
        corrs.append(PointRayCorrespondence(world_point, ObservedRay(noisy, offset)))
    return truth, corrs


def generate_relative_scene(config: SceneConfig,
                            rng: Optional[np.random.Generator] = None):
    """-> (ground truth pose, ray correspondences).

    A 3D point is placed on a ray of camera 1, re-observed from camera 2
    (frame-2 coordinates x2 = R'(x1 - t)), and both rays are returned as
    Plücker lines in their own frames. Points landing within one unit of
    the second camera center are resampled. Non-central offsets fill a
    full 3D cube, which keeps the rig away from the aligned-stereo
    degeneracy.
    """
    rng = np.random.default_rng(config.seed) if rng is None else rng
    truth = random_pose(rng, config)
    corrs = []
    for _ in range(config.num_correspondences):
        while True:
            offset1 = _camera_offset(rng, config)
            dir1 = _random_unit(rng)
            depth = rng.uniform(*config.point_depth_range)
            point1 = offset1 + depth * dir1
            point2 = truth.rotation.T @ (point1 - truth.translation)
            offset2 = _camera_offset(rng, config)
            if np.linalg.norm(point2 - offset2) >= _MIN_CAMERA_DISTANCE:
                break
        dir2 = _unit(point2 - offset2)
        dir1 = apply_pixel_noise(dir1, config.noise_sigma_px, config.focal_px, rng)
        dir2 = apply_pixel_noise(dir2, config.noise_sigma_px, config.focal_px, rng)
        corrs.append(RayCorrespondence(
            PlueckerLine(dir1, np.cross(offset1, dir1)),
            PlueckerLine(dir2, np.cross(offset2, dir2))))
    return truth, corrs


def pose_errors(truth: Pose, estimate: Pose):
    """-> (Frobenius rotation error, translation error norm)."""
    rot_err = float(np.linalg.norm(truth.rotation - estimate.rotation))
    trans_err = float(np.linalg.norm(truth.translation - estimate.translation))
    return rot_err, trans_err


def mean_records(records: Sequence[TrialRecord]) -> list:
    """Per (noise level, solver) means, marked with trial index -1.

    Rows keep the TrialRecord schema: times and iteration counts are
    rounded to integers, converged means every trial of the group
    converged.
    """
    order = []
    groups = {}
    for record in records:
        key = (record.noise_sigma, record.solver_name)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(record)
    means = []
    for noise_sigma, solver_name in order:
        group = groups[(noise_sigma, solver_name)]
        n = len(group)
        means.append(TrialRecord(
            noise_sigma=noise_sigma,
            trial_index=-1,
            solver_name=solver_name,
            rot_err_frobenius=sum(r.rot_err_frobenius for r in group) / n,
            trans_err_norm=sum(r.trans_err_norm for r in group) / n,
            wall_time_ns=int(sum(r.wall_time_ns for r in group) // n),
            outer_iterations=int(round(sum(r.outer_iterations for r in group) / n)),
            final_objective=sum(r.final_objective for r in group) / n,
            converged=all(r.converged for r in group),
        ))
    return means


def build_objective(solver: str, corrs):
    """The objective a named solver minimizes over the given correspondences."""
    if solver == SOLVER_GEC:
        return build_gec_form(corrs)
    if solver == SOLVER_GPNP:
        return build_gpnp_form(corrs)
    if solver == SOLVER_UPNP:
        return build_upnp_form(corrs)
    raise ValueError(f"unknown solver {solver!r}")


def initial_pose(solver: str, init: str, corrs, objective) -> Pose:
    """The seed pose a named solver starts from under the given init policy."""
    if init == INIT_IDENTITY:
        return init_identity()
    if init != INIT_LINEAR:
        raise ValueError(f"unknown initializer {init!r}")
    if solver == SOLVER_GEC:
        return init_relative_17pt(corrs)
    return init_absolute_linear(objective)


def _check_trace(result: AmmResult) -> None:
    trace = result.objective_trace
    for prev, cur in zip(trace, trace[1:]):
        if cur > prev + _TRACE_SLACK:
            raise RuntimeError(
                f"objective trace increased from {prev!r} to {cur!r}")


def _run_trial(task, base_config: SceneConfig, problem: str, solvers,
               init: str, amm_config: AmmConfig, measure_time: bool):
    level_index, sigma, trial = task
    config = dataclasses.replace(base_config, noise_sigma_px=sigma)
    rng = np.random.default_rng([base_config.seed, level_index, trial])
    if problem == PROBLEM_RELATIVE:
        truth, corrs = generate_relative_scene(config, rng)
    else:
        truth, corrs = generate_absolute_scene(config, rng)
    records = []
    for solver in solvers:
        start = time.perf_counter_ns() if measure_time else 0
        try:
            objective = build_objective(solver, corrs)
            pose0 = initial_pose(solver, init, corrs, objective)
            result = solve_amm(objective, pose0.translation, amm_config,
                               rotation_init=pose0.rotation)
            elapsed = time.perf_counter_ns() - start if measure_time else 0
            _check_trace(result)
            rot_err, trans_err = pose_errors(truth, result.pose)
            records.append(TrialRecord(
                noise_sigma=sigma, trial_index=trial, solver_name=solver,
                rot_err_frobenius=rot_err, trans_err_norm=trans_err,
                wall_time_ns=elapsed, outer_iterations=result.outer_iterations,
                final_objective=result.final_objective,
                converged=result.converged))
        except PoseSolverError:
            elapsed = time.perf_counter_ns() - start if measure_time else 0
            records.append(TrialRecord(
                noise_sigma=sigma, trial_index=trial, solver_name=solver,
                rot_err_frobenius=math.inf, trans_err_norm=math.inf,
                wall_time_ns=elapsed, outer_iterations=0,
                final_objective=math.inf, converged=False))
    return records


def _worker_count(max_workers: Optional[int]) -> int:
    if max_workers is not None:
        return max(1, int(max_workers))
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return 1
    n = int(env)
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be nonnegative")
    return (os.cpu_count() or 1) if n == 0 else n


def run_sweep(base_config: SceneConfig, problem: str, noise_levels: Sequence[float],
              trials: int, solvers: Optional[Sequence[str]] = None,
              init: str = INIT_LINEAR, amm_config: Optional[AmmConfig] = None,
              measure_time: bool = True,
              max_workers: Optional[int] = None) -> list:
    """One TrialRecord per (noise level, trial, solver).

    Every solver sees the same scene within a trial. Timing wraps the
    initializer plus the solve, never scene generation; pass
    ``measure_time=False`` to record zeros instead, which makes repeated
    sweeps byte-identical. Solver failures become non-converged records
    with infinite errors; they never abort the sweep. Worker processes:
    ``max_workers`` if given, else the POSEAMM_THREADS environment
    variable (0 = all cores), else serial.
    """
    if problem not in (PROBLEM_ABSOLUTE, PROBLEM_RELATIVE):
        raise ValueError(f"unknown problem kind {problem!r}")
    if solvers is None:
        solvers = RELATIVE_SOLVERS if problem == PROBLEM_RELATIVE else ABSOLUTE_SOLVERS
    allowed = RELATIVE_SOLVERS if problem == PROBLEM_RELATIVE else ABSOLUTE_SOLVERS
    for solver in solvers:
        if solver not in allowed:
            raise ValueError(f"solver {solver!r} does not apply to {problem} problems")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    amm_config = AmmConfig() if amm_config is None else amm_config
    tasks = [(level_index, float(sigma), trial)
             for level_index, sigma in enumerate(noise_levels)
             for trial in range(trials)]
    workers = _worker_count(max_workers)
    run_one = _TrialRunner(base_config, problem, tuple(solvers), init,
                           amm_config, measure_time)
    if workers > 1 and len(tasks) >= 4:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            grouped = list(pool.map(run_one, tasks, chunksize=chunk))
    else:
        grouped = [run_one(task) for task in tasks]
    return [record for group in grouped for record in group]


class _TrialRunner:
    """Picklable closure over the sweep parameters."""

    def __init__(self, base_config, problem, solvers, init, amm_config, measure_time):
        self.base_config = base_config
        self.problem = problem
        self.solvers = solvers
        self.init = init
        self.amm_config = amm_config
        self.measure_time = measure_time

    def __call__(self, task):
        return _run_trial(task, self.base_config, self.problem, self.solvers,
                          self.init, self.amm_config, self.measure_time)
