"""Shared helpers: deterministic random geometry and finite-difference oracles."""

import numpy as np
import pytest

from poseamm.geometry import rodrigues_step


def random_rotation(rng, max_angle=np.pi):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return rodrigues_step(axis, rng.uniform(0.0, max_angle))


def random_pose_arrays(rng, extent=2.0):
    return random_rotation(rng), rng.uniform(-extent, extent, size=3)


def fd_rotation_gradient(objective, rotation, translation, h=1e-6):
    """Central differences on each of the nine rotation entries."""
    g = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            rp = rotation.copy()
            rm = rotation.copy()
            rp[i, j] += h
            rm[i, j] -= h
            g[i, j] = (objective.value(rp, translation)
                       - objective.value(rm, translation)) / (2.0 * h)
    return g


def fd_translation_gradient(objective, rotation, translation, h=1e-6):
    g = np.zeros(3)
    for i in range(3):
        tp = np.array(translation, dtype=float)
        tm = np.array(translation, dtype=float)
        tp[i] += h
        tm[i] -= h
        g[i] = (objective.value(rotation, tp)
                - objective.value(rotation, tm)) / (2.0 * h)
    return g


def relative_gradient_error(analytic, numeric):
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    denom = max(float(np.linalg.norm(analytic)), float(np.linalg.norm(numeric)), 1e-12)
    return float(np.linalg.norm(analytic - numeric)) / denom


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
