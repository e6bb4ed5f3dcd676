"""Relative pose from ray-to-ray correspondences.

Two projection rays, one per camera frame, intersect exactly when
l1' [[E, R], [R, 0]] l2 = 0 with E = skew(t) R, where l1, l2 are the
Plücker 6-vectors and (R, t) maps frame-2 coordinates into frame 1.
Expanding the bilinear form per correspondence gives a coefficient
18-vector a_i against the stacked variable v = [vec(E); vec(R)];
accumulating M = sum_i a_i a_i' turns the summed squared constraint into
the single quadric v'Mv, evaluable in time independent of the number of
correspondences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import EmptyData
from .geometry import PlueckerLine, kron, skew, unvec, vec
from .objectives import PoseObjective


@dataclass(frozen=True)
class RayCorrespondence:
    """A matched pair of projection rays, one per camera frame."""

    line1: PlueckerLine
    line2: PlueckerLine


def build_gec_vector(corr: RayCorrespondence) -> np.ndarray:
    """Coefficient 18-vector a with a @ v = l1' [[E,R],[R,0]] l2.

    Built from the 36-entry Kronecker row (l2' kron l1') indexing the
    stacked 6x6 block matrix: nine entries multiply vec(E), two groups of
    nine both multiply vec(R) and are summed, and the nine that multiply
    the zero block are dropped.
    """
    k = kron(corr.line2.as_vector(), corr.line1.as_vector())
    a = np.empty(18)
    a[0:3] = k[0:3]
    a[3:6] = k[6:9]
    a[6:9] = k[12:15]
    a[9:12] = k[3:6] + k[18:21]
    a[12:15] = k[9:12] + k[24:27]
    a[15:18] = k[15:18] + k[30:33]
    return a


@dataclass(frozen=True)
class GecForm(PoseObjective):
    """Accumulated 18x18 quadric of the generalized epipolar objective."""

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.shape != (18, 18):
            raise ValueError(f"quadric must be 18x18, got {m.shape}")
        if not np.isfinite(m).all():
            raise ValueError("quadric entries must be finite")
        scale = max(1.0, float(np.linalg.norm(m)))
        if np.linalg.norm(m - m.T) > 1e-10 * scale:
            raise ValueError("quadric must be symmetric")
        if float(np.linalg.eigvalsh(m).min()) < -1e-10 * scale:
            raise ValueError("quadric must be positive semidefinite")
        object.__setattr__(self, "m", m)

    def stacked_variable(self, rotation, translation) -> np.ndarray:
        """v = [vec(skew(t) R); vec(R)]."""
        rotation = np.asarray(rotation, dtype=float)
        e = skew(translation) @ rotation
        return np.concatenate([vec(e), vec(rotation)])

    def value(self, rotation, translation) -> float:
        v = self.stacked_variable(rotation, translation)
        return float(v @ (self.m @ v))

    def rotation_gradient(self, rotation, translation) -> np.ndarray:
        # dv'/dr = [blockdiag(-t^, -t^, -t^) | blockdiag(I, I, I)]; applying a
        # block-diagonal to a 9-vector is a 3x3 product on its unvec'd form.
        v = self.stacked_variable(rotation, translation)
        mv = self.m @ v
        th = skew(translation)
        flat = 2.0 * (vec(-th @ unvec(mv[:9])) + mv[9:])
        return unvec(flat)

    def rotation_gradient_flat(self, rotation, translation) -> np.ndarray:
        return vec(self.rotation_gradient(rotation, translation))

    def translation_gradient(self, rotation, translation) -> np.ndarray:
        # dv'/dt = [skew(r_1) skew(r_2) skew(r_3) | 0] over R's columns.
        rotation = np.asarray(rotation, dtype=float)
        v = self.stacked_variable(rotation, translation)
        mv = self.m @ v
        return 2.0 * (skew(rotation[:, 0]) @ mv[0:3]
                      + skew(rotation[:, 1]) @ mv[3:6]
                      + skew(rotation[:, 2]) @ mv[6:9])


def build_gec_form(corrs: Sequence[RayCorrespondence]) -> GecForm:
    """Accumulate M = sum_i a_i a_i' over the correspondences."""
    if len(corrs) == 0:
        raise EmptyData("no ray correspondences")
    m = np.zeros((18, 18))
    for corr in corrs:
        a = build_gec_vector(corr)
        m += np.outer(a, a)
    return GecForm(m)
