"""Absolute pose objectives from 3D-point-to-ray correspondences.

Both objectives reduce to the same fixed-size quadratic form, by different
routes:

  * point-to-ray distance: the residual is the component of
    R x + t - c orthogonal to the bearing, i.e. (I - vv')(R x + t - c);
  * depth-eliminated ray residual: per-ray depths are solved jointly in
    least squares from the stacked constraints alpha_i v_i + c_i = R p_i + t
    and substituted back, leaving eta_i = alpha_i v_i + c_i - R p_i - t.

World points are mapped into the camera frame by x_cam = R x_world + t.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import EmptyData, RankDeficientSystem
from .geometry import ObservedRay
from .objectives import QuadraticPoseForm

_RANK_TOL = 1e-10  # on the smallest eigenvalue of the stacked normal matrix


@dataclass(frozen=True)
class PointRayCorrespondence:
    """A world point paired with the camera ray observing it."""

    point: np.ndarray
    ray: ObservedRay

    def __post_init__(self):
        p = np.asarray(self.point, dtype=float)
        if p.shape != (3,) or not np.isfinite(p).all():
            raise ValueError("point must be a finite 3-vector")
        object.__setattr__(self, "point", p)


def gpnp_residual(corr: PointRayCorrespondence, rotation, translation) -> np.ndarray:
    """Component of R x + t - c orthogonal to the bearing.

    Its norm is the distance from the transformed point to the ray's
    supporting line.
    """
    v = corr.ray.bearing
    y = np.asarray(rotation, dtype=float) @ corr.point \
        + np.asarray(translation, dtype=float) - corr.ray.offset
    return y - v * (v @ y)


def build_gpnp_form(corrs: Sequence[PointRayCorrespondence]) -> QuadraticPoseForm:
    """Fold the summed squared point-to-ray distances into a quadratic form.

    With Q = (I - vv')'(I - vv') per correspondence (a projector for unit
    bearings), expanding sum ||(I - vv')(R x + t - c)||^2 in r = vec(R) and
    t gives the six coefficient blocks accumulated here. Fewer than three
    correspondences leave the pose underdetermined; the form is still
    built but flagged not well posed.
    """
    if len(corrs) == 0:
        raise EmptyData("no point-ray correspondences")
    m_rr = np.zeros((9, 9))
    v_r = np.zeros(9)
    m_tr = np.zeros((3, 9))
    m_tt = np.zeros((3, 3))
    v_t = np.zeros(3)
    const = 0.0
    eye = np.eye(3)
    for corr in corrs:
        v = corr.ray.bearing
        x = corr.point
        c = corr.ray.offset
        proj = eye - np.outer(v, v) / float(v @ v)
        q = proj.T @ proj
        kq = np.kron(x, q)                  # (3, 9): x' kron Q
        m_rr += kq.T @ kq
        v_r += -2.0 * np.kron(x, c @ q)     # (x' kron c'Q)'
        m_tr += 2.0 * kq
        m_tt += q
        v_t += -2.0 * (q @ c)
        const += float(c @ q @ c)
    return QuadraticPoseForm(m_rr=0.5 * (m_rr + m_rr.T), v_r=v_r, m_tr=m_tr,
                             m_tt=0.5 * (m_tt + m_tt.T), v_t=v_t, c=const,
                             well_posed=len(corrs) >= 3)


@dataclass(frozen=True)
class UpnpFactorization:
    """Depth rows of the stacked system's left pseudo-inverse.

    The stacked constraints are A [alpha; t] = rhs with A holding one
    bearing column per depth and -I blocks for the translation.
    ``u_blocks[i, j]`` is the 3-vector slice of row i of
    U = top N rows of (A'A)^{-1} A' that multiplies residual block j, so
    U @ A = [I | 0] up to rounding. Rows of U sum to zero across blocks,
    which is what makes the recovered depths independent of t.
    """

    u_blocks: np.ndarray  # (n, n, 3)

    def __post_init__(self):
        u = np.asarray(self.u_blocks, dtype=float)
        if u.ndim != 3 or u.shape[0] != u.shape[1] or u.shape[2] != 3:
            raise ValueError(f"u_blocks must be (n, n, 3), got {u.shape}")
        object.__setattr__(self, "u_blocks", u)

    @property
    def u(self) -> np.ndarray:
        """U as an (n, 3n) matrix."""
        n = self.u_blocks.shape[0]
        return self.u_blocks.reshape(n, 3 * n)


def _depth_system_min_eigenvalue(bearings: np.ndarray) -> float:
    # A'A is arrow-shaped: unit diagonal over depths, bordered by the
    # bearing strip, N*I corner. Its spectrum is {1} plus, per eigenvalue
    # beta of B'B, the roots of (1 - lam)(N - lam) = beta; only the small
    # roots can dip toward zero, so the minimum is available in O(N).
    n = bearings.shape[0]
    beta = np.linalg.eigvalsh(bearings.T @ bearings)
    half = 0.5 * (n + 1.0)
    disc = np.maximum(half * half - (n - beta), 0.0)
    small_roots = half - np.sqrt(disc)
    return min(1.0, float(small_roots.min()))


def build_upnp_factorization(corrs: Sequence[PointRayCorrespondence]) -> UpnpFactorization:
    """Pseudo-inverse depth rows for the stacked depth/translation system.

    Exploits the arrow structure of A'A (diagonal depth block bordered by
    a three-column strip) so the build is O(N) assembly plus O(N^2) block
    products rather than a dense 3N factorization. Raises
    RankDeficientSystem for degenerate ray geometry, e.g. all bearings
    parallel from a single center.
    """
    if len(corrs) == 0:
        raise EmptyData("no point-ray correspondences")
    bearings = np.stack([corr.ray.bearing for corr in corrs])
    n = len(corrs)
    if _depth_system_min_eigenvalue(bearings) < _RANK_TOL:
        raise RankDeficientSystem(
            "stacked depth system lost column rank (degenerate ray geometry)")
    schur = n * np.eye(3) - bearings.T @ bearings
    w = bearings @ np.linalg.inv(schur)             # rows v_i' S^{-1}
    gram = w @ bearings.T                           # v_i' S^{-1} v_j
    u_blocks = (np.eye(n) + gram)[:, :, None] * bearings[None, :, :] - w[:, None, :]
    return UpnpFactorization(u_blocks)


def upnp_depth(fact: UpnpFactorization, corrs: Sequence[PointRayCorrespondence],
               index: int, rotation, translation) -> float:
    """Joint least-squares depth of ray ``index`` at the given pose.

    The translation cancels exactly because each row of U sums to zero
    across blocks; it is accepted (and folded in) so callers can observe
    that invariance rather than trust it.
    """
    rotation = np.asarray(rotation, dtype=float)
    translation = np.asarray(translation, dtype=float)
    points = np.stack([corr.point for corr in corrs])
    offsets = np.stack([corr.ray.offset for corr in corrs])
    rhs = points @ rotation.T + translation - offsets
    return float(np.sum(fact.u_blocks[index] * rhs))


def build_upnp_form(corrs: Sequence[PointRayCorrespondence]) -> QuadraticPoseForm:
    """Fold the depth-eliminated residuals into a quadratic form.

    With G_i = sum_j v_i (p_j' kron u_ij') - (p_i' kron I) and
    d_i = c_i - (sum_j u_ij . c_j) v_i, the residual is
    eta_i = G_i r + d_i - t and the blocks below accumulate
    sum ||eta_i||^2.
    """
    fact = build_upnp_factorization(corrs)
    n = len(corrs)
    bearings = np.stack([corr.ray.bearing for corr in corrs])
    points = np.stack([corr.point for corr in corrs])
    offsets = np.stack([corr.ray.offset for corr in corrs])
    # T[i] = sum_j p_j' kron u_ij', laid out so T[i] @ vec(R) = sum_j u_ij . (R p_j)
    t_rows = np.einsum("ja,ijb->iab", points, fact.u_blocks).reshape(n, 9)
    g_mats = bearings[:, :, None] * t_rows[:, None, :]
    g_mats -= np.einsum("ia,bc->ibac", points, np.eye(3)).reshape(n, 3, 9)
    depth_of_offsets = np.einsum("ijb,jb->i", fact.u_blocks, offsets)
    d_vecs = offsets - depth_of_offsets[:, None] * bearings
    m_rr = np.einsum("iab,iac->bc", g_mats, g_mats)
    v_r = 2.0 * np.einsum("iab,ia->b", g_mats, d_vecs)
    m_tr = -2.0 * g_mats.sum(axis=0)
    m_tt = float(n) * np.eye(3)
    v_t = -2.0 * d_vecs.sum(axis=0)
    const = float(np.sum(d_vecs * d_vecs))
    return QuadraticPoseForm(m_rr=0.5 * (m_rr + m_rr.T), v_r=v_r, m_tr=m_tr,
                             m_tt=m_tt, v_t=v_t, c=const,
                             well_posed=len(corrs) >= 3)
