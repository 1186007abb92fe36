"""Forward kinematics, frame Jacobians, and constraint drift terms.

Everything is expressed in link-local frames.  The cache produced here
is the shared front end of all dynamics sweeps: joint transforms,
world transforms, link twists, velocity-product accelerations, and the
zero-gravity bias acceleration used to form constraint drift.

Cache construction is a pure function of (model, state); caches are
immutable once built and tied to the state they came from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import flops
from .model import ConstraintSet, Model, State, check_state
from .spatial import (PlueckerTransform, SpatialMotion, compose_rt, cross_m6,
                      xm6)


@dataclass
class KinematicsCache:
    """Per-link kinematic quantities for one (q, v)."""

    rot: np.ndarray        # (n,3,3) parent-to-link rotations
    trans: np.ndarray      # (n,3)   parent-to-link translations
    w_rot: np.ndarray      # (n,3,3) world-to-link rotations
    w_trans: np.ndarray    # (n,3)   world-to-link translations
    v: np.ndarray          # (n,6)   link twists, link frame
    c: np.ndarray          # (n,6)   velocity-product accelerations
    avp: np.ndarray        # (n,6)   zero-gravity acceleration at qdd = 0
    vj: np.ndarray         # (n,6)   joint-contributed twists

    def X_parent(self, i: int) -> PlueckerTransform:
        return PlueckerTransform(self.rot[i], self.trans[i])

    def X_world(self, i: int) -> PlueckerTransform:
        return PlueckerTransform(self.w_rot[i], self.w_trans[i])

    def v_link(self, i: int) -> SpatialMotion:
        return SpatialMotion.from_array(self.v[i])

    def c_bias(self, i: int) -> SpatialMotion:
        return SpatialMotion.from_array(self.c[i])


def forward_kinematics(model: Model, state: State) -> KinematicsCache:
    """Position and velocity recursion over the tree."""
    check_state(model, state)
    n = model.n_links
    rot = np.empty((n, 3, 3))
    trans = np.empty((n, 3))
    w_rot = np.empty((n, 3, 3))
    w_trans = np.empty((n, 3))
    v = np.zeros((n, 6))
    c = np.zeros((n, 6))
    avp = np.zeros((n, 6))
    vj = np.zeros((n, 6))
    work = 0
    for i in range(n):
        joint = model.joints[i]
        jr, jt = joint.transform(state.q[model.q_block(i)])
        rot[i], trans[i] = compose_rt(jr, jt, model.placement_rot[i],
                                      model.placement_trans[i])
        p = model.parent[i]
        if p < 0:
            w_rot[i], w_trans[i] = rot[i], trans[i]
        else:
            w_rot[i], w_trans[i] = compose_rt(rot[i], trans[i], w_rot[p], w_trans[p])
        nv = joint.nv
        if nv:
            vj[i] = model.S[i] @ state.v[model.v_block(i)]
        if p >= 0:
            v[i] = xm6(rot[i], trans[i], v[p]) + vj[i]
            c[i] = cross_m6(v[i], vj[i])
            avp[i] = xm6(rot[i], trans[i], avp[p]) + c[i]
        else:
            v[i] = vj[i]
            # base c = v x vj vanishes for both fixed and floating bases
        work += flops.AXIS_ANGLE + 2 * flops.COMPOSE + 2 * flops.XMOT \
            + flops.CROSS_M + 6 * nv + 2 * flops.ADD6
    flops.add(work)
    return KinematicsCache(rot, trans, w_rot, w_trans, v, c, avp, vj)


def link_jacobian(model: Model, cache: KinematicsCache, link: int) -> np.ndarray:
    """Local-frame geometric Jacobian of a link: J v = link twist."""
    jac = np.zeros((6, model.nv))
    work = 0
    i = link
    r = np.eye(3)
    t = np.zeros(3)
    first = True
    while i >= 0:
        nv = model.joints[i].nv
        if nv:
            cols = model.S[i] if first else xm6(r, t, model.S[i])
            jac[:, model.v_block(i)] = cols
            work += flops.XMOT * nv
        # walk one level up: prepend the parent-to-i transform
        r, t = compose_rt(r, t, cache.rot[i], cache.trans[i])
        work += flops.COMPOSE
        first = False
        i = model.parent[i]
    flops.add(work)
    return jac


def constraint_jacobian(model: Model, cache: KinematicsCache,
                        cs: ConstraintSet) -> np.ndarray:
    """Stacked m x n Jacobian of a constraint set (dense, oracle-facing)."""
    jac = np.zeros((cs.m, model.nv))
    for idx, con in enumerate(cs):
        rows = cs.rows(idx)
        jac[rows] = con.K @ link_jacobian(model, cache, con.link)
        flops.add(flops.gemm(con.dim, 6, model.nv))
    return jac


def constraint_drift(model: Model, cache: KinematicsCache,
                     cs: ConstraintSet) -> np.ndarray:
    """Acceleration-level drift: the constraint reads J qdd = a_star - drift.

    Equals each constrained link's zero-gravity, zero-qdd spatial
    acceleration projected through its constraint rows; independent of
    the gravity setting by construction.
    """
    gamma = np.zeros(cs.m)
    for idx, con in enumerate(cs):
        gamma[cs.rows(idx)] = con.K @ cache.avp[con.link]
        flops.add(flops.gemm(con.dim, 6, 1))
    return gamma
