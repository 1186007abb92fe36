"""Kinematic-tree data model: joints, links, state, and motion constraints.

A model always has a base body, link 0, whose joint is either ``fixed``
(zero dofs) or ``floating`` (six dofs); that one convention gives every
algorithm a single code path for fixed- and floating-base trees.  The
parent array is topologically ordered with ``parent[i] < i`` and
``parent[0] == -1`` standing for the world.

Configuration layout: one block per link in link order; revolute and
prismatic joints contribute one coordinate, a floating joint contributes
a unit quaternion (w, x, y, z) followed by a translation.  Velocity
blocks follow the same order with the floating block being the base's
spatial velocity in base coordinates (angular first).

Models are immutable after construction and safe to share across
threads; State is a plain value type.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import spatial
from .errors import DimensionMismatch
from .spatial import PlueckerTransform, SpatialInertia

GRAVITY_DEFAULT = (0.0, 0.0, -9.81)


@dataclass(frozen=True)
class Joint:
    """Joint connecting a link to its parent."""

    kind: str                      # revolute | prismatic | floating | fixed
    axis: np.ndarray | None = None

    def __post_init__(self):
        if self.kind in ("revolute", "prismatic"):
            a = np.asarray(self.axis, dtype=float)
            norm = np.linalg.norm(a)
            if abs(norm - 1.0) > 1e-12:
                a = a / norm
            object.__setattr__(self, "axis", a)
        elif self.kind in ("floating", "fixed"):
            object.__setattr__(self, "axis", None)
        else:
            raise ValueError(f"unknown joint kind {self.kind!r}")

    @staticmethod
    def revolute(axis) -> "Joint":
        return Joint("revolute", axis)

    @staticmethod
    def prismatic(axis) -> "Joint":
        return Joint("prismatic", axis)

    @staticmethod
    def floating() -> "Joint":
        return Joint("floating")

    @staticmethod
    def fixed() -> "Joint":
        return Joint("fixed")

    @property
    def nv(self) -> int:
        return {"revolute": 1, "prismatic": 1, "floating": 6, "fixed": 0}[self.kind]

    @property
    def nq(self) -> int:
        return {"revolute": 1, "prismatic": 1, "floating": 7, "fixed": 0}[self.kind]

    def motion_subspace(self) -> np.ndarray:
        """6 x nv matrix mapping joint velocities to link-frame twists."""
        if self.kind == "revolute":
            s = np.zeros((6, 1))
            s[:3, 0] = self.axis
            return s
        if self.kind == "prismatic":
            s = np.zeros((6, 1))
            s[3:, 0] = self.axis
            return s
        if self.kind == "floating":
            return np.eye(6)
        return np.zeros((6, 0))

    def transform(self, q_block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Joint coordinate transform (R, p), parent side to child side."""
        if self.kind == "revolute":
            return spatial.axis_angle_rotation(self.axis, float(q_block[0])).T, np.zeros(3)
        if self.kind == "prismatic":
            return np.eye(3), float(q_block[0]) * self.axis
        if self.kind == "floating":
            return spatial.quat_to_rotation(q_block[:4]).T, np.asarray(q_block[4:], dtype=float)
        return np.eye(3), np.zeros(3)


class Model:
    """Immutable kinematic tree: topology, joints, placements, inertias."""

    def __init__(self, parent, joints, placement, inertia,
                 gravity=GRAVITY_DEFAULT, names=None):
        self.parent = np.asarray(parent, dtype=int)
        self.joints = tuple(joints)
        self.placement = tuple(placement)
        self.inertia = tuple(inertia)
        self.gravity = np.asarray(gravity, dtype=float)
        self.n_links = len(self.joints)
        self.names = tuple(names) if names is not None else tuple(
            f"link{i}" for i in range(self.n_links))

        self.nv = sum(j.nv for j in self.joints)
        self.nq = sum(j.nq for j in self.joints)

        v_off, q_off = [], []
        iv = iq = 0
        for j in self.joints:
            v_off.append(iv)
            q_off.append(iq)
            iv += j.nv
            iq += j.nq
        self.v_offset = tuple(v_off)
        self.q_offset = tuple(q_off)

        self.S = tuple(j.motion_subspace() for j in self.joints)
        self.placement_rot = np.stack([x.rotation for x in self.placement])
        self.placement_trans = np.stack([x.translation for x in self.placement])
        self.inertia66 = np.stack([ine.to_matrix() for ine in self.inertia])

        children: list[list[int]] = [[] for _ in range(self.n_links)]
        depth = np.zeros(self.n_links, dtype=int)
        for i in range(1, self.n_links):
            children[self.parent[i]].append(i)
            depth[i] = depth[self.parent[i]] + 1
        self.children = tuple(tuple(c) for c in children)
        self.link_depth = depth
        self.depth = int(depth.max()) if self.n_links > 1 else 0

        # per-dof parent chain (previous dof of the same joint, else the
        # last dof of the nearest movable ancestor); drives the
        # branch-sparse factorization pattern
        dof_parent = np.full(self.nv, -1, dtype=int)
        dof_link = np.zeros(self.nv, dtype=int)
        last_dof = np.full(self.n_links, -1, dtype=int)
        for i in range(self.n_links):
            nv = self.joints[i].nv
            anc = self.parent[i]
            prev = last_dof[anc] if anc >= 0 else -1
            for k in range(nv):
                d = self.v_offset[i] + k
                dof_parent[d] = prev
                dof_link[d] = i
                prev = d
            last_dof[i] = prev if nv > 0 else (last_dof[anc] if anc >= 0 else -1)
        self.dof_parent = dof_parent
        self.dof_link = dof_link
        self._last_dof = last_dof

    @property
    def base_kind(self) -> str:
        return "floating" if self.joints[0].kind == "floating" else "fixed"

    def gravity6(self) -> np.ndarray:
        return np.concatenate((np.zeros(3), self.gravity))

    def v_block(self, i: int) -> slice:
        return slice(self.v_offset[i], self.v_offset[i] + self.joints[i].nv)

    def q_block(self, i: int) -> slice:
        return slice(self.q_offset[i], self.q_offset[i] + self.joints[i].nq)

    def ancestors(self, link: int) -> list[int]:
        """Ancestor links of `link`, nearest first, excluding the world."""
        out = []
        j = self.parent[link]
        while j >= 0:
            out.append(j)
            j = self.parent[j]
        return out

    def ancestor_dofs(self, link: int) -> np.ndarray:
        """All dofs on the path from `link` (inclusive) to the base, sorted."""
        dofs = []
        d = self._last_dof[link]
        while d >= 0:
            dofs.append(d)
            d = self.dof_parent[d]
        return np.array(sorted(dofs), dtype=int)

    def with_gravity(self, gravity) -> "Model":
        return Model(self.parent, self.joints, self.placement, self.inertia,
                     gravity, self.names)

    def validate(self) -> None:
        if self.parent[0] != -1:
            raise ValueError("link 0 must attach to the world")
        for i in range(1, self.n_links):
            if not 0 <= self.parent[i] < i:
                raise ValueError("parent array is not topologically ordered")
            if self.joints[i].kind == "floating":
                raise ValueError("floating joints are only allowed on link 0")
        for i, (x, ine) in enumerate(zip(self.placement, self.inertia)):
            x.validate()
            movable = i > 0 or self.base_kind == "floating"
            if movable:
                if ine.mass <= 0:
                    raise ValueError(f"link {i} has non-positive mass")
                eigs = np.linalg.eigvalsh(ine.to_matrix())
                if eigs.min() < 1e-12:
                    raise ValueError(f"link {i} inertia is not positive definite")


@dataclass(frozen=True)
class State:
    """Generalized position and velocity."""

    q: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))


def check_state(model: Model, state: State) -> None:
    if state.q.shape != (model.nq,) or state.v.shape != (model.nv,):
        raise DimensionMismatch(
            f"state dims {state.q.shape}/{state.v.shape} do not match "
            f"model nq={model.nq}, nv={model.nv}")


def neutral_state(model: Model) -> State:
    q = np.zeros(model.nq)
    for i, j in enumerate(model.joints):
        if j.kind == "floating":
            q[model.q_offset[i]] = 1.0  # identity quaternion
    return State(q, np.zeros(model.nv))


def random_state(model: Model, seed: int) -> State:
    rng = np.random.default_rng(seed)
    q = np.zeros(model.nq)
    for i, j in enumerate(model.joints):
        off = model.q_offset[i]
        if j.kind == "revolute":
            q[off] = rng.uniform(-np.pi, np.pi)
        elif j.kind == "prismatic":
            q[off] = rng.uniform(-0.5, 0.5)
        elif j.kind == "floating":
            quat = rng.standard_normal(4)
            q[off:off + 4] = quat / np.linalg.norm(quat)
            q[off + 4:off + 7] = rng.uniform(-1.0, 1.0, 3)
    v = rng.uniform(-1.0, 1.0, model.nv)
    return State(q, v)


@dataclass(frozen=True)
class MotionConstraint:
    """Acceleration-level equality constraint K a_link = a_star on one link.

    K rows are constrained spatial-acceleration directions in the link's
    own frame; rows need not be linearly independent (the proximal
    solver tolerates rank deficiency, the exact solvers refuse it).
    Optional Baumgarte gains and a pose anchor let the integrator damp
    position-level drift.
    """

    link: int
    K: np.ndarray
    a_star: np.ndarray
    baumgarte: tuple[float, float] | None = None
    anchor: PlueckerTransform | None = None

    def __post_init__(self):
        k = np.atleast_2d(np.asarray(self.K, dtype=float))
        a = np.atleast_1d(np.asarray(self.a_star, dtype=float))
        if k.shape[1] != 6 or not 1 <= k.shape[0] <= 6:
            raise ValueError("constraint matrix must be m_e x 6 with 1 <= m_e <= 6")
        if a.shape != (k.shape[0],):
            raise ValueError("a_star length must match constraint rows")
        object.__setattr__(self, "K", k)
        object.__setattr__(self, "a_star", a)

    @property
    def dim(self) -> int:
        return self.K.shape[0]


def point_constraint(link: int, point, a_star=None, baumgarte=None) -> MotionConstraint:
    """3-D constraint on the acceleration of a body point (link frame)."""
    k = np.hstack((-spatial.skew(np.asarray(point, dtype=float)), np.eye(3)))
    return MotionConstraint(link, k, np.zeros(3) if a_star is None else a_star,
                            baumgarte=baumgarte)


def weld_constraint(link: int, a_star=None, baumgarte=None) -> MotionConstraint:
    """Full 6-D constraint on a link's spatial acceleration."""
    return MotionConstraint(link, np.eye(6), np.zeros(6) if a_star is None else a_star,
                            baumgarte=baumgarte)


class ConstraintSet:
    """Ordered collection of motion constraints with a row-offset table."""

    def __init__(self, constraints=()):
        self.constraints = tuple(constraints)
        offsets = []
        m = 0
        for c in self.constraints:
            offsets.append(m)
            m += c.dim
        self.offsets = tuple(offsets)
        self.m = m

    @staticmethod
    def empty() -> "ConstraintSet":
        return ConstraintSet()

    def __len__(self) -> int:
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def rows(self, i: int) -> np.ndarray:
        """Global row indices of constraint i."""
        return np.arange(self.offsets[i], self.offsets[i] + self.constraints[i].dim)

    def stacked_targets(self) -> np.ndarray:
        if not self.constraints:
            return np.zeros(0)
        return np.concatenate([c.a_star for c in self.constraints])

    def by_link(self) -> dict[int, list[int]]:
        """Constraint indices grouped by constrained link."""
        out: dict[int, list[int]] = {}
        for i, c in enumerate(self.constraints):
            out.setdefault(c.link, []).append(i)
        return out

    def replace_targets(self, a_star: np.ndarray) -> "ConstraintSet":
        cs = []
        for i, c in enumerate(self.constraints):
            cs.append(replace(c, a_star=a_star[self.offsets[i]:self.offsets[i] + c.dim]))
        return ConstraintSet(cs)
