"""6-D spatial vector algebra for kinematic-tree dynamics.

Conventions, fixed once and used everywhere:

* components are ordered angular-then-linear;
* a coordinate transform X = (R, p) maps a point expressed in the
  source frame A to the target frame B via ``x_B = R (x_A - p)``, i.e.
  R is the A-to-B rotation and p is the origin of B written in A;
* the motion transform of X is the 6x6 block matrix
  ``[[R, 0], [-R.skew(p), R]]`` and the force transform is its inverse
  transpose ``[[R, -R.skew(p)], [0, R]]``, so power v.f is invariant;
* transforms are stored as (rotation, translation) pairs; 6x6 forms are
  materialized only inside inertia congruences.

All scalars are double precision.  Every value type here is immutable;
instances can be shared freely between threads.

The module keeps two layers: small frozen dataclasses for the public
algebra, and array kernels (``xm6``, ``xf6``, ``xft6``, ``xi6`` ...)
that the recursive sweeps use on raw ndarrays.  Both layers share the
same formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(v) @ w == cross(v, w)."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def axis_angle_rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rotation matrix turning vectors by `angle` about unit `axis`."""
    c = math.cos(angle)
    s = math.sin(angle)
    a = np.asarray(axis, dtype=float)
    k = skew(a)
    return c * np.eye(3) + s * k + (1.0 - c) * np.outer(a, a)


def rpy_rotation(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """Fixed-axis roll/pitch/yaw rotation R = Rz(yaw) Ry(pitch) Rx(roll)."""
    rx = axis_angle_rotation(np.array([1.0, 0, 0]), roll)
    ry = axis_angle_rotation(np.array([0, 1.0, 0]), pitch)
    rz = axis_angle_rotation(np.array([0, 0, 1.0]), yaw)
    return rz @ ry @ rx


def rotation_to_rpy(r: np.ndarray) -> tuple[float, float, float]:
    """Inverse of :func:`rpy_rotation` (pitch taken in (-pi/2, pi/2))."""
    pitch = math.atan2(-r[2, 0], math.hypot(r[0, 0], r[1, 0]))
    roll = math.atan2(r[2, 1], r[2, 2])
    yaw = math.atan2(r[1, 0], r[0, 0])
    return roll, pitch, yaw


def quat_to_rotation(q: np.ndarray) -> np.ndarray:
    """Rotation matrix of a unit quaternion (w, x, y, z)."""
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_exp(omega_dt: np.ndarray) -> np.ndarray:
    """Unit quaternion of the rotation vector omega*dt."""
    theta = float(np.linalg.norm(omega_dt))
    if theta < 1e-12:
        q = np.array([1.0, 0.5 * omega_dt[0], 0.5 * omega_dt[1], 0.5 * omega_dt[2]])
        return q / np.linalg.norm(q)
    axis = omega_dt / theta
    half = 0.5 * theta
    return np.concatenate(([math.cos(half)], math.sin(half) * axis))


# ---------------------------------------------------------------------------
# array kernels used by the recursive sweeps


def xm6(rot: np.ndarray, trans: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Motion transform of a 6-vector (or 6xk block) into the target frame."""
    ang = v[:3]
    lin = v[3:]
    if v.ndim == 1:
        return np.concatenate((rot @ ang, rot @ (lin - np.cross(trans, ang))))
    return np.vstack((rot @ ang, rot @ (lin - np.cross(trans, ang.T).T)))


def xf6(rot: np.ndarray, trans: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Force transform of a 6-vector into the target frame."""
    n = f[:3]
    lin = f[3:]
    if f.ndim == 1:
        return np.concatenate((rot @ (n - np.cross(trans, lin)), rot @ lin))
    return np.vstack((rot @ (n - np.cross(trans, lin.T).T), rot @ lin))


def xft6(rot: np.ndarray, trans: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Transposed motion transform applied to a force (child-to-parent push)."""
    n = f[:3]
    lin = f[3:]
    if f.ndim == 1:
        fl = rot.T @ lin
        return np.concatenate((rot.T @ n + np.cross(trans, fl), fl))
    fl = rot.T @ lin
    return np.vstack((rot.T @ n + np.cross(trans, fl.T).T, fl))


def motion_matrix(rot: np.ndarray, trans: np.ndarray) -> np.ndarray:
    x = np.zeros((6, 6))
    x[:3, :3] = rot
    x[3:, 3:] = rot
    x[3:, :3] = -rot @ skew(trans)
    return x


def force_matrix(rot: np.ndarray, trans: np.ndarray) -> np.ndarray:
    x = np.zeros((6, 6))
    x[:3, :3] = rot
    x[3:, 3:] = rot
    x[:3, 3:] = -rot @ skew(trans)
    return x


def xi6(rot: np.ndarray, trans: np.ndarray, inertia: np.ndarray) -> np.ndarray:
    """Congruence X' I X of a 6x6 inertia, mapping it target-to-source frame."""
    x = motion_matrix(rot, trans)
    out = x.T @ inertia @ x
    return 0.5 * (out + out.T)


def cross_m6(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Spatial cross product of two motion vectors."""
    vw = v[:3]
    return np.concatenate((
        np.cross(vw, w[:3]),
        np.cross(vw, w[3:]) + np.cross(v[3:], w[:3]),
    ))


def cross_f6(v: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Dual spatial cross product of a motion with a force."""
    return np.concatenate((
        np.cross(v[:3], f[:3]) + np.cross(v[3:], f[3:]),
        np.cross(v[:3], f[3:]),
    ))


def compose_rt(r1: np.ndarray, p1: np.ndarray, r2: np.ndarray, p2: np.ndarray):
    """Compose raw (R, p) pairs: apply (r2, p2) first, then (r1, p1)."""
    return r1 @ r2, p2 + r2.T @ p1


def inertia_matrix(mass: float, h: np.ndarray, rot_inertia: np.ndarray) -> np.ndarray:
    """6x6 inertia from mass, first moment h = m*com, inertia about origin."""
    m = np.zeros((6, 6))
    m[:3, :3] = rot_inertia
    hs = skew(h)
    m[:3, 3:] = hs
    m[3:, :3] = hs.T
    m[3:, 3:] = mass * np.eye(3)
    return m


# ---------------------------------------------------------------------------
# value types


def _vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValueError("expected a 3-vector")
    return a


@dataclass(frozen=True)
class SpatialMotion:
    """Spatial velocity or acceleration: (angular; linear) in a stated frame."""

    angular: np.ndarray
    linear: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "angular", _vec3(self.angular))
        object.__setattr__(self, "linear", _vec3(self.linear))

    @staticmethod
    def zero() -> "SpatialMotion":
        return SpatialMotion(np.zeros(3), np.zeros(3))

    @staticmethod
    def from_array(a: np.ndarray) -> "SpatialMotion":
        return SpatialMotion(a[:3], a[3:])

    def as_array(self) -> np.ndarray:
        return np.concatenate((self.angular, self.linear))


@dataclass(frozen=True)
class SpatialForce:
    """Spatial force: (torque; force) in a stated frame."""

    torque: np.ndarray
    force: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "torque", _vec3(self.torque))
        object.__setattr__(self, "force", _vec3(self.force))

    @staticmethod
    def zero() -> "SpatialForce":
        return SpatialForce(np.zeros(3), np.zeros(3))

    @staticmethod
    def from_array(a: np.ndarray) -> "SpatialForce":
        return SpatialForce(a[:3], a[3:])

    def as_array(self) -> np.ndarray:
        return np.concatenate((self.torque, self.force))

    def dot(self, v: SpatialMotion) -> float:
        """Power pairing; invariant under matched transforms."""
        return float(self.torque @ v.angular + self.force @ v.linear)


@dataclass(frozen=True)
class PlueckerTransform:
    """Coordinate transform between two frames, stored as (R, p)."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float))
        object.__setattr__(self, "translation", _vec3(self.translation))

    @staticmethod
    def identity() -> "PlueckerTransform":
        return PlueckerTransform(np.eye(3), np.zeros(3))

    def motion_matrix(self) -> np.ndarray:
        return motion_matrix(self.rotation, self.translation)

    def force_matrix(self) -> np.ndarray:
        return force_matrix(self.rotation, self.translation)

    def validate(self, tol: float = 1e-12) -> None:
        r = self.rotation
        if not np.allclose(r.T @ r, np.eye(3), atol=tol):
            raise ValueError("rotation is not orthonormal")
        if abs(np.linalg.det(r) - 1.0) > tol:
            raise ValueError("rotation determinant is not +1")


def compose(x1: PlueckerTransform, x2: PlueckerTransform) -> PlueckerTransform:
    """Transform applying x2 first, then x1."""
    r, p = compose_rt(x1.rotation, x1.translation, x2.rotation, x2.translation)
    return PlueckerTransform(r, p)


def inverse(x: PlueckerTransform) -> PlueckerTransform:
    return PlueckerTransform(x.rotation.T, -(x.rotation @ x.translation))


@dataclass(frozen=True)
class SpatialInertia:
    """Rigid-body inertia: mass, first moment m*com, and rotational inertia
    about the frame origin."""

    mass: float
    first_moment: np.ndarray
    rot_inertia: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mass", float(self.mass))
        object.__setattr__(self, "first_moment", _vec3(self.first_moment))
        object.__setattr__(self, "rot_inertia", np.asarray(self.rot_inertia, dtype=float))

    @staticmethod
    def from_com(mass: float, com, inertia_about_com) -> "SpatialInertia":
        c = _vec3(com)
        icom = np.asarray(inertia_about_com, dtype=float)
        io = icom + mass * (float(c @ c) * np.eye(3) - np.outer(c, c))
        return SpatialInertia(mass, mass * c, io)

    @property
    def com(self) -> np.ndarray:
        return self.first_moment / self.mass if self.mass > 0 else np.zeros(3)

    def inertia_about_com(self) -> np.ndarray:
        c = self.com
        return self.rot_inertia - self.mass * (float(c @ c) * np.eye(3) - np.outer(c, c))

    def to_matrix(self) -> np.ndarray:
        return inertia_matrix(self.mass, self.first_moment, self.rot_inertia)


@dataclass(frozen=True)
class ArticulatedInertia:
    """Dense symmetric 6x6 apparent inertia of an articulated subtree."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))

    @staticmethod
    def zero() -> "ArticulatedInertia":
        return ArticulatedInertia(np.zeros((6, 6)))

    @staticmethod
    def of(inertia: SpatialInertia) -> "ArticulatedInertia":
        return ArticulatedInertia(inertia.to_matrix())


# ---------------------------------------------------------------------------
# typed operations (thin wrappers over the kernels)


def transform_motion(x: PlueckerTransform, v: SpatialMotion) -> SpatialMotion:
    return SpatialMotion.from_array(xm6(x.rotation, x.translation, v.as_array()))


def transform_force(x: PlueckerTransform, f: SpatialForce) -> SpatialForce:
    return SpatialForce.from_array(xf6(x.rotation, x.translation, f.as_array()))


def motion_cross_motion(v: SpatialMotion, w: SpatialMotion) -> SpatialMotion:
    return SpatialMotion.from_array(cross_m6(v.as_array(), w.as_array()))


def motion_cross_force(v: SpatialMotion, f: SpatialForce) -> SpatialForce:
    return SpatialForce.from_array(cross_f6(v.as_array(), f.as_array()))


def apply_inertia(inertia, v: SpatialMotion) -> SpatialForce:
    if isinstance(inertia, SpatialInertia):
        m = inertia.to_matrix()
    else:
        m = inertia.matrix
    return SpatialForce.from_array(m @ v.as_array())


def transform_inertia(x: PlueckerTransform, inertia) -> ArticulatedInertia:
    """Congruence X' I X: re-expresses an inertia given in the transform's
    target frame in its source frame (the parent-side accumulation step)."""
    if isinstance(inertia, SpatialInertia):
        m = inertia.to_matrix()
    else:
        m = inertia.matrix
    return ArticulatedInertia(xi6(x.rotation, x.translation, m))
