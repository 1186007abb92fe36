import numpy as np
import pytest

from pvdyn import (ConstraintSet, SolverSettings, generate_chain,
                   generate_humanoid_like, generate_tree, neutral_state,
                   point_constraint, random_state, weld_constraint)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def pendulum():
    """Single revolute-z link, mass 1, com at 0.5 m, gravity along -y."""
    return generate_chain(1).with_gravity([0.0, -9.81, 0.0])


@pytest.fixture
def chain8():
    return generate_chain(8)


@pytest.fixture
def humanoid():
    return generate_humanoid_like()


def random_transform(rng):
    from pvdyn import PlueckerTransform
    from pvdyn.spatial import axis_angle_rotation
    axis = rng.standard_normal(3)
    axis /= np.linalg.norm(axis)
    return PlueckerTransform(axis_angle_rotation(axis, rng.uniform(-3, 3)),
                             rng.standard_normal(3))


def random_motion(rng):
    from pvdyn import SpatialMotion
    return SpatialMotion(rng.standard_normal(3), rng.standard_normal(3))


def random_force(rng):
    from pvdyn import SpatialForce
    return SpatialForce(rng.standard_normal(3), rng.standard_normal(3))
