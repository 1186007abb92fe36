import numpy as np
import pytest

from pvdyn import (ConstraintSet, Joint, MotionConstraint, generate_chain,
                   generate_humanoid_like, generate_tree, neutral_state,
                   point_constraint, random_state)


class TestJoint:
    def test_dimensions(self):
        assert (Joint.revolute([0, 0, 1]).nv, Joint.revolute([0, 0, 1]).nq) == (1, 1)
        assert (Joint.prismatic([1, 0, 0]).nv, Joint.prismatic([1, 0, 0]).nq) == (1, 1)
        assert (Joint.floating().nv, Joint.floating().nq) == (6, 7)
        assert (Joint.fixed().nv, Joint.fixed().nq) == (0, 0)

    def test_axis_normalized(self):
        j = Joint.revolute([0, 0, 2.0])
        assert abs(np.linalg.norm(j.axis) - 1.0) <= 1e-12

    def test_motion_subspace_orthonormal(self):
        for j in (Joint.revolute([0, 1, 0]), Joint.prismatic([1, 0, 0]),
                  Joint.floating()):
            s = j.motion_subspace()
            np.testing.assert_allclose(s.T @ s, np.eye(j.nv), atol=1e-12)


class TestChain:
    def test_pendulum(self):
        m = generate_chain(1)
        assert m.nv == 1 and m.depth == 1 and m.base_kind == "fixed"
        m.validate()

    def test_long_chain(self):
        m = generate_chain(100)
        assert m.nv == 100 and m.depth == 100

    def test_deterministic(self):
        a, b = generate_chain(5), generate_chain(5)
        np.testing.assert_array_equal(a.placement_trans, b.placement_trans)
        np.testing.assert_array_equal(a.inertia66, b.inertia66)

    def test_prismatic(self):
        m = generate_chain(4, "prismatic")
        assert all(j.kind == "prismatic" for j in m.joints[1:])
        m.validate()


class TestTree:
    def test_depth_bounded(self):
        m = generate_tree(63, 2, seed=5)
        assert m.nv == 63
        assert m.depth <= 8

    def test_seed_determinism(self):
        a = generate_tree(20, 3, seed=9)
        b = generate_tree(20, 3, seed=9)
        np.testing.assert_array_equal(a.parent, b.parent)
        np.testing.assert_array_equal(a.placement_trans, b.placement_trans)

    def test_floating_variant(self):
        m = generate_tree(10, 2, seed=1, base_kind="floating")
        assert m.base_kind == "floating"
        assert m.nv == 16
        m.validate()


class TestHumanoid:
    def test_dof_count(self):
        m = generate_humanoid_like()
        assert m.base_kind == "floating"
        assert m.nv == 38
        assert m.n_links == 33  # pelvis + 32 revolute links
        m.validate()

    def test_branch_structure(self):
        m = generate_humanoid_like()
        assert len(m.children[0]) == 3  # two legs and the spine
        assert m.depth == 11            # pelvis -> spine -> arm tip


class TestState:
    def test_neutral_quaternion_identity(self, humanoid):
        s = neutral_state(humanoid)
        np.testing.assert_array_equal(s.q[:4], [1.0, 0.0, 0.0, 0.0])
        np.testing.assert_array_equal(s.v, np.zeros(humanoid.nv))

    def test_random_quaternion_unit(self, humanoid):
        s = random_state(humanoid, 3)
        assert abs(np.linalg.norm(s.q[:4]) - 1.0) <= 1e-12

    def test_random_deterministic(self, humanoid):
        a = random_state(humanoid, 7)
        b = random_state(humanoid, 7)
        np.testing.assert_array_equal(a.q, b.q)
        np.testing.assert_array_equal(a.v, b.v)

    def test_random_ranges(self, chain8):
        s = random_state(chain8, 11)
        assert np.all(np.abs(s.q) <= np.pi)
        assert np.all(np.abs(s.v) <= 1.0)


class TestConstraints:
    def test_offsets(self):
        cs = ConstraintSet([point_constraint(2, [0.1, 0, 0]),
                            MotionConstraint(1, np.eye(6), np.zeros(6))])
        assert cs.m == 9
        assert cs.offsets == (0, 3)
        np.testing.assert_array_equal(cs.rows(1), np.arange(3, 9))

    def test_row_dim_validation(self):
        with pytest.raises(ValueError):
            MotionConstraint(0, np.zeros((7, 6)), np.zeros(7))
        with pytest.raises(ValueError):
            MotionConstraint(0, np.zeros((2, 5)), np.zeros(2))

    def test_empty(self):
        cs = ConstraintSet.empty()
        assert cs.m == 0 and len(cs) == 0


def test_model_validation_catches_bad_mass():
    m = generate_chain(2)
    from pvdyn import Model, SpatialInertia
    bad = Model(m.parent, m.joints, m.placement,
                (m.inertia[0], m.inertia[1],
                 SpatialInertia(-1.0, np.zeros(3), np.eye(3))))
    with pytest.raises(ValueError):
        bad.validate()


def test_ancestor_dofs(chain8):
    dofs = chain8.ancestor_dofs(5)
    np.testing.assert_array_equal(dofs, np.arange(5))


def test_depth_state_invariant(chain8):
    assert chain8.depth == 8
    # depth is structural; no state enters its computation
    assert generate_chain(8).depth == chain8.depth
