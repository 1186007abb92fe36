import numpy as np
import pytest

from pvdyn import generate_humanoid_like, generate_tree, parse_urdf_subset, serialize_urdf
from pvdyn.errors import (KinematicLoop, MalformedXml, MissingInertial,
                          UnsupportedJointType)

PENDULUM = """
<robot name="pendulum">
  <link name="base"/>
  <link name="arm">
    <inertial>
      <origin xyz="0.5 0 0"/>
      <mass value="1.0"/>
      <inertia ixx="0.01" iyy="0.01" izz="0.01" ixy="0" ixz="0" iyz="0"/>
    </inertial>
  </link>
  <joint name="shoulder" type="revolute">
    <parent link="base"/>
    <child link="arm"/>
    <origin xyz="0 0 0" rpy="0 0 0"/>
    <axis xyz="0 0 1"/>
  </joint>
</robot>
"""

LINK_TMPL = """  <link name="{name}">
    <inertial>
      <origin xyz="0 0 -0.1"/>
      <mass value="1.0"/>
      <inertia ixx="0.01" iyy="0.01" izz="0.01" ixy="0" ixz="0" iyz="0"/>
    </inertial>
  </link>
"""

JOINT_TMPL = """  <joint name="j_{child}" type="revolute">
    <parent link="{parent}"/>
    <child link="{child}"/>
    <origin xyz="{xyz}" rpy="0 0 0"/>
    <axis xyz="{axis}"/>
  </joint>
"""


def quadruped_urdf() -> str:
    """Floating trunk with four 3-joint legs (12 actuated dofs)."""
    parts = ['<robot name="quadruped">', '  <link name="world"/>']
    parts.append(LINK_TMPL.format(name="trunk"))
    parts.append("""  <joint name="root" type="floating">
    <parent link="world"/>
    <child link="trunk"/>
    <origin xyz="0 0 0" rpy="0 0 0"/>
  </joint>
""")
    for leg, (x, y) in enumerate([(0.3, 0.2), (0.3, -0.2), (-0.3, 0.2), (-0.3, -0.2)]):
        names = [f"leg{leg}_hip", f"leg{leg}_upper", f"leg{leg}_lower"]
        parents = ["trunk"] + names[:2]
        offsets = [f"{x} {y} 0", "0 0 -0.2", "0 0 -0.2"]
        axes = ["1 0 0", "0 1 0", "0 1 0"]
        for name, parent, xyz, axis in zip(names, parents, offsets, axes):
            parts.append(LINK_TMPL.format(name=name))
            parts.append(JOINT_TMPL.format(child=name, parent=parent, xyz=xyz, axis=axis))
    parts.append("</robot>")
    return "\n".join(parts)


class TestParse:
    def test_pendulum(self):
        m = parse_urdf_subset(PENDULUM)
        assert m.nv == 1
        assert m.depth == 1
        assert m.names[1] == "arm"
        assert m.inertia[1].mass == 1.0
        np.testing.assert_allclose(m.inertia[1].com, [0.5, 0, 0])

    def test_quadruped_floating(self):
        m = parse_urdf_subset(quadruped_urdf())
        assert m.base_kind == "floating"
        assert m.nv == 18  # 12 revolute + 6 floating
        assert m.n_links == 13
        assert m.depth == 3

    def test_kinematic_loop(self):
        text = PENDULUM.replace(
            "</robot>",
            """  <joint name="dup" type="revolute">
    <parent link="base"/><child link="arm"/><axis xyz="0 0 1"/>
  </joint>
</robot>""")
        with pytest.raises(KinematicLoop):
            parse_urdf_subset(text)

    def test_unsupported_joint_type(self):
        text = PENDULUM.replace('type="revolute"', 'type="planar"')
        with pytest.raises(UnsupportedJointType) as exc:
            parse_urdf_subset(text)
        assert "planar" in str(exc.value)

    def test_missing_inertial(self):
        text = PENDULUM.replace("<inertial>", "<ignored>").replace(
            "</inertial>", "</ignored>")
        with pytest.raises(MissingInertial):
            parse_urdf_subset(text)

    def test_malformed_xml(self):
        with pytest.raises(MalformedXml):
            parse_urdf_subset("<robot><link name='x'>")

    def test_continuous_maps_to_revolute(self):
        m = parse_urdf_subset(PENDULUM.replace('type="revolute"', 'type="continuous"'))
        assert m.joints[1].kind == "revolute"

    def test_root_without_inertial_gets_placeholder(self):
        m = parse_urdf_subset(PENDULUM)
        assert m.inertia[0].mass > 0


class TestRoundtrip:
    @pytest.mark.parametrize("make", [
        lambda: generate_tree(14, 2, seed=3),
        lambda: generate_tree(9, 3, seed=8, base_kind="floating"),
        lambda: generate_humanoid_like(),
        lambda: __import__("pvdyn").generate_chain(3, "prismatic"),
    ])
    def test_serialize_parse_identical(self, make):
        model = make()
        text = serialize_urdf(model)
        back = parse_urdf_subset(text)
        assert back.nv == model.nv
        assert back.base_kind == model.base_kind
        np.testing.assert_array_equal(back.parent, model.parent)
        for i in range(model.n_links):
            np.testing.assert_allclose(back.placement_rot[i],
                                       model.placement_rot[i], atol=1e-12)
            np.testing.assert_allclose(back.placement_trans[i],
                                       model.placement_trans[i], atol=1e-12)
            np.testing.assert_allclose(back.inertia66[i], model.inertia66[i],
                                       atol=1e-12)
            assert back.joints[i].kind == model.joints[i].kind

    def test_parsed_passes_validation(self):
        parse_urdf_subset(quadruped_urdf()).validate()
