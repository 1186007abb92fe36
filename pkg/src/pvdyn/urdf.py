"""URDF-subset parser and serializer.

Supported elements: robot / link / joint with inertial (mass, com,
inertia tensor), joint types revolute, continuous, prismatic, fixed and
floating, plus origin (xyz, rpy) and axis.  Visual, collision and limit
elements are ignored.  Mimic joints, transmissions and loop closures
are out of scope.

Floating bases are written as a massless root link attached to its
child by a single joint of type ``floating``; the root link then acts
as the world anchor and the child becomes the base body.  A fixed-base
file uses its root link as the base body directly; if that root lacks
an <inertial> element it is given a unit placeholder inertia, which
cannot influence the dynamics of a fixed base.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from . import spatial
from .errors import (KinematicLoop, MalformedXml, MissingInertial,
                     UnsupportedJointType)
from .model import Joint, Model
from .spatial import PlueckerTransform, SpatialInertia

_SUPPORTED = {"revolute", "continuous", "prismatic", "fixed", "floating"}


def _floats(text: str | None, n: int, default=0.0) -> np.ndarray:
    if text is None:
        return np.full(n, default)
    vals = [float(t) for t in text.split()]
    if len(vals) != n:
        raise MalformedXml(f"expected {n} numbers, got {text!r}")
    return np.array(vals)


def _origin(elem) -> tuple[np.ndarray, np.ndarray]:
    """(xyz, rpy) of an optional <origin> child."""
    o = elem.find("origin")
    if o is None:
        return np.zeros(3), np.zeros(3)
    return _floats(o.get("xyz"), 3), _floats(o.get("rpy"), 3)


def _placement(xyz: np.ndarray, rpy: np.ndarray) -> PlueckerTransform:
    r_active = spatial.rpy_rotation(*rpy)
    return PlueckerTransform(r_active.T, xyz)


def _inertial(link_elem) -> SpatialInertia | None:
    ine = link_elem.find("inertial")
    if ine is None:
        return None
    mass_elem = ine.find("mass")
    if mass_elem is None:
        raise MissingInertial(f"link {link_elem.get('name')!r} inertial has no mass")
    mass = float(mass_elem.get("value"))
    xyz, rpy = _origin(ine)
    tensor = ine.find("inertia")
    if tensor is None:
        raise MissingInertial(f"link {link_elem.get('name')!r} inertial has no tensor")
    ixx = float(tensor.get("ixx", 0))
    iyy = float(tensor.get("iyy", 0))
    izz = float(tensor.get("izz", 0))
    ixy = float(tensor.get("ixy", 0))
    ixz = float(tensor.get("ixz", 0))
    iyz = float(tensor.get("iyz", 0))
    icom = np.array([[ixx, ixy, ixz], [ixy, iyy, iyz], [ixz, iyz, izz]])
    r = spatial.rpy_rotation(*rpy)
    return SpatialInertia.from_com(mass, xyz, r @ icom @ r.T)


def parse_urdf_subset(text: str) -> Model:
    """Parse a robot description into a topologically ordered Model."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from None
    if root.tag != "robot":
        raise MalformedXml("top-level element must be <robot>")

    link_elems = {e.get("name"): e for e in root.findall("link")}
    if not link_elems:
        raise MalformedXml("robot has no links")

    joint_of_child: dict[str, ET.Element] = {}
    for j in root.findall("joint"):
        kind = j.get("type")
        if kind not in _SUPPORTED:
            raise UnsupportedJointType(f"joint type {kind!r} is not supported")
        child_elem = j.find("child")
        parent_elem = j.find("parent")
        if child_elem is None or parent_elem is None:
            raise MalformedXml(f"joint {j.get('name')!r} lacks parent or child")
        child = child_elem.get("link")
        for name in (child, parent_elem.get("link")):
            if name not in link_elems:
                raise MalformedXml(f"joint {j.get('name')!r} references unknown link {name!r}")
        if child in joint_of_child:
            raise KinematicLoop(f"link {child!r} has two parent joints")
        joint_of_child[child] = j

    roots = [name for name in link_elems if name not in joint_of_child]
    if len(roots) != 1:
        raise KinematicLoop(f"joint graph is not a tree ({len(roots)} roots)")
    root_name = roots[0]

    children: dict[str, list[str]] = {name: [] for name in link_elems}
    for child, j in joint_of_child.items():
        children[j.find("parent").get("link")].append(child)

    floating = [j for j in joint_of_child.values() if j.get("type") == "floating"]
    if len(floating) > 1:
        raise UnsupportedJointType("at most one floating joint is supported")
    if floating:
        j = floating[0]
        if j.find("parent").get("link") != root_name:
            raise UnsupportedJointType("a floating joint must attach to the root link")
        if len(children[root_name]) != 1:
            raise KinematicLoop("the floating-base anchor must have exactly one child")

    # breadth-first order from the base body
    if floating:
        base_name = floating[0].find("child").get("link")
        base_joint = Joint.floating()
        xyz, rpy = _origin(floating[0])
        base_placement = _placement(xyz, rpy)
    else:
        base_name = root_name
        base_joint = Joint.fixed()
        base_placement = PlueckerTransform.identity()

    # stable topological order following the document's joint order, so
    # serialization round-trips to identical field order
    order = [base_name]
    placed = {base_name}
    if floating:
        placed.add(root_name)
    remaining = [j for j in joint_of_child.values() if j.get("type") != "floating"]
    while remaining:
        progressed = False
        for j in list(remaining):
            if j.find("parent").get("link") in placed:
                child = j.find("child").get("link")
                order.append(child)
                placed.add(child)
                remaining.remove(j)
                progressed = True
        if not progressed:
            raise KinematicLoop("some links are unreachable from the root")
    expected = len(link_elems) - (1 if floating else 0)
    if len(order) != expected:
        raise KinematicLoop("some links are unreachable from the root")

    index = {name: i for i, name in enumerate(order)}
    parent, joints, placements, inertias = [], [], [], []
    for i, name in enumerate(order):
        ine = _inertial(link_elems[name])
        if i == 0:
            parent.append(-1)
            joints.append(base_joint)
            placements.append(base_placement)
            if ine is None:
                if floating:
                    raise MissingInertial(f"floating base link {name!r} needs inertia")
                ine = SpatialInertia.from_com(1.0, np.zeros(3), 1e-3 * np.eye(3))
            inertias.append(ine)
            continue
        j = joint_of_child[name]
        kind = j.get("type")
        if kind == "floating":
            raise UnsupportedJointType("floating joints are only allowed at the root")
        parent.append(index[j.find("parent").get("link")])
        if kind == "fixed":
            joints.append(Joint.fixed())
        else:
            axis_elem = j.find("axis")
            axis = _floats(axis_elem.get("xyz"), 3) if axis_elem is not None \
                else np.array([1.0, 0.0, 0.0])
            if kind in ("revolute", "continuous"):
                joints.append(Joint.revolute(axis))
            else:
                joints.append(Joint.prismatic(axis))
        xyz, rpy = _origin(j)
        placements.append(_placement(xyz, rpy))
        if ine is None:
            raise MissingInertial(f"link {name!r} has no inertial element")
        inertias.append(ine)

    model = Model(parent, joints, placements, inertias, names=order)
    model.validate()
    return model


def load_urdf(path: str) -> Model:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_urdf_subset(fh.read())


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in np.atleast_1d(values))


def serialize_urdf(model: Model, name: str = "robot") -> str:
    """Emit the same URDF subset the parser reads; round-trips exactly."""
    lines = [f'<robot name="{name}">']
    floating = model.base_kind == "floating"
    if floating:
        lines.append('  <link name="world"/>')

    def link_block(i: int):
        ine = model.inertia[i]
        com = ine.com
        icom = ine.inertia_about_com()
        lines.append(f'  <link name="{model.names[i]}">')
        lines.append('    <inertial>')
        lines.append(f'      <origin xyz="{_fmt(com)}" rpy="0 0 0"/>')
        lines.append(f'      <mass value="{repr(float(ine.mass))}"/>')
        lines.append(
            f'      <inertia ixx="{repr(float(icom[0, 0]))}" ixy="{repr(float(icom[0, 1]))}"'
            f' ixz="{repr(float(icom[0, 2]))}" iyy="{repr(float(icom[1, 1]))}"'
            f' iyz="{repr(float(icom[1, 2]))}" izz="{repr(float(icom[2, 2]))}"/>')
        lines.append('    </inertial>')
        lines.append('  </link>')

    def joint_block(i: int, kind: str, parent_name: str):
        x = model.placement[i]
        rpy = spatial.rotation_to_rpy(x.rotation.T)
        lines.append(f'  <joint name="joint_{model.names[i]}" type="{kind}">')
        lines.append(f'    <parent link="{parent_name}"/>')
        lines.append(f'    <child link="{model.names[i]}"/>')
        lines.append(f'    <origin xyz="{_fmt(x.translation)}" rpy="{_fmt(rpy)}"/>')
        joint = model.joints[i]
        if joint.axis is not None:
            lines.append(f'    <axis xyz="{_fmt(joint.axis)}"/>')
        lines.append('  </joint>')

    for i in range(model.n_links):
        link_block(i)
    if floating:
        joint_block(0, "floating", "world")
    for i in range(1, model.n_links):
        joint_block(i, model.joints[i].kind, model.names[model.parent[i]])
    lines.append('</robot>')
    return "\n".join(lines) + "\n"
