"""Guaranteed loop-closure detection for planar robot trajectories.

Given bounded-error velocity measurements, this package computes an outer
enclosure of every feasible loop pair (t1, t2) in the t-plane, and proves
loop existence (and, when the enclosed Jacobian is nonsingular, the exact
loop count) with the two-dimensional topological degree of the enclosed
displacement map.
"""

from .counting import IntervalJacobian, jacobian_inclusion, loops_number
from .intervals import EMPTY, Box2, Interval, det2
from .measurements import BodyFrameSample, body_to_world, euler_zyx, load_measurements
from .paving import Subpaving, TPlaneBox, cluster, sivia
from .pipeline import RunConfig, RunResult, run_detect
from .report import DetectionReport, export_results, load_tplane
from .synth import SyntheticMission, find_crossings, make_mission, synthesize
from .topology import (
    Contour,
    OrientedEdge,
    existence_test,
    extract_contour,
    refine_and_tag,
    tag_edge,
    topo_degree,
    winding_number,
)
from .tube import VelocitySamples, VelocityTube, build_tube

__version__ = "0.1.0"

__all__ = [
    "Interval", "Box2", "EMPTY", "det2",
    "VelocitySamples", "VelocityTube", "build_tube",
    "TPlaneBox", "Subpaving", "sivia", "cluster",
    "OrientedEdge", "Contour", "extract_contour", "tag_edge", "refine_and_tag",
    "topo_degree", "winding_number", "existence_test",
    "IntervalJacobian", "jacobian_inclusion", "loops_number",
    "BodyFrameSample", "euler_zyx", "body_to_world", "load_measurements",
    "SyntheticMission", "make_mission", "synthesize", "find_crossings",
    "DetectionReport", "export_results", "load_tplane",
    "RunConfig", "RunResult", "run_detect",
    "__version__",
]
