"""Boundary contours of detection sets and the 2D topological degree.

The existence proof works entirely on the boundary of a detection set: if
the displacement enclosure excludes zero on every boundary edge, the
degree of the unknown displacement map over the set is well defined and
computable from the edge enclosures alone.  A nonzero degree proves that
every map compatible with the measurements (the true one included)
vanishes somewhere inside, i.e. the robot provably performed a loop there.

The degree is computed by walking the oriented boundary and counting sign
transitions between tagged edges: each edge is tagged (c, s) meaning
component c of the displacement enclosure keeps the constant sign s along
it.  Edges whose enclosure straddles zero in both components are bisected
until taggable or until the refinement budget runs out, in which case the
test reports "cannot conclude" rather than guessing.

The boundary of a box union is extracted as closed axis-aligned cycles
with the set interior kept on the left: the outer cycle comes out
counter-clockwise and hole cycles clockwise, which is the orientation the
degree sum expects.  ``winding_number`` provides an independent check: it
estimates the same integer by accumulating the rotation of a point-valued
field sampled densely along the contour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .intervals import Box2, Interval
from .paving import Subpaving

__all__ = [
    "OrientedEdge",
    "Contour",
    "extract_contour",
    "tag_edge",
    "refine_and_tag",
    "topo_degree",
    "winding_number",
    "existence_test",
    "PartialSubpavingError",
    "UntaggedContourError",
    "OracleError",
]

InclusionMap = Callable[[Interval, Interval], Box2]
PointField = Callable[[np.ndarray], np.ndarray]

TAG_X_POS = (1, +1)
TAG_Y_POS = (2, +1)


class PartialSubpavingError(ValueError):
    """Detection set touches the domain border: boundary not closed in domain."""


class UntaggedContourError(ValueError):
    """Degree requested on a contour with untagged edges."""


class OracleError(RuntimeError):
    """Winding oracle cannot certify an integer at any attempted resolution."""


@dataclass(frozen=True, slots=True)
class OrientedEdge:
    """Degenerate axis-aligned box with a travel direction and optional tag."""

    start: tuple[float, float]
    end: tuple[float, float]
    tag: tuple[int, int] | None = None

    @property
    def direction(self) -> tuple[int, int]:
        dx = self.end[0] - self.start[0]
        dy = self.end[1] - self.start[1]
        if dx:
            return (1 if dx > 0 else -1, 0)
        return (0, 1 if dy > 0 else -1)

    @property
    def spans(self) -> tuple[Interval, Interval]:
        (x0, y0), (x1, y1) = self.start, self.end
        return (
            Interval(min(x0, x1), max(x0, x1)),
            Interval(min(y0, y1), max(y0, y1)),
        )

    def reversed(self) -> "OrientedEdge":
        return OrientedEdge(self.end, self.start, self.tag)


@dataclass
class Contour:
    """Closed oriented boundary cycles of one detection set."""

    cycles: list[list[OrientedEdge]]

    def edges(self):
        for cyc in self.cycles:
            yield from cyc

    @property
    def fully_tagged(self) -> bool:
        return all(e.tag is not None for e in self.edges())

    def reversed(self) -> "Contour":
        return Contour([[e.reversed() for e in reversed(cyc)] for cyc in self.cycles])


def cycle_signed_area(cycle: list[OrientedEdge]) -> float:
    """Shoelace area; positive for counter-clockwise cycles."""
    area = 0.0
    for e in cycle:
        (x0, y0), (x1, y1) = e.start, e.end
        area += x0 * y1 - x1 * y0
    return 0.5 * area


def _subtract_covered(lo: float, hi: float, covered: list[tuple[float, float]]):
    """Parts of [lo, hi] not covered by the given sub-intervals."""
    pieces = []
    cur = lo
    for a, b in sorted(covered):
        if a > cur:
            pieces.append((cur, min(a, hi)))
        cur = max(cur, b)
        if cur >= hi:
            break
    if cur < hi:
        pieces.append((cur, hi))
    return [(a, b) for a, b in pieces if b > a]


def _boundary_edges(sp: Subpaving) -> list[OrientedEdge]:
    boxes = sp.boxes
    by_x_lo: dict[float, list[int]] = {}
    by_x_hi: dict[float, list[int]] = {}
    by_y_lo: dict[float, list[int]] = {}
    by_y_hi: dict[float, list[int]] = {}
    for i, b in enumerate(boxes):
        by_x_lo.setdefault(b.t1.lo, []).append(i)
        by_x_hi.setdefault(b.t1.hi, []).append(i)
        by_y_lo.setdefault(b.t2.lo, []).append(i)
        by_y_hi.setdefault(b.t2.hi, []).append(i)

    edges: list[OrientedEdge] = []
    for b in boxes:
        x_lo, x_hi = b.t1.lo, b.t1.hi
        y_lo, y_hi = b.t2.lo, b.t2.hi

        # bottom, travelled +x (interior above)
        covered = [
            (max(x_lo, boxes[j].t1.lo), min(x_hi, boxes[j].t1.hi))
            for j in by_y_hi.get(y_lo, ())
            if min(x_hi, boxes[j].t1.hi) - max(x_lo, boxes[j].t1.lo) > 0
        ]
        for a, c in _subtract_covered(x_lo, x_hi, covered):
            edges.append(OrientedEdge((a, y_lo), (c, y_lo)))

        # top, travelled -x
        covered = [
            (max(x_lo, boxes[j].t1.lo), min(x_hi, boxes[j].t1.hi))
            for j in by_y_lo.get(y_hi, ())
            if min(x_hi, boxes[j].t1.hi) - max(x_lo, boxes[j].t1.lo) > 0
        ]
        for a, c in _subtract_covered(x_lo, x_hi, covered):
            edges.append(OrientedEdge((c, y_hi), (a, y_hi)))

        # left, travelled -y
        covered = [
            (max(y_lo, boxes[j].t2.lo), min(y_hi, boxes[j].t2.hi))
            for j in by_x_hi.get(x_lo, ())
            if min(y_hi, boxes[j].t2.hi) - max(y_lo, boxes[j].t2.lo) > 0
        ]
        for a, c in _subtract_covered(y_lo, y_hi, covered):
            edges.append(OrientedEdge((x_lo, c), (x_lo, a)))

        # right, travelled +y
        covered = [
            (max(y_lo, boxes[j].t2.lo), min(y_hi, boxes[j].t2.hi))
            for j in by_x_lo.get(x_hi, ())
            if min(y_hi, boxes[j].t2.hi) - max(y_lo, boxes[j].t2.lo) > 0
        ]
        for a, c in _subtract_covered(y_lo, y_hi, covered):
            edges.append(OrientedEdge((x_hi, a), (x_hi, c)))

    return edges


_LEFT = {(1, 0): (0, 1), (0, 1): (-1, 0), (-1, 0): (0, -1), (0, -1): (1, 0)}
_RIGHT = {v: k for k, v in _LEFT.items()}


def _chain_cycles(edges: list[OrientedEdge]) -> list[list[OrientedEdge]]:
    """Order boundary edges into closed cycles.

    At a pinch vertex (interior touching diagonally) several edges leave
    the same point; taking the sharpest available left turn keeps the
    interior on the left and the cycles non-crossing.
    """
    by_start: dict[tuple[float, float], list[int]] = {}
    for i, e in enumerate(edges):
        by_start.setdefault(e.start, []).append(i)

    def successor(i: int) -> int:
        e = edges[i]
        cands = by_start.get(e.end)
        if not cands:
            raise RuntimeError(f"open boundary at {e.end}")
        if len(cands) == 1:
            return cands[0]
        d = e.direction
        for want in (_LEFT[d], d, _RIGHT[d]):
            for j in cands:
                if edges[j].direction == want:
                    return j
        raise RuntimeError(f"no continuation at {e.end}")

    seen = [False] * len(edges)
    cycles = []
    for i0 in range(len(edges)):
        if seen[i0]:
            continue
        cyc = []
        i = i0
        while not seen[i]:
            seen[i] = True
            cyc.append(edges[i])
            i = successor(i)
        if i != i0:
            raise RuntimeError("boundary walk did not close")
        cycles.append(cyc)
    return cycles


def _merge_collinear(cycle: list[OrientedEdge]) -> list[OrientedEdge]:
    if len(cycle) <= 1:
        return cycle
    merged = [cycle[0]]
    for e in cycle[1:]:
        last = merged[-1]
        if e.direction == last.direction:
            merged[-1] = OrientedEdge(last.start, e.end)
        else:
            merged.append(e)
    # wrap-around: last edge may continue into the first
    if len(merged) > 1 and merged[-1].direction == merged[0].direction:
        merged[0] = OrientedEdge(merged[-1].start, merged[0].end)
        merged.pop()
    return merged


def extract_contour(sp: Subpaving) -> Contour:
    """Oriented boundary of a detection set: outer cycle counter-clockwise,
    hole cycles clockwise (interior always on the left).

    Raises PartialSubpavingError for partial sets, whose boundary is not
    closed inside the domain.
    """
    if not sp.boxes:
        raise ValueError("empty subpaving has no boundary")
    if sp.partial:
        raise PartialSubpavingError(
            "boundary not closed in domain: detection set touches the border "
            "or the no-delay diagonal"
        )
    cycles = [_merge_collinear(c) for c in _chain_cycles(_boundary_edges(sp))]
    # canonical cycle order: outer (largest |area|) first, then by corner
    cycles.sort(key=lambda c: (-abs(cycle_signed_area(c)), c[0].start))
    return Contour(cycles)


def tag_edge(edge: OrientedEdge, inclusion: InclusionMap) -> tuple[int, int] | None:
    """Sign tag of the displacement enclosure on one boundary edge.

    Returns (1, s) when the first component keeps sign s on the edge,
    else (2, s) on the second component, else None when both components
    straddle zero (the edge needs refinement).
    """
    t1, t2 = edge.spans
    box = inclusion(t1, t2)
    if 0.0 not in box.x:
        return (1, +1) if box.x.lo > 0 else (1, -1)
    if 0.0 not in box.y:
        return (2, +1) if box.y.lo > 0 else (2, -1)
    return None


def _refine_edge(edge: OrientedEdge, inclusion: InclusionMap, depth: int):
    tag = tag_edge(edge, inclusion)
    if tag is not None:
        return [replace(edge, tag=tag)]
    if depth <= 0:
        return None
    (x0, y0), (x1, y1) = edge.start, edge.end
    if x0 != x1:
        m = 0.5 * (x0 + x1)
        if m == x0 or m == x1:
            return None
        first, second = OrientedEdge((x0, y0), (m, y0)), OrientedEdge((m, y0), (x1, y1))
    else:
        m = 0.5 * (y0 + y1)
        if m == y0 or m == y1:
            return None
        first, second = OrientedEdge((x0, y0), (x0, m)), OrientedEdge((x0, m), (x1, y1))
    left = _refine_edge(first, inclusion, depth - 1)
    if left is None:
        return None
    right = _refine_edge(second, inclusion, depth - 1)
    if right is None:
        return None
    return left + right


def refine_and_tag(
    contour: Contour, inclusion: InclusionMap, max_depth: int = 12
) -> Contour | None:
    """Tag every edge, bisecting untaggable ones up to max_depth levels.

    Children inherit the parent's orientation and chain position.  Returns
    None when some piece of boundary remains untaggable at the budget: the
    existence test is then inconclusive for this detection set.
    """
    new_cycles = []
    for cyc in contour.cycles:
        out: list[OrientedEdge] = []
        for e in cyc:
            if e.tag is not None:
                out.append(e)
                continue
            pieces = _refine_edge(e, inclusion, max_depth)
            if pieces is None:
                return None
            out.extend(pieces)
        new_cycles.append(out)
    return Contour(new_cycles)


def topo_degree(contour: Contour) -> int:
    """Topological degree from the tag sequence along each boundary cycle.

    Walking a cycle, every (1,+)-tagged edge contributes +1 when the next
    tag is (2,+) and -1 when the previous tag is (2,+); indices wrap
    around the cycle.  The degree is the sum over all cycles.
    """
    total = 0
    for cyc in contour.cycles:
        tags = [e.tag for e in cyc]
        if any(t is None for t in tags):
            raise UntaggedContourError("contour has untagged edges")
        p = len(tags)
        for i, t in enumerate(tags):
            if t == TAG_X_POS:
                if tags[(i + 1) % p] == TAG_Y_POS:
                    total += 1
                if tags[(i - 1) % p] == TAG_Y_POS:
                    total -= 1
    return total


def winding_number(
    contour: Contour,
    field: PointField,
    samples_per_edge: int = 16,
    max_refine: int = 6,
) -> int:
    """Independent degree estimate: net rotation of the field along the contour.

    Samples each cycle densely, accumulates the angle swept by the field
    vector and divides by 2*pi.  Sampling is refined whenever the field
    comes too close to zero, an angle step nears a half turn, or the total
    fails to settle on an integer; OracleError is raised if refinement
    runs out.  Intended as a test oracle, not as part of the proof path.
    """
    m = samples_per_edge
    for _ in range(max_refine):
        total = 0.0
        ok = True
        for cyc in contour.cycles:
            pts = []
            for e in cyc:
                xs = np.linspace(e.start[0], e.end[0], m, endpoint=False)
                ys = np.linspace(e.start[1], e.end[1], m, endpoint=False)
                pts.append(np.column_stack([xs, ys]))
            pts = np.vstack(pts)
            w = np.asarray(field(pts), dtype=float)
            z = w[:, 0] + 1j * w[:, 1]
            mags = np.abs(z)
            if mags.min() <= 1e-12 * max(mags.max(), 1.0):
                ok = False
                break
            steps = np.angle(np.roll(z, -1) / z)
            if np.abs(steps).max() > 0.9 * math.pi:
                ok = False
                break
            total += float(steps.sum())
        if ok:
            turns = total / (2.0 * math.pi)
            nearest = round(turns)
            if abs(turns - nearest) < 0.2:
                return int(nearest)
        m *= 3
    raise OracleError("field too close to zero on the contour; no integer winding")


def existence_test(
    sp: Subpaving, inclusion: InclusionMap, max_depth: int = 12
) -> bool | None:
    """Loop existence verdict for one detection set.

    True when the degree is provably nonzero (a loop exists for every
    velocity selection compatible with the measurements); None when the
    degree is zero or the boundary could not be tagged, meaning nothing
    can be concluded either way.
    """
    d = degree_of(sp, inclusion, max_depth)
    return True if d not in (None, 0) else None


def degree_of(
    sp: Subpaving, inclusion: InclusionMap, max_depth: int = 12
) -> int | None:
    """Degree of the detection set's displacement map, or None if untaggable."""
    contour = extract_contour(sp)
    tagged = refine_and_tag(contour, inclusion, max_depth)
    if tagged is None:
        return None
    return topo_degree(tagged)
