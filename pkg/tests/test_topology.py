import numpy as np
import pytest

from loopdeg.intervals import Box2, Interval
from loopdeg.paving import POSSIBLE, Subpaving, TPlaneBox
from loopdeg.selftest import random_root_field, random_subpaving, run_degree_selftest
from loopdeg.topology import (
    Contour,
    OracleError,
    OrientedEdge,
    PartialSubpavingError,
    UntaggedContourError,
    cycle_signed_area,
    existence_test,
    extract_contour,
    refine_and_tag,
    tag_edge,
    topo_degree,
    winding_number,
)


def box(x0, x1, y0, y1):
    return TPlaneBox(Interval(x0, x1), Interval(y0, y1), POSSIBLE)


def sp_of(*boxes):
    return Subpaving(list(boxes))


def shift_field(cx, cy):
    """Inclusion map of f(t) = t - (cx, cy)."""
    def inclusion(t1, t2):
        return Box2(t1 - Interval(cx, cx), t2 - Interval(cy, cy))
    return inclusion


def test_contour_single_box():
    c = extract_contour(sp_of(box(0, 1, 0, 1)))
    assert len(c.cycles) == 1
    cyc = c.cycles[0]
    assert [e.start for e in cyc] == [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert cycle_signed_area(cyc) == pytest.approx(1.0)


def test_contour_two_boxes_shared_face_removed():
    c = extract_contour(sp_of(box(0, 1, 0, 1), box(1, 2, 0, 1)))
    cyc, = c.cycles
    # the shared face at x=1 is gone and collinear runs merge to a rectangle
    assert cycle_signed_area(cyc) == pytest.approx(2.0)
    xs = {p for e in cyc for p in (e.start, e.end)}
    assert xs == {(0, 0), (2, 0), (2, 1), (0, 1)}


def test_contour_ring_two_cycles():
    ring = [box(i, i + 1, j, j + 1) for i in range(3) for j in range(3)
            if (i, j) != (1, 1)]
    c = extract_contour(sp_of(*ring))
    areas = sorted(round(cycle_signed_area(cy), 6) for cy in c.cycles)
    assert areas == [-1.0, 9.0]  # outer counter-clockwise, hole clockwise


def test_contour_partial_raises():
    sp = sp_of(box(0, 1, 0, 1))
    sp.partial = True
    with pytest.raises(PartialSubpavingError):
        extract_contour(sp)


def test_contour_empty_raises():
    with pytest.raises(ValueError):
        extract_contour(Subpaving([]))


def test_contour_pinched_interior():
    # two diagonal boxes sharing only a corner, connected by a third below;
    # the boundary passes the pinch vertex twice without crossing itself
    sp = sp_of(box(0, 1, 1, 2), box(1, 2, 2, 3), box(0, 2, 0, 1))
    c = extract_contour(sp)
    assert sum(abs(cycle_signed_area(cy)) for cy in c.cycles) == pytest.approx(4.0)
    for cyc in c.cycles:
        for e, nxt in zip(cyc, cyc[1:] + cyc[:1]):
            assert e.end == nxt.start


def test_tag_edge_constant_positive_x():
    # displacement x-component stays >= 1 for edges with delay >= 1
    def inclusion(t1, t2):
        delay = t2 - t1
        return Box2(delay * Interval(1, 2), delay * Interval(3, 4))

    edge = OrientedEdge((0.0, 2.0), (0.0, 3.0))
    assert tag_edge(edge, inclusion) == (1, +1)


def test_tag_edge_second_component():
    edge = OrientedEdge((0.0, 0.0), (1.0, 0.0))
    assert tag_edge(edge, lambda a, b: Box2(Interval(-1, 1), Interval(2, 5))) == (2, +1)
    assert tag_edge(edge, lambda a, b: Box2(Interval(-1, 1), Interval(-5, -2))) == (2, -1)
    assert tag_edge(edge, lambda a, b: Box2(Interval(-2, -1), Interval(-1, 1))) == (1, -1)


def test_tag_edge_straddling_returns_none():
    edge = OrientedEdge((0.0, 0.0), (1.0, 0.0))
    assert tag_edge(edge, lambda a, b: Box2(Interval(-1, 1), Interval(-1, 1))) is None


def test_refine_keeps_taggable_contour():
    c = extract_contour(sp_of(box(0, 1, 0, 1)))
    tagged = refine_and_tag(c, lambda a, b: Box2(Interval(1, 2), Interval(1, 2)), 4)
    assert tagged is not None
    assert [len(cy) for cy in tagged.cycles] == [4]
    assert all(e.tag == (1, +1) for e in tagged.edges())


def test_refine_splits_sign_flip():
    # f1 flips sign mid-edge; f2 flips earlier, so each half becomes
    # taggable only after the bisection
    def inclusion(t1, t2):
        return Box2(t1 - Interval(0.5, 0.5), t1 - Interval(0.2, 0.2))

    edge = OrientedEdge((0.0, 0.0), (1.0, 0.0))
    assert tag_edge(edge, inclusion) is None  # both straddle on the full edge
    tagged = refine_and_tag(Contour([[edge]]), inclusion, max_depth=6)
    assert tagged is not None
    pieces = tagged.cycles[0]
    assert len(pieces) >= 2
    assert pieces[0].tag == (1, -1) and pieces[-1].tag == (2, +1)
    assert pieces[0].start == (0.0, 0.0) and pieces[-1].end == (1.0, 0.0)
    for e, nxt in zip(pieces, pieces[1:]):
        assert e.end == nxt.start


def test_refine_gives_up_when_untaggable():
    c = extract_contour(sp_of(box(0, 1, 0, 1)))
    hopeless = lambda a, b: Box2(Interval(-1, 1), Interval(-1, 1))
    assert refine_and_tag(c, hopeless, max_depth=3) is None


def test_degree_identity_square():
    c = extract_contour(sp_of(box(0, 1, 0, 1)))
    tagged = refine_and_tag(c, shift_field(0.5, 0.5), 10)
    tags = [e.tag for e in tagged.cycles[0]]
    assert tags == [(2, -1), (1, +1), (2, +1), (1, -1)]
    assert topo_degree(tagged) == 1


def test_degree_hand_trace_zero():
    seq = [(1, +1), (1, +1), (2, -1), (1, +1), (2, +1), (2, +1)]
    pts = [(0, 0), (1, 0), (2, 0), (2, 1), (1, 1), (0, 1)]
    cyc = [OrientedEdge(pts[i], pts[(i + 1) % 6], tag=seq[i]) for i in range(6)]
    assert topo_degree(Contour([cyc])) == 0


def test_degree_all_y_positive_is_zero():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1)]
    cyc = [OrientedEdge(pts[i], pts[(i + 1) % 4], tag=(2, +1)) for i in range(4)]
    assert topo_degree(Contour([cyc])) == 0


def test_degree_requires_tags():
    c = extract_contour(sp_of(box(0, 1, 0, 1)))
    with pytest.raises(UntaggedContourError):
        topo_degree(c)


def test_degree_stable_under_tagged_subdivision():
    rng = np.random.default_rng(5)
    for _ in range(20):
        sp, cells, holes = random_subpaving(rng, int(rng.integers(5, 25)))
        pf, inc, _ = random_root_field(rng, cells, holes)
        tagged = refine_and_tag(extract_contour(sp), inc, 16)
        d = topo_degree(tagged)
        split_cycles = []
        for cyc in tagged.cycles:
            out = []
            for e in cyc:
                (x0, y0), (x1, y1) = e.start, e.end
                mid = (0.5 * (x0 + x1), 0.5 * (y0 + y1))
                out.append(OrientedEdge(e.start, mid, tag=e.tag))
                out.append(OrientedEdge(mid, e.end, tag=e.tag))
            split_cycles.append(out)
        assert topo_degree(Contour(split_cycles)) == d


def test_degree_negated_by_orientation_reversal():
    rng = np.random.default_rng(6)
    for _ in range(20):
        sp, cells, holes = random_subpaving(rng, int(rng.integers(5, 25)))
        pf, inc, _ = random_root_field(rng, cells, holes)
        tagged = refine_and_tag(extract_contour(sp), inc, 16)
        assert topo_degree(tagged.reversed()) == -topo_degree(tagged)


def test_degree_independent_of_tag_choice():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(30):
        sp, cells, holes = random_subpaving(rng, int(rng.integers(5, 25)))
        pf, inc, _ = random_root_field(rng, cells, holes)
        tagged = refine_and_tag(extract_contour(sp), inc, 16)
        d = topo_degree(tagged)
        # re-tag preferring the second component wherever both qualify
        flipped_any = False
        new_cycles = []
        for cyc in tagged.cycles:
            out = []
            for e in cyc:
                b = inc(*e.spans)
                tag = e.tag
                if 0.0 not in b.y and 0.0 not in b.x:
                    tag = (2, +1) if b.y.lo > 0 else (2, -1)
                    flipped_any = flipped_any or tag != e.tag
                out.append(OrientedEdge(e.start, e.end, tag=tag))
            new_cycles.append(out)
        assert topo_degree(Contour(new_cycles)) == d
        checked += flipped_any
    assert checked > 0  # the property was actually exercised


def test_winding_identity_square():
    c = extract_contour(sp_of(box(0, 1, 0, 1)))
    assert winding_number(c, lambda p: p - np.array([0.5, 0.5])) == 1


def test_winding_constant_field():
    c = extract_contour(sp_of(box(0, 1, 0, 1)))
    assert winding_number(c, lambda p: np.tile([1.0, 0.0], (len(p), 1))) == 0


def test_winding_two_opposite_zeros_cancel():
    c = extract_contour(sp_of(box(0, 2, 0, 1)))
    a, b = 0.5 + 0.5j, 1.5 + 0.5j

    def field(pts):
        z = pts[:, 0] + 1j * pts[:, 1]
        w = (z - a) * np.conj(z - b)
        return np.column_stack([w.real, w.imag])

    assert winding_number(c, field) == 0


def test_winding_refuses_vanishing_field():
    c = extract_contour(sp_of(box(0, 1, 0, 1)))

    def field(pts):  # zero on the whole boundary
        return np.zeros_like(pts)

    with pytest.raises(OracleError):
        winding_number(c, field)


def test_oracle_agreement_sample():
    cases, _ = run_degree_selftest(n_cases=40, seed=123)
    assert all(c.ok for c in cases)


def test_existence_on_shifted_identity():
    sp = sp_of(box(0, 1, 0, 1))
    assert existence_test(sp, shift_field(0.5, 0.5)) is True
    assert existence_test(sp, shift_field(5.0, 5.0)) is None  # zero outside
    sp.partial = True
    with pytest.raises(PartialSubpavingError):
        existence_test(sp, shift_field(0.5, 0.5))
