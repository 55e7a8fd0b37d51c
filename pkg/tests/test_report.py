import json

from loopdeg.intervals import Interval
from loopdeg.paving import NO_LOOP, POSSIBLE, Subpaving, TPlaneBox
from loopdeg.report import DetectionReport, export_results, load_tplane, summarize


def sample_report(index=0, verdict="proven", partial=False, degree=1, count=1):
    return DetectionReport(
        index=index, t1_hull=(1.0, 2.0), t2_hull=(5.0, 6.0), n_boxes=3,
        partial=partial, degree=degree, verdict=verdict, loop_count=count,
        reason="degree 1", elapsed_ms=0.25,
    )


def awkward_boxes():
    # bounds that stress float round-tripping
    vals = [0.1, 1 / 3, 2.0 ** -40, 1e17 + 1.0, 3.141592653589793]
    out = []
    for i, v in enumerate(vals):
        out.append(TPlaneBox(Interval(v, v * 1.0000001), Interval(v + 1, v + 2),
                             POSSIBLE if i % 2 else NO_LOOP))
    return out


def test_tplane_round_trip_bit_exact(tmp_path):
    boxes = awkward_boxes()
    export_results(tmp_path, boxes, [], [])
    reloaded = load_tplane(tmp_path / "tplane.json")
    assert reloaded == boxes  # dataclass equality: exact float match


def test_empty_exports_are_valid(tmp_path):
    paths = export_results(tmp_path, [], [], [])
    data = json.load(open(paths["results"]))
    assert data["detections"] == []
    assert data["summary"]["subpavings"] == 0
    tp = json.load(open(paths["tplane"]))
    assert tp["boxes"] == []
    assert open(paths["csv"]).read().count("\n") == 1  # header only


def test_results_fields(tmp_path):
    reports = [sample_report(),
               sample_report(index=1, verdict="inconclusive", degree=0, count=None)]
    sp = Subpaving([TPlaneBox(Interval(0, 1), Interval(2, 3))], index=0)
    paths = export_results(tmp_path, [], [sp], reports, meta={"input": "x.csv"})
    data = json.load(open(paths["results"]))
    assert data["meta"]["input"] == "x.csv"
    d0, d1 = data["detections"]
    assert d0["verdict"] == "proven" and d0["degree"] == 1 and d0["loop_count"] == 1
    assert d1["verdict"] == "inconclusive" and d1["loop_count"] is None
    rows = open(paths["csv"]).read().strip().splitlines()
    assert len(rows) == 3
    assert rows[1].startswith("0,")


def test_summary_partition():
    reports = [
        sample_report(0),
        sample_report(1, verdict="inconclusive", degree=0, count=None),
        sample_report(2, verdict="inconclusive", partial=True, degree=None, count=None),
    ]
    s = summarize(reports)
    assert s["subpavings"] == 3
    assert s["proven"] + s["inconclusive"] + s["partial"] == s["subpavings"]
    assert (s["proven"], s["inconclusive"], s["partial"]) == (1, 1, 1)
