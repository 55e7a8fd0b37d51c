"""Result serialization: t-plane paving, per-detection verdicts, CSV table.

Three files make up a detection report:

* ``tplane.json``   -- every leaf box of the paving with its status
                       (``no_loop``, ``possible``, ``partial``);
* ``results.json``  -- one record per detection set: hull, box count,
                       partial flag, degree, verdict, certified loop count,
                       wall time;
* ``detections.csv``-- the same records as a flat delimited table.

Floats are serialized with Python's shortest round-trip representation,
so reloading ``tplane.json`` reproduces the box set bit-exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .intervals import Interval
from .paving import Subpaving, TPlaneBox

__all__ = ["DetectionReport", "export_results", "load_tplane"]

PROVEN = "proven"
INCONCLUSIVE = "inconclusive"


@dataclass
class DetectionReport:
    """Verdict and diagnostics for one detection set."""

    index: int
    t1_hull: tuple[float, float]
    t2_hull: tuple[float, float]
    n_boxes: int
    partial: bool
    degree: int | None
    verdict: str
    loop_count: int | None
    reason: str
    elapsed_ms: float

    @property
    def proven(self) -> bool:
        return self.verdict == PROVEN

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "t1_hull": list(self.t1_hull),
            "t2_hull": list(self.t2_hull),
            "n_boxes": self.n_boxes,
            "partial": self.partial,
            "degree": self.degree,
            "verdict": self.verdict,
            "loop_count": self.loop_count,
            "reason": self.reason,
            "elapsed_ms": self.elapsed_ms,
        }


def _box_record(b: TPlaneBox) -> dict:
    return {
        "t1": [b.t1.lo, b.t1.hi],
        "t2": [b.t2.lo, b.t2.hi],
        "status": b.status,
    }


def export_results(
    out_dir: str | Path,
    leaves: list[TPlaneBox],
    subpavings: list[Subpaving],
    reports: list[DetectionReport],
    meta: dict | None = None,
    timings: dict | None = None,
) -> dict[str, Path]:
    """Write tplane.json, results.json and detections.csv under out_dir.

    Returns the paths written.  Empty inputs produce valid files with
    empty arrays.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    tplane = {
        "boxes": [_box_record(b) for b in leaves],
        "detection_boxes": [
            {"subpaving": sp.index, "boxes": [_box_record(b) for b in sp.boxes]}
            for sp in subpavings
        ],
    }
    paths["tplane"] = out_dir / "tplane.json"
    with open(paths["tplane"], "w") as fh:
        json.dump(tplane, fh, indent=1)

    results = {
        "meta": meta or {},
        "timings_ms": timings or {},
        "summary": summarize(reports),
        "detections": [r.to_dict() for r in reports],
    }
    paths["results"] = out_dir / "results.json"
    with open(paths["results"], "w") as fh:
        json.dump(results, fh, indent=1)

    paths["csv"] = out_dir / "detections.csv"
    with open(paths["csv"], "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["index", "t1_lo", "t1_hi", "t2_lo", "t2_hi", "n_boxes",
             "partial", "degree", "verdict", "loop_count", "reason", "elapsed_ms"]
        )
        for r in reports:
            writer.writerow(
                [r.index, repr(r.t1_hull[0]), repr(r.t1_hull[1]),
                 repr(r.t2_hull[0]), repr(r.t2_hull[1]), r.n_boxes,
                 int(r.partial), "" if r.degree is None else r.degree,
                 r.verdict, "" if r.loop_count is None else r.loop_count,
                 r.reason, f"{r.elapsed_ms:.3f}"]
            )
    return paths


def summarize(reports: list[DetectionReport]) -> dict:
    n_partial = sum(1 for r in reports if r.partial)
    n_proven = sum(1 for r in reports if r.proven)
    return {
        "subpavings": len(reports),
        "proven": n_proven,
        "inconclusive": len(reports) - n_proven - n_partial,
        "partial": n_partial,
        "loops_counted": sum(r.loop_count or 0 for r in reports),
    }


def load_tplane(path: str | Path) -> list[TPlaneBox]:
    """Reload the leaf boxes of an exported t-plane, bit-exactly."""
    with open(path) as fh:
        data = json.load(fh)
    return [
        TPlaneBox(
            Interval(rec["t1"][0], rec["t1"][1]),
            Interval(rec["t2"][0], rec["t2"][1]),
            rec["status"],
        )
        for rec in data["boxes"]
    ]
