"""End-to-end detection pipeline: samples -> tube -> paving -> verdicts.

``run_detect`` performs the whole chain on in-memory samples and returns a
RunResult; the CLI wraps it with file I/O and plotting.  Every stage is
timed, and failures carry the stage name so errors point at the culprit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .counting import loops_number
from .intervals import Interval
from .paving import NO_LOOP, Subpaving, TPlaneBox, cluster, sivia
from .report import INCONCLUSIVE, PROVEN, DetectionReport, summarize
from .topology import degree_of
from .tube import VelocitySamples, VelocityTube, build_tube

__all__ = ["RunConfig", "RunResult", "run_detect", "StageError"]


class StageError(RuntimeError):
    """Pipeline failure annotated with the stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class RunConfig:
    """Tunables of the detection pipeline.

    Unset values resolve against the data: slice_width defaults to 10x the
    median sample spacing, eps to duration/500, delta_diag to eps.
    """

    sigma: float | None = None
    sigma_multiplier: float = 2.0
    slice_width: float | None = None
    eps: float | None = None
    delta_diag: float | None = None
    max_depth: int = 12
    max_bisect: int = 8
    jobs: int = 1
    count_loops: bool = True
    keep_excluded: bool = True

    def resolved_eps(self, duration: float) -> float:
        eps = self.eps if self.eps is not None else duration / 500.0
        if eps <= 0:
            raise ValueError("eps must be > 0")
        if eps > duration / 10.0:
            raise ValueError(f"eps={eps} too coarse: must be <= duration/10")
        return eps

    def validate(self) -> None:
        if self.sigma is not None and self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.sigma_multiplier <= 0:
            raise ValueError("sigma multiplier must be > 0")
        if self.slice_width is not None and self.slice_width <= 0:
            raise ValueError("slice width must be > 0")
        if self.max_depth < 0 or self.max_bisect < 0:
            raise ValueError("refinement budgets must be >= 0")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass
class RunResult:
    tube: VelocityTube
    leaves: list[TPlaneBox]
    subpavings: list[Subpaving]
    reports: list[DetectionReport]
    timings_ms: dict[str, float] = field(default_factory=dict)

    @property
    def summary(self) -> dict:
        return summarize(self.reports)


def _assess(sp: Subpaving, tube: VelocityTube, cfg: RunConfig) -> DetectionReport:
    start = time.perf_counter()
    degree: int | None = None
    count: int | None = None
    if sp.partial:
        verdict, reason = INCONCLUSIVE, "partial: touches border or no-delay band"
    else:
        degree = degree_of(sp, tube.integral, cfg.max_depth)
        if degree is None:
            verdict, reason = INCONCLUSIVE, "boundary not taggable at max depth"
        elif degree == 0:
            verdict, reason = INCONCLUSIVE, "degree zero"
        else:
            verdict, reason = PROVEN, f"degree {degree}"
        if cfg.count_loops and degree is not None:
            count = loops_number(sp, tube, cfg.max_bisect, cfg.max_depth)
            if count is None:
                reason += "; count not certified (singular Jacobian enclosure)"
    t1h, t2h = sp.t1_hull, sp.t2_hull
    return DetectionReport(
        index=sp.index,
        t1_hull=(t1h.lo, t1h.hi),
        t2_hull=(t2h.lo, t2h.hi),
        n_boxes=len(sp),
        partial=sp.partial,
        degree=degree,
        verdict=verdict,
        loop_count=count,
        reason=reason,
        elapsed_ms=(time.perf_counter() - start) * 1e3,
    )


def run_detect(samples: VelocitySamples, cfg: RunConfig | None = None) -> RunResult:
    """Run tube construction, paving, clustering and verdicts on samples."""
    cfg = cfg or RunConfig()
    cfg.validate()
    timings: dict[str, float] = {}

    def timed(stage, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            out = fn(*args, **kwargs)
        except Exception as exc:
            raise StageError(stage, exc) from exc
        timings[stage] = (time.perf_counter() - t0) * 1e3
        return out

    tube = timed("tube", build_tube, samples,
                 slice_width=cfg.slice_width,
                 sigma=cfg.sigma if samples.sigma is None else None,
                 sigma_multiplier=cfg.sigma_multiplier)
    duration = tube.tf - tube.t0
    eps = cfg.resolved_eps(duration)
    delta = cfg.delta_diag if cfg.delta_diag is not None else eps

    leaves = timed("sivia", sivia, tube, eps, delta_diag=delta,
                   keep_excluded=cfg.keep_excluded, jobs=cfg.jobs)
    dom = Interval(tube.t0, tube.tf)
    subpavings = timed("cluster", cluster, leaves, (dom, dom), delta)
    reports = timed("verdicts", lambda: [_assess(sp, tube, cfg) for sp in subpavings])

    # clustered boxes carry the final status (possible vs partial); recompose
    # the leaf list so exports see it
    final = [b for b in leaves if b.status == NO_LOOP]
    for sp in subpavings:
        final.extend(sp.boxes)
    final.sort(key=lambda b: (b.t1.lo, b.t2.lo, b.t1.hi, b.t2.hi))
    return RunResult(tube=tube, leaves=final, subpavings=subpavings,
                     reports=reports, timings_ms=timings)
