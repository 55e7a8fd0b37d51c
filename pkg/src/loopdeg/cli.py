"""Command-line interface.

Subcommands:

* ``detect``          -- run the full detection pipeline on a measurement
                         CSV and write tplane.json / results.json /
                         detections.csv (plus SVG figures with --plots);
* ``synth``           -- generate a synthetic mission CSV and its ground
                         truth JSON, deterministic under --seed;
* ``degree-selftest`` -- run the degree-vs-winding-oracle agreement suite.

Exit codes: 0 success, 2 usage or input error, 3 internal failure.  Set
LOOPDEG_LOG=debug|info|warning for logging verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from . import __version__
from .measurements import FORMATS, MeasurementFormatError, load_measurements
from .pipeline import RunConfig, StageError, run_detect
from .report import export_results
from .synth import MISSION_KINDS, make_mission, save_mission_files, synthesize
from .tube import TubeConstructionError, TubeDomainError

log = logging.getLogger("loopdeg")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loopdeg",
        description="Guaranteed loop-closure detection and proof for planar "
                    "robot trajectories from bounded-error velocity logs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    det = sub.add_parser("detect", help="detect and prove loops in a measurement file")
    det.add_argument("--input", required=True, help="measurement CSV path")
    det.add_argument("--format", choices=FORMATS, default="world_csv")
    det.add_argument("--sigma", type=float, default=None,
                     help="global velocity std dev [m/s] when the file has no sigma column")
    det.add_argument("--sigma-multiplier", type=float, default=2.0,
                     help="tube inflation in sigmas (default 2 = 95%% band)")
    det.add_argument("--slice-width", type=float, default=None,
                     help="tube slice width [s] (default: 10x median sample spacing)")
    det.add_argument("--eps", type=float, default=None,
                     help="t-plane paving resolution [s] (default: duration/500)")
    det.add_argument("--delta-diag", type=float, default=None,
                     help="no-delay band half-width [s] (default: eps)")
    det.add_argument("--max-depth", type=int, default=12,
                     help="boundary edge refinement budget")
    det.add_argument("--max-bisect", type=int, default=8,
                     help="Jacobian box bisection budget")
    det.add_argument("--jobs", type=int, default=1, help="paving worker processes")
    det.add_argument("--no-count", action="store_true",
                     help="skip the loop-count certification stage")
    det.add_argument("--out", default="out", help="output directory")
    det.add_argument("--plots", action="store_true",
                     help="also render tplane.svg and trajectory.svg")

    syn = sub.add_parser("synth", help="generate a synthetic mission with ground truth")
    syn.add_argument("kind", type=lambda s: s.replace("-", "_"), choices=MISSION_KINDS,
                     help="one of: " + ", ".join(MISSION_KINDS))
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--noise-frac", type=float, default=0.01,
                     help="sigma as a fraction of mean speed (default 0.01)")
    syn.add_argument("--sigma", type=float, default=None,
                     help="absolute sigma [m/s]; overrides --noise-frac")
    syn.add_argument("--rate", type=float, default=10.0, help="sample rate [Hz]")
    syn.add_argument("--out", default=None, help="output prefix (default: the kind name)")
    syn.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                     help="mission parameter override, repeatable "
                          "(e.g. --param rows=4 --param cols=6)")

    st = sub.add_parser("degree-selftest",
                        help="degree algorithm vs winding oracle agreement suite")
    st.add_argument("--cases", type=int, default=200)
    st.add_argument("--seed", type=int, default=0)
    return parser


def _parse_params(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--param needs KEY=VALUE, got {pair!r}")
        key, val = pair.split("=", 1)
        try:
            num = float(val)
            out[key] = int(num) if num == int(num) and "." not in val else num
        except ValueError:
            out[key] = val
    return out


def _cmd_detect(args) -> int:
    cfg = RunConfig(
        sigma=args.sigma,
        sigma_multiplier=args.sigma_multiplier,
        slice_width=args.slice_width,
        eps=args.eps,
        delta_diag=args.delta_diag,
        max_depth=args.max_depth,
        max_bisect=args.max_bisect,
        jobs=args.jobs,
        count_loops=not args.no_count,
    )
    start = time.perf_counter()
    samples = load_measurements(args.input, args.format, default_sigma=args.sigma)
    result = run_detect(samples, cfg)

    t_export = time.perf_counter()
    meta = {
        "input": str(args.input),
        "format": args.format,
        "n_samples": len(samples),
        "config": {
            "sigma": args.sigma,
            "sigma_multiplier": args.sigma_multiplier,
            "slice_width": cfg.slice_width,
            "eps": cfg.eps,
            "delta_diag": cfg.delta_diag,
            "max_depth": cfg.max_depth,
            "max_bisect": cfg.max_bisect,
        },
    }
    export_results(args.out, result.leaves, result.subpavings, result.reports,
                   meta=meta, timings=result.timings_ms)
    result.timings_ms["export"] = (time.perf_counter() - t_export) * 1e3

    if args.plots:
        from .figures import plot_tplane, plot_trajectory

        plot_tplane(os.path.join(args.out, "tplane.svg"), result.leaves,
                    result.subpavings, result.reports,
                    (result.tube.t0, result.tube.tf))
        plot_trajectory(os.path.join(args.out, "trajectory.svg"),
                        result.tube, result.reports)

    wall = time.perf_counter() - start
    s = result.summary
    counted = [r.loop_count for r in result.reports if r.loop_count]
    print(f"subpavings: {s['subpavings']}   proven: {s['proven']}   "
          f"inconclusive: {s['inconclusive']}   partial: {s['partial']}")
    if counted:
        print(f"certified loop counts: {counted} (total {sum(counted)})")
    stage_str = " | ".join(f"{k} {v:.0f}ms" for k, v in result.timings_ms.items())
    print(f"wall time: {wall:.2f}s  ({stage_str})")
    print(f"results written to {args.out}/")
    return EXIT_OK


def _cmd_synth(args) -> int:
    params = _parse_params(args.param)
    mission = make_mission(args.kind, **params)
    sigma = args.sigma if args.sigma is not None else args.noise_frac * mission.mean_speed()
    samples = synthesize(mission, sigma=sigma, sample_rate=args.rate, seed=args.seed)
    prefix = args.out if args.out is not None else args.kind
    csv_path, truth_path = save_mission_files(prefix, samples, mission, args.seed)
    print(f"wrote {csv_path} ({len(samples)} samples, sigma={sigma:.6g} m/s)")
    print(f"wrote {truth_path} ({len(mission.loop_pairs)} true loop pairs)")
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_degree_selftest

    cases, elapsed = run_degree_selftest(n_cases=args.cases, seed=args.seed)
    bad = [c for c in cases if not c.ok]
    holes = sum(1 for c in cases if c.n_holes > 0)
    print(f"{len(cases)} randomized cases ({holes} with holes) in {elapsed:.2f}s")
    for c in bad:
        print(f"  MISMATCH case {c.index}: algorithm {c.algo_degree}, "
              f"oracle {c.oracle_degree}, analytic {c.expected_degree}")
    if bad:
        print(f"FAIL: {len(bad)} disagreements")
        return EXIT_INTERNAL
    print("PASS: degree algorithm, winding oracle and analytic count agree on all cases")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("LOOPDEG_LOG", "WARNING").upper())
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    try:
        if args.command == "detect":
            return _cmd_detect(args)
        if args.command == "synth":
            return _cmd_synth(args)
        return _cmd_selftest(args)
    except (OSError, MeasurementFormatError, TubeConstructionError,
            TubeDomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StageError as exc:
        inner = exc.cause
        if isinstance(inner, (OSError, MeasurementFormatError, TubeConstructionError,
                              TubeDomainError, ValueError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        log.exception("pipeline failure")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - defensive
        log.exception("unexpected failure")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
