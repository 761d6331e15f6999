"""Command-line interface.

``catprox run problem.json``   iterate a problem file, write artifacts
``catprox verify all``         run the verification suite

Exit codes: 0 converged / all checks as expected, 2 iteration budget
exhausted, 1 malformed input or usage error.  Artifacts are written
atomically (temp file + rename).  The default output directory comes from
``CATPROX_OUT_DIR`` (falling back to the working directory).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from pathlib import Path

from . import __version__
from .engine import IterationConfig, IterStatus
from .errors import DomainError, ParseError, SpaceMismatch
from .jsonutil import parse_point
from .problems import ProblemSpec, problem_spec_from_json, run
from .spaces import SpaceKind
from .verify import run_suite, suite_passed, suite_to_json_dict

ENV_OUT_DIR = "CATPROX_OUT_DIR"


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _apply_overrides(spec: ProblemSpec, args) -> ProblemSpec:
    cfg = spec.config
    changed = {}
    if args.max_iter is not None:
        changed["max_iter"] = args.max_iter
    if args.tol is not None:
        changed["residual_tol"] = args.tol
        changed["step_tol"] = args.tol
    if args.residual_tol is not None:
        changed["residual_tol"] = args.residual_tol
    if args.step_tol is not None:
        changed["step_tol"] = args.step_tol
    if changed:
        cfg = IterationConfig(
            max_iter=changed.get("max_iter", cfg.max_iter),
            residual_tol=changed.get("residual_tol", cfg.residual_tol),
            step_tol=changed.get("step_tol", cfg.step_tol),
            log_every=cfg.log_every,
        )
    x0 = spec.x0
    if args.x0 is not None:
        try:
            obj = json.loads(args.x0)
        except json.JSONDecodeError as e:
            raise ParseError("--x0", f"invalid JSON: {e}") from e
        x0 = parse_point(spec.space, obj, "--x0")
    return ProblemSpec(space=spec.space, problem=spec.problem, x0=x0, config=cfg)


def cmd_run(args) -> int:
    started = time.perf_counter()
    in_path = Path(args.problem)
    try:
        text = in_path.read_text()
    except OSError as e:
        print(f"error: cannot read {in_path}: {e}", file=sys.stderr)
        return 1
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        print(f"error: {in_path}: line {e.lineno}, column {e.colno}: {e.msg}",
              file=sys.stderr)
        return 1
    try:
        spec = problem_spec_from_json(obj)
        spec = _apply_overrides(spec, args)
        report = run(spec)
    except (ParseError, DomainError, SpaceMismatch) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    out_dir = Path(args.out or os.environ.get(ENV_OUT_DIR) or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = ["trace.csv", "trace.json", "report.json"]
    _atomic_write(out_dir / "trace.csv", report.trace.to_csv_text())
    _atomic_write(out_dir / "trace.json", report.trace.to_json_text())
    _atomic_write(out_dir / "report.json", report.to_json_text())
    if not args.no_plots:
        from .plots import render_run_figures
        artifacts += render_run_figures(report.trace, out_dir)

    manifest = {
        "input": str(in_path),
        "out_dir": str(out_dir),
        "artifacts": artifacts,
        "duration_seconds": time.perf_counter() - started,
        "version": __version__,
        "seed": None,
        "status": report.trace.status.value,
        "iterations_used": report.trace.iterations_used,
    }
    print(json.dumps(manifest, sort_keys=True, indent=2))
    return 0 if report.trace.status is IterStatus.CONVERGED else 2


def cmd_verify(args) -> int:
    if args.target == "all":
        kinds = [SpaceKind.EUCLIDEAN, SpaceKind.HYPERBOLOID, SpaceKind.SPIDER]
    else:
        kinds = [SpaceKind(args.target)]
    entries = run_suite(kinds, seed=args.seed, n_triangles=args.triangles,
                        n_samples=args.samples)
    bundle = suite_to_json_dict(entries, args.seed)
    text = json.dumps(bundle, sort_keys=True, indent=2) + "\n"
    if args.out:
        out_path = Path(args.out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        _atomic_write(out_path, text)
    else:
        sys.stdout.write(text)
    for e in entries:
        mark = "ok " if e.ok else "BAD"
        expected = "expect-pass" if e.expect_pass else "expect-fail"
        print(f"[{mark}] {e.report.name}: samples={e.report.samples} "
              f"violations={e.report.violations} ({expected})",
              file=sys.stderr)
    return 0 if suite_passed(entries) else 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="catprox",
        description="Fixed-point iteration of projections and proximal maps "
                    "on Hadamard model spaces.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    rp = sub.add_parser("run", help="iterate a problem file, write artifacts")
    rp.add_argument("problem", help="path to a JSON problem file")
    rp.add_argument("--out", default=None,
                    help=f"output directory (default ${ENV_OUT_DIR} or .)")
    rp.add_argument("--max-iter", type=int, default=None)
    rp.add_argument("--tol", type=float, default=None,
                    help="sets both residual and step tolerances")
    rp.add_argument("--residual-tol", type=float, default=None)
    rp.add_argument("--step-tol", type=float, default=None)
    rp.add_argument("--x0", default=None,
                    help="start point as JSON, e.g. '[3,1]' or "
                         "'{\"leg\":1,\"r\":2}'")
    rp.add_argument("--no-plots", action="store_true",
                    help="skip figure rendering")
    rp.set_defaults(fn=cmd_run)

    vp = sub.add_parser("verify", help="run the verification suite")
    vp.add_argument("target",
                    choices=["euclidean", "hyperboloid", "spider", "all"])
    vp.add_argument("--seed", type=int, default=42)
    vp.add_argument("--samples", type=int, default=400)
    vp.add_argument("--triangles", type=int, default=2000)
    vp.add_argument("--out", default=None, help="write the JSON bundle here")
    vp.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; 2 is reserved for iteration
        # budget exhaustion, so usage errors report 1
        return 0 if e.code == 0 else 1
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
