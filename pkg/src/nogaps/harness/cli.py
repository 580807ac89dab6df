"""Command line front end: ``nogaps run|summarize|audit|lcd|net|baseline``.

Exit codes: 0 on success, 2 on configuration errors, 3 when the fraction of
failed trials exceeds the configured limit or an audit finds a violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from ..errors import ConfigError, ParameterError
from .config import load_config
from .report import JsonlWriter, emit_report, read_jsonl
from .stats import summarize
from .suite import fitted_constants, run_suite

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
AUDIT_SUITES = ("decomposition", "second_moment", "reduction", "lcd_lower", "cauchy_binet", "restriction",
                "simple_bound", "all")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def cmd_run(args) -> int:
    config = load_config(args.config)
    base = Path(args.output or config.output_path)
    base.parent.mkdir(parents=True, exist_ok=True)
    jsonl = base.with_name(base.name + ".jsonl")
    with JsonlWriter(jsonl) as writer:
        records = run_suite(config, workers=args.workers, on_record=writer)
    summaries = [summarize(records, s.metric, s.thresholds, s.joint_flag) for s in config.summaries]
    fitted = fitted_constants(config, records)
    emit_report(records, summaries, "csv", base, config_hash=config.content_hash(), fitted=fitted,
                config=config.to_dict())
    n_failed = sum(r.failed for r in records)
    print(json.dumps({"records": len(records), "failed": n_failed, "jsonl": str(jsonl),
                      "fitted_constants": fitted, "summaries": [s.to_dict() for s in summaries]}, indent=2))
    if records and n_failed / len(records) > config.max_failure_fraction:
        print(f"error: {n_failed} of {len(records)} trials failed", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_summarize(args) -> int:
    records = read_jsonl(args.records)
    stats = summarize(records, args.metric, _floats(args.thresholds), args.joint_flag)
    print(json.dumps(stats.to_dict(), indent=2))
    return EXIT_OK


def run_audit_suite(name: str, seed: int, instances: int, n: int) -> dict:
    """Run one named audit over random instances; returns counts of checks and violations."""
    from ..deloc import decomposition_bound_audit, neg_second_moment_audit, reduction_audit
    from ..ensembles import SymmetricSign
    from ..smallball import restriction_audit, simple_bound_audit
    from ..structure import cauchy_binet_audit, lcd_lower_bound, lcd_vector

    rng = np.random.default_rng(seed)

    def cg(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    bad = 0
    for _ in range(instances):
        if name == "decomposition":
            A = cg(n + int(rng.integers(0, n // 2 + 1)), n)
            bad += not decomposition_bound_audit(A, int(rng.integers(1, A.shape[0]))).holds
        elif name == "second_moment":
            bad += neg_second_moment_audit(cg(n + n // 2 + 1, n)).gap > 1e-8
        elif name == "reduction":
            bad += not reduction_audit(cg(n, n) / math.sqrt(2), 0.25, 0.1, 3.0).holds
        elif name == "lcd_lower":
            v = rng.standard_normal(n)
            bad += lcd_vector(v, 1.0).value < lcd_lower_bound(v) * (1 - 1e-9)
        elif name == "cauchy_binet":
            bad += not cauchy_binet_audit(cg(min(n, 12)), 0.3).holds
        elif name == "restriction":
            a = rng.standard_normal(min(n, 10))
            bad += restriction_audit(SymmetricSign(), a, [0.0, 0.1, 0.5, 1.0]) > 0
        elif name == "simple_bound":
            a = rng.standard_normal(min(n, 12))
            bad += simple_bound_audit([a / np.linalg.norm(a)])
        else:
            raise ValueError(name)
    return {"suite": name, "instances": instances, "violations": int(bad)}


def cmd_audit(args) -> int:
    names = AUDIT_SUITES[:-1] if args.suite == "all" else (args.suite,)
    results = [run_audit_suite(s, args.seed, args.instances, args.n) for s in names]
    for r in results:
        status = "PASS" if r["violations"] == 0 else "FAIL"
        print(f"{status} {r['suite']}: {r['violations']} violations in {r['instances']} instances")
    return EXIT_OK if all(r["violations"] == 0 for r in results) else EXIT_NUMERIC


def cmd_lcd(args) -> int:
    from ..structure import lcd_vector

    path = Path(args.vector)
    v = np.load(path) if path.suffix == ".npy" else np.loadtxt(path, ndmin=1)
    est = lcd_vector(np.ravel(v), args.L, args.cap)
    print(json.dumps({"lcd": est.value, "censored": est.censored, "witness_residual": est.witness_residual,
                      "grid_step": est.grid_step, "L": args.L}))
    return EXIT_OK


def cmd_net(args) -> int:
    from ..deloc import disc_net

    net = disc_net(args.M, args.n, args.delta)
    print(json.dumps({"cardinality": net.cardinality, "bound": math.ceil(5 / args.delta**2), "mesh": net.mesh,
                      "radius": net.radius, "covering_failures": net.covering_failures(args.probes, args.seed)}))
    return EXIT_OK


def cmd_baseline(args) -> int:
    from .baseline import calibrate_smin_baseline, write_baseline

    data = calibrate_smin_baseline(seed=args.seed, trials=args.trials)
    write_baseline(data, args.output)
    print(json.dumps(data, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nogaps", description="Random-matrix delocalization experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment configuration")
    r.add_argument("config")
    r.add_argument("--workers", type=int, default=None)
    r.add_argument("--output", default=None, help="override output_path")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("summarize", help="tail probabilities with Wilson intervals")
    s.add_argument("records")
    s.add_argument("--metric", required=True)
    s.add_argument("--thresholds", required=True, help="comma- or space-separated reals")
    s.add_argument("--joint-flag", default=None)
    s.set_defaults(func=cmd_summarize)

    a = sub.add_parser("audit", help="randomized deterministic audits")
    a.add_argument("--suite", choices=AUDIT_SUITES, default="all")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--instances", type=int, default=50)
    a.add_argument("--n", type=int, default=12)
    a.set_defaults(func=cmd_audit)

    lc = sub.add_parser("lcd", help="LCD of a vector read from a text or .npy file")
    lc.add_argument("--vector", required=True)
    lc.add_argument("--L", type=float, required=True)
    lc.add_argument("--cap", type=float, default=None)
    lc.set_defaults(func=cmd_lcd)

    nt = sub.add_parser("net", help="disc net for the spectral parameter")
    nt.add_argument("--M", type=float, required=True)
    nt.add_argument("--n", type=int, required=True)
    nt.add_argument("--delta", type=float, required=True)
    nt.add_argument("--probes", type=int, default=10_000)
    nt.add_argument("--seed", type=int, default=0)
    nt.set_defaults(func=cmd_net)

    b = sub.add_parser("baseline", help="recompute the smallest-singular-value calibration baseline")
    b.add_argument("--output", required=True)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--trials", type=int, default=None)
    b.set_defaults(func=cmd_baseline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "baseline":
        from .baseline import BASELINE_TRIALS, CALIBRATION_SEED

        args.seed = CALIBRATION_SEED if args.seed is None else args.seed
        args.trials = BASELINE_TRIALS if args.trials is None else args.trials
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
