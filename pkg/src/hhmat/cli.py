"""Command line interface.

Exit codes: 0 all checks passed or were hypothesis-skipped, 1 at least one
inequality violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness, hhcheck
from .errors import Error
from .funcat import from_descriptor
from .harness import InstanceSpec, THEOREM_IDS


def _interval(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(",")
    return float(lo), float(hi)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hhmat")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a randomized checker suite")
    verify.add_argument("--theorem", required=True, choices=THEOREM_IDS)
    verify.add_argument("--n", type=int, default=4)
    verify.add_argument("--m", type=int, default=None)
    verify.add_argument("--f", default="power:2")
    verify.add_argument("--map", default="identity")
    verify.add_argument("--interval", type=_interval, default=(0.0, 2.0))
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--workers", type=int, default=1)
    verify.add_argument("--quad-nodes", type=int, default=16)
    verify.add_argument("--quad-rtol", type=float, default=1e-11)
    verify.add_argument("--json", dest="json_out")
    verify.add_argument("--csv", dest="csv_out")

    alpha = sub.add_parser("alpha", help="chord-ratio constant of a catalog function")
    alpha.add_argument("--f", required=True)
    alpha.add_argument("--interval", type=_interval, required=True)

    chain = sub.add_parser("chain", help="five-term refinement chain suite")
    chain.add_argument("--f", required=True)
    chain.add_argument("--k", type=int, required=True)
    chain.add_argument("--p", type=int, required=True)
    chain.add_argument("--n", type=int, default=4)
    chain.add_argument("--seed", type=int, default=0)
    chain.add_argument("--interval", type=_interval, default=(0.25, 2.0))
    chain.add_argument("--trials", type=int, default=1)
    chain.add_argument("--quad-nodes", type=int, default=16)
    chain.add_argument("--quad-rtol", type=float, default=1e-11)
    chain.add_argument("--json", dest="json_out")
    chain.add_argument("--csv", dest="csv_out")

    ce = sub.add_parser("counterexample", help="reproduce the fixed 2x2 counterexample")
    ce.add_argument("--json", dest="json_out")

    rp = sub.add_parser("replay", help="re-run instances from a report file")
    rp.add_argument("file")
    return parser


def _emit_suite(report: harness.SuiteReport, json_out: str | None, csv_out: str | None) -> int:
    print(report.summary())
    for fail in report.failures:
        print(f"  FAIL trial {fail['trial']}: instance below")
        print("  " + json.dumps(fail["instance"], sort_keys=True))
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    if csv_out:
        report.write_csv(csv_out)
    return 0 if not report.failures else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            spec = InstanceSpec(
                n=args.n, m=args.m, interval=args.interval, function=args.f,
                map_desc=args.map, trials=args.trials, seed=args.seed,
                quad_nodes=args.quad_nodes, quad_rtol=args.quad_rtol,
            )
            report = harness.run_suite(spec, args.theorem, workers=args.workers)
            return _emit_suite(report, args.json_out, args.csv_out)
        if args.command == "alpha":
            f = from_descriptor(args.f)
            result = hhcheck.mond_pecaric_alpha(f, *args.interval)
            print(f"alpha={result.alpha!r} argmax_t={result.argmax_t!r} "
                  f"interval=[{result.omega:g},{result.Omega:g}]")
            return 0
        if args.command == "chain":
            spec = InstanceSpec(
                n=args.n, interval=args.interval, function=args.f,
                trials=args.trials, seed=args.seed,
                chain_k=args.k, chain_p=args.p,
                quad_nodes=args.quad_nodes, quad_rtol=args.quad_rtol,
            )
            report = harness.run_suite(spec, "chain")
            return _emit_suite(report, args.json_out, args.csv_out)
        if args.command == "counterexample":
            report = hhcheck.reproduce_counterexample()
            payload = report.to_jsonable()
            for key in ("mid_cubed", "segment_integral", "endpoint_average"):
                print(f"{key}: {payload[key]}")
            print(f"left gap det = {payload['left_gap_det']} "
                  f"(left inequality fails: {report.left_fails})")
            print(f"right gap det = {payload['right_gap_det']} "
                  f"(right inequality fails: {report.right_fails})")
            print("counterexample reproduced exactly" if report.passes
                  else "counterexample reproduction FAILED")
            if args.json_out:
                with open(args.json_out, "w", encoding="utf-8") as fh:
                    json.dump(payload, fh, sort_keys=True)
            return 0 if report.passes else 1
        if args.command == "replay":
            with open(args.file, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
            results = harness.replay(payload)
            bad = 0
            for inst, result in results:
                margin = "n/a" if result.margin is None else f"{result.margin:.3e}"
                print(f"{inst['theorem']} seed={inst.get('seed')}: "
                      f"{result.status} margin={margin} {result.detail}")
                bad += result.status == "fail"
            return 1 if bad else 0
    except Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
