"""Command-line interface: verify, campaign, bounds, gen-fixtures.

Exit codes are the contract: 0 = robust, 1 = violated, 2 = usage or I/O
error, 3 = exact-split budget exceeded (rerun with --method approx). With
--json, stdout carries a single JSON document suitable for scripting;
human-readable summaries go to stdout otherwise. Reports always embed the
resolved configuration so a run can be reproduced from its output alone.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import synth
from ._exceptions import SplitBudgetError, StarVerifyError
from ._faults import generate_campaign
from ._metrics import GRADE_VARIANTS, ThresholdBand, build_report
from ._reach import DEFAULT_SPLIT_BUDGET, reach_network
from ._star import from_spike_fault
from .io import (
    load_bounds_fixture,
    load_model,
    load_signals,
    report_document,
    save_bounds_fixture,
    save_campaign,
    save_model,
    save_signals,
    write_report,
)
from .plot import write_plot

EXIT_ROBUST = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2
EXIT_SPLIT_BUDGET = 3


def _grade_flag(value: str) -> str:
    variant = value.replace("-", "_")
    if variant not in GRADE_VARIANTS:
        raise argparse.ArgumentTypeError(
            f"unknown grade variant {value!r}; choose from "
            + ", ".join(v.replace("_", "-") for v in GRADE_VARIANTS)
        )
    return variant


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starverify",
        description=(
            "Star-set reachability verifier: decides whether a signal "
            "reconstruction network, fed a spike-faulted input set, keeps its "
            "reachable output bounds inside a threshold band around the "
            "unperturbed signal. Reports Percentage Robustness and the "
            "Un-robustness Grade."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser(
        "verify",
        help="verify one signal against one spike fault (or recorded bounds)",
    )
    verify.add_argument("--model", help="model JSON path")
    verify.add_argument("--signals", help="signal CSV path")
    verify.add_argument("--signal-id", help="row id inside --signals")
    verify.add_argument("--fault-loc", type=int, help="time index of the spike fault")
    verify.add_argument("--fault-lo", type=float, help="lower spike amplitude")
    verify.add_argument("--fault-hi", type=float, help="upper spike amplitude")
    verify.add_argument(
        "--bounds",
        help="recorded output-bounds JSON; skips reachability and grades these bounds",
    )
    verify.add_argument("--tau", type=float, required=True,
                        help="acceptable deviation around the reference signal")
    verify.add_argument("--method", choices=("exact", "approx"), default="exact",
                        help="reachability method (default: exact)")
    verify.add_argument("--grade-variant", type=_grade_flag, default="band_exceedance",
                        help="band-exceedance (default) or from-reference")
    verify.add_argument("--split-budget", type=int, default=DEFAULT_SPLIT_BUDGET)
    verify.add_argument("--report", help="write the full report JSON here")
    verify.add_argument("--plot", help="write an SVG of bounds vs band here")
    verify.add_argument("--json", action="store_true", help="emit the report JSON on stdout")
    verify.set_defaults(func=cmd_verify)

    campaign = sub.add_parser(
        "campaign", help="sweep one random spike fault per signal across a signal set"
    )
    campaign.add_argument("--model", required=True)
    campaign.add_argument("--signals", required=True)
    campaign.add_argument("--amp", type=float, required=True,
                          help="spike magnitude a; faults range over [-a, +a]")
    campaign.add_argument("--tau", type=float, required=True)
    campaign.add_argument("--seed", type=int, default=0, help="campaign PRNG seed")
    campaign.add_argument("--method", choices=("exact", "approx"), default="exact")
    campaign.add_argument("--grade-variant", type=_grade_flag, default="band_exceedance")
    campaign.add_argument("--split-budget", type=int, default=DEFAULT_SPLIT_BUDGET)
    campaign.add_argument("--jobs", type=int, default=1,
                          help="verify this many signals concurrently")
    campaign.add_argument("--limit", type=int, default=None,
                          help="only sweep the first N signals")
    campaign.add_argument("--out", required=True, help="aggregate JSON output path")
    campaign.add_argument("--campaign-out", help="also record the generated campaign JSON")
    campaign.add_argument("--json", action="store_true")
    campaign.set_defaults(func=cmd_campaign)

    bounds = sub.add_parser("bounds", help="print reachable output bounds as JSON")
    bounds.add_argument("--model", required=True)
    bounds.add_argument("--signals", required=True)
    bounds.add_argument("--signal-id", required=True)
    bounds.add_argument("--fault-loc", type=int, required=True)
    bounds.add_argument("--fault-lo", type=float, required=True)
    bounds.add_argument("--fault-hi", type=float, required=True)
    bounds.add_argument("--method", choices=("exact", "approx"), default="exact")
    bounds.add_argument("--split-budget", type=int, default=DEFAULT_SPLIT_BUDGET)
    bounds.set_defaults(func=cmd_bounds)

    gen = sub.add_parser("gen-fixtures", help="write the deterministic fixture suite")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--train-count", type=int, default=synth.TRAIN_COUNT)
    gen.add_argument("--test-count", type=int, default=synth.TEST_COUNT)
    gen.set_defaults(func=cmd_gen_fixtures)

    return parser


def _verify_one(model, signal, fault_loc, fault_lo, fault_hi, tau, method, split_budget):
    star = from_spike_fault(signal, fault_loc, fault_lo, fault_hi)
    result = reach_network(model, star, method, split_budget)
    band = ThresholdBand(reference=signal, tau=tau)
    return build_report(result.union_bounds, band), result, band


def cmd_verify(args) -> int:
    if args.bounds is not None:
        reference, out_bounds = load_bounds_fixture(args.bounds)
        band = ThresholdBand(reference=reference, tau=args.tau)
        report = build_report(out_bounds, band)
        config = {
            "command": "verify",
            "bounds": args.bounds,
            "tau": args.tau,
            "grade_variant": args.grade_variant,
        }
    else:
        missing = [
            name
            for name, value in (
                ("--model", args.model),
                ("--signals", args.signals),
                ("--signal-id", args.signal_id),
                ("--fault-loc", args.fault_loc),
                ("--fault-lo", args.fault_lo),
                ("--fault-hi", args.fault_hi),
            )
            if value is None
        ]
        if missing:
            print(
                "verify needs either --bounds or all of: " + ", ".join(missing),
                file=sys.stderr,
            )
            return EXIT_USAGE
        model = load_model(args.model)
        signals = load_signals(args.signals)
        signal = signals.get(args.signal_id)
        report, result, band = _verify_one(
            model, signal, args.fault_loc, args.fault_lo, args.fault_hi,
            args.tau, args.method, args.split_budget,
        )
        out_bounds = result.union_bounds
        config = {
            "command": "verify",
            "model": args.model,
            "signals": args.signals,
            "signal_id": args.signal_id,
            "fault": {"location": args.fault_loc, "amp_lower": args.fault_lo,
                      "amp_upper": args.fault_hi},
            "tau": args.tau,
            "method": args.method,
            "grade_variant": args.grade_variant,
            "split_budget": args.split_budget,
        }

    if args.report:
        write_report(report, band, args.report, args.grade_variant, config)
    if args.plot:
        write_plot(out_bounds, band, band.reference, args.plot)

    if args.json:
        print(json.dumps(report_document(report, band, args.grade_variant, config)))
    else:
        grade = (
            report.grade_band_exceedance
            if args.grade_variant == "band_exceedance"
            else report.grade_from_reference
        )
        print(f"verdict: {report.verdict}")
        print(f"percentage robustness: {100.0 * report.percentage_robustness:.2f}%")
        print(
            f"un-robustness grade ({args.grade_variant.replace('_', '-')}): "
            f"{grade:.4f} at instance {report.worst_index}"
        )
    return EXIT_ROBUST if report.verdict == "robust" else EXIT_VIOLATED


def cmd_campaign(args) -> int:
    model = load_model(args.model)
    signals = load_signals(args.signals)
    ids = list(signals.ids)
    if args.limit is not None:
        ids = ids[: args.limit]
    campaign = generate_campaign(ids, signals.n_samples, args.amp, args.seed)
    if args.campaign_out:
        save_campaign(campaign, args.campaign_out)

    def run(entry):
        signal = signals.get(entry.signal_id)
        report, _, _ = _verify_one(
            model, signal, entry.fault.location, entry.fault.amp_lower,
            entry.fault.amp_upper, args.tau, args.method, args.split_budget,
        )
        grade = (
            report.grade_band_exceedance
            if args.grade_variant == "band_exceedance"
            else report.grade_from_reference
        )
        return {
            "signal_id": entry.signal_id,
            "fault": {
                "location": entry.fault.location,
                "amp_lower": entry.fault.amp_lower,
                "amp_upper": entry.fault.amp_upper,
            },
            "verdict": report.verdict,
            "percentage_robustness": report.percentage_robustness,
            "grade": grade,
            "worst_index": report.worst_index,
        }

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(run, campaign.entries))
    else:
        rows = [run(e) for e in campaign.entries]

    percentages = [r["percentage_robustness"] for r in rows]
    doc = {
        "format_version": "1",
        "config": {
            "command": "campaign",
            "model": args.model,
            "signals": args.signals,
            "amp_magnitude": args.amp,
            "tau": args.tau,
            "seed": args.seed,
            "method": args.method,
            "grade_variant": args.grade_variant,
            "limit": args.limit,
        },
        "n_signals": len(rows),
        "mean_percentage_robustness": float(np.mean(percentages)),
        "min_percentage_robustness": float(np.min(percentages)),
        "max_grade": float(np.max([r["grade"] for r in rows])),
        "n_violated": sum(1 for r in rows if r["verdict"] == "violated"),
        "rows": rows,
    }
    text = json.dumps(doc, indent=1) + "\n"
    tmp = os.fspath(args.out) + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, args.out)

    if args.json:
        print(json.dumps(doc))
    else:
        print(f"signals verified: {doc['n_signals']}")
        print(f"mean percentage robustness: {100.0 * doc['mean_percentage_robustness']:.2f}%")
        print(f"min percentage robustness: {100.0 * doc['min_percentage_robustness']:.2f}%")
        print(f"max grade: {doc['max_grade']:.4f}")
        print(f"violated: {doc['n_violated']}")
    return EXIT_ROBUST if doc["n_violated"] == 0 else EXIT_VIOLATED


def cmd_bounds(args) -> int:
    model = load_model(args.model)
    signals = load_signals(args.signals)
    signal = signals.get(args.signal_id)
    star = from_spike_fault(signal, args.fault_loc, args.fault_lo, args.fault_hi)
    result = reach_network(model, star, args.method, args.split_budget)
    doc = {
        "format_version": "1",
        "method": args.method,
        "lower": [float(v) for v in result.union_bounds.lower],
        "upper": [float(v) for v in result.union_bounds.upper],
        "n_output_stars": len(result.output_stars),
        "lp_calls": result.total_lp_calls,
    }
    print(json.dumps(doc))
    return EXIT_ROBUST


def cmd_gen_fixtures(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    train, test = synth.synthetic_split(
        seed=args.seed, train_count=args.train_count, test_count=args.test_count
    )
    save_signals(train, os.path.join(args.out, "signals_train.csv"))
    save_signals(test, os.path.join(args.out, "signals_test.csv"))

    autoencoder = synth.fixture_autoencoder(seed=args.seed)
    save_model(autoencoder, os.path.join(args.out, "autoencoder.json"))
    save_model(synth.tiny_network(), os.path.join(args.out, "tiny.json"))

    reference, bounds = synth.worked_example_fixture()
    save_bounds_fixture(reference, bounds, os.path.join(args.out, "worked_example_bounds.json"))
    reference, bounds = synth.threshold_contrast_fixture()
    save_bounds_fixture(reference, bounds,
                        os.path.join(args.out, "threshold_contrast_bounds.json"))

    meta = {
        "format_version": "1",
        "seed": args.seed,
        "signal_length": synth.SIGNAL_LENGTH,
        "train_count": args.train_count,
        "test_count": args.test_count,
        "normalization": {
            "orig_min": train.normalization.orig_min,
            "orig_max": train.normalization.orig_max,
        },
        "files": [
            "signals_train.csv",
            "signals_test.csv",
            "autoencoder.json",
            "tiny.json",
            "worked_example_bounds.json",
            "threshold_contrast_bounds.json",
        ],
    }
    meta_path = os.path.join(args.out, "meta.json")
    tmp = meta_path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(meta, indent=1) + "\n")
    os.replace(tmp, meta_path)
    print(f"fixtures written to {args.out}")
    return EXIT_ROBUST


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SplitBudgetError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SPLIT_BUDGET
    except (StarVerifyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
