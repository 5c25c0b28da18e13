"""Command line entry point.

Exit codes: 0 success, 1 config error, 2 invariant violation (including a
failed Monte Carlo cross-check), 3 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, InvariantViolation
from .report import AnalysisConfig, run_full_analysis, validate_config, with_overrides

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_IO = 0, 1, 2, 3


def _float_list(text: str) -> tuple:
    if not text.strip():
        return ()
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _name_list(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tasteleak",
        description="Ethnicity-inference risk and utility of taster phenotype and polygenic score disclosure.",
    )
    p.add_argument("-c", "--config", help="analysis config (JSON); defaults to the built-in analysis")
    p.add_argument("-o", "--out", dest="output_dir", help="output directory")
    p.add_argument("--seed", type=int, help="Monte Carlo seed override")
    p.add_argument("--samples", type=int, help="Monte Carlo sample count override")
    p.add_argument("--crosscheck", action="store_true", help="also compare exact joints against Monte Carlo")
    p.add_argument("--programs", type=_name_list, help="comma-separated program ids to analyse")
    p.add_argument("--sigma", type=_float_list, dest="sigmas",
                   help="comma-separated noise levels ('' for none)")
    p.add_argument("--delta", type=_float_list, dest="deltas",
                   help="comma-separated error bounds ('' for none)")
    p.add_argument("--validate", action="store_true", help="only validate the config and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = AnalysisConfig.from_file(args.config) if args.config else AnalysisConfig()
        cfg = with_overrides(cfg, output_dir=args.output_dir, seed=args.seed, samples=args.samples,
                             programs=args.programs, sigmas=args.sigmas, deltas=args.deltas)
        if args.validate:
            errors = validate_config(cfg)
            for e in errors:
                print(f"config error: {e}", file=sys.stderr)
            return EXIT_CONFIG if errors else EXIT_OK
        bundle = run_full_analysis(cfg, with_crosscheck=args.crosscheck)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    for name, entry in _flat_scores(bundle["scores"]):
        print(f"{name:28s} V={entry['bayes_vulnerability']:.4f}  "
              f"max-output-privacy={entry['max_output_privacy']:.4f}"
              f"{'  [above threshold]' if entry['exceeds_threshold'] else ''}")
    for row in bundle["frontier"]:
        if row.recommended:
            sigma = "" if row.sigma is None else f" sigma={row.sigma:g}"
            print(f"delta={row.delta:g}: recommended {row.program}{sigma} "
                  f"(V={row.bayes_vulnerability:.4f}, utility={row.error_bound:.4f})")
    cc = bundle.get("crosscheck")
    if cc is not None:
        for name, r in cc["variants"].items():
            print(f"crosscheck {name:28s} max {r['max_se_units']:.2f} SE  {'ok' if r['passed'] else 'FAIL'}")
        if not cc["passed"]:
            print("invariant violation: Monte Carlo cross-check exceeded the SE limit", file=sys.stderr)
            return EXIT_INVARIANT
    print(f"wrote {len(bundle['manifest']['artifacts'])} artifacts to {cfg.output_dir}")
    return EXIT_OK


def _flat_scores(scores: dict):
    for program, entry in scores.items():
        if "bayes_vulnerability" in entry:
            yield program, entry
        else:
            for sigma, sub in entry.items():
                yield f"{program} sigma={sigma}", sub


if __name__ == "__main__":
    sys.exit(main())
