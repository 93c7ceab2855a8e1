"""Command-line interface.

Subcommands: validate, compute, counterfactual, diagnose, synth. Exit
codes: 0 success, 1 I/O failure, 2 validation failure, 3 usage error.
Every command is deterministic given its inputs and flags; commands with
``--out`` write a manifest.json recording input and output digests so
determinism is checkable by digest comparison.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import __version__, kernels
from . import counterfactual as cf_mod
from . import diagnostics as diag_mod
from . import extrapolation, reporting, synthgen
from .corpus import CorpusValidationError, load_config, read_corpus
from .counterfactual import build_delta_report, build_stack, build_world_pair
from .synthgen import ScenarioError

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_USAGE = 3

DIAGNOSTICS = (
    "self-citation", "ref-length", "cited-age", "nonstandard-citing",
    "additional-citations", "reflen-ec",
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise _UsageError(message)


def _add_corpus_args(p) -> None:
    p.add_argument("--pubs", required=True, help="publications JSONL path")
    p.add_argument("--edges", required=True, help="citation edges TSV path")
    p.add_argument("--config", required=True, help="corpus config JSON path")


def _add_common(p, out_required: bool) -> None:
    p.add_argument("--out", required=out_required, help="output directory")
    p.add_argument("--threads", type=int, default=0,
                   help="worker threads (0 = auto; outputs never depend on it)")


def build_parser() -> _Parser:
    parser = _Parser(prog="contrafact", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate corpus files")
    _add_corpus_args(p)
    _add_common(p, out_required=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compute", help="compute national indicators")
    _add_corpus_args(p)
    p.add_argument("--country", help="restrict the indicator table to one country")
    p.add_argument("--year-from", type=int, dest="year_from")
    p.add_argument("--year-to", type=int, dest="year_to")
    _add_common(p, out_required=True)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("counterfactual",
                       help="exclude a country and report all deltas")
    _add_corpus_args(p)
    p.add_argument("--exclude", required=True, metavar="CC",
                   help="country code to exclude")
    _add_common(p, out_required=True)
    p.set_defaults(func=cmd_counterfactual)

    p = sub.add_parser("diagnose", help="emit one diagnostic as CSV")
    _add_corpus_args(p)
    p.add_argument("--which", required=True,
                   help=f"one of: {', '.join(DIAGNOSTICS)}")
    p.add_argument("--country", help="country focus (default: all countries)")
    p.add_argument("--exclude", metavar="CC",
                   help="excluded country (required for additional-citations)")
    p.add_argument("--year-from", type=int, dest="year_from")
    p.add_argument("--year-to", type=int, dest="year_to")
    _add_common(p, out_required=True)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--preset", help=f"one of: {', '.join(synthgen.preset_names())}")
    p.add_argument("--config", help="scenario config JSON path")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--list-presets", action="store_true",
                   help="list preset names and exit")
    _add_common(p, out_required=False)
    p.set_defaults(func=cmd_synth)

    return parser


def _resolve_threads(args) -> int:
    n = getattr(args, "threads", 0) or 0
    if n == 0:
        env = os.environ.get("CONTRAFACT_THREADS", "").strip()
        if env:
            try:
                n = int(env)
            except ValueError:
                raise _UsageError(f"CONTRAFACT_THREADS is not an integer: {env!r}")
    if n < 0:
        raise _UsageError("--threads must be >= 0")
    if n > 0:
        kernels.set_threads(n)
    return n


def _inputs(args) -> dict[str, str]:
    return {"pubs": args.pubs, "edges": args.edges, "config": args.config}


def cmd_validate(args) -> int:
    threads = _resolve_threads(args)
    config = load_config(args.config)
    try:
        snapshot = read_corpus(args.pubs, args.edges, config)
    except CorpusValidationError as exc:
        for issue in exc.issues:
            print(f"invalid: {issue}", file=sys.stderr)
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            report = os.path.join(args.out, "validation_report.txt")
            with open(report, "w", encoding="utf-8", newline="\n") as fh:
                fh.writelines(f"invalid: {issue}\n" for issue in exc.issues)
            reporting.write_manifest(args.out, "validate", _inputs(args),
                                     {"validation_report": report},
                                     __version__, threads)
        return EXIT_VALIDATION

    summary = (
        f"corpus valid: {snapshot.n_pubs} publications, {snapshot.n_edges} "
        f"resolved citation links, {len(snapshot.country_names)} countries, "
        f"{len(snapshot.cat_names)} categories"
    )
    print(summary)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        report = os.path.join(args.out, "validation_report.txt")
        with open(report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(summary + "\n")
        reporting.write_manifest(args.out, "validate", _inputs(args),
                                 {"validation_report": report},
                                 __version__, threads)
    return EXIT_OK


def cmd_compute(args) -> int:
    threads = _resolve_threads(args)
    config = load_config(args.config)
    snapshot = read_corpus(args.pubs, args.edges, config)
    stack = build_stack(snapshot)

    os.makedirs(args.out, exist_ok=True)
    indicators_path = os.path.join(args.out, "country_indicators.csv")
    cohorts_path = os.path.join(args.out, "cohort_stats.csv")
    reporting.country_indicators_csv(
        stack.table, indicators_path, country=args.country,
        year_from=args.year_from, year_to=args.year_to,
    )
    reporting.cohort_stats_csv(stack.cohorts, cohorts_path)
    reporting.write_manifest(
        args.out, "compute", _inputs(args),
        {"country_indicators": indicators_path, "cohort_stats": cohorts_path},
        __version__, threads,
    )
    print(f"wrote {indicators_path} and {cohorts_path}")
    return EXIT_OK


def cmd_counterfactual(args) -> int:
    threads = _resolve_threads(args)
    config = load_config(args.config)
    snapshot = read_corpus(args.pubs, args.edges, config)
    pair = build_world_pair(snapshot, args.exclude)
    report = build_delta_report(pair)

    os.makedirs(args.out, exist_ok=True)
    outputs = {}
    path = os.path.join(args.out, "deltas_country.csv")
    reporting.deltas_country_csv(report, path)
    outputs["deltas_country"] = path
    path = os.path.join(args.out, "deltas_category.csv")
    reporting.deltas_category_csv(report, path)
    outputs["deltas_category"] = path
    path = os.path.join(args.out, "mean_effect.csv")
    reporting.mean_effect_csv(report, path)
    outputs["mean_effect"] = path

    series = report.ratio_series()
    if len(series) >= 2 and len(set(series)) >= 2:
        fit = extrapolation.fit_trend(series)
        prediction = extrapolation.predict_crossing(fit, level=1.0)
        path = os.path.join(args.out, "trend.json")
        reporting.write_json(path, extrapolation.trend_summary(fit, prediction))
        outputs["trend"] = path

    reporting.write_manifest(args.out, "counterfactual", _inputs(args),
                             outputs, __version__, threads)
    print(f"wrote {len(outputs)} report files to {args.out}")
    return EXIT_OK


def _diag_years(args, config) -> list[int]:
    lo = args.year_from if args.year_from is not None else config.y_min
    hi = args.year_to if args.year_to is not None else config.y_max
    return [y for y in range(config.y_min, config.y_max + 1) if lo <= y <= hi]


def cmd_diagnose(args) -> int:
    threads = _resolve_threads(args)
    which = args.which
    if which not in DIAGNOSTICS:
        raise _UsageError(
            f"unknown diagnostic {which!r} (expected one of: {', '.join(DIAGNOSTICS)})"
        )
    if which == "additional-citations" and not args.exclude:
        raise _UsageError("additional-citations requires --exclude")

    config = load_config(args.config)
    snapshot = read_corpus(args.pubs, args.edges, config)
    years = _diag_years(args, config)
    countries = [args.country] if args.country else list(snapshot.country_names)

    os.makedirs(args.out, exist_ok=True)
    outputs = {}

    def emit(name, header, rows):
        path = os.path.join(args.out, name)
        reporting.write_csv(path, header, rows)
        outputs[name.removesuffix(".csv")] = path

    if which == "self-citation":
        share_rows, quant_rows = [], []
        for country in countries:
            for year in years:
                dist = diag_mod.self_citation_shares(snapshot, country, year)
                share_rows.extend((country, year, s) for s in dist.shares)
                if dist.quantiles:
                    quant_rows.append((country, year) + tuple(
                        dist.quantiles[q] for q in diag_mod.QUANTILE_LEVELS))
        emit("self_citation_shares.csv", ["country", "year", "share"], share_rows)
        emit("self_citation_quantiles.csv",
             ["country", "year", "q10", "q25", "q50", "q75", "q90"], quant_rows)
    elif which == "ref-length":
        rows = []
        for country in countries:
            for year in years:
                for windowed in (False, True):
                    st = diag_mod.normalized_ref_length(snapshot, country, year,
                                                        windowed=windowed)
                    rows.append((country, year, windowed, st.value,
                                 st.publications, st.skipped))
        emit("ref_length.csv",
             ["country", "year", "windowed", "mean_normalized_length",
              "publications", "skipped"], rows)
    elif which == "cited-age":
        rows = []
        for country in countries:
            for year in years:
                dist = diag_mod.cited_age_distribution(snapshot, country, year)
                rows.extend((country, year, cited_year, share)
                            for cited_year, share in sorted(dist.items()))
        emit("cited_age.csv", ["country", "citing_year", "cited_year", "share"], rows)
    elif which == "nonstandard-citing":
        rows = [
            (country, year, diag_mod.nonstandard_citing_counts(snapshot, country, year))
            for country in countries for year in years
        ]
        emit("nonstandard_citing.csv", ["country", "year", "citations"], rows)
    elif which == "additional-citations":
        pair = build_world_pair(snapshot, args.exclude)
        rows = []
        for country in countries:
            if country == args.exclude:
                continue
            for year in years:
                prof = diag_mod.additional_citations_profile(pair, country, year)
                rows.append((country, year, prof.counterfactual_mncs,
                             prof.avg_additional_normalized, prof.cited_share,
                             prof.cited_count, prof.skipped_ec_undefined))
        emit("additional_citations.csv",
             ["country", "year", "counterfactual_mncs",
              "avg_additional_normalized", "cited_share", "cited_count",
              "skipped_ec_undefined"], rows)
    elif which == "reflen-ec":
        stack = build_stack(snapshot)
        rows = []
        for year in years:
            for point in diag_mod.reflen_vs_ec_scatter(snapshot, stack.cohorts, year):
                rows.append((year, point.category, point.mean_ref_length,
                             point.expected_count))
        emit("reflen_ec.csv",
             ["year", "category", "mean_ref_length", "expected_count"], rows)

    reporting.write_manifest(args.out, f"diagnose:{which}", _inputs(args),
                             outputs, __version__, threads)
    print(f"wrote {', '.join(sorted(outputs))} to {args.out}")
    return EXIT_OK


def cmd_synth(args) -> int:
    threads = _resolve_threads(args)
    if args.list_presets:
        for name in synthgen.preset_names():
            print(name)
        return EXIT_OK
    if bool(args.preset) == bool(args.config):
        raise _UsageError("provide exactly one of --preset or --config")
    if not args.out:
        raise _UsageError("--out is required")

    if args.preset:
        if args.preset not in synthgen.preset_names():
            raise _UsageError(
                f"unknown preset {args.preset!r} "
                f"(known: {', '.join(synthgen.preset_names())})"
            )
        scenario = synthgen.preset(args.preset)
        inputs = {}
    else:
        scenario = synthgen.load_scenario(args.config)
        inputs = {"scenario": args.config}
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)

    paths = synthgen.generate_files(scenario, args.out)
    reporting.write_manifest(args.out, "synth", inputs,
                             {"pubs": paths["pubs"], "edges": paths["edges"],
                              "corpus_config": paths["config"]},
                             __version__, threads)
    print(f"wrote {paths['pubs']}, {paths['edges']}, {paths['config']}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusValidationError, ScenarioError) as exc:
        issues = getattr(exc, "issues", None) or [str(exc)]
        for issue in issues:
            print(f"invalid: {issue}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
