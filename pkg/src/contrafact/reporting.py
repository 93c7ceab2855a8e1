"""Deterministic CSV/JSON emission and run manifests.

All floating-point output is fixed at nine significant digits so golden
files and digest comparisons stay stable; absent values are written as
empty fields. Numbers, row order and line endings never depend on thread
counts or scheduling.
"""

from __future__ import annotations

import csv
import datetime
import hashlib
import json
import os
import resource

import numpy as np

from .cohorts import CohortTable
from .counterfactual import DeltaReport
from .indicators import IndicatorTable


def fmt(value) -> str:
    """Canonical field rendering: 9 significant digits, '' for absent."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".9g")


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def cohort_stats_csv(cohorts: CohortTable, path) -> None:
    names = cohorts.snapshot.cat_names
    rows = (
        (int(cohorts.years[i]), names[cohorts.cat_codes[i]], cohorts.weight[i],
         cohorts.expected_count[i], int(cohorts.top_threshold[i]))
        for i in range(len(cohorts))
    )
    write_csv(path, ["year", "category", "weight", "expected_count", "top_threshold"], rows)


def country_indicators_csv(table: IndicatorTable, path, *, country=None,
                           year_from=None, year_to=None) -> None:
    rows = []
    for (cty, year) in sorted(table):
        if country is not None and cty != country:
            continue
        if year_from is not None and year < year_from:
            continue
        if year_to is not None and year > year_to:
            continue
        cell = table[(cty, year)]
        rows.append((cell.country, cell.year, cell.pub_count, cell.mncs,
                     cell.pp_top10, cell.mean_oc, cell.undefined_count))
    write_csv(path, ["country", "year", "pub_count", "mncs", "pp_top10",
                     "mean_oc", "undefined_count"], rows)


def deltas_country_csv(report: DeltaReport, path) -> None:
    rows = (
        (r.country, r.year, r.delta_mncs, r.delta_pptop10, r.delta_oc,
         r.ratio_of_ratios, r.eligible_count)
        for r in report.country_rows
    )
    write_csv(path, ["country", "year", "delta_mncs", "delta_pptop10",
                     "delta_oc", "ratio_of_ratios", "eligible_count"], rows)


def deltas_category_csv(report: DeltaReport, path) -> None:
    rows = ((r.category, r.year, r.delta_ec) for r in report.category_rows)
    write_csv(path, ["category", "year", "delta_ec"], rows)


def mean_effect_csv(report: DeltaReport, path) -> None:
    rows = (
        (r.year, r.indicator, r.mean, r.ci_halfwidth, r.n)
        for r in report.mean_rows
    )
    write_csv(path, ["year", "indicator", "mean", "ci_halfwidth", "n"], rows)


def write_json(path, payload: dict) -> None:
    def normalize(obj):
        if isinstance(obj, dict):
            return {k: normalize(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [normalize(v) for v in obj]
        if isinstance(obj, (bool, type(None), str, int)):
            return obj
        if isinstance(obj, (float, np.floating)):
            return float(fmt(float(obj)))
        if isinstance(obj, np.integer):
            return int(obj)
        return obj

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(normalize(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# run manifests


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def peak_rss_bytes() -> int:
    # ru_maxrss is reported in KiB on Linux
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


def build_manifest(command: str, inputs: dict[str, str],
                   outputs: dict[str, str], version: str,
                   threads: int) -> dict:
    return {
        "tool": "contrafact",
        "version": version,
        "command": command,
        "created_utc": datetime.datetime.now(datetime.timezone.utc)
        .isoformat(timespec="seconds"),
        "threads": threads,
        "inputs": {name: sha256_file(p) for name, p in sorted(inputs.items())},
        "outputs": {name: sha256_file(p) for name, p in sorted(outputs.items())},
        "peak_rss_bytes": peak_rss_bytes(),
    }


def write_manifest(out_dir, command: str, inputs: dict[str, str],
                   outputs: dict[str, str], version: str, threads: int) -> str:
    path = os.path.join(out_dir, "manifest.json")
    manifest = build_manifest(command, inputs, outputs, version, threads)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
