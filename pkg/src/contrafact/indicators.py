"""Per-publication normalized citation scores and national indicators.

A publication's normalized citation score (NCS) is its obtained citations
divided by the expected count of its cohort, averaged over the listed
categories whose cohorts have a positive expected count. Publications whose
cohorts all have expected count zero carry no defensible score; they are
flagged undefined, excluded from national means and surfaced through
``undefined_count``.

National aggregates use whole counting: a publication listing several
countries contributes fully to each of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cohorts import CohortTable
from .corpus import CorpusSnapshot


@dataclass(frozen=True)
class NcsScore:
    publication_id: str
    ncs: float
    defined: bool


@dataclass(frozen=True)
class CountryYearIndicators:
    country: str
    year: int
    pub_count: int            # cited-side publications, whole counting
    mncs: float | None        # None when no publication has a defined score
    pp_top10: float | None
    mean_oc: float | None
    undefined_count: int


def ncs_arrays(snapshot: CorpusSnapshot, oc: np.ndarray,
               cohorts: CohortTable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized scores: (ncs, defined, effective_ec), snapshot-indexed.

    ``effective_ec`` is the harmonic mean of the positive expected counts
    over the publication's categories; it satisfies ncs = oc / effective_ec
    exactly and is NaN (like ncs) where no category qualifies.
    """
    n = snapshot.n_pubs
    ec_rows = cohorts.expected_count[cohorts.row_cohort]
    ok = ec_rows > 0.0
    pubs = cohorts.row_pub[ok]
    inv_ec = 1.0 / ec_rows[ok]

    kprime = np.bincount(pubs, minlength=n).astype(np.int64)
    inv_sum = np.bincount(pubs, weights=inv_ec, minlength=n)
    defined = kprime > 0
    ncs = np.full(n, np.nan)
    eff_ec = np.full(n, np.nan)
    np.divide(oc * inv_sum, kprime, out=ncs, where=defined)
    np.divide(kprime.astype(np.float64), inv_sum, out=eff_ec, where=defined)
    return ncs, defined, eff_ec


def ncs_score(snapshot: CorpusSnapshot, oc: np.ndarray, cohorts: CohortTable,
              pub_id: str) -> NcsScore:
    """Score of a single publication by id."""
    ncs, defined, _ = ncs_arrays(snapshot, oc, cohorts)
    i = snapshot.id_to_index[pub_id]
    return NcsScore(
        publication_id=pub_id,
        ncs=float(ncs[i]) if defined[i] else 0.0,
        defined=bool(defined[i]),
    )


IndicatorTable = dict[tuple[str, int], CountryYearIndicators]


def country_year_indicators(snapshot: CorpusSnapshot, oc: np.ndarray,
                            ncs: np.ndarray, defined: np.ndarray,
                            top_frac: np.ndarray) -> IndicatorTable:
    """National indicators per (country, year); empty cells are absent keys."""
    cited = snapshot.cited_side
    pub_rows, cty_rows = snapshot.pub_country_rows()
    keep = cited[pub_rows]
    pub_rows = pub_rows[keep]
    cty_rows = cty_rows[keep]
    if pub_rows.size == 0:
        return {}

    y_min = snapshot.config.y_min
    span = snapshot.config.y_max - y_min + 1
    keys = cty_rows * np.int64(span) + (snapshot.years[pub_rows] - y_min)
    uniq, inv = np.unique(keys, return_inverse=True)
    m = uniq.shape[0]

    counts = np.bincount(inv, minlength=m).astype(np.int64)
    def_rows = defined[pub_rows]
    defined_counts = np.bincount(inv[def_rows], minlength=m).astype(np.int64)
    ncs_sums = np.bincount(inv[def_rows], weights=ncs[pub_rows[def_rows]], minlength=m)
    frac_sums = np.bincount(inv, weights=top_frac[pub_rows], minlength=m)
    oc_sums = np.bincount(inv, weights=oc[pub_rows].astype(np.float64), minlength=m)

    table: IndicatorTable = {}
    names = snapshot.country_names
    for i in range(m):
        country = names[int(uniq[i] // span)]
        year = int(uniq[i] % span) + y_min
        n_defined = int(defined_counts[i])
        table[(country, year)] = CountryYearIndicators(
            country=country,
            year=year,
            pub_count=int(counts[i]),
            mncs=float(ncs_sums[i] / n_defined) if n_defined else None,
            pp_top10=float(frac_sums[i] / counts[i]),
            mean_oc=float(oc_sums[i] / counts[i]),
            undefined_count=int(counts[i]) - n_defined,
        )
    return table


def mncs(table: IndicatorTable, country: str, year: int) -> float | None:
    """National mean normalized citation score, or None when absent."""
    cell = table.get((country, year))
    return cell.mncs if cell is not None else None


def pp_top10(table: IndicatorTable, country: str, year: int) -> float | None:
    """National share of top-cited publications, or None when absent."""
    cell = table.get((country, year))
    return cell.pp_top10 if cell is not None else None
