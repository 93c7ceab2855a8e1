"""Explanatory statistics behind the indicator shifts.

Covers reference-list length comparisons (raw and window-utilized),
cited-age profiles, citation volume from non-standard citing document
types, the per-publication national self-citation distribution, and the
additional-normalized-citations profile of countries receiving citations
from the excluded country.

Self-citation shares and cited-age profiles use resolved references only
(an unresolved reference carries no nationality or year); the unwindowed
reference-length comparison uses refs_total, the windowed one counts
resolved references into the citation window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cohorts import CohortTable
from .corpus import CorpusSnapshot
from .counterfactual import WorldPair

QUANTILE_LEVELS = (10, 25, 50, 75, 90)


@dataclass(frozen=True)
class SelfCitationDistribution:
    country: str
    year: int
    shares: np.ndarray              # one entry per eligible citing publication
    quantiles: dict[int, float]     # nearest-rank, empty when shares are empty


@dataclass(frozen=True)
class RefLengthStats:
    country: str
    year: int
    windowed: bool
    value: float | None             # mean of per-publication length ratios
    publications: int               # publications entering the mean
    skipped: int                    # publications without a usable baseline


@dataclass(frozen=True)
class AdditionalCitationsProfile:
    country: str
    year: int
    avg_additional_normalized: float | None
    cited_share: float
    counterfactual_mncs: float | None
    cited_count: int
    skipped_ec_undefined: int


@dataclass(frozen=True)
class ScatterPoint:
    category: str
    mean_ref_length: float
    expected_count: float


def _nearest_rank_quantiles(shares: np.ndarray) -> dict[int, float]:
    if shares.size == 0:
        return {}
    ordered = np.sort(shares)
    out = {}
    for level in QUANTILE_LEVELS:
        rank = max(1, math.ceil(level / 100 * ordered.size))
        out[level] = float(ordered[rank - 1])
    return out


def _outdegree(snapshot: CorpusSnapshot) -> np.ndarray:
    return np.diff(snapshot.out_indptr)


def self_citation_shares(snapshot: CorpusSnapshot, country: str,
                         year: int) -> SelfCitationDistribution:
    """Per-publication share of resolved references aimed at the own country.

    Covers the country's citing publications of the year with at least one
    resolved reference, regardless of document type.
    """
    outdeg = _outdegree(snapshot)
    sel = (
        snapshot.pubs_with_country(country)
        & (snapshot.years == year)
        & (outdeg > 0)
    )
    if not sel.any():
        return SelfCitationDistribution(country=country, year=year,
                                        shares=np.zeros(0), quantiles={})
    own = snapshot.pubs_with_country(country)
    hits = kernels.count_marked(snapshot.citing, own[snapshot.cited], snapshot.n_pubs)
    shares = hits[sel] / outdeg[sel]
    return SelfCitationDistribution(
        country=country, year=year, shares=shares,
        quantiles=_nearest_rank_quantiles(shares),
    )


def windowed_out_lengths(snapshot: CorpusSnapshot) -> np.ndarray:
    """Per-publication count of resolved references into the citation window."""
    if snapshot.n_edges == 0:
        return np.zeros(snapshot.n_pubs, dtype=np.int64)
    age = snapshot.years[snapshot.citing] - snapshot.years[snapshot.cited]
    mark = (age >= 0) & (age <= snapshot.config.window_length - 1)
    return kernels.count_marked(snapshot.citing, mark, snapshot.n_pubs)


def normalized_ref_length(snapshot: CorpusSnapshot, country: str, year: int,
                          windowed: bool = False) -> RefLengthStats:
    """Mean reference-list length of a country relative to everyone else.

    Every publication's length is divided by the average length of
    non-country publications across its (year, category) cells; the result
    is the mean of those ratios. Publications whose cells have no non-country
    members, or a zero baseline, are skipped and counted.
    """
    lengths = windowed_out_lengths(snapshot) if windowed \
        else snapshot.refs_total.astype(np.int64)
    in_year = snapshot.years == year
    mine = snapshot.pubs_with_country(country)

    pub_rows, cat_rows = snapshot.pub_category_rows()
    base_keep = in_year[pub_rows] & ~mine[pub_rows]
    n_cats = max(len(snapshot.cat_names), 1)
    base_sum = np.bincount(cat_rows[base_keep],
                           weights=lengths[pub_rows[base_keep]].astype(np.float64),
                           minlength=n_cats)
    base_cnt = np.bincount(cat_rows[base_keep], minlength=n_cats)

    sel = np.flatnonzero(mine & in_year)
    ratios = []
    skipped = 0
    for i in sel:
        codes = snapshot.cat_codes[snapshot.cat_indptr[i]:snapshot.cat_indptr[i + 1]]
        present = base_cnt[codes] > 0
        if not present.any():
            skipped += 1
            continue
        baseline = float(np.mean(base_sum[codes[present]] / base_cnt[codes[present]]))
        if baseline == 0.0:
            skipped += 1
            continue
        ratios.append(lengths[i] / baseline)
    value = float(np.mean(ratios)) if ratios else None
    return RefLengthStats(country=country, year=year, windowed=windowed,
                          value=value, publications=len(ratios), skipped=skipped)


def cited_age_distribution(snapshot: CorpusSnapshot, country: str,
                           citing_year: int) -> dict[int, float]:
    """Share of resolved references per cited publication year; sums to 1."""
    sel = snapshot.pubs_with_country(country) & (snapshot.years == citing_year)
    mark = sel[snapshot.citing] if snapshot.n_edges else np.zeros(0, dtype=bool)
    if not mark.any():
        return {}
    cited_years = snapshot.years[snapshot.cited[mark]]
    values, counts = np.unique(cited_years, return_counts=True)
    total = counts.sum()
    return {int(y): float(c / total) for y, c in zip(values, counts)}


def nonstandard_citing_counts(snapshot: CorpusSnapshot, country: str,
                              year: int) -> int:
    """Countable window-valid citations made in the year by the country's
    publications of non-standard document type (not article or review)."""
    if snapshot.n_edges == 0:
        return 0
    cfg = snapshot.config
    citing_years = snapshot.years[snapshot.citing]
    age = citing_years - snapshot.years[snapshot.cited]
    mark = (
        snapshot.countable
        & (citing_years == year)
        & (age >= 0) & (age <= cfg.window_length - 1)
        & (citing_years <= cfg.citation_cutoff_year)
        & (snapshot.doc_codes[snapshot.citing] >= 2)
        & snapshot.pubs_with_country(country)[snapshot.citing]
    )
    return int(np.count_nonzero(mark))


def additional_citations_profile(pair: WorldPair, country: str,
                                 year: int) -> AdditionalCitationsProfile:
    """Extra normalized citations a country's publications owe to the
    excluded country, and how widely they are spread.

    A publication counts as cited by the excluded country when its obtained
    citations drop after the exclusion; the extra citations are normalized
    by its counterfactual expected count.
    """
    snap = pair.actual.snapshot
    base = (
        pair.country_mask(country) & pair.survives & snap.cited_side
        & (snap.years == year)
    )
    cf_cell = pair.counterfactual.table.get((country, year))
    cf_mncs = cf_cell.mncs if cf_cell is not None else None
    n_base = int(np.count_nonzero(base))
    if n_base == 0:
        return AdditionalCitationsProfile(
            country=country, year=year, avg_additional_normalized=None,
            cited_share=0.0, counterfactual_mncs=cf_mncs,
            cited_count=0, skipped_ec_undefined=0,
        )
    delta_oc = pair.actual.oc - pair.cf_oc
    cited = base & (delta_oc >= 1)
    n_cited = int(np.count_nonzero(cited))
    usable = cited & pair.cf_defined
    n_usable = int(np.count_nonzero(usable))
    avg = (
        float(np.mean(delta_oc[usable] / pair.cf_effective_ec[usable]))
        if n_usable else None
    )
    return AdditionalCitationsProfile(
        country=country, year=year,
        avg_additional_normalized=avg,
        cited_share=n_cited / n_base,
        counterfactual_mncs=cf_mncs,
        cited_count=n_cited,
        skipped_ec_undefined=n_cited - n_usable,
    )


def reflen_vs_ec_scatter(snapshot: CorpusSnapshot, cohorts: CohortTable,
                         year: int) -> list[ScatterPoint]:
    """Per-category mean reference list length and expected count for a year.

    The mean uses the same fractional weights as the expected count, so in a
    closed single-cohort world the two coincide exactly.
    """
    ref_sums = np.bincount(
        cohorts.row_cohort,
        weights=cohorts.row_weight * snapshot.refs_total[cohorts.row_pub],
        minlength=len(cohorts),
    )
    points = []
    for i in np.flatnonzero(cohorts.years == year):
        points.append(ScatterPoint(
            category=snapshot.cat_names[cohorts.cat_codes[i]],
            mean_ref_length=float(ref_sums[i] / cohorts.weight[i]),
            expected_count=float(cohorts.expected_count[i]),
        ))
    points.sort(key=lambda p: p.category)
    return points
