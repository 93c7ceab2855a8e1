"""Obtained-citation counting and per-(year, category) cohort statistics.

A publication's obtained citations (OC) are the distinct countable citing
publications whose year falls inside the citation window: the publication
year itself plus the following ``window_length - 1`` years, capped at the
configured citation cutoff year.

Cohorts are (year, category) cells over cited-side publications. A
publication listing k categories enters each of its cohorts with fractional
weight 1/k, which makes the weighted mean of OC/EC exactly one inside every
cohort with citations. The top threshold t of a cohort is the smallest
integer such that member weight with OC > t stays within ``top_share`` of
the cohort weight; members at OC = t share a tie fraction chosen so the
cohort's top mass is exactly ``top_share * W``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .corpus import CorpusSnapshot


def count_obtained(snapshot: CorpusSnapshot) -> np.ndarray:
    """Window-restricted citation counts, indexed like the snapshot.

    Zero for publications outside the cited side.
    """
    cfg = snapshot.config
    if snapshot.n_edges == 0:
        return np.zeros(snapshot.n_pubs, dtype=np.int64)
    citing_year = snapshot.years[snapshot.citing]
    cited_year = snapshot.years[snapshot.cited]
    return kernels.count_in_window(
        snapshot.cited, citing_year, cited_year, snapshot.countable,
        cfg.window_length, cfg.citation_cutoff_year, snapshot.n_pubs,
    )


@dataclass(frozen=True)
class CohortStats:
    year: int
    category: str
    weight: float
    expected_count: float
    top_threshold: int
    tie_fraction: float


class CohortTable:
    """Vectorized per-cohort statistics plus the row expansion behind them.

    ``row_pub`` / ``row_cohort`` / ``row_weight`` hold one entry per
    (cited-side publication, listed category) pair; downstream scoring
    reuses them so the weighting stays consistent everywhere.
    """

    def __init__(self, snapshot, years, cat_codes, weight, expected_count,
                 top_threshold, tie_fraction, row_pub, row_cohort, row_weight):
        self.snapshot = snapshot
        self.years = years
        self.cat_codes = cat_codes
        self.weight = weight
        self.expected_count = expected_count
        self.top_threshold = top_threshold
        self.tie_fraction = tie_fraction
        self.row_pub = row_pub
        self.row_cohort = row_cohort
        self.row_weight = row_weight
        self._index: dict[tuple[int, str], int] | None = None

    def __len__(self) -> int:
        return len(self.years)

    def _key_index(self) -> dict[tuple[int, str], int]:
        if self._index is None:
            names = self.snapshot.cat_names
            self._index = {
                (int(y), names[c]): i
                for i, (y, c) in enumerate(zip(self.years, self.cat_codes))
            }
        return self._index

    def stats_for(self, year: int, category: str) -> CohortStats:
        i = self._key_index()[(year, category)]
        return CohortStats(
            year=int(self.years[i]),
            category=self.snapshot.cat_names[self.cat_codes[i]],
            weight=float(self.weight[i]),
            expected_count=float(self.expected_count[i]),
            top_threshold=int(self.top_threshold[i]),
            tie_fraction=float(self.tie_fraction[i]),
        )

    def as_mapping(self) -> dict[tuple[int, str], CohortStats]:
        return {key: self.stats_for(*key) for key in self._key_index()}


def compute_cohorts(snapshot: CorpusSnapshot, oc: np.ndarray) -> CohortTable:
    """Cohort weights, expected counts and top thresholds for a snapshot.

    Cohorts with no cited-side members are absent from the table.
    """
    cited_side = snapshot.cited_side
    pub_rows, cat_rows = snapshot.pub_category_rows()
    keep = cited_side[pub_rows]
    pub_rows = pub_rows[keep]
    cat_rows = cat_rows[keep]

    n_cats = max(len(snapshot.cat_names), 1)
    k = np.diff(snapshot.cat_indptr)
    row_weight = 1.0 / k[pub_rows]

    keys = snapshot.years[pub_rows] * np.int64(n_cats) + cat_rows
    cohort_keys, row_cohort = np.unique(keys, return_inverse=True)
    row_cohort = row_cohort.astype(np.int64)
    n_cohorts = cohort_keys.shape[0]

    weight = np.bincount(row_cohort, weights=row_weight, minlength=n_cohorts)
    oc_rows = oc[pub_rows]
    ec_num = np.bincount(row_cohort, weights=row_weight * oc_rows, minlength=n_cohorts)
    expected = np.divide(ec_num, weight, out=np.zeros(n_cohorts), where=weight > 0)

    order = np.lexsort((-oc_rows, row_cohort))
    indptr = np.zeros(n_cohorts + 1, dtype=np.int64)
    np.cumsum(np.bincount(row_cohort, minlength=n_cohorts), out=indptr[1:])
    share_mass = snapshot.config.top_share * weight
    thr, mass_above, mass_at = kernels.top_cutoffs(
        indptr, oc_rows[order], row_weight[order], share_mass,
    )
    tie = np.divide(share_mass - mass_above, mass_at,
                    out=np.zeros(n_cohorts), where=mass_at > 0)

    return CohortTable(
        snapshot=snapshot,
        years=(cohort_keys // n_cats).astype(np.int64),
        cat_codes=(cohort_keys % n_cats).astype(np.int64),
        weight=weight,
        expected_count=expected,
        top_threshold=thr,
        tie_fraction=tie,
        row_pub=pub_rows,
        row_cohort=row_cohort,
        row_weight=row_weight,
    )


def top10_fraction(oc_value: int, cohort: CohortStats) -> float:
    """Top-share membership fraction of one publication inside one cohort."""
    if oc_value > cohort.top_threshold:
        return 1.0
    if oc_value == cohort.top_threshold:
        return cohort.tie_fraction
    return 0.0


def top_fractions(snapshot: CorpusSnapshot, oc: np.ndarray,
                  cohorts: CohortTable) -> np.ndarray:
    """Per-publication top-share fraction, averaged over listed categories.

    Zero for publications outside the cited side.
    """
    thr_rows = cohorts.top_threshold[cohorts.row_cohort]
    tie_rows = cohorts.tie_fraction[cohorts.row_cohort]
    oc_rows = oc[cohorts.row_pub]
    frac_rows = np.where(oc_rows > thr_rows, 1.0,
                         np.where(oc_rows == thr_rows, tie_rows, 0.0))
    # row weights are 1/k, so summing weighted fractions per publication is
    # exactly the mean over its categories
    return np.bincount(cohorts.row_pub, weights=cohorts.row_weight * frac_rows,
                       minlength=snapshot.n_pubs)
