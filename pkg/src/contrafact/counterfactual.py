"""Excluded-country worlds and actual-versus-counterfactual deltas.

The counterfactual world removes every publication listing the excluded
country (a multi-country publication listing it is removed entirely, from
the cited and the citing side alike) together with all edges touching a
removed publication, then recomputes citation counts, cohort statistics and
national indicators from scratch. Deltas are actual minus counterfactual
and are reported only for (country, year) cells present in both worlds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cohorts as cohorts_mod
from . import indicators as indicators_mod
from .cohorts import CohortTable
from .corpus import CorpusSnapshot, _assemble_snapshot


def exclude_country(snapshot: CorpusSnapshot, country: str) -> CorpusSnapshot:
    """New snapshot without any publication listing ``country``.

    Surviving publications keep their ids, attributes and refs_total; only
    edges with both endpoints surviving remain. Excluding a country with no
    publications returns a snapshot with an identical digest.
    """
    keep = ~snapshot.pubs_with_country(country)
    if keep.all():
        kept_idx = np.arange(snapshot.n_pubs, dtype=np.int64)
    else:
        kept_idx = np.flatnonzero(keep)

    new_index = np.full(snapshot.n_pubs, -1, dtype=np.int64)
    new_index[kept_idx] = np.arange(kept_idx.size)

    cat_sizes = np.diff(snapshot.cat_indptr)[kept_idx]
    cat_indptr = np.zeros(kept_idx.size + 1, dtype=np.int64)
    np.cumsum(cat_sizes, out=cat_indptr[1:])
    cat_row_keep = keep[snapshot.pub_category_rows()[0]]

    cty_sizes = np.diff(snapshot.country_indptr)[kept_idx]
    cty_indptr = np.zeros(kept_idx.size + 1, dtype=np.int64)
    np.cumsum(cty_sizes, out=cty_indptr[1:])
    cty_row_keep = keep[snapshot.pub_country_rows()[0]]

    edge_keep = keep[snapshot.citing] & keep[snapshot.cited]

    return _assemble_snapshot(
        snapshot.config,
        [snapshot.ids[i] for i in kept_idx],
        snapshot.years[kept_idx],
        snapshot.doc_codes[kept_idx],
        snapshot.refs_total[kept_idx],
        snapshot.cat_names, cat_indptr, snapshot.cat_codes[cat_row_keep],
        snapshot.country_names, cty_indptr, snapshot.country_codes[cty_row_keep],
        new_index[snapshot.citing[edge_keep]],
        new_index[snapshot.cited[edge_keep]],
    )


@dataclass
class WorldStack:
    """A snapshot with everything computed on it."""

    snapshot: CorpusSnapshot
    oc: np.ndarray
    cohorts: CohortTable
    ncs: np.ndarray
    defined: np.ndarray
    effective_ec: np.ndarray
    top_frac: np.ndarray
    table: indicators_mod.IndicatorTable


def build_stack(snapshot: CorpusSnapshot) -> WorldStack:
    oc = cohorts_mod.count_obtained(snapshot)
    cohort_table = cohorts_mod.compute_cohorts(snapshot, oc)
    ncs, defined, eff_ec = indicators_mod.ncs_arrays(snapshot, oc, cohort_table)
    top_frac = cohorts_mod.top_fractions(snapshot, oc, cohort_table)
    table = indicators_mod.country_year_indicators(snapshot, oc, ncs, defined, top_frac)
    return WorldStack(
        snapshot=snapshot, oc=oc, cohorts=cohort_table,
        ncs=ncs, defined=defined, effective_ec=eff_ec,
        top_frac=top_frac, table=table,
    )


@dataclass
class WorldPair:
    """Actual and counterfactual stacks plus survivor-aligned views.

    The ``cf_*`` arrays are indexed like the actual snapshot; entries for
    removed publications are 0 / NaN / False and ``survives`` tells them
    apart from genuine zeros.
    """

    actual: WorldStack
    counterfactual: WorldStack
    excluded_country: str
    survives: np.ndarray
    cf_oc: np.ndarray
    cf_ncs: np.ndarray
    cf_defined: np.ndarray
    cf_effective_ec: np.ndarray
    _country_masks: dict = field(default_factory=dict, repr=False)

    def country_mask(self, country: str) -> np.ndarray:
        mask = self._country_masks.get(country)
        if mask is None:
            mask = self.actual.snapshot.pubs_with_country(country)
            self._country_masks[country] = mask
        return mask


def build_world_pair(snapshot: CorpusSnapshot, country: str,
                     actual: WorldStack | None = None) -> WorldPair:
    """Build both worlds; pass ``actual`` to reuse an existing stack."""
    if actual is None:
        actual = build_stack(snapshot)
    cf_snapshot = exclude_country(snapshot, country)
    cf = build_stack(cf_snapshot)

    n = snapshot.n_pubs
    survives = ~snapshot.pubs_with_country(country)
    cf_oc = np.zeros(n, dtype=np.int64)
    cf_ncs = np.full(n, np.nan)
    cf_defined = np.zeros(n, dtype=bool)
    cf_eff = np.full(n, np.nan)
    # survivors keep their relative order, so the aligned views are direct
    cf_oc[survives] = cf.oc
    cf_ncs[survives] = cf.ncs
    cf_defined[survives] = cf.defined
    cf_eff[survives] = cf.effective_ec
    return WorldPair(
        actual=actual, counterfactual=cf, excluded_country=country,
        survives=survives, cf_oc=cf_oc, cf_ncs=cf_ncs,
        cf_defined=cf_defined, cf_effective_ec=cf_eff,
    )


def delta_impact(pair: WorldPair, country: str, year: int,
                 indicator: str = "mncs") -> float | None:
    """Actual minus counterfactual national indicator, None when absent."""
    if indicator not in ("mncs", "pp_top10"):
        raise ValueError(f"unknown indicator {indicator!r}")
    a = pair.actual.table.get((country, year))
    c = pair.counterfactual.table.get((country, year))
    if a is None or c is None:
        return None
    av = getattr(a, indicator)
    cv = getattr(c, indicator)
    if av is None or cv is None:
        return None
    return av - cv


@dataclass(frozen=True)
class CategoryDeltas:
    """Per-category expected-count differences for one year."""

    year: int
    per_category: dict[str, float]
    mean: float | None
    omitted: int  # cohorts present in only one world


def delta_expected_counts(pair: WorldPair, year: int) -> CategoryDeltas:
    def year_ecs(stack: WorldStack) -> dict[str, float]:
        t = stack.cohorts
        sel = np.flatnonzero(t.years == year)
        names = stack.snapshot.cat_names
        return {names[t.cat_codes[i]]: float(t.expected_count[i]) for i in sel}

    actual = year_ecs(pair.actual)
    cf = year_ecs(pair.counterfactual)
    shared = sorted(actual.keys() & cf.keys())
    per_category = {c: actual[c] - cf[c] for c in shared}
    omitted = len(actual.keys() ^ cf.keys())
    mean = float(np.mean(list(per_category.values()))) if per_category else None
    return CategoryDeltas(year=year, per_category=per_category, mean=mean, omitted=omitted)


def delta_obtained(pair: WorldPair, country: str, year: int) -> float | None:
    """Mean per-publication loss of obtained citations in the counterfactual.

    Averaged over the country's surviving cited-side publications of the
    year; None when it has none.
    """
    snap = pair.actual.snapshot
    sel = (
        pair.country_mask(country) & pair.survives & snap.cited_side
        & (snap.years == year)
    )
    if not sel.any():
        return None
    diff = pair.actual.oc[sel] - pair.cf_oc[sel]
    return float(np.mean(diff))


@dataclass(frozen=True)
class RatioOfRatios:
    """Country-year mean of per-publication counterfactual/actual score ratios."""

    value: float | None
    eligible: int
    skipped: int


def ratio_of_ratios(pair: WorldPair, country: str, year: int) -> RatioOfRatios:
    """Mean NC_counterfactual / NC_actual over eligible publications.

    Eligible publications survive the exclusion, have positive actual
    obtained citations and a defined score in both worlds; the rest of the
    country-year's cited-side publications are skipped and counted.
    """
    snap = pair.actual.snapshot
    base = (
        pair.country_mask(country) & snap.cited_side & (snap.years == year)
    )
    eligible = base & pair.survives & (pair.actual.oc > 0) \
        & pair.actual.defined & pair.cf_defined
    n_eligible = int(np.count_nonzero(eligible))
    n_skipped = int(np.count_nonzero(base)) - n_eligible
    if n_eligible == 0:
        return RatioOfRatios(value=None, eligible=0, skipped=n_skipped)
    ratios = pair.cf_ncs[eligible] / pair.actual.ncs[eligible]
    return RatioOfRatios(value=float(np.mean(ratios)), eligible=n_eligible,
                         skipped=n_skipped)


def mean_effect(values) -> tuple[float | None, float | None]:
    """Cross-country mean and normal-approximation 95% half-width.

    The half-width is absent with fewer than two values.
    """
    arr = np.asarray([v for v in values if v is not None], dtype=np.float64)
    n = arr.size
    if n == 0:
        return None, None
    mean = float(np.mean(arr))
    if n < 2:
        return mean, None
    half = 1.96 * float(np.std(arr, ddof=1)) / float(np.sqrt(n))
    return mean, half


@dataclass(frozen=True)
class CountryDeltaRow:
    country: str
    year: int
    delta_mncs: float | None
    delta_pptop10: float | None
    delta_oc: float | None
    ratio_of_ratios: float | None
    eligible_count: int


@dataclass(frozen=True)
class CategoryDeltaRow:
    category: str
    year: int
    delta_ec: float


@dataclass(frozen=True)
class MeanEffectRow:
    year: int
    indicator: str
    mean: float
    ci_halfwidth: float | None
    n: int


@dataclass(frozen=True)
class DeltaReport:
    excluded_country: str
    country_rows: list[CountryDeltaRow]
    category_rows: list[CategoryDeltaRow]
    mean_rows: list[MeanEffectRow]

    def ratio_series(self) -> dict[int, float]:
        """Year to cross-country mean ratio-of-ratios, for trend fitting."""
        return {
            row.year: row.mean for row in self.mean_rows
            if row.indicator == "ratio_of_ratios"
        }


_MEAN_INDICATORS = ("delta_mncs", "delta_pptop10", "delta_oc", "ratio_of_ratios")


def build_delta_report(pair: WorldPair) -> DeltaReport:
    """All delta quantities for every (country, year) present in both worlds."""
    shared_keys = sorted(pair.actual.table.keys() & pair.counterfactual.table.keys())

    country_rows = []
    for country, year in shared_keys:
        rr = ratio_of_ratios(pair, country, year)
        country_rows.append(CountryDeltaRow(
            country=country,
            year=year,
            delta_mncs=delta_impact(pair, country, year, "mncs"),
            delta_pptop10=delta_impact(pair, country, year, "pp_top10"),
            delta_oc=delta_obtained(pair, country, year),
            ratio_of_ratios=rr.value,
            eligible_count=rr.eligible,
        ))

    years = sorted({year for _, year in shared_keys})
    category_rows = []
    for year in years:
        deltas = delta_expected_counts(pair, year)
        for category in sorted(deltas.per_category):
            category_rows.append(CategoryDeltaRow(
                category=category, year=year,
                delta_ec=deltas.per_category[category],
            ))

    mean_rows = []
    for year in years:
        rows = [r for r in country_rows if r.year == year]
        for indicator in _MEAN_INDICATORS:
            values = [getattr(r, indicator) for r in rows]
            mean, half = mean_effect(values)
            if mean is None:
                continue
            n = sum(1 for v in values if v is not None)
            mean_rows.append(MeanEffectRow(
                year=year, indicator=indicator, mean=mean,
                ci_halfwidth=half, n=n,
            ))

    return DeltaReport(
        excluded_country=pair.excluded_country,
        country_rows=country_rows,
        category_rows=category_rows,
        mean_rows=mean_rows,
    )
