"""Deterministic synthetic corpus generator for mechanism and scale tests.

Scenarios fix per-country per-year publication counts (exact, with optional
exponential growth), reference-list length distributions, cited-age recency
profiles, a row-stochastic country-to-country citation targeting matrix,
national self-citation rates, document-type mixes and category mixes.

All randomness comes from counter-based streams keyed by
``(seed, stream, country, year)``, so any (country, year) cell can be
generated independently and in any order with identical results; output
files are canonically sorted before writing, which makes generation
byte-deterministic regardless of scheduling.

Presets (values are part of the repository contract; tests pin their
downstream behaviour):

  closed_world   one year, one category, articles only, same-year citations,
                 every reference resolved and refs_total equal to the
                 resolved out-degree; expected counts then equal mean
                 reference list length exactly.
  rising_X       country XXX grows 1.35x per year with 1.5x reference
                 lists, strong recency bias and citations aimed at AAA and
                 BBB but never CCC; drives the mechanism sign suite.
  isolated_X     XXX publishes in its own category and cites only itself;
                 all other countries' indicators must be unchanged by its
                 exclusion.
  empty_X        XXX has no publications at all; exclusion is a no-op.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
import polars as pl

from .corpus import DOC_TYPES

_ID_WIDTH = 6


class ScenarioError(ValueError):
    """Invalid or infeasible scenario configuration."""


@dataclass(frozen=True)
class CountrySpec:
    """Per-country generation parameters.

    ``counts`` overrides the ``base_count * growth**(year - y_min)``
    schedule. ``self_cite_rate`` may be a constant, a ``(first, last)``
    linear ramp over the year range, or None to use the targeting matrix
    diagonal as-is. ``category_mix`` of None means uniform over the corpus
    categories.
    """

    code: str
    base_count: int
    growth: float = 1.0
    counts: tuple[int, ...] | None = None
    ref_mean: float = 8.0
    ref_sd: float = 2.0
    recency: tuple[float, ...] = (0.4, 0.35, 0.25)
    self_cite_rate: float | tuple[float, float] | None = None
    doc_type_mix: dict[str, float] = field(default_factory=lambda: {"article": 1.0})
    category_mix: dict[str, float] | None = None
    cats_per_pub: tuple[int, int] = (1, 1)
    nonsource_rate: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    y_min: int
    y_max: int
    categories: tuple[str, ...]
    countries: tuple[CountrySpec, ...]
    targeting: dict[str, dict[str, float]]
    window_length: int = 3
    top_share: float = 0.10
    citation_cutoff_year: int | None = None  # None means y_max
    closed_world: bool = False   # force refs_total == resolved out-degree
    exact_allocation: bool = False  # largest-remainder targets, no sampling
    seed: int = 0

    @property
    def years(self) -> range:
        return range(self.y_min, self.y_max + 1)

    @property
    def cutoff(self) -> int:
        return self.citation_cutoff_year if self.citation_cutoff_year is not None else self.y_max

    def validate(self) -> None:
        if self.y_min > self.y_max:
            raise ScenarioError("y_min must not exceed y_max")
        if not self.categories:
            raise ScenarioError("at least one category is required")
        if len(set(self.categories)) != len(self.categories):
            raise ScenarioError("duplicate category names")
        codes = [c.code for c in self.countries]
        if len(set(codes)) != len(codes):
            raise ScenarioError("duplicate country codes")
        n_years = self.y_max - self.y_min + 1
        for spec in self.countries:
            if spec.counts is not None and len(spec.counts) != n_years:
                raise ScenarioError(
                    f"{spec.code}: counts must list one value per year ({n_years})"
                )
            if spec.base_count < 0 or (spec.counts and min(spec.counts) < 0):
                raise ScenarioError(f"{spec.code}: negative publication count")
            rec = np.asarray(spec.recency, dtype=np.float64)
            if rec.size == 0 or rec.min() < 0 or abs(rec.sum() - 1.0) > 1e-9:
                raise ScenarioError(f"{spec.code}: recency must be a distribution")
            mix_sum = sum(spec.doc_type_mix.values())
            if abs(mix_sum - 1.0) > 1e-9 or not spec.doc_type_mix:
                raise ScenarioError(f"{spec.code}: doc_type_mix must sum to 1")
            for name in spec.doc_type_mix:
                if name not in DOC_TYPES:
                    raise ScenarioError(f"{spec.code}: unknown doc_type {name!r}")
            if spec.category_mix is not None:
                for name in spec.category_mix:
                    if name not in self.categories:
                        raise ScenarioError(f"{spec.code}: unknown category {name!r}")
                if abs(sum(spec.category_mix.values()) - 1.0) > 1e-9:
                    raise ScenarioError(f"{spec.code}: category_mix must sum to 1")
            lo, hi = spec.cats_per_pub
            n_avail = len(self.categories) if spec.category_mix is None else sum(
                1 for v in spec.category_mix.values() if v > 0
            )
            if not 1 <= lo <= hi <= n_avail:
                raise ScenarioError(f"{spec.code}: cats_per_pub out of range")
            if not 0.0 <= spec.nonsource_rate < 1.0:
                raise ScenarioError(f"{spec.code}: nonsource_rate out of range")
            if isinstance(spec.self_cite_rate, tuple):
                a, b = spec.self_cite_rate
                if not (0 <= a <= 1 and 0 <= b <= 1):
                    raise ScenarioError(f"{spec.code}: self_cite_rate ramp out of range")
            elif spec.self_cite_rate is not None:
                if not 0 <= spec.self_cite_rate <= 1:
                    raise ScenarioError(f"{spec.code}: self_cite_rate out of range")
            if self.closed_world:
                if spec.nonsource_rate != 0.0:
                    raise ScenarioError("closed_world forbids nonsource references")
                if len(spec.recency) > self.window_length:
                    raise ScenarioError(
                        "closed_world requires all cited ages inside the window"
                    )
        for code in codes:
            row = self.targeting.get(code)
            if row is None:
                raise ScenarioError(f"targeting row missing for {code}")
            unknown = set(row) - set(codes)
            if unknown:
                raise ScenarioError(f"targeting row of {code} names unknown {unknown}")
            total = sum(row.values())
            if abs(total - 1.0) > 1e-9 or min(row.values(), default=0.0) < 0:
                raise ScenarioError(f"targeting row of {code} must be stochastic")
        if self.cutoff < self.y_max:
            raise ScenarioError("citation_cutoff_year must not precede y_max")

    # -- JSON round trip -----------------------------------------------------

    def to_dict(self) -> dict:
        def spec_dict(s: CountrySpec) -> dict:
            rate = s.self_cite_rate
            return {
                "code": s.code,
                "base_count": s.base_count,
                "growth": s.growth,
                "counts": list(s.counts) if s.counts is not None else None,
                "ref_mean": s.ref_mean,
                "ref_sd": s.ref_sd,
                "recency": list(s.recency),
                "self_cite_rate": list(rate) if isinstance(rate, tuple) else rate,
                "doc_type_mix": dict(s.doc_type_mix),
                "category_mix": dict(s.category_mix) if s.category_mix else None,
                "cats_per_pub": list(s.cats_per_pub),
                "nonsource_rate": s.nonsource_rate,
            }

        return {
            "y_min": self.y_min,
            "y_max": self.y_max,
            "categories": list(self.categories),
            "countries": [spec_dict(s) for s in self.countries],
            "targeting": {c: dict(row) for c, row in self.targeting.items()},
            "window_length": self.window_length,
            "top_share": self.top_share,
            "citation_cutoff_year": self.citation_cutoff_year,
            "closed_world": self.closed_world,
            "exact_allocation": self.exact_allocation,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        def spec_from(d: dict) -> CountrySpec:
            rate = d.get("self_cite_rate")
            if isinstance(rate, list):
                rate = tuple(rate)
            return CountrySpec(
                code=d["code"],
                base_count=int(d["base_count"]),
                growth=float(d.get("growth", 1.0)),
                counts=tuple(d["counts"]) if d.get("counts") is not None else None,
                ref_mean=float(d.get("ref_mean", 8.0)),
                ref_sd=float(d.get("ref_sd", 2.0)),
                recency=tuple(d.get("recency", (0.4, 0.35, 0.25))),
                self_cite_rate=rate,
                doc_type_mix=dict(d.get("doc_type_mix", {"article": 1.0})),
                category_mix=dict(d["category_mix"]) if d.get("category_mix") else None,
                cats_per_pub=tuple(d.get("cats_per_pub", (1, 1))),
                nonsource_rate=float(d.get("nonsource_rate", 0.0)),
            )

        try:
            cfg = cls(
                y_min=int(data["y_min"]),
                y_max=int(data["y_max"]),
                categories=tuple(data["categories"]),
                countries=tuple(spec_from(d) for d in data["countries"]),
                targeting={c: dict(r) for c, r in data["targeting"].items()},
                window_length=int(data.get("window_length", 3)),
                top_share=float(data.get("top_share", 0.10)),
                citation_cutoff_year=(
                    int(data["citation_cutoff_year"])
                    if data.get("citation_cutoff_year") is not None else None
                ),
                closed_world=bool(data.get("closed_world", False)),
                exact_allocation=bool(data.get("exact_allocation", False)),
                seed=int(data.get("seed", 0)),
            )
        except KeyError as exc:
            raise ScenarioError(f"scenario config missing field {exc}") from exc
        cfg.validate()
        return cfg


def load_scenario(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario config is not valid JSON: {exc}") from exc
    return ScenarioConfig.from_dict(data)


# ---------------------------------------------------------------------------
# deterministic streams and allocation helpers


_STREAM_PUBS = 0
_STREAM_EDGES = 1


def _cell_rng(seed: int, stream: int, country_index: int, year: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=(seed, stream, country_index, year))
    return np.random.Generator(np.random.Philox(seed=ss))


def _largest_remainder(total: int, props: np.ndarray) -> np.ndarray:
    """Integer allocation of ``total`` proportional to ``props`` (sum 1)."""
    raw = props * total
    base = np.floor(raw).astype(np.int64)
    missing = int(total - base.sum())
    if missing > 0:
        order = np.argsort(-(raw - base), kind="stable")
        base[order[:missing]] += 1
    return base


def _self_rate(spec: CountrySpec, cfg: ScenarioConfig, year: int,
               diag: float) -> float:
    rate = spec.self_cite_rate
    if rate is None:
        return diag
    if isinstance(rate, tuple):
        a, b = rate
        if cfg.y_max == cfg.y_min:
            return float(a)
        t = (year - cfg.y_min) / (cfg.y_max - cfg.y_min)
        return float(a + (b - a) * t)
    return float(rate)


def _effective_row(cfg: ScenarioConfig, spec: CountrySpec, year: int,
                   code_index: dict[str, int]) -> np.ndarray:
    """Target-country distribution for one citing cell.

    The configured row supplies the off-diagonal proportions; the diagonal
    is replaced by the (possibly year-ramped) self-citation rate.
    """
    n = len(code_index)
    row = np.zeros(n, dtype=np.float64)
    for code, w in cfg.targeting[spec.code].items():
        row[code_index[code]] = w
    me = code_index[spec.code]
    s = _self_rate(spec, cfg, year, float(row[me]))
    off = row.copy()
    off[me] = 0.0
    off_sum = off.sum()
    if off_sum <= 0.0:
        out = np.zeros(n)
        out[me] = 1.0
        return out
    out = off * ((1.0 - s) / off_sum)
    out[me] = s
    return out


# ---------------------------------------------------------------------------
# generation


@dataclass
class GeneratedCorpus:
    """Columnar output of a generation run, ready for canonical writing."""

    config: ScenarioConfig
    country_codes: list[str]
    categories: list[str]
    # publications
    pub_country: np.ndarray   # int32 index into country_codes
    pub_year: np.ndarray      # int32
    pub_serial: np.ndarray    # int32
    pub_doc: np.ndarray       # int8 index into DOC_TYPES
    pub_refs_total: np.ndarray
    pub_cat_indptr: np.ndarray
    pub_cat_codes: np.ndarray  # int32 index into categories
    # edges, endpoint-coded like publications
    e_cit_country: np.ndarray
    e_cit_year: np.ndarray
    e_cit_serial: np.ndarray
    e_ced_country: np.ndarray
    e_ced_year: np.ndarray
    e_ced_serial: np.ndarray

    @property
    def n_pubs(self) -> int:
        return int(self.pub_year.shape[0])

    @property
    def n_edges(self) -> int:
        return int(self.e_cit_year.shape[0])

    def pub_counts(self) -> dict[str, dict[int, int]]:
        """Realized publications per country and year."""
        out: dict[str, dict[int, int]] = {c: {} for c in self.country_codes}
        pairs, counts = np.unique(
            np.stack([self.pub_country, self.pub_year]), axis=1, return_counts=True
        ) if self.n_pubs else (np.zeros((2, 0), dtype=np.int64), np.zeros(0, dtype=np.int64))
        for (ci, y), n in zip(pairs.T, counts):
            out[self.country_codes[int(ci)]][int(y)] = int(n)
        return out


def _counts_matrix(cfg: ScenarioConfig) -> np.ndarray:
    n_years = cfg.y_max - cfg.y_min + 1
    counts = np.zeros((len(cfg.countries), n_years), dtype=np.int64)
    for ci, spec in enumerate(cfg.countries):
        if spec.counts is not None:
            counts[ci] = np.asarray(spec.counts, dtype=np.int64)
        else:
            for yi in range(n_years):
                counts[ci, yi] = round(spec.base_count * spec.growth ** yi)
    return counts


def _cell_publications(cfg: ScenarioConfig, ci: int, year: int, n: int):
    """Attribute arrays for the n publications of one (country, year) cell."""
    spec = cfg.countries[ci]
    rng = _cell_rng(cfg.seed, _STREAM_PUBS, ci, year)

    doc_probs = np.array([spec.doc_type_mix.get(d, 0.0) for d in DOC_TYPES])
    doc = rng.choice(len(DOC_TYPES), size=n, p=doc_probs).astype(np.int8)

    m = len(cfg.categories)
    if spec.category_mix is None:
        cat_p = np.full(m, 1.0 / m)
    else:
        cat_p = np.array([spec.category_mix.get(c, 0.0) for c in cfg.categories])
    lo, hi = spec.cats_per_pub
    k = rng.integers(lo, hi + 1, size=n)
    if hi == 1:
        cat_codes = rng.choice(m, size=n, p=cat_p).astype(np.int32)
        cat_indptr = np.arange(n + 1, dtype=np.int64)
    else:
        # Gumbel top-k draws k distinct categories with the right marginals
        with np.errstate(divide="ignore"):
            logp = np.log(cat_p)
        g = rng.gumbel(size=(n, m)) + logp
        ranked = np.argsort(-g, axis=1, kind="stable")
        cat_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(k, out=cat_indptr[1:])
        cat_codes = np.empty(int(cat_indptr[-1]), dtype=np.int32)
        for i in range(n):
            cat_codes[cat_indptr[i]:cat_indptr[i + 1]] = ranked[i, :k[i]]

    refs = np.maximum(np.rint(rng.normal(spec.ref_mean, spec.ref_sd, size=n)), 0.0)
    return doc, cat_indptr, cat_codes, refs.astype(np.int64)


def _cell_edges_sampled(cfg, counts, ci, year, refs):
    """Sampled reference targets for one citing cell.

    Returns (slot_pub_serial, target_country, cited_year, cited_serial) for
    the resolved references; unresolved references simply stay inside
    refs_total.
    """
    spec = cfg.countries[ci]
    rng = _cell_rng(cfg.seed, _STREAM_EDGES, ci, year)
    total = int(refs.sum())
    if total == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z, z, z

    n = refs.shape[0]
    slot_pub = np.repeat(np.arange(n, dtype=np.int64), refs)
    code_index = {s.code: i for i, s in enumerate(cfg.countries)}
    row = _effective_row(cfg, spec, year, code_index)
    target = rng.choice(len(cfg.countries), size=total, p=row).astype(np.int64)

    rec = np.asarray(spec.recency, dtype=np.float64)
    offset = rng.choice(rec.size, size=total, p=rec).astype(np.int64)

    keep = np.ones(total, dtype=bool)
    if spec.nonsource_rate > 0.0:
        keep &= rng.random(total) >= spec.nonsource_rate

    def _pool_sizes(off):
        cited_y = year - off
        yi = cited_y - cfg.y_min
        return cited_y, np.where(yi >= 0, counts[target, np.clip(yi, 0, None)], 0)

    cited_year, pool = _pool_sizes(offset)
    for _ in range(12):  # resample cited ages whose pool is empty
        empty = keep & (pool == 0)
        if not empty.any():
            break
        offset[empty] = rng.choice(rec.size, size=int(empty.sum()), p=rec)
        cited_year, pool = _pool_sizes(offset)
    keep &= pool > 0

    serial = np.zeros(total, dtype=np.int64)
    drawable = keep
    serial[drawable] = rng.integers(0, pool[drawable])

    # references that landed on the citing publication itself move to a
    # uniformly drawn other member of the same pool
    collide = drawable & (target == ci) & (cited_year == year) & (serial == slot_pub)
    fixable = collide & (pool > 1)
    if fixable.any():
        shift = rng.integers(0, pool[fixable] - 1) + 1
        serial[fixable] = (serial[fixable] + shift) % pool[fixable]
    keep &= ~(collide & (pool <= 1))

    return (slot_pub[keep], target[keep], cited_year[keep], serial[keep])


def _cell_edges_closed_world(cfg, counts, ci, year, refs):
    """Per-publication sampling without replacement: every reference becomes
    one distinct resolved edge, as the closed-world contract requires."""
    spec = cfg.countries[ci]
    rng = _cell_rng(cfg.seed, _STREAM_EDGES, ci, year)
    code_index = {s.code: i for i, s in enumerate(cfg.countries)}
    row = _effective_row(cfg, spec, year, code_index)
    rec = np.asarray(spec.recency, dtype=np.float64)

    out_pub, out_target, out_year, out_serial = [], [], [], []
    for p in range(refs.shape[0]):
        r = int(refs[p])
        if r == 0:
            continue
        by_country = rng.multinomial(r, row)
        for tc in np.flatnonzero(by_country):
            by_offset = rng.multinomial(int(by_country[tc]), rec)
            for off in np.flatnonzero(by_offset):
                cnt = int(by_offset[off])
                cited_year = year - off
                yi = cited_year - cfg.y_min
                pool = int(counts[tc, yi]) if yi >= 0 else 0
                own = tc == ci and cited_year == year
                avail = pool - 1 if own else pool
                if avail < cnt:
                    raise ScenarioError(
                        f"infeasible closed-world cell {spec.code}/{year}: "
                        f"needs {cnt} distinct targets, pool has {avail}"
                    )
                if own:
                    # draw from the pool minus the citing publication itself
                    chosen = rng.choice(pool - 1, size=cnt, replace=False)
                    chosen = np.where(chosen >= p, chosen + 1, chosen)
                else:
                    chosen = rng.choice(pool, size=cnt, replace=False)
                out_pub.extend([p] * cnt)
                out_target.extend([tc] * cnt)
                out_year.extend([cited_year] * cnt)
                out_serial.extend(int(x) for x in chosen)
    return (np.asarray(out_pub, dtype=np.int64),
            np.asarray(out_target, dtype=np.int64),
            np.asarray(out_year, dtype=np.int64),
            np.asarray(out_serial, dtype=np.int64))


def _cell_edges_exact(cfg, counts, ci, year, refs):
    """Largest-remainder allocation: realized target shares match the
    effective row exactly (up to integer rounding), spread round-robin over
    the target pools. Distinct per publication; compatible with
    closed-world scenarios."""
    spec = cfg.countries[ci]
    code_index = {s.code: i for i, s in enumerate(cfg.countries)}
    row = _effective_row(cfg, spec, year, code_index)
    rec = np.asarray(spec.recency, dtype=np.float64)

    cursors: dict[tuple[int, int], int] = {}
    out_pub, out_target, out_year, out_serial = [], [], [], []
    for p in range(refs.shape[0]):
        r = int(refs[p])
        if r == 0:
            continue
        by_country = _largest_remainder(r, row)
        for tc in np.flatnonzero(by_country):
            by_offset = _largest_remainder(int(by_country[tc]), rec)
            for off in np.flatnonzero(by_offset):
                cnt = int(by_offset[off])
                cited_year = year - off
                yi = cited_year - cfg.y_min
                pool = int(counts[tc, yi]) if yi >= 0 else 0
                own = tc == ci and cited_year == year
                need = cnt + 2 if own else cnt
                if pool < need:
                    if cfg.closed_world:
                        raise ScenarioError(
                            f"infeasible closed-world cell {spec.code}/{year}: "
                            f"pool {pool} cannot host {cnt} exact targets"
                        )
                    continue  # leave these references unresolved
                key = (tc, cited_year)
                cur = cursors.get(key, 0)
                chosen = []
                while len(chosen) < cnt:
                    s = cur % pool
                    cur += 1
                    if own and s == p:
                        continue
                    chosen.append(s)
                cursors[key] = cur
                out_pub.extend([p] * cnt)
                out_target.extend([tc] * cnt)
                out_year.extend([cited_year] * cnt)
                out_serial.extend(chosen)
    return (np.asarray(out_pub, dtype=np.int64),
            np.asarray(out_target, dtype=np.int64),
            np.asarray(out_year, dtype=np.int64),
            np.asarray(out_serial, dtype=np.int64))


def generate(config: ScenarioConfig) -> GeneratedCorpus:
    """Generate the whole corpus into columnar arrays."""
    config.validate()
    counts = _counts_matrix(config)
    codes = [s.code for s in config.countries]

    pub_cols = {k: [] for k in ("country", "year", "serial", "doc", "refs")}
    cat_indptrs: list[np.ndarray] = []
    cat_codes_parts: list[np.ndarray] = []
    edge_cols = {k: [] for k in ("cc", "cy", "cs", "dc", "dy", "ds")}

    for ci, spec in enumerate(config.countries):
        for yi, year in enumerate(config.years):
            n = int(counts[ci, yi])
            if n == 0:
                continue
            doc, cat_indptr, cat_codes, refs = _cell_publications(config, ci, year, n)
            pub_cols["country"].append(np.full(n, ci, dtype=np.int32))
            pub_cols["year"].append(np.full(n, year, dtype=np.int32))
            pub_cols["serial"].append(np.arange(n, dtype=np.int32))
            pub_cols["doc"].append(doc)
            pub_cols["refs"].append(refs)
            cat_indptrs.append(cat_indptr)
            cat_codes_parts.append(cat_codes)

            if config.exact_allocation:
                cell = _cell_edges_exact(config, counts, ci, year, refs)
            elif config.closed_world:
                cell = _cell_edges_closed_world(config, counts, ci, year, refs)
            else:
                cell = _cell_edges_sampled(config, counts, ci, year, refs)
            slot_pub, target, cited_year, serial = cell
            edge_cols["cc"].append(np.full(slot_pub.shape[0], ci, dtype=np.int32))
            edge_cols["cy"].append(np.full(slot_pub.shape[0], year, dtype=np.int32))
            edge_cols["cs"].append(slot_pub.astype(np.int32))
            edge_cols["dc"].append(target.astype(np.int32))
            edge_cols["dy"].append(cited_year.astype(np.int32))
            edge_cols["ds"].append(serial.astype(np.int32))

    def cat_concat() -> tuple[np.ndarray, np.ndarray]:
        if not cat_indptrs:
            return np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int32)
        sizes = np.concatenate([np.diff(p) for p in cat_indptrs])
        indptr = np.zeros(sizes.shape[0] + 1, dtype=np.int64)
        np.cumsum(sizes, out=indptr[1:])
        return indptr, np.concatenate(cat_codes_parts)

    def cc(key, dtype):
        parts = pub_cols[key] if key in pub_cols else edge_cols[key]
        return (np.concatenate(parts).astype(dtype) if parts
                else np.zeros(0, dtype=dtype))

    cat_indptr, cat_codes = cat_concat()
    return GeneratedCorpus(
        config=config,
        country_codes=codes,
        categories=list(config.categories),
        pub_country=cc("country", np.int32),
        pub_year=cc("year", np.int32),
        pub_serial=cc("serial", np.int32),
        pub_doc=cc("doc", np.int8),
        pub_refs_total=cc("refs", np.int64),
        pub_cat_indptr=cat_indptr,
        pub_cat_codes=cat_codes,
        e_cit_country=cc("cc", np.int32),
        e_cit_year=cc("cy", np.int32),
        e_cit_serial=cc("cs", np.int32),
        e_ced_country=cc("dc", np.int32),
        e_ced_year=cc("dy", np.int32),
        e_ced_serial=cc("ds", np.int32),
    )


def _id_expr(country: str, year: str, serial: str) -> pl.Expr:
    return pl.format(
        "{}-{}-{}",
        pl.col(country),
        pl.col(year),
        pl.col(serial).cast(pl.Utf8).str.zfill(_ID_WIDTH),
    )


def pub_id(country_code: str, year: int, serial: int) -> str:
    return f"{country_code}-{year}-{serial:0{_ID_WIDTH}d}"


def write_corpus_files(data: GeneratedCorpus, out_dir) -> dict[str, str]:
    """Write pubs.jsonl, edges.tsv and corpus_config.json canonically.

    Publications are sorted by id, edges by (citing, cited); identical
    scenario configs therefore produce byte-identical files no matter how
    generation was scheduled.
    """
    os.makedirs(out_dir, exist_ok=True)
    pubs_path = os.path.join(out_dir, "pubs.jsonl")
    edges_path = os.path.join(out_dir, "edges.tsv")
    config_path = os.path.join(out_dir, "corpus_config.json")

    order = np.lexsort((data.pub_serial, data.pub_year, data.pub_country))
    with open(pubs_path, "w", encoding="utf-8", newline="\n") as fh:
        codes = data.country_codes
        cats = data.categories
        for i in order:
            cat_slice = data.pub_cat_codes[data.pub_cat_indptr[i]:data.pub_cat_indptr[i + 1]]
            rec = {
                "id": pub_id(codes[data.pub_country[i]], int(data.pub_year[i]),
                             int(data.pub_serial[i])),
                "year": int(data.pub_year[i]),
                "doc_type": DOC_TYPES[data.pub_doc[i]],
                "categories": [cats[c] for c in cat_slice],
                "countries": [codes[data.pub_country[i]]],
                "refs_total": int(data.pub_refs_total[i]),
            }
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")

    codes_arr = np.array(data.country_codes, dtype=object)
    ed = pl.DataFrame({
        "cc_s": pl.Series(codes_arr[data.e_cit_country], dtype=pl.Utf8),
        "cy": pl.Series(data.e_cit_year),
        "cs": pl.Series(data.e_cit_serial),
        "dc_s": pl.Series(codes_arr[data.e_ced_country], dtype=pl.Utf8),
        "dy": pl.Series(data.e_ced_year),
        "ds": pl.Series(data.e_ced_serial),
    }).select(
        _id_expr("cc_s", "cy", "cs").alias("citing"),
        _id_expr("dc_s", "dy", "ds").alias("cited"),
    ).sort(["citing", "cited"])
    ed.write_csv(edges_path, separator="\t", include_header=False)

    corpus_cfg = {
        "window_length": data.config.window_length,
        "top_share": data.config.top_share,
        "y_min": data.config.y_min,
        "y_max": data.config.y_max,
        "citation_cutoff_year": data.config.cutoff,
    }
    with open(config_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(corpus_cfg, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"pubs": pubs_path, "edges": edges_path, "config": config_path}


def generate_files(config: ScenarioConfig, out_dir) -> dict[str, str]:
    """Generate a scenario and write its corpus files; returns the paths."""
    return write_corpus_files(generate(config), out_dir)


# ---------------------------------------------------------------------------
# presets


def _uniform_row(codes, me, self_share, skip=()) -> dict[str, float]:
    others = [c for c in codes if c != me and c not in skip]
    row = {c: (1.0 - self_share) / len(others) for c in others}
    row[me] = self_share
    for c in skip:
        row[c] = 0.0
    return row


def _preset_closed_world() -> ScenarioConfig:
    codes = ["AAA", "BBB", "CCC"]
    countries = tuple(
        CountrySpec(
            code=c, base_count=60, ref_mean=mean, ref_sd=1.5,
            recency=(1.0,), doc_type_mix={"article": 1.0},
        )
        for c, mean in zip(codes, (6.0, 5.0, 4.0))
    )
    return ScenarioConfig(
        y_min=2010, y_max=2010, categories=("G1",), countries=countries,
        targeting={c: _uniform_row(codes, c, 0.3) for c in codes},
        closed_world=True, seed=7,
    )


def _preset_rising_x() -> ScenarioConfig:
    codes = ["AAA", "BBB", "CCC", "XXX"]
    world = dict(
        base_count=40, ref_mean=8.0, ref_sd=2.0,
        recency=(0.30, 0.25, 0.20, 0.15, 0.10),
        doc_type_mix={"article": 0.80, "review": 0.10, "proceedings_paper": 0.10},
        cats_per_pub=(1, 2), nonsource_rate=0.05,
    )
    countries = (
        CountrySpec(code="AAA", **world),
        CountrySpec(code="BBB", **world),
        CountrySpec(code="CCC", **world),
        CountrySpec(
            code="XXX", base_count=6, growth=1.35,
            ref_mean=12.0, ref_sd=2.5, recency=(0.55, 0.30, 0.15),
            doc_type_mix={"article": 0.85, "review": 0.05, "proceedings_paper": 0.10},
            cats_per_pub=(1, 2), nonsource_rate=0.05,
        ),
    )
    targeting = {
        "AAA": {"AAA": 0.30, "BBB": 0.375, "CCC": 0.275, "XXX": 0.05},
        "BBB": {"BBB": 0.30, "AAA": 0.375, "CCC": 0.275, "XXX": 0.05},
        "CCC": {"CCC": 0.30, "AAA": 0.375, "BBB": 0.275, "XXX": 0.05},
        "XXX": {"XXX": 0.12, "AAA": 0.44, "BBB": 0.44, "CCC": 0.00},
    }
    return ScenarioConfig(
        y_min=2000, y_max=2012, categories=("C01", "C02", "C03", "C04"),
        countries=countries, targeting=targeting, seed=11,
    )


def _preset_isolated_x() -> ScenarioConfig:
    codes = ["AAA", "BBB", "CCC", "XXX"]
    world = dict(
        base_count=30, ref_mean=8.0, ref_sd=2.0, recency=(0.5, 0.3, 0.2),
        doc_type_mix={"article": 0.9, "proceedings_paper": 0.1},
        category_mix={"C01": 0.4, "C02": 0.3, "C03": 0.3},
    )
    countries = (
        CountrySpec(code="AAA", **world),
        CountrySpec(code="BBB", **world),
        CountrySpec(code="CCC", **world),
        CountrySpec(
            code="XXX", base_count=25, growth=1.2, ref_mean=10.0, ref_sd=2.0,
            recency=(0.6, 0.4), category_mix={"CX1": 1.0},
            doc_type_mix={"article": 1.0},
        ),
    )
    targeting = {
        "AAA": _uniform_row(codes, "AAA", 0.3, skip=("XXX",)),
        "BBB": _uniform_row(codes, "BBB", 0.3, skip=("XXX",)),
        "CCC": _uniform_row(codes, "CCC", 0.3, skip=("XXX",)),
        "XXX": {"XXX": 1.0},
    }
    return ScenarioConfig(
        y_min=2005, y_max=2008, categories=("C01", "C02", "C03", "CX1"),
        countries=countries, targeting=targeting, seed=13,
    )


def _preset_empty_x() -> ScenarioConfig:
    codes = ["AAA", "BBB", "CCC", "XXX"]
    world = dict(
        base_count=30, ref_mean=7.0, ref_sd=2.0, recency=(0.5, 0.3, 0.2),
        doc_type_mix={"article": 0.85, "review": 0.15},
    )
    countries = (
        CountrySpec(code="AAA", **world),
        CountrySpec(code="BBB", **world),
        CountrySpec(code="CCC", **world),
        CountrySpec(code="XXX", base_count=0, doc_type_mix={"article": 1.0}),
    )
    targeting = {c: _uniform_row(codes, c, 0.25, skip=("XXX",)) for c in codes[:3]}
    targeting["XXX"] = _uniform_row(codes, "XXX", 0.0)
    return ScenarioConfig(
        y_min=2005, y_max=2008, categories=("C01", "C02"), countries=countries,
        targeting=targeting, seed=17,
    )


_PRESETS = {
    "closed_world": _preset_closed_world,
    "rising_X": _preset_rising_x,
    "isolated_X": _preset_isolated_x,
    "empty_X": _preset_empty_x,
}


def preset_names() -> list[str]:
    return sorted(_PRESETS)


def preset(name: str) -> ScenarioConfig:
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise ScenarioError(
            f"unknown preset {name!r} (known: {', '.join(preset_names())})"
        ) from None
    cfg = factory()
    cfg.validate()
    return cfg
