"""Seeded random scenario builder used by property and acceptance tests."""

import numpy as np

from contrafact.synthgen import CountrySpec, ScenarioConfig

_CODES = ["AAA", "BBB", "CCC", "DDD", "EEE", "FFF"]
_DOC_MIXES = (
    {"article": 1.0},
    {"article": 0.7, "review": 0.2, "proceedings_paper": 0.1},
    {"article": 0.5, "review": 0.1, "proceedings_paper": 0.3, "other": 0.1},
)


def random_scenario(seed: int, max_pubs: int = 2000,
                    zero_citations: bool = False) -> ScenarioConfig:
    """A structurally randomized but always-valid scenario.

    ``zero_citations`` builds a corpus without any references, which makes
    every cohort a fully tied all-zero cohort.
    """
    rng = np.random.default_rng(seed)
    n_countries = int(rng.integers(2, 6))
    n_cats = int(rng.integers(1, 6))
    n_years = int(rng.integers(1, 6))
    y0 = int(rng.integers(1995, 2015))
    codes = _CODES[:n_countries]
    categories = tuple(f"K{i:02d}" for i in range(n_cats))

    per_cell = max(1, max_pubs // (n_countries * n_years * 2))
    countries = []
    for code in codes:
        base = int(rng.integers(1, per_cell + 1))
        rec_len = int(rng.integers(1, 6))
        rec = rng.dirichlet(np.ones(rec_len))
        mean_ref = 0.0 if zero_citations else float(rng.uniform(0.0, 12.0))
        countries.append(CountrySpec(
            code=code,
            base_count=base,
            growth=float(rng.uniform(0.8, 1.3)),
            ref_mean=mean_ref,
            ref_sd=0.0 if zero_citations else float(rng.uniform(0.0, 3.0)),
            recency=tuple(float(x) for x in rec / rec.sum()),
            doc_type_mix=dict(_DOC_MIXES[int(rng.integers(0, len(_DOC_MIXES)))]),
            cats_per_pub=(1, 1 if n_cats == 1 else int(rng.integers(1, min(3, n_cats) + 1))),
            nonsource_rate=float(rng.uniform(0.0, 0.3)),
        ))
    targeting = {}
    for code in codes:
        row = rng.dirichlet(np.ones(n_countries))
        targeting[code] = {c: float(w) for c, w in zip(codes, row / row.sum())}
        # dirichlet rows sum to 1 up to fp error; renormalize exactly
        total = sum(targeting[code].values())
        targeting[code] = {c: w / total for c, w in targeting[code].items()}
    return ScenarioConfig(
        y_min=y0,
        y_max=y0 + n_years - 1,
        categories=categories,
        countries=tuple(countries),
        targeting=targeting,
        window_length=int(rng.integers(1, 5)),
        citation_cutoff_year=y0 + n_years - 1 + int(rng.integers(0, 3)),
        seed=int(rng.integers(0, 2**32)),
    )
