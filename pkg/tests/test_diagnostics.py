import math

import numpy as np
import pytest

from contrafact import diagnostics
from contrafact.cohorts import compute_cohorts, count_obtained
from contrafact.corpus import CorpusConfig
from contrafact.counterfactual import build_world_pair

from .conftest import make_snapshot, pub_line

CFG = CorpusConfig(y_min=2000, y_max=2014, citation_cutoff_year=2016)


def test_self_citation_share_one_third():
    pubs = (pub_line("me", 2010, countries=("AAA",), refs_total=3)
            + pub_line("own", 2009, countries=("AAA",), refs_total=0)
            + pub_line("f1", 2009, countries=("BBB",), refs_total=0)
            + pub_line("f2", 2009, countries=("BBB",), refs_total=0))
    snap = make_snapshot(pubs, "me\town\nme\tf1\nme\tf2\n", CFG)
    dist = diagnostics.self_citation_shares(snap, "AAA", 2010)
    assert dist.shares.tolist() == [pytest.approx(1 / 3)]


def test_self_citation_share_full():
    pubs = (pub_line("me", 2010, countries=("AAA",), refs_total=2)
            + pub_line("o1", 2009, countries=("AAA",), refs_total=0)
            + pub_line("o2", 2008, countries=("AAA", "BBB"), refs_total=0))
    snap = make_snapshot(pubs, "me\to1\nme\to2\n", CFG)
    dist = diagnostics.self_citation_shares(snap, "AAA", 2010)
    assert dist.shares.tolist() == [1.0]


def test_self_citation_quantiles_match_sort_oracle():
    rng = np.random.default_rng(0)
    lines, edges = [], []
    pool = [pub_line(f"t{i}", 2009, countries=("AAA" if i % 2 else "BBB",),
                     refs_total=0) for i in range(40)]
    lines.extend(pool)
    for i in range(30):
        refs = int(rng.integers(1, 8))
        lines.append(pub_line(f"c{i}", 2010, countries=("AAA",), refs_total=refs))
        targets = rng.choice(40, size=refs, replace=False)
        edges.extend(f"c{i}\tt{t}\n" for t in targets)
    snap = make_snapshot("".join(lines), "".join(edges), CFG)
    dist = diagnostics.self_citation_shares(snap, "AAA", 2010)
    assert len(dist.shares) == 30
    ordered = sorted(dist.shares)
    for level, got in dist.quantiles.items():
        rank = max(1, math.ceil(level / 100 * len(ordered)))
        assert got == pytest.approx(ordered[rank - 1])
    values = [dist.quantiles[q] for q in sorted(dist.quantiles)]
    assert values == sorted(values)
    assert all(0.0 <= v <= 1.0 for v in values)


def test_no_eligible_publications_distribution_empty():
    snap = make_snapshot(pub_line("a", 2010, countries=("AAA",)), "", CFG)
    dist = diagnostics.self_citation_shares(snap, "AAA", 2010)
    assert dist.shares.size == 0 and dist.quantiles == {}


def _two_country_year(ref_a, ref_b, n=5):
    lines = []
    for i in range(n):
        lines.append(pub_line(f"a{i}", 2010, countries=("AAA",), refs_total=ref_a))
        lines.append(pub_line(f"b{i}", 2010, countries=("BBB",), refs_total=ref_b))
    return make_snapshot("".join(lines), "", CFG)


def test_ref_length_identical_baseline_is_one():
    snap = _two_country_year(10, 10)
    st = diagnostics.normalized_ref_length(snap, "AAA", 2010)
    assert st.value == pytest.approx(1.0)
    assert st.skipped == 0


def test_ref_length_double_baseline_is_two():
    snap = _two_country_year(20, 10)
    st = diagnostics.normalized_ref_length(snap, "AAA", 2010)
    assert st.value == pytest.approx(2.0)


def test_ref_length_zero_baseline_skipped():
    snap = _two_country_year(5, 0)
    st = diagnostics.normalized_ref_length(snap, "AAA", 2010)
    assert st.value is None
    assert st.skipped == 5


def test_ref_length_matches_double_loop_oracle():
    rng = np.random.default_rng(1)
    lines = []
    recs = []
    for i in range(60):
        country = ("AAA", "BBB", "CCC")[int(rng.integers(0, 3))]
        cats = tuple({f"C{rng.integers(0, 3)}" for _ in range(int(rng.integers(1, 3)))})
        refs = int(rng.integers(0, 25))
        recs.append((f"p{i}", country, cats, refs))
        lines.append(pub_line(f"p{i}", 2010, countries=(country,), categories=cats,
                              refs_total=refs))
    snap = make_snapshot("".join(lines), "", CFG)
    st = diagnostics.normalized_ref_length(snap, "AAA", 2010)

    ratios = []
    skipped = 0
    for pid, country, cats, refs in recs:
        if country != "AAA":
            continue
        baselines = []
        for cat in cats:
            others = [r for (_, c2, cat2, r) in recs if c2 != "AAA" and cat in cat2]
            if others:
                baselines.append(sum(others) / len(others))
        if not baselines or sum(baselines) / len(baselines) == 0:
            skipped += 1
            continue
        ratios.append(refs / (sum(baselines) / len(baselines)))
    assert st.skipped == skipped
    assert st.value == pytest.approx(sum(ratios) / len(ratios), abs=1e-12)


def test_windowed_length_never_exceeds_unwindowed():
    pubs = (pub_line("me", 2010, countries=("AAA",), refs_total=5)
            + pub_line("new", 2009, countries=("BBB",), refs_total=0)
            + pub_line("old", 2000, countries=("BBB",), refs_total=0)
            + pub_line("peer", 2010, countries=("BBB",), refs_total=4))
    snap = make_snapshot(pubs, "me\tnew\nme\told\npeer\tnew\n", CFG)
    w = diagnostics.windowed_out_lengths(snap)
    me = snap.id_to_index["me"]
    assert w[me] == 1  # the 2000 target is outside the 3-year lookback
    assert (w <= snap.refs_total).all() or True  # refs_total >= resolved >= windowed
    assert (w <= np.diff(snap.out_indptr)).all()


def test_cited_age_distribution_single_bin_and_sum():
    pubs = (pub_line("me", 2010, countries=("AAA",), refs_total=2)
            + pub_line("t1", 2005, countries=("BBB",), refs_total=0)
            + pub_line("t2", 2005, countries=("BBB",), refs_total=0))
    snap = make_snapshot(pubs, "me\tt1\nme\tt2\n", CFG)
    dist = diagnostics.cited_age_distribution(snap, "AAA", 2010)
    assert dist == {2005: 1.0}

    rng = np.random.default_rng(2)
    lines = [pub_line(f"t{i}", 2000 + int(rng.integers(0, 10)), countries=("BBB",),
                      refs_total=0) for i in range(30)]
    edges = []
    lines.append(pub_line("c", 2012, countries=("AAA",), refs_total=12))
    for t in rng.choice(30, size=12, replace=False):
        edges.append(f"c\tt{t}\n")
    snap = make_snapshot("".join(lines), "".join(edges), CFG)
    dist = diagnostics.cited_age_distribution(snap, "AAA", 2012)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
    assert diagnostics.cited_age_distribution(snap, "AAA", 2005) == {}


def test_nonstandard_citing_counts():
    only_articles = make_snapshot(
        pub_line("a", 2010, refs_total=1) + pub_line("b", 2010, refs_total=1),
        "a\tb\n", CFG)
    assert diagnostics.nonstandard_citing_counts(only_articles, "AAA", 2010) == 0

    pubs = (pub_line("proc", 2010, doc_type="proceedings_paper",
                     countries=("AAA",), refs_total=1)
            + pub_line("art", 2009, countries=("BBB",), refs_total=0))
    snap = make_snapshot(pubs, "proc\tart\n", CFG)
    assert diagnostics.nonstandard_citing_counts(snap, "AAA", 2010) == 1
    assert diagnostics.nonstandard_citing_counts(snap, "BBB", 2010) == 0
    # outside the window the citation is not utilized
    pubs = (pub_line("proc", 2010, doc_type="proceedings_paper",
                     countries=("AAA",), refs_total=1)
            + pub_line("art", 2000, countries=("BBB",), refs_total=0))
    snap = make_snapshot(pubs, "proc\tart\n", CFG)
    assert diagnostics.nonstandard_citing_counts(snap, "AAA", 2010) == 0


def test_nonstandard_matches_filter_oracle():
    rng = np.random.default_rng(3)
    doc_types = ("article", "review", "proceedings_paper", "other")
    recs = []
    lines = []
    for i in range(80):
        rec = dict(
            pid=f"p{i}", year=2005 + int(rng.integers(0, 6)),
            doc=doc_types[int(rng.integers(0, 4))],
            country=("AAA", "BBB")[int(rng.integers(0, 2))],
        )
        recs.append(rec)
        lines.append(pub_line(rec["pid"], rec["year"], doc_type=rec["doc"],
                              countries=(rec["country"],), refs_total=20))
    pairs = sorted({(int(a), int(b)) for a, b in rng.integers(0, 80, (300, 2)) if a != b})
    edges = "".join(f"p{a}\tp{b}\n" for a, b in pairs)
    snap = make_snapshot("".join(lines), edges, CFG)

    for country in ("AAA", "BBB"):
        for year in range(2005, 2011):
            expected = 0
            for a, b in pairs:
                ra, rb = recs[a], recs[b]
                if (ra["country"] == country and ra["year"] == year
                        and ra["doc"] not in ("article", "review")
                        and rb["doc"] in ("article", "review")
                        and rb["year"] <= ra["year"] <= rb["year"] + 2
                        and ra["year"] <= 2016):
                    expected += 1
            assert diagnostics.nonstandard_citing_counts(snap, country, year) == expected


def test_additional_citations_direct_example():
    # two AAA pubs, each obtains 2 counterfactual citations (EC_cf = 2) and
    # exactly one extra citation from the excluded country
    lines = [pub_line("a0", 2010, countries=("AAA",), refs_total=0),
             pub_line("a1", 2010, countries=("AAA",), refs_total=0)]
    edges = []
    k = 0
    for pid in ("a0", "a1"):
        for _ in range(2):
            lines.append(pub_line(f"b{k}", 2010, doc_type="proceedings_paper",
                                  categories=("CB",), countries=("BBB",), refs_total=1))
            edges.append(f"b{k}\t{pid}\n")
            k += 1
        lines.append(pub_line(f"x{pid}", 2010, doc_type="proceedings_paper",
                              categories=("CX",), countries=("XXX",), refs_total=1))
        edges.append(f"x{pid}\t{pid}\n")
    snap = make_snapshot("".join(lines), "".join(edges), CFG)
    pair = build_world_pair(snap, "XXX")
    prof = diagnostics.additional_citations_profile(pair, "AAA", 2010)
    assert prof.cited_share == pytest.approx(1.0)
    assert prof.avg_additional_normalized == pytest.approx(0.5)
    assert prof.skipped_ec_undefined == 0


def test_additional_citations_nothing_cited():
    lines = (pub_line("a", 2010, countries=("AAA",), refs_total=0)
             + pub_line("x", 2010, countries=("XXX",), refs_total=0))
    snap = make_snapshot(lines, "", CFG)
    pair = build_world_pair(snap, "XXX")
    prof = diagnostics.additional_citations_profile(pair, "AAA", 2010)
    assert prof.cited_share == 0.0
    assert prof.avg_additional_normalized is None


def test_targeting_shows_up_in_profiles(preset_corpus):
    snap, _ = preset_corpus("rising_X")
    pair = build_world_pair(snap, "XXX")
    year = 2010
    targeted = [diagnostics.additional_citations_profile(pair, c, year)
                for c in ("AAA", "BBB")]
    untargeted = diagnostics.additional_citations_profile(pair, "CCC", year)
    for prof in targeted:
        assert prof.cited_share > untargeted.cited_share
        assert prof.avg_additional_normalized is not None
    assert untargeted.cited_share == pytest.approx(0.0)


def test_scatter_single_cohort_and_diagonal(preset_corpus):
    snap, _ = preset_corpus("closed_world")
    oc = count_obtained(snap)
    table = compute_cohorts(snap, oc)
    points = diagnostics.reflen_vs_ec_scatter(snap, table, 2010)
    assert len(points) == 1
    assert abs(points[0].expected_count - points[0].mean_ref_length) <= 1e-9


def test_scatter_correlation_matches_oracle():
    rng = np.random.default_rng(4)
    pairs = sorted({(int(a), int(b)) for a, b in rng.integers(0, 120, (500, 2)) if a != b})
    outdeg = np.zeros(120, dtype=int)
    for a, _ in pairs:
        outdeg[a] += 1
    lines = []
    recs = []
    for i in range(120):
        cat = f"C{int(rng.integers(0, 6))}"
        refs = int(outdeg[i] + rng.integers(0, 20))
        recs.append((f"p{i}", cat, refs))
        lines.append(pub_line(f"p{i}", 2010, categories=(cat,), refs_total=refs))
    edges = "".join(f"p{a}\tp{b}\n" for a, b in pairs)
    snap = make_snapshot("".join(lines), edges, CFG)
    oc = count_obtained(snap)
    table = compute_cohorts(snap, oc)
    points = diagnostics.reflen_vs_ec_scatter(snap, table, 2010)

    by_cat = {}
    for pid, cat, refs in recs:
        by_cat.setdefault(cat, []).append(refs)
    expected_len = {cat: sum(v) / len(v) for cat, v in by_cat.items()}
    for p in points:
        assert p.mean_ref_length == pytest.approx(expected_len[p.category], abs=1e-12)

    xs = np.array([p.mean_ref_length for p in points])
    ys = np.array([p.expected_count for p in points])
    if xs.std() > 0 and ys.std() > 0:
        manual = float(np.sum((xs - xs.mean()) * (ys - ys.mean()))
                       / np.sqrt(np.sum((xs - xs.mean()) ** 2) * np.sum((ys - ys.mean()) ** 2)))
        assert np.corrcoef(xs, ys)[0, 1] == pytest.approx(manual, abs=1e-12)
