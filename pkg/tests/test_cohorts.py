import numpy as np
import pytest

from contrafact import cohorts
from contrafact.cohorts import compute_cohorts, count_obtained, top10_fraction, top_fractions
from contrafact.corpus import CorpusConfig

from .conftest import make_snapshot, pub_line
from . import oracle

CFG = CorpusConfig(y_min=2000, y_max=2014, citation_cutoff_year=2016)


def test_triannual_window_counts_two_of_three_citers():
    pubs = (pub_line("t", 2010, refs_total=0)
            + pub_line("c0", 2010, refs_total=1)
            + pub_line("c2", 2012, refs_total=1)
            + pub_line("c3", 2013, refs_total=1))
    snap = make_snapshot(pubs, "c0\tt\nc2\tt\nc3\tt\n", CFG)
    oc = count_obtained(snap)
    assert oc[snap.id_to_index["t"]] == 2  # 2013 falls outside [2010, 2012]


def test_no_citers_means_zero():
    snap = make_snapshot(pub_line("a", 2010), "", CFG)
    assert count_obtained(snap).tolist() == [0]


def test_window_truncates_at_corpus_end():
    # a 2013 publication's triannual window reaches 2015, but the corpus
    # (and with it the citation cutoff) ends in 2014
    cfg = CorpusConfig(y_min=2000, y_max=2014, citation_cutoff_year=2014)
    pubs = (pub_line("t", 2013, refs_total=0)
            + pub_line("c1", 2014, refs_total=1)
            + pub_line("c2", 2014, refs_total=1))
    snap = make_snapshot(pubs, "c1\tt\nc2\tt\n", cfg)
    assert count_obtained(snap)[snap.id_to_index["t"]] == 2


def test_noncountable_targets_stay_at_zero():
    pubs = (pub_line("p", 2010, doc_type="proceedings_paper", refs_total=0)
            + pub_line("a", 2010, refs_total=1))
    snap = make_snapshot(pubs, "a\tp\n", CFG)
    assert count_obtained(snap)[snap.id_to_index["p"]] == 0


def _random_corpus(rng, n=200, m=600):
    doc_types = ("article", "review", "proceedings_paper", "other")
    pubs = "".join(
        pub_line(f"p{i}", int(rng.integers(2000, 2015)),
                 doc_type=doc_types[int(rng.integers(0, 4))],
                 categories=tuple({f"C{rng.integers(0, 4)}" for _ in range(int(rng.integers(1, 3)))}),
                 countries=(("AAA", "BBB", "CCC")[int(rng.integers(0, 3))],),
                 refs_total=30)
        for i in range(n)
    )
    pairs = {(int(a), int(b)) for a, b in rng.integers(0, n, (m, 2)) if a != b}
    edges = "".join(f"p{a}\tp{b}\n" for a, b in sorted(pairs))
    return pubs, edges


def test_obtained_matches_bruteforce_scan(tmp_path):
    rng = np.random.default_rng(11)
    pubs, edges = _random_corpus(rng)
    (tmp_path / "p.jsonl").write_text(pubs)
    (tmp_path / "e.tsv").write_text(edges)
    snap = make_snapshot(pubs, edges, CFG)
    oc = count_obtained(snap)
    expected = oracle.obtained_citations(
        *oracle.load_corpus(tmp_path / "p.jsonl", tmp_path / "e.tsv"),
        {"window_length": 3, "citation_cutoff_year": 2016, "top_share": 0.1},
    )
    for pid, v in expected.items():
        assert oc[snap.id_to_index[pid]] == v


def test_plain_mean_expected_count():
    pubs = "".join(pub_line(f"p{i}", 2010, refs_total=9) for i in range(4))
    edges = []
    citers = []
    # give p0..p3 obtained citations (0, 1, 2, 5) from distinct same-year citers
    want = (0, 1, 2, 5)
    k = 0
    for i, c in enumerate(want):
        for _ in range(c):
            citers.append(pub_line(f"x{k}", 2010, refs_total=2))
            edges.append(f"x{k}\tp{i}\n")
            k += 1
    snap = make_snapshot(pubs + "".join(citers), "".join(edges), CFG)
    oc = count_obtained(snap)
    table = compute_cohorts(snap, oc)
    stats = table.stats_for(2010, "C1")
    # cohort includes the citing helpers with OC = 0: construct expectation
    total_weight = 4 + k
    assert stats.weight == pytest.approx(total_weight)
    assert stats.expected_count == pytest.approx(sum(want) / total_weight)


def test_single_pub_two_categories_splits_weight():
    pubs = pub_line("solo", 2010, categories=("C1", "C2"), refs_total=0)
    citers = "".join(pub_line(f"x{k}", 2010, categories=("CX",), refs_total=1)
                     for k in range(4))
    edges = "".join(f"x{k}\tsolo\n" for k in range(4))
    snap = make_snapshot(pubs + citers, edges, CFG)
    table = compute_cohorts(snap, count_obtained(snap))
    for cat in ("C1", "C2"):
        stats = table.stats_for(2010, cat)
        assert stats.weight == pytest.approx(0.5)
        assert stats.expected_count == pytest.approx(4.0)


def test_cohort_ec_matches_weighted_mean_oracle(tmp_path):
    rng = np.random.default_rng(23)
    pubs, edges = _random_corpus(rng, n=300, m=900)
    (tmp_path / "p.jsonl").write_text(pubs)
    (tmp_path / "e.tsv").write_text(edges)
    snap = make_snapshot(pubs, edges, CFG)
    oc = count_obtained(snap)
    table = compute_cohorts(snap, oc)
    cfg = {"window_length": 3, "citation_cutoff_year": 2016, "top_share": 0.1}
    opubs, oedges = oracle.load_corpus(tmp_path / "p.jsonl", tmp_path / "e.tsv")
    ooc = oracle.obtained_citations(opubs, oedges, cfg)
    ostats = oracle.cohort_stats(opubs, ooc, cfg)
    mapping = table.as_mapping()
    assert set(mapping) == set(ostats)
    for key, got in mapping.items():
        assert got.weight == pytest.approx(ostats[key]["weight"], abs=1e-12)
        assert got.expected_count == pytest.approx(ostats[key]["ec"], abs=1e-12)
        assert got.top_threshold == ostats[key]["threshold"]
        assert got.tie_fraction == pytest.approx(ostats[key]["tie"], abs=1e-12)


def _chain_corpus(oc_values):
    """Single-category 2010 cohort whose pubs get the given OC values."""
    n = len(oc_values)
    pubs = "".join(pub_line(f"p{i}", 2010, refs_total=0) for i in range(n))
    citers, edges = [], []
    k = 0
    for i, c in enumerate(oc_values):
        for _ in range(c):
            citers.append(pub_line(f"q{k}", 2010, categories=("CX",),
                                   doc_type="proceedings_paper", refs_total=1))
            edges.append(f"q{k}\tp{i}\n")
            k += 1
    return make_snapshot(pubs + "".join(citers), "".join(edges), CFG)


def test_top_fraction_with_clear_leader():
    snap = _chain_corpus((9, 5, 1) + (0,) * 7)
    oc = count_obtained(snap)
    table = compute_cohorts(snap, oc)
    stats = table.stats_for(2010, "C1")
    assert stats.weight == pytest.approx(10.0)
    assert stats.top_threshold == 5
    assert top10_fraction(9, stats) == pytest.approx(1.0)
    assert top10_fraction(5, stats) == pytest.approx(0.0)  # mass already filled
    assert top10_fraction(1, stats) == 0.0
    fracs = top_fractions(snap, oc, table)
    mass = sum(fracs[snap.id_to_index[f"p{i}"]] for i in range(10))
    assert mass == pytest.approx(0.1 * stats.weight, abs=1e-9)


def test_all_tied_cohort_shares_mass_uniformly():
    snap = _chain_corpus((0,) * 10)
    oc = count_obtained(snap)
    table = compute_cohorts(snap, oc)
    stats = table.stats_for(2010, "C1")
    assert stats.top_threshold == 0
    assert stats.tie_fraction == pytest.approx(0.1)
    fracs = top_fractions(snap, oc, table)
    for i in range(10):
        assert fracs[snap.id_to_index[f"p{i}"]] == pytest.approx(0.1)


def test_exact_mass_and_mean_one_invariants(tmp_path):
    rng = np.random.default_rng(5)
    pubs, edges = _random_corpus(rng, n=250, m=800)
    snap = make_snapshot(pubs, edges, CFG)
    oc = count_obtained(snap)
    table = compute_cohorts(snap, oc)

    oc_rows = oc[table.row_pub]
    ec_rows = table.expected_count[table.row_cohort]
    pos = ec_rows > 0
    mean_one = np.bincount(table.row_cohort[pos],
                           weights=table.row_weight[pos] * oc_rows[pos] / ec_rows[pos],
                           minlength=len(table))
    expected_w = np.where(table.expected_count > 0, table.weight, 0.0)
    assert np.abs(mean_one - expected_w).max() < 1e-9

    thr = table.top_threshold[table.row_cohort]
    tie = table.tie_fraction[table.row_cohort]
    frac = np.where(oc_rows > thr, 1.0, np.where(oc_rows == thr, tie, 0.0))
    mass = np.bincount(table.row_cohort, weights=table.row_weight * frac,
                       minlength=len(table))
    assert np.abs(mass - 0.1 * table.weight).max() < 1e-9


def test_toy_model_expected_count_equals_mean_ref_length(preset_corpus):
    snap, _ = preset_corpus("closed_world")
    oc = count_obtained(snap)
    table = compute_cohorts(snap, oc)
    assert len(table) == 1
    mean_ref = np.bincount(
        table.row_cohort,
        weights=table.row_weight * snap.refs_total[table.row_pub],
        minlength=1,
    ) / table.weight
    assert abs(table.expected_count[0] - mean_ref[0]) <= 1e-9


def test_adding_countable_edge_never_decreases_oc():
    base_pubs = (pub_line("a", 2010, refs_total=2) + pub_line("b", 2010, refs_total=2)
                 + pub_line("c", 2011, refs_total=2))
    snap1 = make_snapshot(base_pubs, "a\tb\n", CFG)
    snap2 = make_snapshot(base_pubs, "a\tb\nc\tb\n", CFG)
    oc1 = count_obtained(snap1)
    oc2 = count_obtained(snap2)
    assert (oc2 >= oc1).all()


def test_empty_cohorts_absent():
    snap = make_snapshot(pub_line("p", 2010, doc_type="other"), "", CFG)
    table = compute_cohorts(snap, count_obtained(snap))
    assert len(table) == 0
    assert table.as_mapping() == {}
