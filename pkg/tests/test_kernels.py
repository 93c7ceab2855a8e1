import numpy as np
import pytest

from contrafact import kernels


def _random_edges(rng, n_pubs, n_edges):
    cited = rng.integers(0, n_pubs, n_edges)
    citing_year = rng.integers(2000, 2012, n_edges)
    cited_year = rng.integers(2000, 2012, n_edges)
    countable = rng.random(n_edges) < 0.8
    return cited, citing_year, cited_year, countable


def _brute_window_count(cited, citing_year, cited_year, countable, w, cutoff, n):
    out = np.zeros(n, dtype=np.int64)
    for e in range(len(cited)):
        if (countable[e] and cited_year[e] <= citing_year[e] <= cited_year[e] + w - 1
                and citing_year[e] <= cutoff):
            out[cited[e]] += 1
    return out


def test_count_in_window_matches_brute_force():
    rng = np.random.default_rng(0)
    cited, cy, dy, countable = _random_edges(rng, 50, 400)
    expected = _brute_window_count(cited, cy, dy, countable, 3, 2010, 50)
    got = kernels.count_in_window_numpy(cited, cy, dy, countable, 3, 2010, 50)
    assert np.array_equal(got, expected)


@pytest.mark.skipif(not kernels.HAS_NUMBA, reason="numba unavailable")
def test_backends_agree_on_window_counts():
    rng = np.random.default_rng(1)
    for trial in range(5):
        cited, cy, dy, countable = _random_edges(rng, 80, 600)
        a = kernels.count_in_window_numpy(cited, cy, dy, countable, 2, 2011, 80)
        b = kernels.count_in_window_numba(cited, cy, dy, countable, 2, 2011, 80)
        assert np.array_equal(a, b)


@pytest.mark.skipif(not kernels.HAS_NUMBA, reason="numba unavailable")
def test_backends_agree_on_marked_counts():
    rng = np.random.default_rng(2)
    src = rng.integers(0, 30, 500)
    mark = rng.random(500) < 0.5
    assert np.array_equal(
        kernels.count_marked_numpy(src, mark, 30),
        kernels.count_marked_numba(src, mark, 30),
    )


def _brute_cutoffs(indptr, values, weights, share_mass):
    n_cohorts = len(indptr) - 1
    thr = np.zeros(n_cohorts, dtype=np.int64)
    above = np.zeros(n_cohorts)
    at = np.zeros(n_cohorts)
    for c in range(n_cohorts):
        vals = values[indptr[c]:indptr[c + 1]]
        wts = weights[indptr[c]:indptr[c + 1]]
        if len(vals) == 0:
            continue
        # smallest integer t with weight strictly above t within the share
        t = 0
        while np.sum(wts[vals > t]) > share_mass[c]:
            t += 1
        thr[c] = t
        above[c] = np.sum(wts[vals > t])
        at[c] = np.sum(wts[vals == t])
    return thr, above, at


def _random_cohort_rows(rng, n_cohorts):
    sizes = rng.integers(1, 30, n_cohorts)
    indptr = np.zeros(n_cohorts + 1, dtype=np.int64)
    np.cumsum(sizes, out=indptr[1:])
    values = np.zeros(indptr[-1], dtype=np.int64)
    weights = np.zeros(indptr[-1])
    for c in range(n_cohorts):
        lo, hi = indptr[c], indptr[c + 1]
        v = rng.integers(0, 8, hi - lo)
        v.sort()
        values[lo:hi] = v[::-1]
        weights[lo:hi] = rng.choice([1.0, 0.5, 1 / 3], size=hi - lo)
    share_mass = 0.1 * np.add.reduceat(weights, indptr[:-1])
    return indptr, values, weights, share_mass


def test_top_cutoffs_match_upward_scan_oracle():
    rng = np.random.default_rng(3)
    for trial in range(20):
        indptr, values, weights, share = _random_cohort_rows(rng, int(rng.integers(1, 12)))
        thr, above, at = kernels.top_cutoffs_numpy(indptr, values, weights, share)
        ethr, eabove, eat = _brute_cutoffs(indptr, values, weights, share)
        assert np.array_equal(thr, ethr)
        assert np.allclose(above, eabove, atol=1e-12)
        assert np.allclose(at, eat, atol=1e-12)


@pytest.mark.skipif(not kernels.HAS_NUMBA, reason="numba unavailable")
def test_top_cutoffs_backends_agree():
    rng = np.random.default_rng(4)
    for trial in range(20):
        indptr, values, weights, share = _random_cohort_rows(rng, int(rng.integers(1, 12)))
        a = kernels.top_cutoffs_numpy(indptr, values, weights, share)
        b = kernels.top_cutoffs_numba(indptr, values, weights, share)
        assert np.array_equal(a[0], b[0])
        assert np.allclose(a[1], b[1], atol=1e-12)
        assert np.allclose(a[2], b[2], atol=1e-12)


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("CONTRAFACT_NUMBA", "0")
    assert not kernels.numba_requested()
    monkeypatch.setenv("CONTRAFACT_NUMBA", "1")
    assert kernels.numba_requested()


def test_empty_inputs():
    z = np.zeros(0, dtype=np.int64)
    zb = np.zeros(0, dtype=bool)
    got = kernels.count_in_window(z, z, z, zb, 3, 2016, 5)
    assert np.array_equal(got, np.zeros(5, dtype=np.int64))
    thr, above, at = kernels.top_cutoffs(np.zeros(1, dtype=np.int64), z,
                                         np.zeros(0), np.zeros(0))
    assert thr.size == 0 and above.size == 0 and at.size == 0
