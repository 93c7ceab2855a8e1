"""Hot aggregation kernels over edge arrays, with numba and pure-numpy backends.

The numba backend is used when available; set ``CONTRAFACT_NUMBA=0`` (or
``false``/``off``/``no``) to force the numpy implementations. Both backends
produce identical integer outputs and floating-point outputs that agree to
rounding error; ``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = {"0", "false", "off", "no"}


def numba_requested() -> bool:
    return os.environ.get("CONTRAFACT_NUMBA", "1").strip().lower() not in _DISABLE


try:
    from numba import njit, set_num_threads as _numba_set_threads

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    _numba_set_threads = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and numba_requested()


def set_threads(n: int) -> None:
    """Pin the numba thread pool size. No-op for the numpy backend.

    Kernel outputs never depend on the thread count; this only bounds
    resource usage.
    """
    if HAS_NUMBA and n > 0:
        try:
            _numba_set_threads(n)
        except ValueError:
            pass  # more threads requested than available; keep default


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# windowed citation counting


def count_in_window_numpy(cited, citing_year, cited_year, countable,
                          window_length, cutoff, n_pubs):
    ok = (
        countable
        & (citing_year >= cited_year)
        & (citing_year <= cited_year + (window_length - 1))
        & (citing_year <= cutoff)
    )
    return np.bincount(cited[ok], minlength=n_pubs).astype(np.int64)


if HAS_NUMBA:

    @njit(cache=True, nogil=True)
    def _count_in_window_nb(cited, citing_year, cited_year, countable,
                            window_length, cutoff, n_pubs):
        out = np.zeros(n_pubs, dtype=np.int64)
        for e in range(cited.shape[0]):
            cy = citing_year[e]
            dy = cited_year[e]
            if countable[e] and cy >= dy and cy <= dy + window_length - 1 and cy <= cutoff:
                out[cited[e]] += 1
        return out

    def count_in_window_numba(cited, citing_year, cited_year, countable,
                              window_length, cutoff, n_pubs):
        return _count_in_window_nb(
            np.ascontiguousarray(cited, dtype=np.int64),
            np.ascontiguousarray(citing_year, dtype=np.int64),
            np.ascontiguousarray(cited_year, dtype=np.int64),
            np.ascontiguousarray(countable, dtype=np.bool_),
            np.int64(window_length), np.int64(cutoff), np.int64(n_pubs),
        )

else:
    count_in_window_numba = None


def count_in_window(cited, citing_year, cited_year, countable,
                    window_length, cutoff, n_pubs):
    """Per-publication count of marked edges whose citing year lies in
    ``[cited_year, cited_year + window_length - 1]`` and at or before ``cutoff``."""
    impl = count_in_window_numba if USE_NUMBA else count_in_window_numpy
    return impl(cited, citing_year, cited_year, countable,
                window_length, cutoff, n_pubs)


# ---------------------------------------------------------------------------
# generic masked per-source edge counting


def count_marked_numpy(source, mark, n):
    return np.bincount(source[mark], minlength=n).astype(np.int64)


if HAS_NUMBA:

    @njit(cache=True, nogil=True)
    def _count_marked_nb(source, mark, n):
        out = np.zeros(n, dtype=np.int64)
        for e in range(source.shape[0]):
            if mark[e]:
                out[source[e]] += 1
        return out

    def count_marked_numba(source, mark, n):
        return _count_marked_nb(
            np.ascontiguousarray(source, dtype=np.int64),
            np.ascontiguousarray(mark, dtype=np.bool_),
            np.int64(n),
        )

else:
    count_marked_numba = None


def count_marked(source, mark, n):
    """Count, for each index in ``[0, n)``, the edges with that source index
    whose mark flag is set."""
    impl = count_marked_numba if USE_NUMBA else count_marked_numpy
    return impl(source, mark, n)


# ---------------------------------------------------------------------------
# cohort top-share cutoffs
#
# Rows must be sorted by (cohort ascending, value descending); ``indptr`` is
# the per-cohort row range. For each cohort this finds the smallest integer
# cutoff t such that the member weight strictly above t stays within the
# cohort's share mass, plus the weight strictly above t and the weight at t.
# The caller turns those masses into per-member tie fractions.


def top_cutoffs_numpy(indptr, values, weights, share_mass):
    n_cohorts = indptr.shape[0] - 1
    thr = np.zeros(n_cohorts, dtype=np.int64)
    above = np.zeros(n_cohorts, dtype=np.float64)
    at = np.zeros(n_cohorts, dtype=np.float64)
    n = values.shape[0]
    if n == 0:
        return thr, above, at

    sizes = np.diff(indptr)
    cohort_of_row = np.repeat(np.arange(n_cohorts), sizes)
    csum0 = np.concatenate([[0.0], np.cumsum(weights)])  # weight of rows [:i]
    base = csum0[indptr[:-1]]

    new_block = np.ones(n, dtype=bool)
    new_block[1:] = (cohort_of_row[1:] != cohort_of_row[:-1]) | (values[1:] != values[:-1])
    blk_start = np.flatnonzero(new_block)
    blk_last = np.append(blk_start[1:], n) - 1
    blk_cohort = cohort_of_row[blk_start]
    cw_end = csum0[blk_last + 1] - base[blk_cohort]
    cw_before = csum0[blk_start] - base[blk_cohort]

    exceeded = np.flatnonzero(cw_end > share_mass[blk_cohort])
    # blocks are cohort-contiguous, so the first exceeded block per cohort is
    # the first occurrence of that cohort among exceeded blocks
    cohorts_hit, first = np.unique(blk_cohort[exceeded], return_index=True)
    sel = exceeded[first]
    thr[cohorts_hit] = values[blk_start[sel]]
    above[cohorts_hit] = cw_before[sel]
    at[cohorts_hit] = cw_end[sel] - cw_before[sel]
    return thr, above, at


if HAS_NUMBA:

    @njit(cache=True, nogil=True)
    def _top_cutoffs_nb(indptr, values, weights, share_mass):
        n_cohorts = indptr.shape[0] - 1
        thr = np.zeros(n_cohorts, dtype=np.int64)
        above = np.zeros(n_cohorts, dtype=np.float64)
        at = np.zeros(n_cohorts, dtype=np.float64)
        for c in range(n_cohorts):
            s = share_mass[c]
            i = indptr[c]
            hi = indptr[c + 1]
            cum_before = 0.0
            while i < hi:
                v = values[i]
                block_w = 0.0
                while i < hi and values[i] == v:
                    block_w += weights[i]
                    i += 1
                if cum_before + block_w > s:
                    thr[c] = v
                    above[c] = cum_before
                    at[c] = block_w
                    break
                cum_before += block_w
        return thr, above, at

    def top_cutoffs_numba(indptr, values, weights, share_mass):
        return _top_cutoffs_nb(
            np.ascontiguousarray(indptr, dtype=np.int64),
            np.ascontiguousarray(values, dtype=np.int64),
            np.ascontiguousarray(weights, dtype=np.float64),
            np.ascontiguousarray(share_mass, dtype=np.float64),
        )

else:
    top_cutoffs_numba = None


def top_cutoffs(indptr, values, weights, share_mass):
    impl = top_cutoffs_numba if USE_NUMBA else top_cutoffs_numpy
    return impl(indptr, values, weights, share_mass)
