"""Corpus data model: publication records, citation edges, immutable snapshot.

File formats:
  publications  JSONL, one object per line: id (str), year (int), doc_type
                (one of article/review/proceedings_paper/other), categories
                (non-empty array of str), countries (array of ISO alpha-3
                str, may be empty), refs_total (int >= 0). Unknown extra
                fields are ignored.
  edges         TSV, two columns ``citing_id<TAB>cited_id``, no header.
  config        a single JSON object.

Loading has two implementations that produce identical snapshots: a columnar
polars path used by default (fast enough for multi-million-line files) and a
line-by-line python path that reports precise line numbers. Any parse or
field-level problem on the fast path falls back to the line path so that
errors always carry positions.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import polars as pl

DOC_TYPES = ("article", "review", "proceedings_paper", "other")
_DOC_CODE = {name: i for i, name in enumerate(DOC_TYPES)}
# document types eligible on the cited side (codes below this bound)
_N_CITED_SIDE = 2

_MAX_LISTED = 8  # cap for ids enumerated inside error messages


class CorpusValidationError(ValueError):
    """Raised for any malformed or inconsistent corpus input.

    ``issues`` holds one human-readable message per problem, line-addressed
    where the source position is known.
    """

    def __init__(self, issues: Sequence[str]):
        self.issues = list(issues)
        head = self.issues[0] if self.issues else "invalid corpus input"
        extra = len(self.issues) - 1
        super().__init__(head if extra <= 0 else f"{head} (and {extra} more issues)")


@dataclass(frozen=True)
class PublicationRecord:
    id: str
    year: int
    doc_type: str
    categories: tuple[str, ...]
    countries: tuple[str, ...]
    refs_total: int


@dataclass(frozen=True)
class CitationEdge:
    citing_id: str
    cited_id: str


@dataclass(frozen=True)
class CorpusConfig:
    """Corpus-wide parameters: year bounds, citation window, top share."""

    y_min: int
    y_max: int
    citation_cutoff_year: int
    window_length: int = 3
    top_share: float = 0.10

    def validate(self) -> None:
        issues = []
        if self.window_length < 1:
            issues.append(f"window_length must be >= 1, got {self.window_length}")
        if not 0.0 < self.top_share < 1.0:
            issues.append(f"top_share must lie strictly between 0 and 1, got {self.top_share}")
        if not self.y_min <= self.y_max <= self.citation_cutoff_year:
            issues.append(
                "year bounds must satisfy y_min <= y_max <= citation_cutoff_year, "
                f"got {self.y_min}, {self.y_max}, {self.citation_cutoff_year}"
            )
        if issues:
            raise CorpusValidationError(issues)

    def to_dict(self) -> dict:
        return {
            "window_length": self.window_length,
            "top_share": self.top_share,
            "y_min": self.y_min,
            "y_max": self.y_max,
            "citation_cutoff_year": self.citation_cutoff_year,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusConfig":
        required = ("window_length", "top_share", "y_min", "y_max", "citation_cutoff_year")
        missing = [k for k in required if k not in data]
        if missing:
            raise CorpusValidationError([f"config missing required field '{k}'" for k in missing])
        try:
            cfg = cls(
                y_min=int(data["y_min"]),
                y_max=int(data["y_max"]),
                citation_cutoff_year=int(data["citation_cutoff_year"]),
                window_length=int(data["window_length"]),
                top_share=float(data["top_share"]),
            )
        except (TypeError, ValueError) as exc:
            raise CorpusValidationError([f"config field has wrong type: {exc}"]) from exc
        cfg.validate()
        return cfg


def load_config(path) -> CorpusConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CorpusValidationError([f"config is not valid JSON: {exc}"]) from exc
    if not isinstance(data, dict):
        raise CorpusValidationError(["config must be a JSON object"])
    return CorpusConfig.from_dict(data)


# ---------------------------------------------------------------------------
# line-oriented loaders (precise positions, moderate speed)


def _iter_lines(source) -> Iterable[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
    elif hasattr(source, "read"):
        yield from source
    else:
        yield from source


def _check_id(value, lineno: int, issues: list[str], what: str) -> str | None:
    if not isinstance(value, str) or not value:
        issues.append(f"line {lineno}: {what} must be a non-empty string")
        return None
    if "\t" in value or "\n" in value or "\r" in value:
        issues.append(f"line {lineno}: {what} {value!r} contains tab or newline")
        return None
    return value


def _parse_publication(obj: dict, lineno: int, issues: list[str]) -> PublicationRecord | None:
    for f in ("id", "year", "doc_type", "categories", "countries", "refs_total"):
        if f not in obj:
            issues.append(f"line {lineno}: missing required field '{f}'")
            return None
    pid = _check_id(obj["id"], lineno, issues, "field 'id'")
    if pid is None:
        return None
    year = obj["year"]
    if not isinstance(year, int) or isinstance(year, bool):
        issues.append(f"line {lineno}: field 'year' must be an integer")
        return None
    doc_type = obj["doc_type"]
    if doc_type not in _DOC_CODE:
        issues.append(
            f"line {lineno}: unknown doc_type {doc_type!r} (expected one of {', '.join(DOC_TYPES)})"
        )
        return None
    cats = obj["categories"]
    if not isinstance(cats, list) or not cats:
        issues.append(f"line {lineno}: field 'categories' must be a non-empty array")
        return None
    if any(not isinstance(c, str) or not c for c in cats):
        issues.append(f"line {lineno}: field 'categories' contains an empty or non-string entry")
        return None
    ctys = obj["countries"]
    if not isinstance(ctys, list):
        issues.append(f"line {lineno}: field 'countries' must be an array")
        return None
    if any(not isinstance(c, str) or not c for c in ctys):
        issues.append(f"line {lineno}: field 'countries' contains an empty or non-string entry")
        return None
    refs = obj["refs_total"]
    if not isinstance(refs, int) or isinstance(refs, bool) or refs < 0:
        issues.append(f"line {lineno}: field 'refs_total' must be a non-negative integer")
        return None
    return PublicationRecord(
        id=pid,
        year=year,
        doc_type=doc_type,
        categories=tuple(cats),
        countries=tuple(ctys),
        refs_total=refs,
    )


def load_publications(source) -> list[PublicationRecord]:
    """Parse a JSONL publications stream into records.

    ``source`` may be a path, a file-like object, or an iterable of lines.
    Raises :class:`CorpusValidationError` with line-addressed issues on the
    first malformed content encountered (duplicate ids name both lines).
    """
    records: list[PublicationRecord] = []
    issues: list[str] = []
    first_line_of: dict[str, int] = {}
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            issues.append(f"line {lineno}: invalid JSON: {exc.msg}")
            break
        if not isinstance(obj, dict):
            issues.append(f"line {lineno}: expected a JSON object")
            break
        rec = _parse_publication(obj, lineno, issues)
        if rec is None:
            break
        seen = first_line_of.get(rec.id)
        if seen is not None:
            issues.append(
                f"line {lineno}: duplicate publication id '{rec.id}' (first seen on line {seen})"
            )
            break
        first_line_of[rec.id] = lineno
        records.append(rec)
    if issues:
        raise CorpusValidationError(issues)
    return records


def load_edges(source) -> list[CitationEdge]:
    """Parse a two-column TSV citation stream into edges.

    Duplicates and document self-citations are kept here; they are collapsed
    respectively rejected when the snapshot is built.
    """
    edges: list[CitationEdge] = []
    issues: list[str] = []
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\r\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            issues.append(f"line {lineno}: expected 2 tab-separated columns, got {len(parts)}")
            break
        citing, cited = parts
        if not citing or not cited:
            issues.append(f"line {lineno}: empty publication id")
            break
        edges.append(CitationEdge(citing_id=citing, cited_id=cited))
    if issues:
        raise CorpusValidationError(issues)
    return edges


# ---------------------------------------------------------------------------
# snapshot


@dataclass(frozen=True)
class CorpusSnapshot:
    """Immutable validated corpus with dense-index arrays and adjacency.

    Publications are indexed 0..n_pubs-1 in input order. Edges are
    de-duplicated and sorted by (citing, cited); ``countable[e]`` marks edges
    whose cited endpoint is an article or review (only those ever contribute
    to obtained citations). Category and country vocabularies are sorted, so
    two snapshots built from the same content are bit-identical regardless
    of construction path.
    """

    config: CorpusConfig
    ids: list[str]
    years: np.ndarray          # int64 [P]
    doc_codes: np.ndarray      # int8  [P], index into DOC_TYPES
    refs_total: np.ndarray     # int64 [P]
    cat_names: list[str]
    cat_indptr: np.ndarray     # int64 [P+1]
    cat_codes: np.ndarray      # int32 [sum k_j]
    country_names: list[str]
    country_indptr: np.ndarray
    country_codes: np.ndarray
    citing: np.ndarray         # int64 [E]
    cited: np.ndarray          # int64 [E]
    countable: np.ndarray      # bool  [E]
    in_order: np.ndarray       # int64 [E], edge ids sorted by (cited, citing)
    in_indptr: np.ndarray      # int64 [P+1]
    out_indptr: np.ndarray     # int64 [P+1]
    id_to_index: dict = field(repr=False)

    @property
    def n_pubs(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return int(self.citing.shape[0])

    @property
    def cited_side(self) -> np.ndarray:
        """Boolean mask of publications eligible on the cited side."""
        return self.doc_codes < _N_CITED_SIDE

    def categories_of(self, i: int) -> tuple[str, ...]:
        lo, hi = self.cat_indptr[i], self.cat_indptr[i + 1]
        return tuple(self.cat_names[c] for c in self.cat_codes[lo:hi])

    def countries_of(self, i: int) -> tuple[str, ...]:
        lo, hi = self.country_indptr[i], self.country_indptr[i + 1]
        return tuple(self.country_names[c] for c in self.country_codes[lo:hi])

    def country_code(self, name: str) -> int | None:
        """Dense code of a country name, or None if absent from the corpus."""
        pos = np.searchsorted(self._country_names_arr, name)
        if pos < len(self.country_names) and self.country_names[pos] == name:
            return int(pos)
        return None

    @property
    def _country_names_arr(self) -> np.ndarray:
        arr = getattr(self, "_cty_arr_cache", None)
        if arr is None:
            arr = np.array(self.country_names, dtype=object)
            object.__setattr__(self, "_cty_arr_cache", arr)
        return arr

    def pubs_with_country(self, name: str) -> np.ndarray:
        """Boolean mask over publications listing the given country."""
        mask = np.zeros(self.n_pubs, dtype=bool)
        code = self.country_code(name)
        if code is None:
            return mask
        hits = np.flatnonzero(self.country_codes == code)
        rows = np.searchsorted(self.country_indptr, hits, side="right") - 1
        mask[rows] = True
        return mask

    def pub_category_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """(pub index, category code) pairs, one row per listed category."""
        sizes = np.diff(self.cat_indptr)
        pubs = np.repeat(np.arange(self.n_pubs, dtype=np.int64), sizes)
        return pubs, self.cat_codes.astype(np.int64)

    def pub_country_rows(self) -> tuple[np.ndarray, np.ndarray]:
        sizes = np.diff(self.country_indptr)
        pubs = np.repeat(np.arange(self.n_pubs, dtype=np.int64), sizes)
        return pubs, self.country_codes.astype(np.int64)

    def out_refs(self, i: int) -> np.ndarray:
        """Cited publication indexes referenced by publication i."""
        return self.cited[self.out_indptr[i]:self.out_indptr[i + 1]]

    def in_citers(self, i: int) -> np.ndarray:
        """Citing publication indexes that reference publication i."""
        return self.citing[self.in_order[self.in_indptr[i]:self.in_indptr[i + 1]]]

    def digest(self) -> str:
        """Deterministic sha256 over the full snapshot content."""
        h = hashlib.sha256()
        h.update(json.dumps(self.config.to_dict(), sort_keys=True).encode())
        for part in (self.ids, self.cat_names, self.country_names):
            h.update("\x1f".join(part).encode())
            h.update(b"\x00")
        for arr in (
            self.years, self.doc_codes, self.refs_total,
            self.cat_indptr, self.cat_codes,
            self.country_indptr, self.country_codes,
            self.citing, self.cited, self.countable,
        ):
            h.update(arr.tobytes())
        return h.hexdigest()


def _canonical_vocab(names: Sequence[str], codes: np.ndarray) -> tuple[list[str], np.ndarray]:
    """Restrict a vocabulary to used names, sorted, remapping the codes."""
    names_arr = np.asarray(names, dtype=object)
    if codes.size:
        used = np.zeros(len(names), dtype=bool)
        used[codes] = True
    else:
        used = np.zeros(len(names), dtype=bool)
    used_idx = np.flatnonzero(used)
    order = used_idx[np.argsort(names_arr[used_idx])]
    remap = np.full(len(names), -1, dtype=np.int32)
    remap[order] = np.arange(order.size, dtype=np.int32)
    new_names = [str(n) for n in names_arr[order]]
    new_codes = remap[codes] if codes.size else codes.astype(np.int32)
    return new_names, new_codes.astype(np.int32)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _permute_csr(indptr, codes, order):
    """Reorder a CSR layout by a publication permutation."""
    sizes = np.diff(indptr)[order]
    new_indptr = np.zeros(order.size + 1, dtype=np.int64)
    np.cumsum(sizes, out=new_indptr[1:])
    total = int(new_indptr[-1])
    if total == 0:
        return new_indptr, codes[:0]
    starts = indptr[:-1][order]
    gather = (np.repeat(starts, sizes)
              + np.arange(total) - np.repeat(new_indptr[:-1], sizes))
    return new_indptr, codes[gather]


def _assemble_snapshot(config, ids, years, doc_codes, refs_total,
                       cat_names, cat_indptr, cat_codes,
                       country_names, country_indptr, country_codes,
                       citing, cited) -> CorpusSnapshot:
    """Shared canonical constructor for both loading paths and exclusion.

    Expects per-publication arrays plus endpoint-resolved (possibly
    duplicated) edge arrays; performs the cross-record validation that does
    not need source positions. Publications are sorted by id, so snapshots
    and everything computed on them are independent of input record order
    down to the bit.
    """
    n = len(ids)
    issues: list[str] = []

    id_to_index: dict = {}
    for i, pid in enumerate(ids):
        if pid in id_to_index:
            issues.append(f"duplicate publication id '{pid}'")
            if len(issues) >= _MAX_LISTED:
                break
        id_to_index[pid] = i
    if issues:
        raise CorpusValidationError(issues)

    years = np.ascontiguousarray(years, dtype=np.int64)
    refs_total = np.ascontiguousarray(refs_total, dtype=np.int64)
    doc_codes = np.ascontiguousarray(doc_codes, dtype=np.int8)
    cat_codes = np.asarray(cat_codes)
    country_codes = np.asarray(country_codes)
    citing = np.ascontiguousarray(citing, dtype=np.int64)
    cited = np.ascontiguousarray(cited, dtype=np.int64)

    ids_series = pl.Series(ids, dtype=pl.Utf8)
    if n and not ids_series.is_sorted():
        order = ids_series.arg_sort().to_numpy().astype(np.int64)
        ids = [ids[i] for i in order]
        years = years[order]
        refs_total = refs_total[order]
        doc_codes = doc_codes[order]
        cat_indptr, cat_codes = _permute_csr(
            np.asarray(cat_indptr, dtype=np.int64), cat_codes, order)
        country_indptr, country_codes = _permute_csr(
            np.asarray(country_indptr, dtype=np.int64), country_codes, order)
        inverse = np.empty(n, dtype=np.int64)
        inverse[order] = np.arange(n)
        if citing.size:
            citing = inverse[citing]
            cited = inverse[cited]
        id_to_index = {pid: i for i, pid in enumerate(ids)}

    bad_year = np.flatnonzero((years < config.y_min) | (years > config.y_max))
    for i in bad_year[:_MAX_LISTED]:
        issues.append(
            f"publication '{ids[i]}': year {years[i]} outside configured range "
            f"[{config.y_min}, {config.y_max}]"
        )
    if issues:
        raise CorpusValidationError(issues)

    citing = np.ascontiguousarray(citing, dtype=np.int64)
    cited = np.ascontiguousarray(cited, dtype=np.int64)
    self_loop = np.flatnonzero(citing == cited)
    for e in self_loop[:_MAX_LISTED]:
        issues.append(f"document self-citation edge '{ids[citing[e]]}' -> '{ids[cited[e]]}'")
    if issues:
        raise CorpusValidationError(issues)

    # collapse duplicate links: one citing paper contributes at most one
    # citation to a given cited paper
    if citing.size:
        key = citing * np.int64(n) + cited
        key = np.unique(key)
        citing = (key // n).astype(np.int64)
        cited = (key % n).astype(np.int64)

    refs_total = np.ascontiguousarray(refs_total, dtype=np.int64)
    out_deg = np.bincount(citing, minlength=n).astype(np.int64)
    short = np.flatnonzero(refs_total < out_deg)
    for i in short[:_MAX_LISTED]:
        issues.append(
            f"publication '{ids[i]}': refs_total {refs_total[i]} is below its "
            f"{out_deg[i]} resolved outgoing references"
        )
    if issues:
        raise CorpusValidationError(issues)

    doc_codes = np.ascontiguousarray(doc_codes, dtype=np.int8)
    cat_names, cat_codes = _canonical_vocab(cat_names, np.asarray(cat_codes))
    country_names, country_codes = _canonical_vocab(country_names, np.asarray(country_codes))

    countable = doc_codes[cited] < _N_CITED_SIDE if citing.size else np.zeros(0, dtype=bool)
    if citing.size:
        in_order = np.argsort(cited * np.int64(n) + citing).astype(np.int64)
    else:
        in_order = np.zeros(0, dtype=np.int64)
    in_indptr = np.zeros(n + 1, dtype=np.int64)
    out_indptr = np.zeros(n + 1, dtype=np.int64)
    if citing.size:
        np.cumsum(np.bincount(cited, minlength=n), out=in_indptr[1:])
        np.cumsum(np.bincount(citing, minlength=n), out=out_indptr[1:])

    return CorpusSnapshot(
        config=config,
        ids=list(ids),
        years=_freeze(years),
        doc_codes=_freeze(doc_codes),
        refs_total=_freeze(refs_total),
        cat_names=cat_names,
        cat_indptr=_freeze(np.ascontiguousarray(cat_indptr, dtype=np.int64)),
        cat_codes=_freeze(cat_codes),
        country_names=country_names,
        country_indptr=_freeze(np.ascontiguousarray(country_indptr, dtype=np.int64)),
        country_codes=_freeze(country_codes),
        citing=_freeze(citing),
        cited=_freeze(cited),
        countable=_freeze(np.ascontiguousarray(countable, dtype=bool)),
        in_order=_freeze(in_order),
        in_indptr=_freeze(in_indptr),
        out_indptr=_freeze(out_indptr),
        id_to_index=id_to_index,
    )


def _dangling_error(missing_ids: Iterable[str]) -> CorpusValidationError:
    missing = sorted(set(missing_ids))
    shown = ", ".join(f"'{m}'" for m in missing[:_MAX_LISTED])
    more = "" if len(missing) <= _MAX_LISTED else f" (and {len(missing) - _MAX_LISTED} more)"
    return CorpusValidationError(
        [f"edges reference unknown publication ids: {shown}{more}"]
    )


def build_snapshot(pubs: Sequence[PublicationRecord], edges: Sequence[CitationEdge],
                   config: CorpusConfig) -> CorpusSnapshot:
    """Validate records cross-referentially and freeze them into a snapshot."""
    config.validate()

    id_to_index: dict = {}
    issues: list[str] = []
    for i, rec in enumerate(pubs):
        if rec.id in id_to_index:
            issues.append(f"duplicate publication id '{rec.id}'")
            if len(issues) >= _MAX_LISTED:
                break
        id_to_index[rec.id] = i
    if issues:
        raise CorpusValidationError(issues)

    n = len(pubs)
    years = np.fromiter((r.year for r in pubs), dtype=np.int64, count=n)
    doc_codes = np.fromiter((_DOC_CODE[r.doc_type] for r in pubs), dtype=np.int8, count=n)
    refs_total = np.fromiter((r.refs_total for r in pubs), dtype=np.int64, count=n)

    cat_vocab: dict[str, int] = {}
    cty_vocab: dict[str, int] = {}
    cat_indptr = np.zeros(n + 1, dtype=np.int64)
    cty_indptr = np.zeros(n + 1, dtype=np.int64)
    cat_codes: list[int] = []
    cty_codes: list[int] = []
    for i, rec in enumerate(pubs):
        for c in rec.categories:
            cat_codes.append(cat_vocab.setdefault(c, len(cat_vocab)))
        cat_indptr[i + 1] = len(cat_codes)
        for c in rec.countries:
            cty_codes.append(cty_vocab.setdefault(c, len(cty_vocab)))
        cty_indptr[i + 1] = len(cty_codes)

    missing = [e.citing_id for e in edges if e.citing_id not in id_to_index]
    missing += [e.cited_id for e in edges if e.cited_id not in id_to_index]
    if missing:
        raise _dangling_error(missing)
    citing = np.fromiter((id_to_index[e.citing_id] for e in edges), dtype=np.int64, count=len(edges))
    cited = np.fromiter((id_to_index[e.cited_id] for e in edges), dtype=np.int64, count=len(edges))

    return _assemble_snapshot(
        config, [r.id for r in pubs], years, doc_codes, refs_total,
        list(cat_vocab), cat_indptr, np.asarray(cat_codes, dtype=np.int32),
        list(cty_vocab), cty_indptr, np.asarray(cty_codes, dtype=np.int32),
        citing, cited,
    )


# ---------------------------------------------------------------------------
# columnar fast path


class _Fallback(Exception):
    """Internal: the fast path cannot produce a precise diagnostic."""


def _flat_list_column(df: pl.DataFrame, name: str) -> tuple[np.ndarray, list[str], np.ndarray]:
    """(indptr, vocabulary, codes) for a validated list-of-string column."""
    lens = df[name].list.len().to_numpy().astype(np.int64)
    indptr = np.zeros(len(df) + 1, dtype=np.int64)
    np.cumsum(lens, out=indptr[1:])
    flat = df[name].explode(empty_as_null=False)
    if flat.null_count() or len(flat) != indptr[-1]:
        raise _Fallback  # null entries inside lists
    if len(flat) == 0:
        return indptr, [], np.zeros(0, dtype=np.int32)
    cat = flat.cast(pl.Categorical)
    vocab = cat.cat.get_categories().to_list()
    codes = cat.to_physical().to_numpy().astype(np.int32)
    return indptr, vocab, codes


def _read_publications_columnar(path):
    try:
        df = pl.read_ndjson(path, infer_schema_length=None)
    except Exception as exc:  # noqa: BLE001 - any parse trouble goes to the line path
        raise _Fallback from exc
    if df.width == 0 or len(df) == 0:
        # empty, blank-line-only, or field-less content: let the line path
        # decide between a valid empty corpus and a precise error
        raise _Fallback

    expected = {
        "id": pl.Utf8, "year": pl.Int64, "doc_type": pl.Utf8,
        "categories": pl.List(pl.Utf8), "countries": pl.List(pl.Utf8),
        "refs_total": pl.Int64,
    }
    schema = df.schema
    for col, dtype in expected.items():
        if col not in schema or schema[col] != dtype:
            # tolerate all-empty list columns, which infer as List(Null)
            if col == "countries" and col in schema and schema[col] == pl.List(pl.Null):
                continue
            raise _Fallback
    if any(df[c].null_count() for c in expected):
        raise _Fallback

    ids_s = df["id"]
    if (ids_s.str.len_bytes() == 0).any():
        raise _Fallback
    if ids_s.str.contains("\t|\n|\r").any():
        raise _Fallback
    dup_mask = ids_s.is_duplicated()
    if dup_mask.any():
        pid = ids_s[int(dup_mask.arg_true()[0])]
        rows = (ids_s == pid).arg_true().to_list()
        raise CorpusValidationError([
            f"line {rows[1] + 1}: duplicate publication id '{pid}' "
            f"(first seen on line {rows[0] + 1})"
        ])

    if not df["doc_type"].is_in(list(DOC_TYPES)).all():
        raise _Fallback
    if (df["refs_total"] < 0).any():
        raise _Fallback
    if (df["categories"].list.len() == 0).any():
        raise _Fallback
    for col in ("categories", "countries"):
        if df.schema[col] == pl.List(pl.Utf8):
            flat = df[col].explode(empty_as_null=False)
            if flat.null_count():
                raise _Fallback
            if len(flat) and (flat.str.len_bytes() == 0).any():
                raise _Fallback

    ids = ids_s.to_list()
    years = df["year"].to_numpy().astype(np.int64)
    refs = df["refs_total"].to_numpy().astype(np.int64)
    doc_codes = (
        df["doc_type"].cast(pl.Enum(DOC_TYPES)).to_physical().to_numpy().astype(np.int8)
    )
    cat_indptr, cat_names, cat_codes = _flat_list_column(df, "categories")
    if df.schema["countries"] == pl.List(pl.Null):
        cty_indptr = np.zeros(len(df) + 1, dtype=np.int64)
        cty_names, cty_codes = [], np.zeros(0, dtype=np.int32)
    else:
        cty_indptr, cty_names, cty_codes = _flat_list_column(df, "countries")
    return (ids, years, doc_codes, refs, cat_names, cat_indptr, cat_codes,
            cty_names, cty_indptr, cty_codes)


def _read_edges_columnar(path, ids: list[str]):
    try:
        ed = pl.read_csv(
            path, separator="\t", has_header=False,
            schema={"citing": pl.Utf8, "cited": pl.Utf8},
            quote_char=None,
        )
    except pl.exceptions.NoDataError:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    except Exception as exc:  # noqa: BLE001
        raise _Fallback from exc
    for col in ("citing", "cited"):
        s = ed[col]
        if s.null_count() or (s.str.len_bytes() == 0).any():
            raise _Fallback

    id_frame = pl.DataFrame({
        "pid": pl.Series(ids, dtype=pl.Utf8),
        "ix": pl.Series(np.arange(len(ids), dtype=np.int64)),
    })
    mapped = ed.join(
        id_frame.rename({"pid": "citing", "ix": "ci"}), on="citing", how="left",
        maintain_order="left",
    ).join(
        id_frame.rename({"pid": "cited", "ix": "cj"}), on="cited", how="left",
        maintain_order="left",
    )
    if mapped["ci"].null_count() or mapped["cj"].null_count():
        missing = (
            mapped.filter(pl.col("ci").is_null())["citing"].to_list()
            + mapped.filter(pl.col("cj").is_null())["cited"].to_list()
        )
        raise _dangling_error(missing)
    return (mapped["ci"].to_numpy().astype(np.int64),
            mapped["cj"].to_numpy().astype(np.int64))


def read_corpus(pubs_path, edges_path, config: CorpusConfig) -> CorpusSnapshot:
    """Load and validate a corpus from files into a snapshot.

    Uses the columnar path and falls back to the line-by-line loaders when
    any content-level problem needs a precise position. I/O errors
    propagate as OSError.
    """
    config.validate()
    for p in (pubs_path, edges_path):
        with open(p, "rb"):
            pass  # existence and readability, distinguishing I/O from content

    try:
        (ids, years, doc_codes, refs, cat_names, cat_indptr, cat_codes,
         cty_names, cty_indptr, cty_codes) = _read_publications_columnar(pubs_path)
        citing, cited = _read_edges_columnar(edges_path, ids)
        return _assemble_snapshot(
            config, ids, years, doc_codes, refs,
            cat_names, cat_indptr, cat_codes,
            cty_names, cty_indptr, cty_codes,
            citing, cited,
        )
    except _Fallback:
        pubs = load_publications(pubs_path)
        edges = load_edges(edges_path)
        return build_snapshot(pubs, edges, config)


def write_corpus(snapshot: CorpusSnapshot, pubs_path, edges_path) -> None:
    """Serialize a snapshot back to its canonical JSONL and TSV forms.

    Reloading the written files yields a snapshot with an identical digest.
    """
    with open(pubs_path, "w", encoding="utf-8", newline="\n") as fh:
        for i, pid in enumerate(snapshot.ids):
            rec = {
                "id": pid,
                "year": int(snapshot.years[i]),
                "doc_type": DOC_TYPES[snapshot.doc_codes[i]],
                "categories": list(snapshot.categories_of(i)),
                "countries": list(snapshot.countries_of(i)),
                "refs_total": int(snapshot.refs_total[i]),
            }
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
    with open(edges_path, "w", encoding="utf-8", newline="\n") as fh:
        ids = snapshot.ids
        for e in range(snapshot.n_edges):
            fh.write(f"{ids[snapshot.citing[e]]}\t{ids[snapshot.cited[e]]}\n")


def snapshot_from_strings(pubs_text: str, edges_text: str,
                          config: CorpusConfig) -> CorpusSnapshot:
    """Convenience for tests: build a snapshot from in-memory file contents."""
    pubs = load_publications(io.StringIO(pubs_text))
    edges = load_edges(io.StringIO(edges_text))
    return build_snapshot(pubs, edges, config)
