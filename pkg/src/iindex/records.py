"""Publication records: domain types, CSV/JSON ingestion and serialization.

CSV layout (UTF-8, header row required, fixed column order)::

    id,citations,n_authors,year,chapters,author_info_known

``chapters`` is blank for anything that is not a multi-chapter book. JSON input
is either an array of objects carrying the same six fields, or an object
``{"author_id": ..., "collection_date": ..., "publications": [...]}``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field, replace
from typing import Any, Iterable

CSV_COLUMNS = ("id", "citations", "n_authors", "year", "chapters", "author_info_known")
FORMATS = ("csv", "json")

_TRUE = {"true", "1", "yes", "y", "t"}
_FALSE = {"false", "0", "no", "n", "f"}


class RecordError(ValueError):
    """Base class for problems with publication input."""


class ParseError(RecordError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ValidationError(RecordError):
    pass


@dataclass(frozen=True)
class Publication:
    """One scholarly work.

    ``n_authors`` counts coauthors (per chapter, for books). It may be ``None``
    only for records whose author information is unknown; those are dropped by
    :func:`filter_usable` before any metric sees them.
    """

    id: str
    citations: int
    n_authors: int | None
    year: int
    chapters: int | None = None
    author_info_known: bool = True

    def __post_init__(self):
        validate_publication(self)


def validate_publication(p: Publication) -> None:
    if not isinstance(p.citations, int) or isinstance(p.citations, bool) or p.citations < 0:
        raise ValidationError(f"publication {p.id!r}: citations must be a non-negative integer, got {p.citations!r}")
    if p.n_authors is None:
        if p.author_info_known:
            raise ValidationError(f"publication {p.id!r}: n_authors is required when author info is known")
    elif not isinstance(p.n_authors, int) or isinstance(p.n_authors, bool) or p.n_authors < 1:
        raise ValidationError(f"publication {p.id!r}: n_authors must be >= 1, got {p.n_authors!r}")
    if not isinstance(p.year, int) or isinstance(p.year, bool):
        raise ValidationError(f"publication {p.id!r}: year must be an integer, got {p.year!r}")
    if p.chapters is not None and (
        not isinstance(p.chapters, int) or isinstance(p.chapters, bool) or p.chapters < 1
    ):
        raise ValidationError(f"publication {p.id!r}: chapters must be >= 1 when present, got {p.chapters!r}")


@dataclass(frozen=True)
class AuthorCorpus:
    author_id: str
    publications: tuple[Publication, ...] = field(default_factory=tuple)
    collection_date: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "publications", tuple(self.publications))
        seen = set()
        for p in self.publications:
            if p.id in seen:
                raise ValidationError(f"duplicate publication id {p.id!r}")
            seen.add(p.id)

    def __len__(self) -> int:
        return len(self.publications)

    def __iter__(self):
        return iter(self.publications)


def effective_share_divisor(p: Publication) -> int:
    """Number of equal parts a publication's citations are split into for one author.

    Books first split citations across chapters, then among the coauthors of a
    chapter.
    """
    if p.n_authors is None:
        raise ValidationError(f"publication {p.id!r} has no author information")
    if p.chapters is None:
        return p.n_authors
    return p.chapters * p.n_authors


def filter_usable(corpus: AuthorCorpus) -> tuple[AuthorCorpus, int]:
    """Drop works with unknown author information. Returns (corpus, removed_count)."""
    kept = tuple(p for p in corpus.publications if p.author_info_known)
    removed = len(corpus.publications) - len(kept)
    if removed == 0:
        return corpus, 0
    return replace(corpus, publications=kept), removed


# -- parsing -----------------------------------------------------------------


def _parse_int(raw: Any, line: int | None, name: str, optional: bool = False) -> int | None:
    if raw is None or (isinstance(raw, str) and raw.strip() == ""):
        if optional:
            return None
        raise ParseError("missing value", line, name)
    if isinstance(raw, bool):
        raise ParseError(f"expected integer, got {raw!r}", line, name)
    if isinstance(raw, int):
        return raw
    if isinstance(raw, float):
        if raw.is_integer():
            return int(raw)
        raise ParseError(f"expected integer, got {raw!r}", line, name)
    try:
        return int(str(raw).strip())
    except ValueError:
        raise ParseError(f"expected integer, got {raw!r}", line, name) from None


def _parse_bool(raw: Any, line: int | None, name: str, default: bool | None = None) -> bool:
    if raw is None or (isinstance(raw, str) and raw.strip() == ""):
        if default is not None:
            return default
        raise ParseError("missing value", line, name)
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    raise ParseError(f"expected boolean, got {raw!r}", line, name)


def _build(fields: dict[str, Any], line: int | None) -> Publication:
    pid = fields.get("id")
    if pid is None or str(pid).strip() == "":
        raise ParseError("missing value", line, "id")
    known = _parse_bool(fields.get("author_info_known"), line, "author_info_known", default=True)
    n_authors = _parse_int(fields.get("n_authors"), line, "n_authors", optional=not known)
    try:
        return Publication(
            id=str(pid).strip(),
            citations=_parse_int(fields.get("citations"), line, "citations"),
            n_authors=n_authors,
            year=_parse_int(fields.get("year"), line, "year"),
            chapters=_parse_int(fields.get("chapters"), line, "chapters", optional=True),
            author_info_known=known,
        )
    except ValidationError as exc:
        where = f"line {line}: " if line is not None else ""
        raise ValidationError(where + str(exc)) from None


def _parse_csv(text: str) -> list[Publication]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input, header row required", 1) from None
    header = [h.strip() for h in header]
    if header and header[0].startswith("\ufeff"):
        header[0] = header[0][1:]
    if tuple(header) != CSV_COLUMNS:
        raise ParseError(f"header must be {','.join(CSV_COLUMNS)}, got {','.join(header)}", 1)
    pubs = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(CSV_COLUMNS):
            raise ParseError(f"expected {len(CSV_COLUMNS)} fields, got {len(row)}", line)
        pubs.append(_build(dict(zip(CSV_COLUMNS, row)), line))
    return pubs


def _parse_json_publications(items: Any) -> list[Publication]:
    if not isinstance(items, list):
        raise ParseError("expected an array of publication objects")
    pubs = []
    for idx, item in enumerate(items):
        if not isinstance(item, dict):
            raise ParseError(f"publication #{idx} is not an object")
        unknown = set(item) - set(CSV_COLUMNS)
        if unknown:
            raise ParseError(f"publication #{idx}: unknown field(s) {sorted(unknown)}", field=sorted(unknown)[0])
        try:
            pubs.append(_build(item, None))
        except ParseError as exc:
            raise ParseError(f"publication #{idx}: {exc}", field=exc.field) from None
    return pubs


def corpus_from_json_value(value: Any, author_id: str = "") -> AuthorCorpus:
    """Build a corpus from an already-decoded JSON value (array or corpus object)."""
    if isinstance(value, dict):
        pubs = _parse_json_publications(value.get("publications"))
        collection = value.get("collection_date")
        if collection is not None:
            collection = _parse_int(collection, None, "collection_date")
        return AuthorCorpus(str(value.get("author_id", author_id)), pubs, collection)
    return AuthorCorpus(author_id, _parse_json_publications(value))


def parse_corpus(data: bytes | str, format: str, author_id: str = "") -> AuthorCorpus:
    """Parse a publication list in ``csv`` or ``json`` format."""
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8 ({exc})") from None
    else:
        text = data
    if format == "csv":
        return AuthorCorpus(author_id, _parse_csv(text))
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    return corpus_from_json_value(value, author_id)


# -- serialization -----------------------------------------------------------


def publication_to_dict(p: Publication) -> dict[str, Any]:
    return {
        "id": p.id,
        "citations": p.citations,
        "n_authors": p.n_authors,
        "year": p.year,
        "chapters": p.chapters,
        "author_info_known": p.author_info_known,
    }


def corpus_to_dict(corpus: AuthorCorpus) -> dict[str, Any]:
    return {
        "author_id": corpus.author_id,
        "collection_date": corpus.collection_date,
        "publications": [publication_to_dict(p) for p in corpus.publications],
    }


def serialize_corpus(corpus: AuthorCorpus, format: str) -> bytes:
    """Inverse of :func:`parse_corpus`.

    CSV carries publications only; JSON keeps author_id and collection_date.
    """
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for p in corpus.publications:
            writer.writerow([
                p.id,
                p.citations,
                "" if p.n_authors is None else p.n_authors,
                p.year,
                "" if p.chapters is None else p.chapters,
                "true" if p.author_info_known else "false",
            ])
        return buf.getvalue().encode("utf-8")
    if format == "json":
        return json.dumps(corpus_to_dict(corpus), indent=2, sort_keys=True).encode("utf-8")
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


def make_corpus(
    citations: Iterable[int],
    n_authors: int | Iterable[int] = 1,
    year: int = 2000,
    author_id: str = "",
) -> AuthorCorpus:
    """Convenience constructor for synthetic corpora (one publication per citation count)."""
    citations = list(citations)
    if isinstance(n_authors, int):
        authors = [n_authors] * len(citations)
    else:
        authors = list(n_authors)
        if len(authors) != len(citations):
            raise ValueError("citations and n_authors differ in length")
    pubs = [Publication(f"p{i + 1}", c, n, year) for i, (c, n) in enumerate(zip(citations, authors))]
    return AuthorCorpus(author_id, pubs)


def corpus_digest(corpus: AuthorCorpus) -> str:
    """SHA-256 of the canonical JSON serialization."""
    return hashlib.sha256(serialize_corpus(corpus, "json")).hexdigest()
