"""Normalized h-index (h-tilde), its per-year rate, career span and author ranking."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .metrics import DomainError, MetricReport, UndefinedMetricError, compute_report
from .records import AuthorCorpus

SPAN_MODES = ("to_last_publication", "to_collection_date")
METRICS = ("h", "i_index", "n_c", "h_tilde", "h_tilde_t")
METRIC_ALIASES = {
    "h": "h",
    "i": "i_index",
    "i_index": "i_index",
    "nc": "n_c",
    "n_c": "n_c",
    "htilde": "h_tilde",
    "h_tilde": "h_tilde",
    "htildet": "h_tilde_t",
    "htilde_t": "h_tilde_t",
    "h_tilde_t": "h_tilde_t",
}
TABLE_COLUMNS = ("author", "N_c", "h", "I", "h_tilde", "h_tilde_T")


@dataclass(frozen=True)
class AuthorSummary:
    author_id: str
    report: MetricReport
    h_tilde: float
    t_years: float
    h_tilde_t: float

    def metric(self, name: str) -> float:
        if name == "h":
            return self.report.h
        if name == "n_c":
            return self.report.n_c
        if name == "i_index":
            return self.report.i_index
        if name == "h_tilde":
            return self.h_tilde
        if name == "h_tilde_t":
            return self.h_tilde_t
        raise ValueError(f"unknown metric {name!r}")


@dataclass(frozen=True)
class RankingKey:
    """Ordered metrics for lexicographic comparison; ``descending`` is parallel to ``metrics``."""

    metrics: tuple[str, ...]
    descending: tuple[bool, ...] | None = None

    def __post_init__(self):
        metrics = tuple(self.metrics)
        if not metrics:
            raise ValueError("ranking key must not be empty")
        for m in metrics:
            if m not in METRICS:
                raise ValueError(f"unknown metric {m!r}; expected one of {METRICS}")
        if len(set(metrics)) != len(metrics):
            raise ValueError("ranking key repeats a metric")
        desc = (True,) * len(metrics) if self.descending is None else tuple(self.descending)
        if len(desc) != len(metrics):
            raise ValueError("descending flags must match metrics")
        object.__setattr__(self, "metrics", metrics)
        object.__setattr__(self, "descending", desc)

    @classmethod
    def parse(cls, text: str) -> "RankingKey":
        """Parse ``"h,I,Nc"``; append ``:asc`` to a metric to sort it ascending."""
        metrics, desc = [], []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            name, _, direction = part.partition(":")
            canonical = METRIC_ALIASES.get(name.strip().lower())
            if canonical is None:
                raise ValueError(f"unknown metric {name!r}")
            direction = direction.strip().lower() or "desc"
            if direction not in ("asc", "desc"):
                raise ValueError(f"unknown direction {direction!r}")
            metrics.append(canonical)
            desc.append(direction == "desc")
        return cls(tuple(metrics), tuple(desc))


@dataclass(frozen=True)
class RankedEntry:
    rank: int
    summary: AuthorSummary
    tied: bool


def h_tilde(h: int, i: float) -> float:
    """Estimated h-index had the author worked alone: h * sqrt(I) / 10."""
    if not 0 < i <= 100:
        raise DomainError(f"I must lie in (0, 100], got {i!r}")
    if h < 0:
        raise DomainError("h must be non-negative")
    return h * math.sqrt(i) / 10.0


def h_tilde_t(h_tilde_value: float, t: float) -> float:
    if not t > 0:
        raise DomainError("career span must be positive")
    return h_tilde_value / t


def career_span(corpus: AuthorCorpus, mode: str = "to_last_publication") -> int:
    """Inclusive span in years from the first cited publication to the end point."""
    if mode not in SPAN_MODES:
        raise ValueError(f"unknown span mode {mode!r}; expected one of {SPAN_MODES}")
    cited = [p.year for p in corpus.publications if p.citations >= 1]
    if not cited:
        raise UndefinedMetricError("career span needs at least one cited publication")
    first = min(cited)
    if mode == "to_last_publication":
        end = max(p.year for p in corpus.publications)
    else:
        if corpus.collection_date is None:
            raise ValueError("collection date required for span mode to_collection_date")
        end = corpus.collection_date
    span = end - first + 1
    if span < 1:
        raise DomainError(f"end year {end} precedes first cited publication {first}")
    return span


def summarize(corpus: AuthorCorpus, span_mode: str = "to_last_publication") -> AuthorSummary:
    report = compute_report(corpus)
    if report.i_index is None:
        raise UndefinedMetricError(f"author {corpus.author_id!r}: no citations, I-index undefined")
    return summary_from_values(corpus.author_id, report, career_span(corpus, span_mode))


def summary_from_values(author_id: str, report: MetricReport, t_years: float) -> AuthorSummary:
    ht = h_tilde(report.h, report.i_index)
    return AuthorSummary(author_id, report, ht, float(t_years), h_tilde_t(ht, t_years))


def _chain_groups(items: list[AuthorSummary], metric: str, descending: bool, eps: float):
    """Sort by one metric, then split into runs whose consecutive gaps are <= eps."""
    ordered = sorted(items, key=lambda s: s.metric(metric), reverse=descending)
    groups: list[list[AuthorSummary]] = []
    for s in ordered:
        if groups and abs(groups[-1][-1].metric(metric) - s.metric(metric)) <= eps:
            groups[-1].append(s)
        else:
            groups.append([s])
    return groups


def rank_lexicographic(
    summaries: Sequence[AuthorSummary],
    key: RankingKey,
    epsilon: Mapping[str, float] | None = None,
) -> list[RankedEntry]:
    """Rank by successive metrics, passing near-ties on to the next metric.

    Values of one metric that chain together with gaps no larger than that
    metric's epsilon form a tie block, which the next metric orders. Entries
    still tied after the last metric keep input order and share a rank.
    """
    if not summaries:
        raise ValueError("nothing to rank")
    epsilon = dict(epsilon or {})
    for name in epsilon:
        if name not in METRICS:
            raise ValueError(f"unknown metric {name!r} in epsilon map")

    def resolve(block: list[AuthorSummary], depth: int) -> list[list[AuthorSummary]]:
        if depth == len(key.metrics) or len(block) == 1:
            return [block]
        metric = key.metrics[depth]
        out = []
        for group in _chain_groups(block, metric, key.descending[depth], epsilon.get(metric, 0.0)):
            out.extend(resolve(group, depth + 1))
        return out

    # python's sort is stable, so within unresolved blocks input order survives
    ranked, position = [], 1
    for block in resolve(list(summaries), 0):
        tied = len(block) > 1
        for s in block:
            ranked.append(RankedEntry(position, s, tied))
        position += len(block)
    return ranked


def rank_by_h_tilde(summaries: Sequence[AuthorSummary]) -> list[RankedEntry]:
    return rank_lexicographic(summaries, RankingKey(("h_tilde", "h_tilde_t")))


# -- output ------------------------------------------------------------------------


def summary_row(entry: RankedEntry | AuthorSummary) -> dict[str, Any]:
    s = entry.summary if isinstance(entry, RankedEntry) else entry
    row = {
        "author": s.author_id,
        "N_c": s.report.n_c,
        "h": s.report.h,
        "I": s.report.i_index,
        "h_tilde": s.h_tilde,
        "h_tilde_T": s.h_tilde_t,
        "T": s.t_years,
        "c_share": s.report.c_share,
        "n_p": s.report.n_p,
    }
    if isinstance(entry, RankedEntry):
        row = {"rank": entry.rank, **row, "tied": entry.tied}
    return row


def summary_from_row(row: Mapping[str, Any]) -> AuthorSummary:
    """Rebuild a summary from a row of ranking JSON output (or a hand-written one).

    Rows need ``author``, ``N_c``, ``h``, ``I`` and ``T``; the derived columns are
    recomputed rather than trusted.
    """
    try:
        n_c, h, i, t = int(row["N_c"]), int(row["h"]), float(row["I"]), float(row["T"])
    except KeyError as exc:
        raise ValueError(f"summary row missing column {exc.args[0]!r}") from None
    c_share = float(row["c_share"]) if row.get("c_share") is not None else n_c * i / 100.0
    n_p = int(row["n_p"]) if row.get("n_p") is not None else None
    report = MetricReport(n_c=n_c, h=h, c_share=c_share, i_index=i, c_index=100.0 - i, n_p=n_p)
    return summary_from_values(str(row["author"]), report, t)


def _display(row: Mapping[str, Any]) -> list[str]:
    return [
        str(row["author"]),
        str(row["N_c"]),
        str(row["h"]),
        f"{row['I']:.2f}",
        f"{row['h_tilde']:.2f}",
        f"{row['h_tilde_T']:.1f}",
    ]


def ranking_to_tsv(entries: Iterable[RankedEntry]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(("rank",) + TABLE_COLUMNS)
    for e in entries:
        writer.writerow([e.rank] + _display(summary_row(e)))
    return buf.getvalue()


def ranking_to_table(entries: Iterable[RankedEntry]) -> str:
    rows = [["rank", *TABLE_COLUMNS]]
    for e in entries:
        rows.append([f"{e.rank}{'=' if e.tied else ''}", *_display(summary_row(e))])
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        cells = [r[0].rjust(widths[0]), r[1].ljust(widths[1])]
        cells += [c.rjust(w) for c, w in zip(r[2:], widths[2:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def ranking_to_json(entries: Iterable[RankedEntry]) -> str:
    return json.dumps([summary_row(e) for e in entries], indent=2) + "\n"
