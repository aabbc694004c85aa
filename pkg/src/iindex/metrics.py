"""Per-author citation metrics: N_c, h-index, credit share, I-index and C-index.

Credit share and the I-index are accumulated in exact rational arithmetic and
rounded to float once, so scale invariance and equality comparisons between
corpora hold bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any

from .records import AuthorCorpus, effective_share_divisor


class UndefinedMetricError(ValueError):
    """Raised when a metric has no defined value (e.g. I-index with zero citations)."""


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class MetricReport:
    n_c: int
    h: int
    c_share: float
    i_index: float | None
    c_index: float | None
    n_p: int | None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MetricReport":
        return cls(
            n_c=int(d["n_c"]),
            h=int(d["h"]),
            c_share=float(d["c_share"]),
            i_index=None if d.get("i_index") is None else float(d["i_index"]),
            c_index=None if d.get("c_index") is None else float(d["c_index"]),
            n_p=None if d.get("n_p") is None else int(d["n_p"]),
        )


@dataclass(frozen=True)
class TimeModelParams:
    """N_c(t) = a1*t + a2*t**2 and C_share(t) = b1*t + b2*t**2."""

    a1: float
    a2: float
    b1: float
    b2: float
    t: float

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")
        if self.a1 + self.a2 <= 0:
            raise DomainError("a1 + a2 must be positive")
        if self.b1 > self.a1 or self.b2 > self.a2:
            raise DomainError("share growth (b1, b2) cannot exceed citation growth (a1, a2)")
        if not self.t > 0:
            raise DomainError("t must be positive")


def total_citations(corpus: AuthorCorpus) -> int:
    return sum(p.citations for p in corpus.publications)


def h_index(corpus: AuthorCorpus) -> int:
    """Largest h such that at least h publications have >= h citations."""
    counts = sorted((p.citations for p in corpus.publications), reverse=True)
    h = 0
    for rank, c in enumerate(counts, start=1):
        if c >= rank:
            h = rank
        else:
            break
    return h


def credit_share_exact(corpus: AuthorCorpus) -> Fraction:
    return sum((Fraction(p.citations, effective_share_divisor(p)) for p in corpus.publications), Fraction(0))


def credit_share(corpus: AuthorCorpus) -> float:
    """Sum of citations_i / divisor_i: the author's citations under equal splitting."""
    return float(credit_share_exact(corpus))


def i_index_exact(corpus: AuthorCorpus) -> Fraction:
    n_c = total_citations(corpus)
    if n_c == 0:
        raise UndefinedMetricError("I-index is undefined when total citations are zero")
    return 100 * credit_share_exact(corpus) / n_c


def i_index(corpus: AuthorCorpus) -> float:
    """Percentage of the corpus' citations credited to the author, in (0, 100]."""
    return float(i_index_exact(corpus))


def c_index(corpus: AuthorCorpus) -> float:
    return float(100 - i_index_exact(corpus))


def nc_min_bound(h: int) -> int:
    """Smallest total citation count compatible with an h-index of ``h``."""
    if h < 0:
        raise DomainError("h must be non-negative")
    return h * h


def h_max_bound(n_c: int, n_p: int) -> int:
    """Largest h-index attainable with ``n_c`` citations spread over ``n_p`` papers."""
    if n_c < 0 or n_p < 0:
        raise DomainError("n_c and n_p must be non-negative")
    root = math.isqrt(n_c)
    return root if n_p >= root else n_p


def i_time_model(params: TimeModelParams) -> float:
    denom = params.a2 + params.a1 / params.t
    if denom == 0:
        raise DomainError("a2 + a1/t must be non-zero")
    return 100.0 * (params.b2 + params.b1 / params.t) / denom


def hirsch_g1(c_over_p: float) -> float:
    """Proportionality constant in N_c ~ g1*h**2 for the linear citation-growth model.

    ``c_over_p`` is citations gained per paper per year over papers published per year.
    """
    if not c_over_p > 0:
        raise DomainError("c/p must be positive")
    return (1.0 + c_over_p) ** 2 / (2.0 * c_over_p)


def compute_report(corpus: AuthorCorpus) -> MetricReport:
    n_c = total_citations(corpus)
    if n_c > 0:
        i_exact = i_index_exact(corpus)
        i_val, c_val = float(i_exact), float(100 - i_exact)
    else:
        i_val = c_val = None
    return MetricReport(
        n_c=n_c,
        h=h_index(corpus),
        c_share=credit_share(corpus),
        i_index=i_val,
        c_index=c_val,
        n_p=len(corpus.publications),
    )


@dataclass(frozen=True)
class BoundCheck:
    name: str
    passed: bool | None  # None: not applicable
    detail: str


def check_bounds(report: MetricReport) -> list[BoundCheck]:
    """Check the relations every consistent report must satisfy."""
    checks = []
    checks.append(BoundCheck(
        "h^2 <= N_c",
        report.h * report.h <= report.n_c,
        f"h^2={report.h * report.h}, N_c={report.n_c}",
    ))
    if report.n_p is not None:
        h_max = h_max_bound(report.n_c, report.n_p)
        checks.append(BoundCheck("h <= h_max", report.h <= h_max, f"h={report.h}, h_max={h_max}"))
    else:
        h_max = math.isqrt(report.n_c)
        checks.append(BoundCheck(
            "h <= floor(sqrt(N_c))", report.h <= h_max, f"h={report.h}, h_max={h_max} (N_p unknown)"
        ))
    if report.i_index is None:
        checks.append(BoundCheck("0 < I <= 100", None if report.n_c == 0 else False, "I undefined"))
    else:
        checks.append(BoundCheck("0 < I <= 100", 0 < report.i_index <= 100, f"I={report.i_index:.2f}"))
    checks.append(BoundCheck(
        "C_share <= N_c", report.c_share <= report.n_c, f"C_share={report.c_share:.2f}, N_c={report.n_c}"
    ))
    return checks
