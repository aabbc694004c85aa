"""Command line front end: ``iindex {compute,rank,simulate,validate}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .metrics import (
    DomainError,
    MetricReport,
    UndefinedMetricError,
    check_bounds,
    compute_report,
    h_max_bound,
)
from .ranking import (
    SPAN_MODES,
    AuthorSummary,
    RankingKey,
    career_span,
    h_tilde,
    h_tilde_t,
    rank_by_h_tilde,
    rank_lexicographic,
    ranking_to_json,
    ranking_to_table,
    ranking_to_tsv,
    summarize,
    summary_from_row,
)
from .records import (
    AuthorCorpus,
    RecordError,
    corpus_digest,
    corpus_from_json_value,
    filter_usable,
    parse_corpus,
)
from .stochastics import NoiseSpec, simulate_i_distribution

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3
OUTPUT_FORMATS = ("table", "json", "tsv")
SPAN_FLAGS = {"last": "to_last_publication", "collection": "to_collection_date"}

log = logging.getLogger("iindex")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    inputs: list[str]
    output_format: str = "table"
    input_format: str | None = None
    seed: int = 0
    trials: int = 10_000
    ranking_key: str | None = None
    epsilon_h: float = 0.0
    span_mode: str = "to_last_publication"
    x_bar: float = 10.0
    workers: int = 1
    bins: int = 30
    collection_year: int | None = None
    extra: dict[str, Any] = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iindex", description="Citation triplet (N_c, h, I) and derived indices.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p, many=False):
        p.add_argument(
            "--input", "-i", action="append", required=True,
            help="corpus file, directory (rank only) or '-' for stdin" + (" (repeatable)" if many else ""),
        )
        p.add_argument("--input-format", choices=("csv", "json"), help="default: from file extension, csv for stdin")
        p.add_argument("--format", choices=OUTPUT_FORMATS, default="table", help="output format")
        p.add_argument("--collection-year", type=int, help="override the corpus data-collection year")

    def span(p):
        p.add_argument("--span-mode", choices=sorted(SPAN_FLAGS), default="last",
                       help="career span end: last publication or data-collection year")

    p = sub.add_parser("compute", help="metrics for one author")
    common(p)
    span(p)

    p = sub.add_parser("rank", help="rank several authors")
    common(p, many=True)
    span(p)
    p.add_argument("--by", default="htilde", help="comma-separated keys from h,I,Nc,htilde,htildeT (suffix :asc)")
    p.add_argument("--epsilon-h", type=float, default=0.0, help="h values this close count as tied")

    p = sub.add_parser("simulate", help="Monte Carlo distribution of the I-function")
    common(p)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--xbar", type=float, default=10.0, help="relative credit spread in percent (0-20)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--bins", type=int, default=30)

    p = sub.add_parser("validate", help="check bound relations of a corpus or a report file")
    common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> CliConfig:
    cfg = CliConfig(
        subcommand=args.subcommand,
        inputs=list(args.input),
        output_format=args.format,
        input_format=args.input_format,
        collection_year=args.collection_year,
    )
    if hasattr(args, "span_mode"):
        cfg.span_mode = SPAN_FLAGS[args.span_mode]
    if args.subcommand == "rank":
        cfg.ranking_key = args.by
        cfg.epsilon_h = args.epsilon_h
        if cfg.epsilon_h < 0:
            raise UsageError("--epsilon-h must be non-negative")
    if args.subcommand == "simulate":
        cfg.trials, cfg.seed, cfg.x_bar = args.trials, args.seed, args.xbar
        cfg.workers, cfg.bins = args.workers, args.bins
        if cfg.trials < 1:
            raise UsageError("--trials must be >= 1")
        if cfg.workers < 1 or cfg.bins < 1:
            raise UsageError("--workers and --bins must be >= 1")
        if not 0 <= cfg.x_bar <= 20:
            raise UsageError("--xbar must lie in [0, 20]")
    if args.subcommand != "rank" and len(cfg.inputs) != 1:
        raise UsageError(f"{args.subcommand} takes exactly one --input")
    return cfg


# -- input -------------------------------------------------------------------------


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None


def _format_for(path: str, override: str | None) -> str:
    if override:
        return override
    suffix = Path(path).suffix.lower()
    if suffix in (".json", ".csv"):
        return suffix[1:]
    if path == "-":
        return "csv"
    raise UsageError(f"{path}: cannot infer input format, pass --input-format")


def _author_for(path: str) -> str:
    return "stdin" if path == "-" else Path(path).stem


def _with_collection(corpus: AuthorCorpus, year: int | None) -> AuthorCorpus:
    if year is None:
        return corpus
    return AuthorCorpus(corpus.author_id, corpus.publications, year)


def load_corpus(path: str, cfg: CliConfig) -> AuthorCorpus:
    fmt = _format_for(path, cfg.input_format)
    corpus = parse_corpus(_read(path), fmt, author_id=_author_for(path))
    if not corpus.author_id:
        corpus = AuthorCorpus(_author_for(path), corpus.publications, corpus.collection_date)
    return _with_collection(corpus, cfg.collection_year)


def load_rank_inputs(cfg: CliConfig) -> tuple[list[AuthorCorpus], list[AuthorSummary]]:
    """Corpora and precomputed summaries from files, directories and keyed JSON."""
    corpora: list[AuthorCorpus] = []
    summaries: list[AuthorSummary] = []
    for path in cfg.inputs:
        if path != "-" and Path(path).is_dir():
            files = sorted(p for p in Path(path).iterdir() if p.suffix.lower() in (".csv", ".json"))
            if not files:
                raise DataError(f"{path}: no .csv or .json files")
            for f in files:
                corpora.append(load_corpus(str(f), cfg))
            continue
        fmt = _format_for(path, cfg.input_format)
        if fmt == "csv":
            corpora.append(load_corpus(path, cfg))
            continue
        try:
            value = json.loads(_read(path).decode("utf-8-sig"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise DataError(f"{path}: invalid JSON ({exc})") from None
        if isinstance(value, list) and value and isinstance(value[0], dict) and "N_c" in value[0]:
            summaries.extend(summary_from_row(row) for row in value)
        elif isinstance(value, dict) and "publications" not in value:
            for author, item in value.items():
                corpus = corpus_from_json_value(item, author_id=author)
                corpora.append(_with_collection(AuthorCorpus(author, corpus.publications, corpus.collection_date),
                                                cfg.collection_year))
        else:
            corpus = corpus_from_json_value(value, author_id=_author_for(path))
            corpora.append(_with_collection(corpus, cfg.collection_year))
    return corpora, summaries


def _usable(corpus: AuthorCorpus) -> AuthorCorpus:
    usable, removed = filter_usable(corpus)
    if removed:
        log.warning("%s: %d work%s ignored (author information missing)",
                    corpus.author_id, removed, "" if removed == 1 else "s")
    return usable


# -- subcommands ---------------------------------------------------------------------


def _fmt(value: float | None, digits: int = 2) -> str:
    return "N/A" if value is None else f"{value:.{digits}f}"


def cmd_compute(cfg: CliConfig, out) -> int:
    corpus = load_corpus(cfg.inputs[0], cfg)
    usable, removed = filter_usable(corpus)
    if not usable.publications:
        raise DataError("no publications")
    report = compute_report(usable)
    ht = ht_t = t = None
    if report.i_index is not None:
        ht = h_tilde(report.h, report.i_index)
        t = career_span(usable, cfg.span_mode)
        ht_t = h_tilde_t(ht, t)
    payload = {
        "author": usable.author_id,
        **report.to_dict(),
        "h_tilde": ht,
        "T": t,
        "h_tilde_t": ht_t,
        "ignored": removed,
    }
    if cfg.output_format == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_OK
    rows = [
        ("author", usable.author_id),
        ("N_c", str(report.n_c)),
        ("h", str(report.h)),
        ("C_share", _fmt(report.c_share)),
        ("I", _fmt(report.i_index)),
        ("C", _fmt(report.c_index)),
        ("h_tilde", _fmt(ht)),
        ("T", "N/A" if t is None else str(t)),
        ("h_tilde_T", _fmt(ht_t, 1)),
    ]
    sep = "\t" if cfg.output_format == "tsv" else "  "
    width = 0 if cfg.output_format == "tsv" else max(len(k) for k, _ in rows)
    for k, v in rows:
        out.write(f"{k.ljust(width)}{sep}{v}\n")
    if removed:
        out.write(f"note: {removed} work{'' if removed == 1 else 's'} ignored (author information missing)\n")
    return EXIT_OK


def cmd_rank(cfg: CliConfig, out) -> int:
    corpora, summaries = load_rank_inputs(cfg)
    for corpus in corpora:
        usable = _usable(corpus)
        if not usable.publications:
            raise DataError(f"{corpus.author_id}: no publications")
        summaries.append(summarize(usable, cfg.span_mode))
    if not summaries:
        raise DataError("no authors to rank")
    key = RankingKey.parse(cfg.ranking_key or "htilde")
    if key.metrics == ("h_tilde",) and cfg.epsilon_h == 0:
        entries = rank_by_h_tilde(summaries)
    else:
        entries = rank_lexicographic(summaries, key, {"h": cfg.epsilon_h})
    render = {"table": ranking_to_table, "tsv": ranking_to_tsv, "json": ranking_to_json}[cfg.output_format]
    out.write(render(entries))
    return EXIT_OK


def cmd_simulate(cfg: CliConfig, out) -> int:
    corpus = _usable(load_corpus(cfg.inputs[0], cfg))
    if not corpus.publications:
        raise DataError("no publications")
    noise = NoiseSpec(cfg.x_bar)
    result = simulate_i_distribution(corpus, noise, cfg.trials, cfg.seed, workers=cfg.workers, bins=cfg.bins)
    if cfg.output_format == "json":
        payload = {"corpus_digest": corpus_digest(corpus), "noise": noise.to_dict(), **result.to_dict()}
        out.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_OK
    sep = "\t" if cfg.output_format == "tsv" else "  "
    rows = [
        ("trials", str(result.trials)),
        ("seed", str(result.seed)),
        ("significant_papers", str(result.significant_papers)),
        ("n_bar", f"{result.n_bar:.4f}"),
        ("x_bar", f"{result.x_bar:.4f}"),
        ("mean_empirical", f"{result.empirical_mean:.4f}"),
        ("mean_predicted", f"{result.predicted_mean:.4f}"),
        ("sigma_empirical", f"{result.empirical_std:.4f}"),
        ("sigma_predicted", f"{result.predicted_sigma:.4f}"),
        ("skewness", _fmt(result.skewness, 4)),
        ("excess_kurtosis", _fmt(result.excess_kurtosis, 4)),
    ]
    width = 0 if cfg.output_format == "tsv" else max(len(k) for k, _ in rows)
    for k, v in rows:
        out.write(f"{k.ljust(width)}{sep}{v}\n")
    out.write("histogram\n")
    for center, count in result.histogram:
        out.write(f"{center:.4f}{sep}{count}\n")
    return EXIT_OK


def _load_validation_target(cfg: CliConfig) -> MetricReport:
    path = cfg.inputs[0]
    if _format_for(path, cfg.input_format) == "json":
        value = json.loads(_read(path).decode("utf-8-sig"))
        if isinstance(value, dict) and "n_c" in value:
            try:
                return MetricReport.from_dict(value)
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}: malformed report ({exc})") from None
    corpus = _usable(load_corpus(path, cfg))
    return compute_report(corpus)


def cmd_validate(cfg: CliConfig, out) -> int:
    report = _load_validation_target(cfg)
    checks = check_bounds(report)
    failed = [c for c in checks if c.passed is False]
    if cfg.output_format == "json":
        payload = {
            "report": report.to_dict(),
            "h_max": h_max_bound(report.n_c, report.n_p) if report.n_p is not None else None,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
            "ok": not failed,
        }
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        sep = "\t" if cfg.output_format == "tsv" else "  "
        for c in checks:
            status = "N/A" if c.passed is None else ("PASS" if c.passed else "FAIL")
            out.write(f"{status}{sep}{c.name}{sep}{c.detail}\n")
    return EXIT_INVARIANT if failed else EXIT_OK


COMMANDS = {"compute": cmd_compute, "rank": cmd_rank, "simulate": cmd_simulate, "validate": cmd_validate}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.subcommand](cfg, out)
    except UsageError as exc:
        print(f"iindex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, RecordError, UndefinedMetricError, DomainError, ValueError) as exc:
        print(f"iindex: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
