"""
Batch command line: `python -m app.cli <subcommand> [flags]`.

Data goes to standard output (or --output), diagnostics to standard error.
Exit codes: 0 ok, 2 config error, 3 data error, 4 threshold failure.
"""
import argparse
import io
import json
import logging
import sys
from collections import Counter
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Set, TextIO, Tuple

from tqdm import tqdm

from app.config import PipelineConfig, settings
from app.log import configure_logging
from app.models.conjugation import CELLS, ConjugationTable
from app.models.errors import KatsuyoError, ThresholdError
from app.models.lexicon import LemmaLexicon
from app.models.morpheme import AnalyzedSentence
from app.models.report import DecodeReport, RoundtripReport, flatten_metrics
from app.models.run import Subcommand
from app.models.token import Placement, Scheme
from app.models.vocab import CoverageReport, SchemeSummary
from app.services import run_service
from app.services.bpe import initial_alphabet, learn_bpe, load_merges, word_counts, write_merges
from app.services.database import SessionLocal, init_db
from app.services.decode import build_lexicon, load_lexicon, write_lexicon
from app.services.encode import conj_token_inventory, factor_header, is_predicate, load_tag_map
from app.services.inflect import inflect_variants, load_table, paradigm, roundtrip_coverage
from app.services.ingest import filter_by_length, parse_corpus
from app.services.vocab import (
    build_vocab, compare_schemes, corpus_tokens, count_tokens, coverage, read_vocab, write_vocab,
)
from app.workers.worker import (
    WorkerResources, bpe_apply_batch, bpe_decode_batch, decode_batch, encode_batch,
    roundtrip_batch, run_ordered,
)

logger = logging.getLogger("app.cli")

EXIT_OK = 0
EXIT_CODES = {"config": 2, "data": 3, "threshold": 4}
TOKEN_SCHEMES = [s for s in Scheme if s.is_token_scheme]

Metrics = Dict[str, Any]


# --- I/O ---
@contextmanager
def open_input(path: Optional[Path]) -> Iterator[TextIO]:
    """UTF-8 with strict decoding; an invalid byte is a data error, never a replacement."""
    if path is not None:
        with open(path, encoding="utf-8", errors="strict") as f:
            yield f
        return
    buffer = getattr(sys.stdin, "buffer", None)
    yield io.TextIOWrapper(buffer, encoding="utf-8", errors="strict") if buffer else sys.stdin


@contextmanager
def open_output(path: Optional[Path]) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        yield f


def progress(lines: Iterable[str], desc: str) -> Iterable[str]:
    return tqdm(lines, desc=desc, unit=" lines", disable=not sys.stderr.isatty(), file=sys.stderr)


def write_report(path: Path, metrics: Metrics, config: PipelineConfig) -> None:
    flat = flatten_metrics({"config": config.to_log_dict(), **metrics})
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for key, value in flat.items():
            f.write(f"{key}={value}\n")


def _table(config: PipelineConfig) -> ConjugationTable:
    return load_table(config.table, config.lemma_endings, config.form_groups)


def _tag_map(config: PipelineConfig):
    return load_tag_map(config.tag_map) if config.tag_map else None


def _sentences(config: PipelineConfig, f: TextIO, stats: Optional[Counter] = None
               ) -> Iterator[AnalyzedSentence]:
    for s in filter_by_length(parse_corpus(progress(f, "parse")), config.max_length):
        if stats is not None:
            stats["sentences"] += 1
            stats["morphemes"] += len(s.morphemes)
            stats["predicates"] += sum(1 for m in s.morphemes if is_predicate(m))
        yield s


# --- SUBCOMMANDS ---
def cmd_encode(config: PipelineConfig, out: TextIO) -> Metrics:
    stats: Counter = Counter()
    shared = WorkerResources(scheme=config.scheme, tag_map=_tag_map(config))
    if config.scheme == Scheme.conj_feature:
        out.write(factor_header() + "\n")
    with open_input(config.input) as f:
        for line in run_ordered(encode_batch, _sentences(config, f, stats), shared,
                                config.threads, config.batch_size):
            out.write(line + "\n")
    logger.info("encoded %d sentences (%d predicates) with %s",
                stats["sentences"], stats["predicates"], config.scheme.value)
    return dict(stats)


def cmd_decode(config: PipelineConfig, out: TextIO) -> Metrics:
    table = _table(config)
    lex = load_lexicon(config.lexicon, table) if config.lexicon else LemmaLexicon()
    shared = WorkerResources(scheme=config.scheme, table=table, lexicon=lex,
                             tag_map=_tag_map(config))
    report = DecodeReport()
    with open_input(config.input) as f:
        for line, line_report in run_ordered(decode_batch, progress(f, "decode"), shared,
                                             config.threads, config.batch_size):
            out.write(line + "\n")
            report = report.merge(line_report)
    logger.info("decoded %d sentences: %d conjugations applied, %d fallbacks",
                report.sentences, report.conj_applied, report.fallbacks)
    return {**report.dict(), "fallbacks": report.fallbacks}


def cmd_lexicon(config: PipelineConfig, out: TextIO) -> Metrics:
    table = _table(config)
    with open_input(config.input) as f:
        lex = build_lexicon(_sentences(config, f), table)
    write_lexicon(lex, out)
    logger.info("lexicon: %d lemmas", len(lex))
    return {"lemmas": len(lex), "entries": sum(len(e) for e in lex.entries.values())}


def cmd_bpe_learn(config: PipelineConfig, out: TextIO) -> Metrics:
    with open_input(config.input) as f:
        counts = word_counts(progress(f, "count"), config.side)
    merges = learn_bpe(counts, config.num_merges)
    write_merges(merges, config.merges)
    logger.info("wrote %d merges to %s", len(merges), config.merges)
    return {"words": len(counts), "alphabet": len(initial_alphabet(counts)),
            "merges": len(merges), "requested_merges": config.num_merges}


def _bpe_lines(config: PipelineConfig, out: TextIO, fn: Callable, shared: WorkerResources) -> Metrics:
    lines = 0
    with open_input(config.input) as f:
        for line in run_ordered(fn, progress(f, config.subcommand.value), shared,
                                config.threads, config.batch_size):
            out.write(line + "\n")
            lines += 1
    return {"lines": lines}


def cmd_bpe_apply(config: PipelineConfig, out: TextIO) -> Metrics:
    shared = WorkerResources(merges=load_merges(config.merges), side=config.side)
    return _bpe_lines(config, out, bpe_apply_batch, shared)


def cmd_bpe_decode(config: PipelineConfig, out: TextIO) -> Metrics:
    merges = load_merges(config.merges) if config.merges else None
    return _bpe_lines(config, out, bpe_decode_batch, WorkerResources(merges=merges, side=config.side))


def cmd_vocab(config: PipelineConfig, out: TextIO) -> Metrics:
    with open_input(config.input) as f:
        counts = count_tokens(corpus_tokens(progress(f, "count"), config.scheme))
    v = build_vocab(counts, config.vocab_size, config.reserved)
    write_vocab(v, out)
    logger.info("vocabulary: %d of %d types kept", len(v), len(counts))
    return {"distinct_types": len(counts), "entries": len(v), "size_limit": v.size_limit}


def _print_coverage(reports: List[CoverageReport], out: TextIO) -> None:
    out.write(f"{'scheme':<14} {'types':>8} {'oov':>8} {'type_cov':>9} "
              f"{'tokens':>10} {'token_cov':>9} {'special':>8}\n")
    for r in reports:
        out.write(f"{r.scheme.value:<14} {r.distinct_types:>8} {r.oov_types:>8} "
                  f"{r.type_coverage:>9.4f} {r.running_tokens:>10} {r.token_coverage:>9.4f} "
                  f"{r.special_token_count:>8}\n")


def cmd_coverage(config: PipelineConfig, out: TextIO) -> Metrics:
    with open(config.vocab_file, encoding="utf-8") as f:
        v = read_vocab(f, config.vocab_size, config.reserved)
    with open_input(config.input) as f:
        counts = count_tokens(corpus_tokens(progress(f, "count"), config.scheme))
    report = coverage(v, counts, config.scheme)
    _print_coverage([report], out)
    return report.dict()


def _print_compare(summaries: List[SchemeSummary], out: TextIO) -> None:
    _print_coverage([s.coverage for s in summaries], out)
    out.write(f"\n{'scheme':<14} {'baseline':>9} {'encoded':>8} {'retained':>9} "
              f"{'reduced':>8} {'special':>8} {'pred_base':>9} {'pred_enc':>8} {'pred_red':>8}\n")
    for s in summaries:
        c = s.compression
        pred = (f"{c.predicate_baseline_types:>9} {c.predicate_encoded_types:>8} "
                f"{c.predicate_reduction:>8.4f}" if c.predicate_reduction is not None
                else f"{'-':>9} {'-':>8} {'-':>8}")
        out.write(f"{s.scheme.value:<14} {c.baseline_types:>9} {c.encoded_types:>8} "
                  f"{c.retained:>9.4f} {c.reduction:>8.4f} {c.special_types:>8} {pred}\n")


def cmd_compare(config: PipelineConfig, out: TextIO) -> Metrics:
    stats: Counter = Counter()
    inventory: Dict[str, Set[str]] = {}

    def tracked(sentences: Iterable[AnalyzedSentence]) -> Iterator[AnalyzedSentence]:
        for s in sentences:
            for pos, forms in conj_token_inventory([s]).items():
                inventory.setdefault(pos, set()).update(forms)
            yield s

    with open_input(config.input) as f:
        summaries = compare_schemes(tracked(_sentences(config, f, stats)),
                                    config.vocab_size, config.reserved)
    _print_compare(summaries, out)
    metrics: Metrics = {s.scheme.value: {"coverage": s.coverage.dict(exclude={"scheme"}),
                                         "compression": s.compression.dict()}
                        for s in summaries}
    metrics["conj_tokens"] = {pos: len(forms) for pos, forms in sorted(inventory.items())}
    metrics["sentences"] = stats["sentences"]
    return metrics


def _roundtrip_lexicon(config: PipelineConfig, table: ConjugationTable
                       ) -> Tuple[LemmaLexicon, Optional[List[AnalyzedSentence]]]:
    """The audit lexicon, plus the corpus itself when it had to be held in memory."""
    if config.lexicon:
        return load_lexicon(config.lexicon, table), None
    if config.input is not None:
        with open_input(config.input) as f:
            return build_lexicon(_sentences(config, f), table), None
    # stdin is read once, and the lexicon must see every sentence before the audit starts
    with open_input(None) as f:
        sentences = list(_sentences(config, f))
    return build_lexicon(sentences, table), sentences


def cmd_roundtrip(config: PipelineConfig, out: TextIO) -> Metrics:
    table = _table(config)
    lex, held = _roundtrip_lexicon(config, table)
    report = RoundtripReport(threshold=config.threshold,
                             sentences_restored={s.value: 0 for s in TOKEN_SCHEMES})
    shared = WorkerResources(schemes=TOKEN_SCHEMES, table=table, lexicon=lex)

    def audited(sentences: Iterable[AnalyzedSentence]) -> Iterator[AnalyzedSentence]:
        for s in sentences:
            roundtrip_coverage([s], table, report)
            report.sentences += 1
            yield s

    def audit(sentences: Iterable[AnalyzedSentence]) -> None:
        for flags in run_ordered(roundtrip_batch, audited(sentences), shared,
                                 config.threads, config.batch_size):
            for scheme, restored in zip(TOKEN_SCHEMES, flags):
                report.sentences_restored[scheme.value] += restored

    if held is not None:
        audit(held)
    else:
        with open_input(config.input) as f:
            audit(_sentences(config, f))

    out.write(f"inflection accuracy: {report.inflection_accuracy:.4f} "
              f"({report.predicates_restored}/{report.predicates} predicates)\n")
    for conj_type, cov in sorted(report.by_type.items()):
        out.write(f"  {conj_type:<16} {cov.restored:>7}/{cov.checked:<7} {cov.fraction:.4f}\n")
    for scheme in TOKEN_SCHEMES:
        out.write(f"sentence round trip {scheme.value:<14} {report.sentence_accuracy(scheme.value):.4f}\n")
    for conj_type, conj_form in report.missing_pairs:
        out.write(f"missing from table: ({conj_type}, {conj_form})\n")

    metrics: Metrics = {
        "inflection_accuracy": report.inflection_accuracy,
        "sentence_accuracy": {s.value: report.sentence_accuracy(s.value) for s in TOKEN_SCHEMES},
        **report.dict(exclude={"by_type"}),
        "by_type": {t: c.fraction for t, c in sorted(report.by_type.items())},
        "passed": report.passed,
    }
    if not report.passed:
        raise ThresholdError(f"round-trip accuracy below threshold {config.threshold}", metrics)
    return metrics


def cmd_inflect(config: PipelineConfig, out: TextIO) -> Metrics:
    table = _table(config)
    if config.conj_form:
        surfaces = inflect_variants(config.lemma, config.conj_type, config.conj_form, table)
        out.write(" ".join(surfaces) + "\n")
        return {"surfaces": surfaces}

    for conj_form, surface in paradigm(config.lemma, config.conj_type, table):
        out.write(f"{conj_form}\t{surface}\n")
    cells = {}
    for cell in CELLS:
        if table.cell_forms(config.conj_type, cell):
            cells[cell] = inflect_variants(config.lemma, config.conj_type, cell, table)
            out.write(f"{cell}\t{' '.join(cells[cell])}\n")
    return {"cells": cells}


COMMANDS: Dict[Subcommand, Callable[[PipelineConfig, TextIO], Metrics]] = {
    Subcommand.encode: cmd_encode,
    Subcommand.decode: cmd_decode,
    Subcommand.lexicon: cmd_lexicon,
    Subcommand.bpe_learn: cmd_bpe_learn,
    Subcommand.bpe_apply: cmd_bpe_apply,
    Subcommand.bpe_decode: cmd_bpe_decode,
    Subcommand.vocab: cmd_vocab,
    Subcommand.coverage: cmd_coverage,
    Subcommand.compare: cmd_compare,
    Subcommand.roundtrip: cmd_roundtrip,
    Subcommand.inflect: cmd_inflect,
}


def _execute(config: PipelineConfig) -> Metrics:
    with open_output(config.output) as out:
        try:
            metrics = COMMANDS[config.subcommand](config, out)
        except ThresholdError as e:
            if config.report is not None:
                write_report(config.report, e.metrics or {}, config)
            raise
    if config.report is not None:
        write_report(config.report, metrics, config)
    return metrics


def run(subcommand: Subcommand, config: PipelineConfig) -> Metrics:
    """Run one subcommand, recording it in the run ledger when asked to."""
    logger.info("resolved config: %s",
                json.dumps(config.to_log_dict(), ensure_ascii=False, sort_keys=True))
    if not config.record:
        return _execute(config)

    init_db()
    db = SessionLocal()
    try:
        record = run_service.create_run(db, subcommand, config.to_log_dict())
        run_service.start_run(db, record)
        try:
            metrics = _execute(config)
        except Exception as e:
            run_service.fail_run(db, record, str(e), getattr(e, "metrics", None))
            raise
        run_service.complete_run(db, record, json.loads(json.dumps(metrics, default=str)))
        logger.info("recorded run %s", record.run_id)
        return metrics
    finally:
        db.close()


# --- ARGUMENTS ---
def _reserved(value: str) -> List[str]:
    return [token for token in value.split(",") if token]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML file of defaults; flags win")
    common.add_argument("--input", type=Path, help="input file (default: stdin)")
    common.add_argument("--output", type=Path, help="output file (default: stdout)")
    common.add_argument("--report", type=Path, help="write key=value metrics here")
    common.add_argument("--threads", type=int)
    common.add_argument("--batch-size", type=int)
    common.add_argument("--log-level")
    common.add_argument("--record", action="store_true", default=None,
                        help="store the run in the run ledger")

    tables = argparse.ArgumentParser(add_help=False)
    tables.add_argument("--table", type=Path, help="conjugation rule TSV")
    tables.add_argument("--lemma-endings", type=Path)
    tables.add_argument("--form-groups", type=Path)

    schemes = argparse.ArgumentParser(add_help=False)
    schemes.add_argument("--scheme", choices=[s.value for s in Scheme])
    schemes.add_argument("--placement", choices=[p.value for p in Placement])
    schemes.add_argument("--tag-map", type=Path, help="ASCII display names for special tokens")
    schemes.add_argument("--ascii-tags", action="store_true", default=None,
                         help="use the shipped ASCII tag map")

    sizes = argparse.ArgumentParser(add_help=False)
    sizes.add_argument("--vocab-size", type=int)
    sizes.add_argument("--reserved", type=_reserved, help="comma-separated reserved symbols")

    lengths = argparse.ArgumentParser(add_help=False)
    lengths.add_argument("--max-length", type=int, help="drop longer sentences (morphemes)")

    bpe = argparse.ArgumentParser(add_help=False)
    bpe.add_argument("--side", choices=["mono", "ja", "en", "both"])

    parser = argparse.ArgumentParser(prog="katsuyo", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sub.add_parser("encode", parents=[common, schemes, lengths], help="MeCab output -> token stream")
    decode = sub.add_parser("decode", parents=[common, tables, schemes],
                            help="token stream -> surfaces")
    decode.add_argument("--lexicon", type=Path)
    sub.add_parser("lexicon", parents=[common, tables, lengths], help="build the lemma lexicon")
    learn = sub.add_parser("bpe-learn", parents=[common, bpe], help="learn BPE merges")
    learn.add_argument("--merges", type=Path, required=True)
    learn.add_argument("--num-merges", type=int)
    apply = sub.add_parser("bpe-apply", parents=[common, bpe], help="segment text with merges")
    apply.add_argument("--merges", type=Path, required=True)
    undo = sub.add_parser("bpe-decode", parents=[common, bpe], help="join BPE subwords")
    undo.add_argument("--merges", type=Path)
    sub.add_parser("vocab", parents=[common, schemes, sizes], help="top-k vocabulary file")
    cover = sub.add_parser("coverage", parents=[common, schemes, sizes],
                           help="in-vocabulary rate of an encoded corpus")
    cover.add_argument("--vocab-file", type=Path, required=True)
    sub.add_parser("compare", parents=[common, sizes, lengths],
                   help="coverage and compression of every scheme")
    roundtrip = sub.add_parser("roundtrip", parents=[common, tables, lengths],
                               help="restoration audit over an analyzed corpus")
    roundtrip.add_argument("--lexicon", type=Path)
    roundtrip.add_argument("--threshold", type=float)
    inflect = sub.add_parser("inflect", parents=[common, tables], help="print a paradigm")
    inflect.add_argument("--lemma", required=True)
    inflect.add_argument("--conj-type", required=True)
    inflect.add_argument("--conj-form", help="analyzer form key or table cell name")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("subcommand", "config")}
    configure_logging(settings.log_level)
    subcommand = Subcommand(args.subcommand)
    try:
        config = PipelineConfig.resolve(subcommand, flags, args.config)
        configure_logging(config.log_level)
        run(subcommand, config)
    except KatsuyoError as e:
        print(f"error[{e.category}]: {e}", file=sys.stderr)
        return EXIT_CODES.get(e.category, 1)
    except UnicodeDecodeError as e:
        print(f"error[data]: input is not valid UTF-8: {e}", file=sys.stderr)
        return EXIT_CODES["data"]
    except OSError as e:
        print(f"error[config]: {e}", file=sys.stderr)
        return EXIT_CODES["config"]
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
